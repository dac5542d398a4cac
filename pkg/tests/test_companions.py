import json

import pytest

from selmer_companions.companions import (
    CERTIFIED,
    DEGENERATE,
    INCONCLUSIVE,
    NOT_CERTIFIED,
    NOT_ISOGENOUS,
    TClass,
    companion_conditions,
    non_isogeny_check,
    sample_class,
    search_q,
    table1_class,
    verify_table1,
)
from selmer_companions.curves import WeierstrassCurve, quadratic_twist
from selmer_companions.hessian import family_E, family_H, hessian_curve
from selmer_companions.localred import conductor, tate_algorithm
from selmer_companions.modpoly import MissingLevelsError, ModPolyStore


def pair(q, t):
    return family_E(q, t), family_H(q, t)


def test_companion_examples():
    rep = companion_conditions(*pair(8, 1))
    assert rep.verdict == CERTIFIED
    assert rep.bad_primes_E == rep.bad_primes_H
    assert companion_conditions(*pair(12, 0)).verdict == DEGENERATE
    E, H = pair(1, 1)
    rep = companion_conditions(E, quadratic_twist(H, 5))
    assert rep.verdict == NOT_CERTIFIED
    assert not rep.hessian_identity


def test_report_is_json_tree():
    rep = companion_conditions(*pair(5, 1))
    tree = json.loads(json.dumps(rep.to_dict()))
    assert tree["verdict"] == CERTIFIED
    assert set(tree) >= {"hessian_identity", "pot_mult_at_3", "bad_primes_equal", "pot_mult_primes_equal", "kodaira_ok"}
    assert tree["kodaira_ok"]["types"]["2"] == {"E": "I0*", "H": "I0*"}


def test_swap_keeps_local_checks():
    for q, t in ((8, 1), (5, 1), (3, 7), (1, 17)):
        E, H = pair(q, t)
        a, b = companion_conditions(E, H), companion_conditions(H, E)
        for name in ("bad_primes_equal", "pot_mult_primes_equal", "kodaira_ok"):
            assert getattr(a, name) == getattr(b, name)


def test_forbidden_type_fails():
    # v_5(disc) = 4 and v_5(j) = 2: potentially good with type IV at 5
    E = WeierstrassCurve(0, 0, 0, 25, 25)
    rep = companion_conditions(E, hessian_curve(E))
    assert rep.hessian_identity
    assert rep.kodaira_types[5][0] == "IV"
    assert not rep.kodaira_ok and rep.verdict == NOT_CERTIFIED


def test_non_isogeny_examples(store):
    assert non_isogeny_check(*pair(5, 1), store).verdict == NOT_ISOGENOUS
    rep = non_isogeny_check(*pair(1, 1), store)
    assert rep.verdict.startswith("isogenous-witness(")
    assert rep.witness_levels
    E = WeierstrassCurve(0, 0, 0, -1, 0)
    rep = non_isogeny_check(E, quadratic_twist(E, 3), store)
    assert not rep.cm_excluded and rep.verdict != NOT_ISOGENOUS
    E = WeierstrassCurve(0, -1, 1, 0, 0)  # j = -4096/11, not integral
    F = WeierstrassCurve(0, 0, 0, 0, 1)  # j = 0
    assert non_isogeny_check(E, F, store).verdict == INCONCLUSIVE


def test_non_isogeny_missing_data(tmp_path):
    with pytest.raises(MissingLevelsError) as err:
        non_isogeny_check(*pair(5, 1), ModPolyStore(tmp_path))
    assert err.value.levels == [2, 4, 6, 8, 10, 12, 14, 16, 18]


def test_tabulated_classes():
    assert table1_class(5) == TClass(1, 8)
    assert table1_class(-15) == TClass(1, 8)
    assert table1_class(21) == TClass(1, 8)
    assert table1_class(7) == TClass(3, 4)
    assert table1_class(10) == TClass(0, 1)
    with pytest.raises(ValueError, match="search_q"):
        table1_class(4)


def test_verify_table1_examples(store):
    recs = verify_table1(3, range(3, 100), store)
    assert [r.t for r in recs] == list(range(3, 100, 4))
    assert all(r.companion.verdict == CERTIFIED and r.isogeny.verdict == NOT_ISOGENOUS for r in recs)

    recs = verify_table1(1, range(1, 98), store)
    assert all(r.companion.verdict == CERTIFIED for r in recs)
    flagged = [r.t for r in recs if not r.isogeny.certified]
    assert flagged == [1, 9]
    assert all(r.exceptional for r in recs if r.t in (1, 9))
    assert all(r.ok for r in recs)

    recs = verify_table1(12, range(-5, 6))
    zero = [r for r in recs if r.t == 0][0]
    assert zero.singular and zero.companion.verdict == DEGENERATE
    assert all(r.companion.verdict == CERTIFIED for r in recs if r.t != 0)


def test_verify_table1_parallel_matches(store):
    a = verify_table1(7, range(-20, 20), store, jobs=1)
    b = verify_table1(7, range(-20, 20), store, jobs=2)
    assert [r.to_dict() for r in a] == [r.to_dict() for r in b]


def test_kodaira_at_two_by_class():
    for t in sample_class(TClass(3, 4), 25):
        for q in (3, 7, 11):
            types = (str(tate_algorithm(family_E(q, t), 2).kodaira), str(tate_algorithm(family_H(q, t), 2).kodaira))
            assert types == ("III", "III*")
    for t in sample_class(TClass(0, 1), 25):
        if t:
            kE, kH = tate_algorithm(family_E(12, t), 2).kodaira, tate_algorithm(family_H(12, t), 2).kodaira
            assert kE.tag == kH.tag == "In*"


def test_conductors_match():
    for q, t in ((8, 1), (5, 9), (3, 7), (-15, 1), (12, 2)):
        assert conductor(family_E(q, t)) == conductor(family_H(q, t))


def test_search_examples():
    ev = {(e.q, e.residue): e for e in search_q([5], 8, samples_per_class=10)}
    assert ev[(5, 1)].passing
    assert not ev[(5, 0)].passing and ev[(5, 0)].failures
    ev = {(e.q, e.residue): e for e in search_q([7], 4, samples_per_class=10)}
    assert ev[(7, 3)].passing
    ev = search_q([9], 2, samples_per_class=5)
    assert all(e.degenerate == e.samples and not e.passing for e in ev)
    assert search_q([], 8) == []
    assert "not a proof" in ev[0].to_dict()["label"]
    with pytest.raises(ValueError):
        search_q([5], 0)
