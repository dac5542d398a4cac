import hashlib
import io
import random
import shutil
from fractions import Fraction

import pytest

from selmer_companions.exactmath import IntPoly
from selmer_companions.hessian import family_E, family_H
from selmer_companions.modpoly import (
    EVEN_KENKU_LEVELS,
    DegenerateFamilyError,
    MissingLevelsError,
    ModPolyParseError,
    ModPolyStore,
    eval_modpoly,
    family_isogeny_poly,
    family_j_functions,
    find_exceptional_t,
    load_modpoly,
    psi,
)

P = 2**61 - 1


def j_times_q(prec: int) -> list[int]:
    """Coefficients of q*j(q) mod P, from E4^3 / prod (1 - q^n)^24."""
    e4 = [1] + [240 * sum(d**3 for d in range(1, n + 1) if n % d == 0) for n in range(1, prec)]
    num = mul(mul(e4, e4, prec), e4, prec)
    # prod (1 - q^n) from the pentagonal number theorem, then its 24th power
    eta = [0] * prec
    for k in range(-prec, prec + 1):
        m = k * (3 * k - 1) // 2
        if 0 <= m < prec:
            eta[m] = P - 1 if k % 2 else 1
    e2 = mul(eta, eta, prec)
    e8 = mul(mul(e2, e2, prec), mul(e2, e2, prec), prec)
    eta24 = mul(mul(e8, e8, prec), e8, prec)
    return mul(num, inverse(eta24, prec), prec)


def mul(a, b, prec):
    out = [0] * prec
    for i, x in enumerate(a[:prec]):
        if x:
            for k, y in enumerate(b[: prec - i]):
                out[i + k] = (out[i + k] + x * y) % P
    return out


def inverse(a, prec):
    inv0 = pow(a[0], -1, P)
    out = [0] * prec
    out[0] = inv0
    for n in range(1, prec):
        s = sum(a[k] * out[n - k] for k in range(1, n + 1)) % P
        out[n] = (-s * inv0) % P
    return out


@pytest.mark.parametrize("level", EVEN_KENKU_LEVELS + (3,))
def test_data_vanishes_on_j_pairs(store, level):
    """q^(psi(N+1)) Phi_N(j(q), j(q^N)) must vanish as a power series."""
    phi = store.get(level) if level != 3 else load_modpoly(3, store.directory / "phi_j_3.txt")
    d = psi(level)
    prec = 25
    total = d + level * d + prec
    f = j_times_q(total)
    fN = [0] * total
    for i, c in enumerate(f):
        if i * level < total:
            fN[i * level] = c
    fp = [[1] + [0] * (total - 1)]
    fNp = [[1] + [0] * (total - 1)]
    for _ in range(d):
        fp.append(mul(fp[-1], f, total))
        fNp.append(mul(fNp[-1], fN, total))
    acc = [0] * total
    for (i, k), c in phi.terms().items():
        shift = (d - i) + level * (d - k)
        term = mul(fp[i], fNp[k], total - shift)
        for n, x in enumerate(term):
            acc[n + shift] = (acc[n + shift] + c * x) % P
    assert not any(acc[: d + level * d + prec - 1])


def test_level2_known(store):
    phi = store.get(2)
    assert phi.degree == psi(2) == 3
    assert phi.coefficient(2, 2) == -1
    assert phi.coefficient(2, 1) == phi.coefficient(1, 2) == 1488
    assert eval_modpoly(phi, 0, 0) == phi.coefficient(0, 0) == -157464000000000
    assert eval_modpoly(phi, 0, 54000) == 0
    expected = IntPoly([-54000, 1]) ** 3
    assert [phi.coefficient(0, k) for k in range(4)] == list(expected.coeffs)
    assert list(expected.coeffs) == [-157464000000000, 8748000000, -162000, 1]


def test_psi():
    assert [psi(n) for n in (2, 3, 4, 6, 8, 10, 12, 14, 16, 18)] == [3, 4, 6, 12, 12, 18, 24, 24, 24, 36]


def test_load_sources(store):
    path = store.path(2)
    raw = path.read_bytes()
    a = load_modpoly(2, path)
    assert load_modpoly(2, raw) == a
    assert load_modpoly(2, raw.decode()) == a
    assert load_modpoly(2, io.BytesIO(raw)) == a
    assert load_modpoly(2, io.StringIO(raw.decode())) == a


GOOD2 = "[3,0] 1\n[2,2] -1\n[2,1] 1488\n[2,0] -162000\n[1,1] 40773375\n[1,0] 8748000000\n[0,0] -157464000000000\n"


@pytest.mark.parametrize(
    "text,lineno",
    [
        (GOOD2 + "[0,1] 5\n", 8),
        (GOOD2 + "[1,0] 7\n", 8),
        (GOOD2.replace("[2,1] 1488", "[2,1] 14x8"), 3),
        (GOOD2.replace("[2,2] -1", "[2,2]"), 2),
    ],
)
def test_parse_errors_name_line(text, lineno):
    with pytest.raises(ModPolyParseError) as err:
        load_modpoly(2, text)
    assert err.value.lineno == lineno
    assert f"line {lineno}" in str(err.value)


def test_parse_structure_errors():
    load_modpoly(2, GOOD2)
    with pytest.raises(ModPolyParseError, match="degree"):
        load_modpoly(3, GOOD2)
    with pytest.raises(ModPolyParseError, match="not 1"):
        load_modpoly(2, GOOD2.replace("[3,0] 1", "[3,0] 2"))
    with pytest.raises(ModPolyParseError):
        load_modpoly(2, "")


def test_store_checks(tmp_path, data_dir):
    shutil.copy(data_dir / "phi_j_2.txt", tmp_path / "phi_j_2.txt")
    s = ModPolyStore(tmp_path)
    assert s.get(2).degree == 3
    with pytest.raises(MissingLevelsError) as err:
        s.require(EVEN_KENKU_LEVELS)
    assert err.value.levels == [4, 6, 8, 10, 12, 14, 16, 18]
    bad = (data_dir / "phi_j_2.txt").read_bytes()
    digest = hashlib.sha256(bad).hexdigest()
    (tmp_path / "MANIFEST").write_text(f"2 phi_j_2.txt {'0' * 64}\n")
    with pytest.raises(ModPolyParseError, match="checksum"):
        ModPolyStore(tmp_path).get(2)
    (tmp_path / "MANIFEST").write_text(f"2 phi_j_2.txt {digest}\n")
    assert ModPolyStore(tmp_path).get(2).degree == 3


def test_data_dir_resolution(monkeypatch, tmp_path, data_dir):
    monkeypatch.setenv("SELMER_DATA_DIR", str(data_dir))
    assert ModPolyStore().directory == data_dir
    assert ModPolyStore(tmp_path).directory == tmp_path
    monkeypatch.delenv("SELMER_DATA_DIR")
    monkeypatch.chdir(tmp_path)
    assert str(ModPolyStore().directory) == "data"


def random_rational(rng):
    return Fraction(rng.randint(-10**6, 10**6), rng.randint(1, 10**4))


@pytest.mark.parametrize("level", EVEN_KENKU_LEVELS)
def test_symmetry(store, level):
    rng = random.Random(level)
    phi = store.get(level)
    for _ in range(100):
        a, b = random_rational(rng), random_rational(rng)
        assert eval_modpoly(phi, a, b) == eval_modpoly(phi, b, a)


@pytest.mark.parametrize("level", EVEN_KENKU_LEVELS)
def test_family_poly_specializes(store, level):
    # Delta_H is a constant multiple of Delta_E, so the two j-denominators share
    # their roots and the stripped factor is a power of Delta_E(t)
    phi = store.get(level)
    q = 5
    F = family_isogeny_poly(phi, q)
    (nE, dE), (nH, dH) = family_j_functions(q)
    d = phi.degree
    rng = random.Random(level)
    samples = []
    for _ in range(10):
        t = rng.randint(-10**4, 10**4)
        jE, jH = Fraction(nE(t), dE(t)), Fraction(nH(t), dH(t))
        assert jE == family_E(q, t).j and jH == family_H(q, t).j
        cleared = eval_modpoly(phi, jE, jH) * dE(t) ** d * dH(t) ** d
        samples.append((cleared / F(t), dE(t)))
    (r0, d0), (r1, d1) = samples[:2]
    exps = [e for e in range(2 * d + 1) if r1 / r0 == Fraction(d1, d0) ** e]
    assert len(exps) == 1
    e = exps[0]
    assert len({r / Fraction(D) ** e for r, D in samples}) == 1


@pytest.mark.parametrize("level", EVEN_KENKU_LEVELS)
def test_family_poly_degree(store, level):
    # both j-numerators and denominators have degree <= 6 and 2 in t; measured degrees stay below 8 psi(N)
    for q in (1, 5, 8):
        assert family_isogeny_poly(store.get(level), q).degree <= 8 * psi(level)


def test_family_degenerate(store):
    for q in (0, 9):
        with pytest.raises(DegenerateFamilyError):
            family_isogeny_poly(store.get(2), q)


def test_exceptional_examples(store):
    s1 = find_exceptional_t(1, store, window=1000)
    assert s1.root_set() == {1, 9}
    assert s1.singular == []
    assert find_exceptional_t(3, store, window=1000).root_set() == {-1, 0}
    assert 0 in find_exceptional_t(8, store, window=1000).root_set()
    s12 = find_exceptional_t(12, store, window=1000)
    assert s12.singular == [0] and 0 not in s12.root_set()
    s5 = find_exceptional_t(5, store, window=1000)
    assert s5.roots == [] and "1000" in s5.caveat
    for n, t in s1.roots:
        assert family_isogeny_poly(store.get(n), 1)(t) == 0
        assert eval_modpoly(store.get(n), family_E(1, t).j, family_H(1, t).j) == 0
