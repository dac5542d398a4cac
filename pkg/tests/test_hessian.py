import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from selmer_companions.curves import (
    ModelMap,
    SingularCurveError,
    WeierstrassCurve,
    invariants,
    is_isomorphic,
    transform,
)
from selmer_companions.hessian import (
    DegenerateHessianError,
    TernaryCubic,
    disc_over_q9,
    disc_ratio_closed_form,
    family_E,
    family_H,
    hessian_cubic,
    hessian_curve,
    j_closed_form,
    to_ternary,
    verify_family_identity,
)
from selmer_companions.localred import SPLIT, tate_algorithm

X, Y, Z, A4, A6 = sympy.symbols("X Y Z a4 a6")


def as_sympy(F: TernaryCubic):
    return sum(sympy.Rational(c.numerator, c.denominator) * X**i * Y**j * Z**k for (i, j, k), c in F.as_dict().items())


def sympy_hessian(expr):
    return sympy.Matrix(3, 3, lambda i, j: sympy.diff(expr, (X, Y, Z)[i], (X, Y, Z)[j])).det()


def tate_form_coefficients():
    """Hessian of y^2 + xy = x^3 + a4 x + a6 after Z -> Z - 12X, as RHS coefficients.

    Normalised so the Y^2 Z coefficient is 1; returns {x^3, x^2, x, 1} coefficients of
    the right-hand side of y^2 + xy = ... .
    """
    F = Y**2 * Z + X * Y * Z - X**3 - A4 * X * Z**2 - A6 * Z**3
    G = sympy.expand(sympy_hessian(F).subs(Z, Z - 12 * X))
    poly = sympy.Poly(G, X, Y, Z)
    lead = poly.coeff_monomial(Y**2 * Z)
    assert sympy.simplify(poly.coeff_monomial(X * Y * Z) / lead) == 1
    assert poly.coeff_monomial(Y**3) == 0 and poly.coeff_monomial(X * Y**2) == 0
    rhs = {m: sympy.factor(-poly.coeff_monomial(mono) / lead)
           for m, mono in (("x3", X**3), ("x2", X**2 * Z), ("x", X * Z**2), ("1", Z**3))}
    return rhs


TATE = tate_form_coefficients()


def test_to_ternary_examples():
    F = to_ternary(WeierstrassCurve(0, 0, 0, 0, 1))
    assert F.as_dict() == {(0, 2, 1): 1, (3, 0, 0): -1, (0, 0, 3): -1}
    E = WeierstrassCurve(0, -1, 1, -10, -20)
    F = to_ternary(E)
    assert F(0, 1, 0) == 0
    x, y = Fraction(5), Fraction(5)  # (5, 5) lies on 11a1
    assert F(x, y, 1) == 0


def test_hessian_of_triangle():
    H = hessian_cubic(TernaryCubic.from_dict({(1, 1, 1): 1}))
    assert H.as_dict() == {(1, 1, 1): 2}


def test_hessian_cubic_matches_sympy():
    rng = random.Random(7)
    for _ in range(10):
        E = WeierstrassCurve(*(rng.randint(-9, 9) for _ in range(5)))
        F = to_ternary(E)
        expected = sympy.expand(sympy_hessian(as_sympy(F)))
        assert sympy.expand(as_sympy(hessian_cubic(F)) - expected) == 0


def test_tate_model_hessian_stated_coefficients():
    # the x-coefficient and constant term of the transformed Hessian
    assert sympy.expand(TATE["x"] - (A4 - 144 * A4**2 + 72 * A6)) == 0
    assert sympy.expand(TATE["1"] - (4 * A4**2 - 3 * A6)) == 0
    # x^3 coefficient: -(3 + 288 a4 (24 a4 - 1))
    assert sympy.expand(TATE["x3"] + 3 + 288 * A4 * (24 * A4 - 1)) == 0


def test_tate_model_hessian_curve():
    # hessian_curve of a Tate model agrees with the transformed form up to a model map
    for a4, a6 in ((3, 9), (9, 27), (5, 25), (-2, 4)):
        E = WeierstrassCurve(1, 0, 0, a4, a6)
        c = {k: sympy.Rational(v.subs({A4: a4, A6: a6})) for k, v in TATE.items()}
        c3 = Fraction(int(c["x3"].p), int(c["x3"].q))
        c2, c1, c0 = (Fraction(int(c[k].p), int(c[k].q)) for k in ("x2", "x", "1"))
        # y^2 + xy = c3 x^3 + ... ; scale x, y by c3 to make it monic in x
        target = WeierstrassCurve(1, c2, 0, c1 * c3, c0 * c3**2)
        assert is_isomorphic(hessian_curve(E), target) is not None


def test_hessian_curve_errors():
    with pytest.raises(DegenerateHessianError):
        hessian_curve(WeierstrassCurve(0, 0, 0, 0, 1))
    with pytest.raises(SingularCurveError):
        hessian_curve(WeierstrassCurve(0, 0, 0, 0, 0))


small = st.integers(-12, 12)
curves = st.builds(WeierstrassCurve, small, small, small, small, small).filter(
    lambda E: not E.is_singular() and invariants(E).c4 != 0
)
maps = st.builds(ModelMap, st.integers(1, 3) | st.integers(-3, -1), small, small, small)


@settings(max_examples=200)
@given(curves, maps)
def test_hessian_model_independent(E, m):
    H = hessian_curve(E)
    assert not H.is_singular()
    assert is_isomorphic(hessian_curve(transform(E, m)), H) is not None


def test_family_examples():
    assert family_E(1, 1).ainvs == (0, 1, 0, 3, 3)
    assert family_E(12, 0).is_singular()
    E80 = family_E(8, 0)
    assert E80.ainvs == (0, 64, 0, 1536, 0) and not E80.is_singular()
    assert family_H(3, 1).ainvs == (0, -666, 0, -648, 0)
    assert family_H(9, 7).a4 == 0
    assert family_H(8, 0).ainvs == (0, 88, 0, -8, 0)


@pytest.mark.parametrize("q,t", [(3, 3), (8, 1), (1, 1)])
def test_family_identity_examples(q, t):
    assert verify_family_identity(q, t)


def sample_qt(n, bound, seed):
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        q, t = rng.randint(-bound, bound), rng.randint(-bound, bound)
        if q in (0, 9) or family_E(q, t).is_singular():
            continue
        out.append((q, t))
    return out


def test_family_identity_sampled():
    for q, t in sample_qt(60, 25, 1):
        assert verify_family_identity(q, t), (q, t)


def test_closed_forms_sampled():
    for q, t in sample_qt(100, 50, 2):
        E, H = family_E(q, t), family_H(q, t)
        dE, dH = invariants(E).disc, invariants(H).disc
        assert dH / dE == disc_ratio_closed_form(q)
        assert dH / dE == Fraction(-27 * (q - 9) ** 6, q**6)
        assert E.j == j_closed_form(q, t)
        assert dE == disc_over_q9(q, t) * q**9


def test_split_multiplicative_passes_to_hessian():
    seen = 0
    for q, t in sample_qt(80, 25, 3):
        E, H = family_E(q, t), family_H(q, t)
        for p in (3, 5, 7, 11, 13):
            if tate_algorithm(E, p).kind == SPLIT:
                seen += 1
                assert tate_algorithm(H, p).kind == SPLIT
    assert seen > 10
