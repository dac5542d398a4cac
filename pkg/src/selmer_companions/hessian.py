"""Hessian of a plane cubic, and the two-parameter families E_{q,t}, H_{q,t}.

A ternary cubic is kept as a sparse dict {(i, j, k): c} meaning c X^i Y^j Z^k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .curves import (
    SingularCurveError,
    WeierstrassCurve,
    invariants,
    is_isomorphic,
)


class DegenerateHessianError(ValueError):
    """The Hessian of a curve with j = 0 is a union of three lines."""


Form = dict  # {(i, j, k): Fraction}


def _clean(f: Form) -> Form:
    return {m: c for m, c in f.items() if c}


def _add(f: Form, g: Form, scale=1) -> Form:
    out = dict(f)
    for m, c in g.items():
        out[m] = out.get(m, 0) + scale * c
    return _clean(out)


def _mul(f: Form, g: Form) -> Form:
    out: Form = {}
    for (a, b, c), x in f.items():
        for (d, e, h), y in g.items():
            m = (a + d, b + e, c + h)
            out[m] = out.get(m, 0) + x * y
    return _clean(out)


def _diff(f: Form, var: int) -> Form:
    out: Form = {}
    for m, c in f.items():
        if m[var]:
            mm = list(m)
            mm[var] -= 1
            out[tuple(mm)] = out.get(tuple(mm), 0) + c * m[var]
    return _clean(out)


def _subst(f: Form, images: tuple[Form, Form, Form]) -> Form:
    """Replace X, Y, Z by the given linear forms."""
    out: Form = {}
    cache: dict = {}

    def power(var, e):
        key = (var, e)
        if key not in cache:
            acc = {(0, 0, 0): Fraction(1)}
            for _ in range(e):
                acc = _mul(acc, images[var])
            cache[key] = acc
        return cache[key]

    for (i, j, k), c in f.items():
        term = _mul(_mul(power(0, i), power(1, j)), power(2, k))
        out = _add(out, term, c)
    return out


def _evaluate(f: Form, point) -> Fraction:
    x, y, z = point
    return sum((c * x**i * y**j * z**k for (i, j, k), c in f.items()), Fraction(0))


@dataclass(frozen=True)
class TernaryCubic:
    coeffs: tuple  # sorted ((i, j, k), c) pairs with i + j + k == 3

    @classmethod
    def from_dict(cls, d: Form) -> "TernaryCubic":
        d = _clean({m: Fraction(c) for m, c in d.items()})
        for m in d:
            if sum(m) != 3 or min(m) < 0:
                raise ValueError(f"monomial {m} is not cubic")
        return cls(tuple(sorted(d.items(), reverse=True)))

    def as_dict(self) -> Form:
        return dict(self.coeffs)

    def __call__(self, x, y, z) -> Fraction:
        return _evaluate(self.as_dict(), (Fraction(x), Fraction(y), Fraction(z)))

    def coefficient(self, i: int, j: int, k: int) -> Fraction:
        return self.as_dict().get((i, j, k), Fraction(0))

    def normalized(self) -> "TernaryCubic":
        """Divide by the content so the coefficients are coprime integers."""
        d = self.as_dict()
        if not d:
            return self
        den = 1
        for c in d.values():
            den = den * c.denominator // math.gcd(den, c.denominator)
        ints = {m: int(c * den) for m, c in d.items()}
        g = 0
        for c in ints.values():
            g = math.gcd(g, c)
        return TernaryCubic.from_dict({m: Fraction(c, g) for m, c in ints.items()})


def to_ternary(E: WeierstrassCurve) -> TernaryCubic:
    a1, a2, a3, a4, a6 = E.ainvs
    return TernaryCubic.from_dict({
        (0, 2, 1): 1,
        (1, 1, 1): a1,
        (0, 1, 2): a3,
        (3, 0, 0): -1,
        (2, 0, 1): -a2,
        (1, 0, 2): -a4,
        (0, 0, 3): -a6,
    })


def hessian_cubic(F: TernaryCubic) -> TernaryCubic:
    """det of the matrix of second partials of F."""
    f = F.as_dict()
    first = [_diff(f, v) for v in range(3)]
    h = [[_diff(first[i], k) for k in range(3)] for i in range(3)]
    det = {}
    for (i, j, k), sign in (((0, 1, 2), 1), ((1, 2, 0), 1), ((2, 0, 1), 1),
                            ((0, 2, 1), -1), ((1, 0, 2), -1), ((2, 1, 0), -1)):
        det = _add(det, _mul(_mul(h[0][i], h[1][j]), h[2][k]), sign)
    return TernaryCubic.from_dict(det)


def weierstrass_from_cubic(G: TernaryCubic) -> WeierstrassCurve:
    """Weierstrass model of a cubic with a flex at (0:1:0).

    The tangent at (0:1:0) is moved to Z = 0 by a linear substitution fixing
    that point, then X and Y are rescaled to make the Y^2 Z and X^3
    coefficients match the Weierstrass shape.
    """
    g = G.as_dict()
    if _evaluate(g, (0, 1, 0)) != 0:
        raise ValueError("(0:1:0) is not on the cubic")
    grad = [_evaluate(_diff(g, v), (0, 1, 0)) for v in range(3)]
    lx, ly, lz = grad
    if ly != 0 or (lx == 0 and lz == 0):
        raise ValueError("(0:1:0) is a singular point of the cubic")
    X = {(1, 0, 0): Fraction(1)}
    Y = {(0, 1, 0): Fraction(1)}
    Z = {(0, 0, 1): Fraction(1)}
    if lz != 0:
        # new Z' = lx X + lz Z, i.e. Z = (Z' - lx X) / lz
        zimg = _clean({(0, 0, 1): 1 / lz, (1, 0, 0): -lx / lz})
        g = _subst(g, (X, Y, zimg))
    else:
        # tangent is X = 0: swap the roles of X and Z
        g = _subst(g, ({(0, 0, 1): Fraction(1)}, Y, {(1, 0, 0): 1 / lx}))
    for m in ((0, 3, 0), (1, 2, 0), (2, 1, 0)):
        if g.get(m, 0):
            raise ValueError("(0:1:0) is not a flex with tangent Z = 0")
    alpha = g.get((0, 2, 1), 0)
    delta = g.get((3, 0, 0), 0)
    if not alpha or not delta:
        raise ValueError("cubic is degenerate at (0:1:0)")
    # X = -alpha delta x, Y = alpha delta^2 y makes x^3 and y^2 z coefficients opposite
    g = _subst(g, ({(1, 0, 0): -alpha * delta}, {(0, 1, 0): alpha * delta**2}, Z))
    lead = g[(0, 2, 1)]
    g = {m: c / lead for m, c in g.items()}
    if g.get((3, 0, 0)) != -1:
        raise ArithmeticError("normalisation failed")
    return WeierstrassCurve(
        g.get((1, 1, 1), 0),
        -g.get((2, 0, 1), 0),
        g.get((0, 1, 2), 0),
        -g.get((1, 0, 2), 0),
        -g.get((0, 0, 3), 0),
    )


def hessian_curve(E: WeierstrassCurve) -> WeierstrassCurve:
    """A Weierstrass model of Hess(E), using the flex (0:1:0) shared by E and Hess(E)."""
    inv = invariants(E)
    if inv.disc == 0:
        raise SingularCurveError(f"{E} is singular")
    if inv.c4 == 0:
        raise DegenerateHessianError(f"j({E}) = 0: the Hessian is three lines")
    H = hessian_cubic(to_ternary(E)).normalized()
    return weierstrass_from_cubic(H)


# --------------------------------------------------------------------------
# the families


def family_E(q: int, t: int) -> WeierstrassCurve:
    """y^2 = x^3 + q^2 x^2 + 3 q^3 x + 3 q^6 t"""
    return WeierstrassCurve(0, q * q, 0, 3 * q**3, 3 * q**6 * t)


def family_H(q: int, t: int) -> WeierstrassCurve:
    """y^2 = x^3 + q(27 - 2q - 81qt) x^2 + q(q - 9)^3 x"""
    return WeierstrassCurve(0, q * (27 - 2 * q - 81 * q * t), 0, q * (q - 9) ** 3, 0)


def verify_family_identity(q: int, t: int) -> bool:
    """Is family_H(q, t) Q-isomorphic to the Hessian of family_E(q, t)?"""
    E, H = family_E(q, t), family_H(q, t)
    if H.is_singular():
        raise SingularCurveError(f"H_{{{q},{t}}} is singular")
    return is_isomorphic(hessian_curve(E), H) is not None


def disc_ratio_closed_form(q: int) -> Fraction:
    """Delta(H_{q,t}) / Delta(E_{q,t}) as a polynomial in 1/q (independent of t)."""
    x = Fraction(1, q)
    coeffs = (-27, 1458, -32805, 393660, -2657205, 9565938, -14348907)
    return sum((c * x**i for i, c in enumerate(coeffs)), Fraction(0))


def j_closed_form(q: int, t: int) -> Fraction:
    """j(E_{q,t}) from the closed numerator/denominator in q and t."""
    num = 4096 * q**3 - 110592 * q**2 + 995328 * q - 2985984
    den = -3888 * q**3 * t * t - 192 * q**3 * t + 2592 * q * q * t + 144 * q - 1728
    return Fraction(num, den)


def disc_over_q9(q: int, t: int) -> int:
    return -3888 * q**3 * t * t - 192 * q**3 * t + 2592 * q * q * t + 144 * q - 1728
