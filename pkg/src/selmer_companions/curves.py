"""Weierstrass models over Q: invariants, coordinate changes, minimal models, twists."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .exactmath import IncompleteFactorization, as_fraction, factorize, valuation


class SingularCurveError(ValueError):
    pass


def _frac_tuple(values) -> tuple[Fraction, ...]:
    return tuple(as_fraction(v) for v in values)


@dataclass(frozen=True)
class WeierstrassCurve:
    """y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 with rational a_i.

    Singular models are allowed; operations that need smoothness check it.
    """

    a1: Fraction
    a2: Fraction
    a3: Fraction
    a4: Fraction
    a6: Fraction

    def __post_init__(self):
        for name in ("a1", "a2", "a3", "a4", "a6"):
            object.__setattr__(self, name, as_fraction(getattr(self, name)))

    @classmethod
    def from_list(cls, coeffs) -> "WeierstrassCurve":
        coeffs = list(coeffs)
        if len(coeffs) == 2:
            coeffs = [0, 0, 0, *coeffs]
        if len(coeffs) != 5:
            raise ValueError(f"expected 5 coefficients, got {len(coeffs)}")
        return cls(*coeffs)

    @classmethod
    def parse(cls, text: str) -> "WeierstrassCurve":
        """Parse ``[a1,a2,a3,a4,a6]`` (decimal integers or p/q fractions)."""
        body = text.strip()
        if not (body.startswith("[") and body.endswith("]")):
            raise ValueError(f"curve must look like [a1,a2,a3,a4,a6]: {text!r}")
        parts = [p for p in body[1:-1].split(",")]
        if len(parts) != 5:
            raise ValueError(f"expected 5 coefficients in {text!r}")
        return cls(*(Fraction(p.strip()) for p in parts))

    @property
    def ainvs(self) -> tuple[Fraction, ...]:
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    def __str__(self) -> str:
        return "[" + ",".join(str(a) for a in self.ainvs) + "]"

    def is_integral(self) -> bool:
        return all(a.denominator == 1 for a in self.ainvs)

    def invariants(self) -> "CurveInvariants":
        return invariants(self)

    @property
    def discriminant(self) -> Fraction:
        return invariants(self).disc

    def is_singular(self) -> bool:
        return invariants(self).disc == 0

    @property
    def j(self) -> Fraction:
        inv = invariants(self)
        if inv.j is None:
            raise SingularCurveError(f"{self} is singular")
        return inv.j


@dataclass(frozen=True)
class CurveInvariants:
    b2: Fraction
    b4: Fraction
    b6: Fraction
    b8: Fraction
    c4: Fraction
    c6: Fraction
    disc: Fraction
    j: Fraction | None  # None when disc == 0


def b_invariants(a1, a2, a3, a4, a6):
    """b2, b4, b6, b8 from a-invariants; works over any commutative ring."""
    b2 = a1 * a1 + 4 * a2
    b4 = 2 * a4 + a1 * a3
    b6 = a3 * a3 + 4 * a6
    b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
    return b2, b4, b6, b8


def c_invariants(b2, b4, b6, b8):
    c4 = b2 * b2 - 24 * b4
    c6 = -b2 * b2 * b2 + 36 * b2 * b4 - 216 * b6
    disc = -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6
    return c4, c6, disc


def invariants(E: WeierstrassCurve) -> CurveInvariants:
    b2, b4, b6, b8 = b_invariants(*E.ainvs)
    c4, c6, disc = c_invariants(b2, b4, b6, b8)
    j = c4**3 / disc if disc else None
    return CurveInvariants(b2, b4, b6, b8, c4, c6, disc, j)


@dataclass(frozen=True)
class ModelMap:
    """Change of coordinates x = u^2 x' + r, y = u^3 y' + s u^2 x' + t."""

    u: Fraction
    r: Fraction = Fraction(0)
    s: Fraction = Fraction(0)
    t: Fraction = Fraction(0)

    def __post_init__(self):
        for name in ("u", "r", "s", "t"):
            object.__setattr__(self, name, as_fraction(getattr(self, name)))
        if self.u == 0:
            raise ValueError("u must be nonzero")

    @classmethod
    def identity(cls) -> "ModelMap":
        return cls(Fraction(1))

    def is_identity(self) -> bool:
        return self.u == 1 and self.r == 0 and self.s == 0 and self.t == 0

    def compose(self, other: "ModelMap") -> "ModelMap":
        """The map that applies ``self`` first and then ``other``."""
        u1, r1, s1, t1 = self.u, self.r, self.s, self.t
        u2, r2, s2, t2 = other.u, other.r, other.s, other.t
        return ModelMap(
            u1 * u2,
            r1 + u1**2 * r2,
            s1 + u1 * s2,
            t1 + u1**2 * s1 * r2 + u1**3 * t2,
        )

    def inverse(self) -> "ModelMap":
        u, r, s, t = self.u, self.r, self.s, self.t
        return ModelMap(1 / u, -r / u**2, -s / u, (r * s - t) / u**3)


def transform(E: WeierstrassCurve, m: ModelMap) -> WeierstrassCurve:
    a1, a2, a3, a4, a6 = E.ainvs
    u, r, s, t = m.u, m.r, m.s, m.t
    return WeierstrassCurve(
        (a1 + 2 * s) / u,
        (a2 - s * a1 + 3 * r - s * s) / u**2,
        (a3 + r * a1 + 2 * t) / u**3,
        (a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t) / u**4,
        (a6 + r * a4 + r * r * a2 + r**3 - t * a3 - t * t - r * t * a1) / u**6,
    )


# --------------------------------------------------------------------------
# minimal models


def _kraus_ok(c4: int, c6: int, p: int) -> bool:
    """Local Kraus condition: (c4, c6) come from a model integral at p."""
    if p == 3:
        return valuation(c6, 3) != 2
    if p == 2:
        if c6 % 4 == 3:
            return True
        return valuation(c4, 2) >= 4 and c6 % 32 in (0, 8)
    return True


def _model_from_c4c6(c4: int, c6: int) -> WeierstrassCurve:
    """Reduced integral model (a1, a3 in {0,1}, a2 in {-1,0,1}) with the given c4, c6."""
    b2 = (-c6) % 12
    if b2 > 6:
        b2 -= 12
    b4 = Fraction(b2 * b2 - c4, 24)
    b6 = Fraction(-(b2**3) + 36 * b2 * b4 - c6, 216)
    if b4.denominator != 1 or b6.denominator != 1:
        raise ArithmeticError("c4, c6 fail the Kraus conditions")
    b4, b6 = int(b4), int(b6)
    a1 = b2 % 2
    a3 = b6 % 2
    return WeierstrassCurve(a1, (b2 - a1) // 4, a3, (b4 - a1 * a3) // 2, (b6 - a3) // 4)


def _integral_scaling(E: WeierstrassCurve) -> Fraction:
    """A u with transform(E, u) integral (u = 1/D for a common denominator D)."""
    d = 1
    for i, a in zip((1, 2, 3, 4, 6), E.ainvs):
        den = a.denominator
        # smallest e with den | e^i: take prime-wise ceilings
        if den == 1:
            continue
        need = 1
        for p, k in factorize(den):
            need *= p ** (-(-k // i))
        d = d * need // math.gcd(d, need)
    return Fraction(1, d)


def minimal_model(E: WeierstrassCurve) -> tuple[WeierstrassCurve, ModelMap]:
    """Global minimal model in reduced form, with the map from E to it."""
    inv = invariants(E)
    if inv.disc == 0:
        raise SingularCurveError(f"{E} is singular")
    u0 = _integral_scaling(E)
    c4 = inv.c4 / u0**4
    c6 = inv.c6 / u0**6
    disc = inv.disc / u0**12
    c4, c6, disc = int(c4), int(c6), int(disc)

    if c4 and c6:
        g = math.gcd(c4, c6)
    else:
        g = c4 or c6
    fac = factorize(g)
    if not fac.complete:
        raise IncompleteFactorization(g, fac.residue)
    primes = set(fac.primes) | {2, 3}
    u = 1
    for p in sorted(primes):
        vd = valuation(disc, p)
        e = vd // 12
        if c4:
            e = min(e, valuation(c4, p) // 4)
        if c6:
            e = min(e, valuation(c6, p) // 6)
        while e > 0 and not _kraus_ok(c4 // p ** (4 * e), c6 // p ** (6 * e), p):
            e -= 1
        u *= p**e
    Emin = _model_from_c4c6(c4 // u**4, c6 // u**6)
    m = is_isomorphic(E, Emin)
    if m is None:
        raise ArithmeticError("internal error: minimal model not isomorphic to input")
    return Emin, m


def is_minimal(E: WeierstrassCurve) -> bool:
    if not E.is_integral():
        return False
    Emin, _ = minimal_model(E)
    return abs(invariants(Emin).disc) == abs(invariants(E).disc)


# --------------------------------------------------------------------------
# isomorphism and twists


def _rational_root(x: Fraction, n: int) -> Fraction | None:
    """Exact rational n-th root of x (n even => x must be positive), or None."""
    if x == 0:
        return Fraction(0)
    sign = 1
    if x < 0:
        if n % 2 == 0:
            return None
        sign, x = -1, -x
    num = _iroot(x.numerator, n)
    den = _iroot(x.denominator, n)
    if num is None or den is None:
        return None
    return sign * Fraction(num, den)


def _iroot(a: int, n: int) -> int | None:
    lo, hi = 0, 1
    while hi**n <= a:
        hi *= 2
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if mid**n <= a:
            lo = mid
        else:
            hi = mid - 1
    return lo if lo**n == a else None


def _candidate_scalings(inv1: CurveInvariants, inv2: CurveInvariants) -> list[Fraction]:
    c41, c61, c42, c62 = inv1.c4, inv1.c6, inv2.c4, inv2.c6
    if (c41 == 0) != (c42 == 0) or (c61 == 0) != (c62 == 0):
        return []
    if c41 and c61:
        u2 = (c61 * c42) / (c62 * c41)
        u = _rational_root(u2, 2)
    elif c61:  # j = 0: c6(E2) = u^-6 c6(E1)
        u = _rational_root(c61 / c62, 6)
    else:  # j = 1728
        u = _rational_root(c41 / c42, 4)
    if not u:
        return []
    return [u, -u]


def is_isomorphic(E1: WeierstrassCurve, E2: WeierstrassCurve) -> ModelMap | None:
    """A ModelMap taking E1 to E2 over Q, or None if the curves are not Q-isomorphic."""
    inv1, inv2 = invariants(E1), invariants(E2)
    if inv1.disc == 0 or inv2.disc == 0:
        raise SingularCurveError("isomorphism test needs nonsingular curves")
    if inv1.j != inv2.j:
        return None
    for u in _candidate_scalings(inv1, inv2):
        if inv1.c4 != u**4 * inv2.c4 or inv1.c6 != u**6 * inv2.c6:
            continue
        s = (u * E2.a1 - E1.a1) / 2
        r = (u**2 * E2.a2 - E1.a2 + s * E1.a1 + s * s) / 3
        t = (u**3 * E2.a3 - E1.a3 - r * E1.a1) / 2
        m = ModelMap(u, r, s, t)
        if transform(E1, m) == E2:
            return m
    return None


def quadratic_twist(E: WeierstrassCurve, d: int) -> WeierstrassCurve:
    """The quadratic twist by d (a model of y^2 = f(x) twisted by d, not minimised)."""
    if d == 0:
        raise ValueError("twist parameter must be nonzero")
    inv = invariants(E)
    if inv.disc == 0:
        raise SingularCurveError(f"{E} is singular")
    d = Fraction(d)
    if E.a1 == 0 and E.a3 == 0:
        return WeierstrassCurve(0, d * E.a2, 0, d * d * E.a4, d**3 * E.a6)
    b2, b4, b6 = inv.b2, inv.b4, inv.b6
    return WeierstrassCurve(0, d * b2 / 4, 0, d * d * b4 / 2, d**3 * b6 / 4)
