"""Local reduction data via Tate's algorithm.

The algorithm runs on integral models at every prime, 2 and 3 included,
and tracks the number of components of the special fibre explicitly so
that Ogg's formula can be checked rather than assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .curves import SingularCurveError, WeierstrassCurve, invariants, minimal_model
from .exactmath import (
    IncompleteFactorization,
    _check_prime,
    _pgcd,
    _trim,
    factorize,
    poly_roots_mod_p,
    valuation,
)

GOOD = "good"
SPLIT = "split-multiplicative"
NONSPLIT = "nonsplit-multiplicative"
ADDITIVE = "additive"

FORBIDDEN_TYPES = frozenset({"II", "II*", "IV", "IV*"})


@dataclass(frozen=True)
class KodairaType:
    tag: str  # I0, In, II, III, IV, I0*, In*, IV*, III*, II*
    n: int = 0

    def __post_init__(self):
        if self.tag in ("In", "In*") and self.n < 1:
            raise ValueError(f"{self.tag} needs n >= 1")

    def __str__(self) -> str:
        if self.tag == "In":
            return f"I{self.n}"
        if self.tag == "In*":
            return f"I{self.n}*"
        return self.tag

    @classmethod
    def parse(cls, text: str) -> "KodairaType":
        text = text.strip()
        if text in ("I0", "I0*", "II", "III", "IV", "II*", "III*", "IV*"):
            return cls(text)
        star = text.endswith("*")
        body = text[:-1] if star else text
        if body.startswith("I") and body[1:].isdigit() and int(body[1:]) >= 1:
            return cls("In*" if star else "In", int(body[1:]))
        raise ValueError(f"unknown Kodaira symbol {text!r}")

    @property
    def forbidden(self) -> bool:
        """One of the types II, II*, IV, IV* excluded by the companion criterion."""
        return self.tag in FORBIDDEN_TYPES


@dataclass(frozen=True)
class LocalData:
    p: int
    kodaira: KodairaType
    f: int  # conductor exponent
    m: int  # components of the special fibre
    tamagawa: int
    kind: str
    vdisc: int  # valuation of the minimal discriminant
    pot_mult: bool

    def fixture_line(self, label: str) -> str:
        return f"{label} {self.p} {self.kodaira} {self.f} {self.tamagawa}"


# --------------------------------------------------------------------------
# residue-field helpers


def _nroots_quadratic(a: int, b: int, c: int, p: int) -> int:
    """Number of roots of a X^2 + b X + c mod p (a a unit)."""
    if p == 2:
        return sum(1 for x in (0, 1) if (a * x * x + b * x + c) % 2 == 0)
    d = (b * b - 4 * a * c) % p
    if d == 0:
        return 1
    return 2 if pow(d, (p - 1) // 2, p) == 1 else 0


def _repeated_root(b: int, c: int, d: int, p: int) -> int:
    """The repeated root of X^3 + b X^2 + c X + d mod p (known to exist)."""
    f = [d % p, c % p, b % p, 1]
    df = _trim([c % p, (2 * b) % p, 3 % p])
    if p < 50:
        for x in range(p):
            if _ev(f, x, p) == 0 and _ev(df, x, p) == 0:
                return x
        raise ArithmeticError("no repeated root")
    g = _pgcd(f, df, p)
    if len(g) == 2:
        return (-g[0]) % p
    if len(g) == 3:  # triple root: g = (X - a)^2
        return (-g[1] * pow(2, -1, p)) % p
    raise ArithmeticError("no repeated root")


def _ev(c, x, p):
    acc = 0
    for a in reversed(c):
        acc = (acc * x + a) % p
    return acc


def _rst(a, r, s, t):
    """Integer coordinate change with u = 1."""
    a1, a2, a3, a4, a6 = a
    return (
        a1 + 2 * s,
        a2 - s * a1 + 3 * r - s * s,
        a3 + r * a1 + 2 * t,
        a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t,
        a6 + r * a4 + r * r * a2 + r**3 - t * a3 - t * t - r * t * a1,
    )


def _v(x: int, p: int) -> float | int:
    if x == 0:
        return math.inf
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


# --------------------------------------------------------------------------
# Tate's algorithm


def _tate_integral(a: tuple[int, ...], p: int):
    """Tate's algorithm on an integral model; returns (type, f, m, c, kind, vdisc)."""
    half = pow(2, -1, p) if p != 2 else None
    while True:
        a1, a2, a3, a4, a6 = a
        b2, b4, b6, b8 = _b(a)
        c4 = b2 * b2 - 24 * b4
        disc = -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6
        vd = _v(disc, p)
        if vd == 0:
            return KodairaType("I0"), 0, 1, 1, GOOD, 0

        # move the singular point of the reduction to (0, 0)
        if p == 2:
            if b2 % 2 == 0:
                r = a4 % 2
                t = (r * (1 + a2 + a4) + a6) % 2
            else:
                r = a3 % 2
                t = (r + a4) % 2
        elif p == 3:
            r = (-b6) % 3 if b2 % 3 == 0 else (-b2 * b4) % 3
            t = (a1 * r + a3) % 3
        else:
            c6 = -(b2**3) + 36 * b2 * b4 - 216 * b6
            if c4 % p == 0:
                r = (-b2 * pow(12, -1, p)) % p
            else:
                r = (-(c6 + b2 * c4) * pow(12 * c4, -1, p)) % p
            t = (-half * (a1 * r + a3)) % p
        a = _rst(a, r, 0, t)
        a1, a2, a3, a4, a6 = a
        b2, b4, b6, b8 = _b(a)

        # multiplicative reduction
        if b2 % p:
            split = _nroots_quadratic(1, a1, -a2, p) > 0
            if split:
                return KodairaType("In", vd), 1, vd, vd, SPLIT, vd
            c = 1 if vd % 2 else 2
            return KodairaType("In", vd), 1, vd, c, NONSPLIT, vd

        if _v(a6, p) < 2:
            return KodairaType("II"), vd, 1, 1, ADDITIVE, vd
        if _v(b8, p) < 3:
            return KodairaType("III"), vd - 1, 2, 2, ADDITIVE, vd
        if _v(b6, p) < 3:
            c = 3 if _nroots_quadratic(1, a3 // p, -(a6 // p**2), p) else 1
            return KodairaType("IV"), vd - 2, 3, c, ADDITIVE, vd

        # arrange p | a1, a2; p^2 | a3, a4; p^3 | a6
        if p == 2:
            s = a2 % 2
            t = 2 * ((a6 // 4) % 2)
        else:
            s = (-a1 * half) % p
            t = p * ((-(a3 // p) * half) % p)
        a = _rst(a, 0, s, t)
        a1, a2, a3, a4, a6 = a

        # P(T) = T^3 + a2/p T^2 + a4/p^2 T + a6/p^3
        b, c, d = a2 // p, a4 // p**2, a6 // p**3
        pdisc = (18 * b * c * d - 4 * b**3 * d + b * b * c * c - 4 * c**3 - 27 * d * d) % p
        if pdisc:
            nroots = len(poly_roots_mod_p([d, c, b, 1], p))
            return KodairaType("I0*"), vd - 4, 5, 1 + nroots, ADDITIVE, vd

        if (b * b - 3 * c) % p:
            # one double root: move it to T = 0, then chase the I_n* chain
            root = _repeated_root(b, c, d, p)
            a = _rst(a, p * root, 0, 0)
            return _chase_in_star(a, p, vd)

        # triple root
        root = _repeated_root(b, c, d, p)
        a = _rst(a, p * root, 0, 0)
        a1, a2, a3, a4, a6 = a
        x3, x6 = a3 // p**2, a6 // p**4
        if (x3 * x3 + 4 * x6) % p:
            c = 3 if _nroots_quadratic(1, x3, -x6, p) else 1
            return KodairaType("IV*"), vd - 6, 7, c, ADDITIVE, vd
        if p == 2:
            t = 4 * (x6 % 2)
        else:
            t = p * p * ((-x3 * half) % p)
        a = _rst(a, 0, 0, t)
        a1, a2, a3, a4, a6 = a
        if _v(a4, p) < 4:
            return KodairaType("III*"), vd - 7, 8, 2, ADDITIVE, vd
        if _v(a6, p) < 6:
            return KodairaType("II*"), vd - 8, 9, 1, ADDITIVE, vd
        # not minimal at p: scale down and start again
        a = (a1 // p, a2 // p**2, a3 // p**3, a4 // p**4, a6 // p**6)


def _chase_in_star(a, p: int, vd: int):
    half = pow(2, -1, p) if p != 2 else None
    mx = my = p * p
    n = 0
    while True:
        a1, a2, a3, a4, a6 = a
        n += 1
        # y step: Y^2 + (a3/my) Y - a6/(mx my)
        x3, x6 = a3 // my, a6 // (mx * my)
        if (x3 * x3 + 4 * x6) % p:
            c = 4 if _nroots_quadratic(1, x3, -x6, p) else 2
            break
        t = my * (x6 % 2) if p == 2 else my * ((-x3 * half) % p)
        a = _rst(a, 0, 0, t)
        my *= p
        a1, a2, a3, a4, a6 = a
        n += 1
        # x step: (a2/p) X^2 + (a4/(p mx)) X + a6/(mx my)
        x2, x4, x6 = a2 // p, a4 // (p * mx), a6 // (mx * my)
        if (x4 * x4 - 4 * x2 * x6) % p:
            c = 4 if _nroots_quadratic(x2, x4, x6, p) else 2
            break
        if p == 2:
            r = mx * ((x6 * x2) % 2)
        else:
            r = mx * ((-x4 * pow(2 * x2, -1, p)) % p)
        a = _rst(a, r, 0, 0)
        mx *= p
    return KodairaType("In*", n), vd - 4 - n, n + 5, c, ADDITIVE, vd


def _b(a):
    a1, a2, a3, a4, a6 = a
    return (
        a1 * a1 + 4 * a2,
        2 * a4 + a1 * a3,
        a3 * a3 + 4 * a6,
        a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4,
    )


def _nonsingular_minimal(E: WeierstrassCurve) -> WeierstrassCurve:
    if invariants(E).disc == 0:
        raise SingularCurveError(f"{E} is singular")
    return minimal_model(E)[0]


def tate_algorithm(E: WeierstrassCurve, p: int) -> LocalData:
    _check_prime(p)
    Emin = _nonsingular_minimal(E)
    a = tuple(int(x) for x in Emin.ainvs)
    kod, f, m, c, kind, vd = _tate_integral(a, p)
    if p >= 5 and kind == ADDITIVE:
        # tame: no wild part, so f is known without Ogg's formula
        f = 2
    j = invariants(Emin).j
    return LocalData(p, kod, f, m, c, kind, vd, valuation(j, p) < 0)


def reduction_kind(E: WeierstrassCurve, p: int) -> str:
    return tate_algorithm(E, p).kind


def potentially_multiplicative(E: WeierstrassCurve, p: int) -> bool:
    _check_prime(p)
    inv = invariants(E)
    if inv.disc == 0:
        raise SingularCurveError(f"{E} is singular")
    return valuation(inv.j, p) < 0


@dataclass(frozen=True)
class PrimeSet:
    """A set of primes, possibly incomplete when a cofactor resisted factoring."""

    primes: frozenset
    residue: int = 1

    @property
    def partial(self) -> bool:
        return self.residue != 1

    def __iter__(self):
        return iter(sorted(self.primes))

    def __contains__(self, p) -> bool:
        return p in self.primes

    def __len__(self) -> int:
        return len(self.primes)

    def sorted(self) -> list[int]:
        return sorted(self.primes)


def bad_primes(E: WeierstrassCurve) -> PrimeSet:
    Emin = _nonsingular_minimal(E)
    fac = factorize(int(invariants(Emin).disc))
    return PrimeSet(frozenset(fac.primes), fac.residue)


def pot_mult_primes(E: WeierstrassCurve) -> PrimeSet:
    """Primes p with v_p(j) < 0, i.e. primes dividing the denominator of j."""
    inv = invariants(E)
    if inv.disc == 0:
        raise SingularCurveError(f"{E} is singular")
    den = inv.j.denominator
    if den == 1:
        return PrimeSet(frozenset())
    fac = factorize(den)
    return PrimeSet(frozenset(fac.primes), fac.residue)


def local_data_all(E: WeierstrassCurve) -> list[LocalData]:
    """LocalData at every bad prime (raises if the discriminant is not fully factored)."""
    bad = bad_primes(E)
    if bad.partial:
        raise IncompleteFactorization(int(invariants(E).disc), bad.residue)
    return [tate_algorithm(E, p) for p in bad]


def conductor(E: WeierstrassCurve) -> int:
    """Product of p^f_p over bad primes; raises IncompleteFactorization if unknown."""
    n = 1
    for ld in local_data_all(E):
        n *= ld.p**ld.f
    return n
