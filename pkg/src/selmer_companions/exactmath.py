"""Exact integer/rational arithmetic helpers and integer polynomials.

Rationals are :class:`fractions.Fraction`; integers are plain ``int``.
Nothing in this module touches floating point.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

Rational = int | Fraction

TRIAL_LIMIT = 10**6
DEFAULT_WINDOW = 10**6

# sieve primes for the integer-root search, all just below 2**31
SIEVE_PRIMES = (2147483647, 2147483629, 2147483587)


class NotPrimeError(ValueError):
    pass


class ZeroModPError(ArithmeticError):
    """The polynomial vanishes identically modulo p (every residue is a root)."""


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


# --------------------------------------------------------------------------
# primes

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Miller-Rabin; deterministic below 3.3e24, probabilistic above."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def next_prime(n: int) -> int:
    n = max(n, 2)
    while not is_prime(n):
        n += 1
    return n


def _check_prime(p: int) -> None:
    if not isinstance(p, int) or not is_prime(p):
        raise NotPrimeError(f"{p!r} is not prime")


def valuation(x: Rational, p: int) -> float | int:
    """p-adic valuation of a rational; ``math.inf`` for zero."""
    _check_prime(p)
    x = as_fraction(x)
    if x == 0:
        return math.inf
    return _vint(x.numerator, p) - _vint(x.denominator, p)


def _vint(n: int, p: int) -> int:
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


# --------------------------------------------------------------------------
# factorisation


class IncompleteFactorization(ArithmeticError):
    def __init__(self, n: int, residue: int):
        super().__init__(f"could not fully factor {n}; composite cofactor {residue} remains")
        self.n = n
        self.residue = residue


@dataclass(frozen=True)
class Factorization:
    """sign * prod(p**e) * residue == n; residue == 1 when complete."""

    n: int
    sign: int
    factors: tuple[tuple[int, int], ...]
    residue: int = 1

    @property
    def complete(self) -> bool:
        return self.residue == 1

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    def value(self) -> int:
        out = self.sign * self.residue
        for p, e in self.factors:
            out *= p**e
        return out

    def __iter__(self):
        return iter(self.factors)

    def __len__(self):
        return len(self.factors)


def _pollard_brent(n: int, rng: random.Random, budget: int) -> int | None:
    if n % 2 == 0:
        return 2
    y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
    g = r = q = 1
    steps = 0
    while g == 1:
        x = y
        for _ in range(r):
            y = (y * y + c) % n
        k = 0
        while k < r and g == 1:
            ys = y
            for _ in range(min(m, r - k)):
                y = (y * y + c) % n
                q = q * abs(x - y) % n
            g = math.gcd(q, n)
            k += m
        r *= 2
        steps += r
        if steps > budget:
            return None
    if g == n:
        g = 1
        while g == 1:
            ys = (ys * ys + c) % n
            g = math.gcd(abs(x - ys), n)
    return g if g != n else None


def factorize(n: int, effort: int = 2_000_000, trial_limit: int = TRIAL_LIMIT) -> Factorization:
    """Factor a nonzero integer: trial division, then Pollard-Brent with a step budget.

    Cofactors that resist the budget are kept in ``residue`` rather than being
    reported as primes.
    """
    if n == 0:
        raise ValueError("cannot factor zero")
    sign = -1 if n < 0 else 1
    m = abs(n)
    found: dict[int, int] = {}

    def take(p: int) -> None:
        nonlocal m
        while m % p == 0:
            m //= p
            found[p] = found.get(p, 0) + 1

    for p in (2, 3, 5):
        take(p)
    # wheel mod 30
    p, steps = 7, (4, 2, 4, 2, 4, 6, 2, 6)
    i = 0
    while p <= trial_limit and p * p <= m:
        if m % p == 0:
            take(p)
        p += steps[i]
        i = (i + 1) % 8
    residue = 1
    stack = [m] if m > 1 else []
    rng = random.Random(n)
    while stack:
        c = stack.pop()
        if c == 1:
            continue
        if is_prime(c):
            found[c] = found.get(c, 0) + 1
            continue
        r = math.isqrt(c)
        if r * r == c:
            stack.extend((r, r))
            continue
        d = None
        for _ in range(8):
            d = _pollard_brent(c, rng, effort)
            if d:
                break
        if not d:
            residue *= c
            continue
        stack.extend((d, c // d))
    # merge any prime that also divides the residue so exponents stay honest
    for p in list(found):
        while residue % p == 0:
            residue //= p
            found[p] += 1
    return Factorization(n, sign, tuple(sorted(found.items())), residue)


def squarefree_part(x: Rational) -> int:
    """Unique squarefree integer d with x = d * (rational square)."""
    x = as_fraction(x)
    if x == 0:
        raise ValueError("squarefree part of zero is undefined")
    d = -1 if x < 0 else 1
    for part in (x.numerator, x.denominator):
        fac = factorize(part)
        if not fac.complete:
            r = math.isqrt(fac.residue)
            if r * r != fac.residue:
                # a composite residue can still hide a square; refuse to guess
                raise IncompleteFactorization(part, fac.residue)
        for p, e in fac.factors:
            if e % 2:
                d *= p
    return d


def cubic_disc(p: Rational, q: Rational, r: Rational):
    """Discriminant of x^3 + p x^2 + q x + r."""
    return 18 * p * q * r - 4 * p**3 * r + p**2 * q**2 - 4 * q**3 - 27 * r**2


# --------------------------------------------------------------------------
# univariate integer polynomials


class IntPoly:
    """Dense univariate polynomial with integer coefficients, lowest degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[int] = ()):
        c = [int(a) for a in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs: tuple[int, ...] = tuple(c)

    @classmethod
    def x(cls) -> "IntPoly":
        return cls((0, 1))

    @classmethod
    def const(cls, c: int) -> "IntPoly":
        return cls((c,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def lead(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def __repr__(self):
        return f"IntPoly({list(self.coeffs)})"

    def __eq__(self, other):
        if isinstance(other, int):
            other = IntPoly.const(other)
        return isinstance(other, IntPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __neg__(self):
        return IntPoly(-c for c in self.coeffs)

    def __add__(self, other):
        if isinstance(other, int):
            other = IntPoly.const(other)
        if not isinstance(other, IntPoly):
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        return IntPoly([x + y for x, y in zip(a, b)] + list(a[len(b):]))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, int):
            other = IntPoly.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return IntPoly(c * other for c in self.coeffs)
        if not isinstance(other, IntPoly):
            return NotImplemented
        return IntPoly(_mul(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        out, base = IntPoly.const(1), self
        while e:
            if e & 1:
                out = out * base
            e >>= 1
            if e:
                base = base * base
        return out

    def derivative(self) -> "IntPoly":
        return IntPoly(i * c for i, c in enumerate(self.coeffs) if i)

    def content(self) -> int:
        g = 0
        for c in self.coeffs:
            g = math.gcd(g, c)
        if self.coeffs and self.coeffs[-1] < 0:
            g = -g
        return g

    def primitive(self) -> "IntPoly":
        g = self.content()
        if g in (0, 1):
            return self
        return IntPoly(c // g for c in self.coeffs)

    def exact_div(self, d: "IntPoly") -> "IntPoly":
        """Quotient self / d, raising if the division is not exact over Z."""
        q, r = self.divmod_rational(d)
        if not r.is_zero() or any(c.denominator != 1 for c in q):
            raise ArithmeticError("division is not exact")
        return IntPoly(int(c) for c in q)

    def divmod_rational(self, d: "IntPoly"):
        """Division over Q; returns (quotient coefficients, remainder IntPoly scaled)."""
        if d.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = [Fraction(c) for c in self.coeffs]
        dl = d.coeffs
        n = len(dl) - 1
        q = [Fraction(0)] * max(len(rem) - n, 0)
        for k in range(len(rem) - n - 1, -1, -1):
            c = rem[k + n] / dl[-1]
            q[k] = c
            if c:
                for i, a in enumerate(dl):
                    rem[k + i] -= c * a
        rem = rem[:n]
        den = 1
        for c in rem:
            den = den * c.denominator // math.gcd(den, c.denominator)
        return q, IntPoly(int(c * den) for c in rem)

    def divides(self, other: "IntPoly") -> bool:
        _, r = other.divmod_rational(self)
        return r.is_zero()

    def mod(self, p: int) -> list[int]:
        return _trim([c % p for c in self.coeffs])

    def gcd(self, other: "IntPoly") -> "IntPoly":
        """Primitive gcd in Z[x], with positive leading coefficient."""
        a, b = self.primitive(), other.primitive()
        while not b.is_zero():
            _, r = a.divmod_rational(b)
            a, b = b, r.primitive()
        if a.is_zero():
            return a
        return a if a.lead() > 0 else -a


def _mul(a: Sequence[int], b: Sequence[int]) -> list[int]:
    if not a or not b:
        return []
    if min(len(a), len(b)) > 24:
        return _kronecker_mul(a, b)
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for k, y in enumerate(b):
                out[i + k] += x * y
    return out


def _kronecker_mul(a: Sequence[int], b: Sequence[int]) -> list[int]:
    """Multiply by packing both polynomials into one big integer each."""
    bound = max(abs(c) for c in a) * max(abs(c) for c in b) * min(len(a), len(b))
    width = (bound.bit_length() + 2 + 7) // 8  # bytes per slot, one spare sign bit
    half = 1 << (8 * width - 1)

    def pack(cs):
        return int.from_bytes(b"".join((c + half).to_bytes(width, "little") for c in cs), "little")

    def offset(n):
        return int.from_bytes(b"".join(half.to_bytes(width, "little") for _ in range(n)), "little")

    # (A + offA)(B + offB) is awkward to unpack; pack signed values instead
    va = pack(a) - offset(len(a))
    vb = pack(b) - offset(len(b))
    n = len(a) + len(b) - 1
    prod = va * vb + offset(n)
    raw = prod.to_bytes(width * n, "little")
    return [int.from_bytes(raw[i * width:(i + 1) * width], "little") - half for i in range(n)]


# --------------------------------------------------------------------------
# polynomials modulo a prime (lists of residues, lowest degree first)


def _trim(c: list[int]) -> list[int]:
    while c and c[-1] == 0:
        c.pop()
    return c


def _pmul(a: list[int], b: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    return [c % p for c in _mul(a, b)]


def _pdivmod(a: list[int], b: list[int], p: int) -> tuple[list[int], list[int]]:
    a = list(a)
    n = len(b) - 1
    inv = pow(b[-1], -1, p)
    q = [0] * max(len(a) - n, 0)
    for k in range(len(a) - n - 1, -1, -1):
        c = a[k + n] * inv % p
        q[k] = c
        if c:
            for i, x in enumerate(b):
                a[k + i] = (a[k + i] - c * x) % p
    return q, _trim(a[:n])


def _pmod(a: list[int], b: list[int], p: int) -> list[int]:
    return _pdivmod(a, b, p)[1]


def _pgcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _pmod(a, b, p)
    if a:
        inv = pow(a[-1], -1, p)
        a = [c * inv % p for c in a]
    return a


class _Reducer:
    """Reduction modulo a fixed monic f over F_p using a precomputed power-series inverse."""

    def __init__(self, f: list[int], p: int):
        inv = pow(f[-1], -1, p)
        self.f = [c * inv % p for c in f]
        self.p = p
        self.n = len(f) - 1
        self.inv = self._series_inverse(self.f[::-1], max(self.n - 1, 1))

    def _series_inverse(self, h: list[int], k: int) -> list[int]:
        # Newton iteration g <- g (2 - h g) mod x^k, h[0] == 1
        p, g, prec = self.p, [1], 1
        while prec < k:
            prec = min(2 * prec, k)
            hg = _pmul(h[:prec], g, p)[:prec]
            corr = [(-c) % p for c in hg]
            corr[0] = (corr[0] + 2) % p
            g = _pmul(g, corr, p)[:prec]
        return g

    def __call__(self, a: list[int]) -> list[int]:
        p, n = self.p, self.n
        m = len(a) - 1 - n
        if m < 0:
            return _trim([c % p for c in a])
        if m >= n:
            return _pmod(a, self.f, p)
        arev = a[::-1][: m + 1]
        qrev = _pmul(arev, self.inv[: m + 1], p)[: m + 1]
        q = qrev[::-1]
        qf = _pmul(q, self.f, p)
        r = [(x - y) % p for x, y in zip(a[:n], qf[:n] + [0] * (n - len(qf[:n])))]
        return _trim(r)


def _ppowmod(base: list[int], e: int, f: list[int], p: int) -> list[int]:
    if len(f) < 40:
        out = [1]
        base = _pmod(base, f, p)
        while e:
            if e & 1:
                out = _pmod(_pmul(out, base, p), f, p)
            e >>= 1
            if e:
                base = _pmod(_pmul(base, base, p), f, p)
        return out
    red = _Reducer(f, p)
    out = [1]
    base = red(list(base))
    # left-to-right so that multiplying by a short base stays cheap
    for bit in bin(e)[2:]:
        out = red(_pmul(out, out, p))
        if bit == "1":
            out = red(_pmul(out, base, p))
    return out


def _split_roots(g: list[int], p: int, rng: random.Random) -> list[int]:
    """Roots of a monic squarefree product of distinct linear factors mod odd p."""
    if len(g) == 1:
        return []
    if len(g) == 2:
        return [(-g[0]) % p]
    while True:
        a = rng.randrange(p)
        h = _ppowmod([a, 1], (p - 1) // 2, g, p) or [0]
        h[0] = (h[0] - 1) % p
        d = _pgcd(g, _trim(h), p)
        if 1 < len(d) < len(g):
            other, _ = _pdivmod(g, d, p)
            return _split_roots(d, p, rng) + _split_roots(_trim(other), p, rng)


def poly_roots_mod_p(f: IntPoly | Sequence[int], p: int) -> set[int]:
    """All residues r in [0, p) with f(r) = 0 mod p."""
    _check_prime(p)
    coeffs = f.coeffs if isinstance(f, IntPoly) else tuple(f)
    g = _trim([c % p for c in coeffs])
    if not g:
        raise ZeroModPError(f"polynomial vanishes identically mod {p}")
    if len(g) == 1:
        return set()
    if p < 1000:
        return {r for r in range(p) if _eval_mod(g, r, p) == 0}
    # gcd with x^p - x isolates the distinct linear factors
    xp = _ppowmod([0, 1], p, g, p)
    xp = xp + [0] * max(0, 2 - len(xp))
    xp[1] = (xp[1] - 1) % p
    lin = _pgcd(g, _trim(xp), p)
    return set(_split_roots(lin, p, random.Random(p)))


def _eval_mod(c: Sequence[int], x: int, p: int) -> int:
    acc = 0
    for a in reversed(c):
        acc = (acc * x + a) % p
    return acc


def integer_root_search(
    f: IntPoly,
    window: int = DEFAULT_WINDOW,
    primes: Sequence[int] = SIEVE_PRIMES,
) -> list[int]:
    """All integer roots t with |t| <= window.

    Roots modulo the first sieve prime give candidates; the remaining primes
    filter them and every survivor is confirmed by exact evaluation.
    Completeness holds only inside the window.
    """
    if window < 1:
        raise ValueError("window must be >= 1")
    if f.is_zero():
        raise ValueError("zero polynomial has every integer as a root")
    f = f.primitive()
    if f.degree < 1:
        return []
    primes = list(primes)
    if not primes or min(primes) <= 2 * window:
        # each residue must pin down a unique t in [-W, W]
        start = next_prime(2 * window + 1)
        primes = [start]
        while len(primes) < 3:
            primes.append(next_prime(primes[-1] + 1))
    out = set()
    if f.coeffs[0] == 0:
        out.add(0)
    # strip the factor t^k so the sieve polynomial is nonzero at 0
    k = next(i for i, c in enumerate(f.coeffs) if c)
    g = IntPoly(f.coeffs[k:])
    if g.degree >= 1:
        p0 = primes[0]
        candidates = []
        for r in poly_roots_mod_p(g, p0):
            for t in (r, r - p0):
                if abs(t) <= window:
                    candidates.append(t)
        for p in primes[1:]:
            gp = g.mod(p)
            candidates = [t for t in candidates if _eval_mod(gp, t % p, p) == 0]
        out.update(t for t in candidates if g(t) == 0)
    return sorted(out)


# --------------------------------------------------------------------------
# sparse bivariate integer polynomials


@dataclass(frozen=True)
class BiPoly:
    """Sparse bivariate polynomial: {(i, j): c} means sum of c * X^i * Y^j."""

    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "terms", {k: int(v) for k, v in self.terms.items() if v})

    def degree_x(self) -> int:
        return max((i for i, _ in self.terms), default=-1)

    def degree_y(self) -> int:
        return max((j for _, j in self.terms), default=-1)

    def __call__(self, x, y):
        """Exact evaluation at rationals, clearing denominators first."""
        x, y = as_fraction(x), as_fraction(y)
        dx, dy = self.degree_x(), self.degree_y()
        a, b, c, d = x.numerator, x.denominator, y.numerator, y.denominator
        xa = _powers(a, dx)
        xb = _powers(b, dx)
        yc = _powers(c, dy)
        yd = _powers(d, dy)
        total = 0
        for (i, j), coeff in self.terms.items():
            total += coeff * xa[i] * xb[dx - i] * yc[j] * yd[dy - j]
        return Fraction(total, b**dx * d**dy)


def _powers(a: int, n: int) -> list[int]:
    out = [1]
    for _ in range(n):
        out.append(out[-1] * a)
    return out
