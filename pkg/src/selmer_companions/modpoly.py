"""Classical modular polynomials: loading, exact evaluation, family scans.

Data files use the published text layout: one term per line, ``[i,j] c``
with i >= j; the coefficient of X^j Y^i equals that of X^i Y^j and is not
repeated.
"""

from __future__ import annotations

import hashlib
import io
import os
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable

from .curves import b_invariants, c_invariants
from .exactmath import (
    DEFAULT_WINDOW,
    BiPoly,
    IntPoly,
    as_fraction,
    integer_root_search,
)

# even degrees allowed for a cyclic rational isogeny (all <= 19)
EVEN_KENKU_LEVELS = (2, 4, 6, 8, 10, 12, 14, 16, 18)

DATA_ENV = "SELMER_DATA_DIR"

WINDOW_CAVEAT = (
    "integer roots are complete only for |t| <= {window}; "
    "roots outside the window are not searched"
)


class ModPolyParseError(ValueError):
    def __init__(self, message: str, lineno: int | None = None):
        where = f"line {lineno}: " if lineno is not None else ""
        super().__init__(where + message)
        self.lineno = lineno


class MissingLevelsError(LookupError):
    def __init__(self, levels: Iterable[int], directory):
        self.levels = sorted(levels)
        super().__init__(
            f"no modular polynomial data for levels {self.levels} in {directory}"
        )


def psi(n: int) -> int:
    """Index of Gamma_0(n): n * prod(1 + 1/p)."""
    out, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            out = out // p * (p + 1)
            while m % p == 0:
                m //= p
        p += 1
    if m > 1:
        out = out // m * (m + 1)
    return out


@dataclass(frozen=True)
class ModularPolynomial:
    level: int
    coeffs: dict = field(repr=False)  # (i, j) with i >= j -> int

    def coefficient(self, i: int, j: int) -> int:
        return self.coeffs.get((i, j) if i >= j else (j, i), 0)

    @property
    def degree(self) -> int:
        return max(i for i, _ in self.coeffs)

    def terms(self) -> dict:
        """Full (unsymmetrised) term table."""
        out = {}
        for (i, j), c in self.coeffs.items():
            out[(i, j)] = c
            out[(j, i)] = c
        return out

    def bivariate(self) -> BiPoly:
        return BiPoly(self.terms())

    def __call__(self, j1, j2) -> Fraction:
        return eval_modpoly(self, j1, j2)


_LINE = re.compile(r"^\[\s*(\d+)\s*,\s*(\d+)\s*\]\s+([+-]?\d+)$")


def load_modpoly(level: int, source) -> ModularPolynomial:
    """Parse a modular polynomial.

    source may be a path (os.PathLike), the file text (str or bytes), or an
    open stream in text or binary mode.
    """
    if isinstance(source, os.PathLike):
        source = Path(source).read_bytes()
    if isinstance(source, (bytes, bytearray)):
        source = source.decode("ascii")
    if isinstance(source, str):
        source = io.StringIO(source)
    else:
        source = (line.decode("ascii") if isinstance(line, bytes) else line for line in source)

    coeffs: dict = {}
    for lineno, raw in enumerate(source, 1):
        line = raw.strip()
        if not line:
            continue
        m = _LINE.match(line)
        if not m:
            raise ModPolyParseError(f"malformed term {line!r}", lineno)
        i, j, c = int(m.group(1)), int(m.group(2)), int(m.group(3))
        if i < j:
            raise ModPolyParseError(f"term [{i},{j}] has i < j", lineno)
        if (i, j) in coeffs:
            raise ModPolyParseError(f"duplicate term [{i},{j}]", lineno)
        if c:
            coeffs[(i, j)] = c
    if not coeffs:
        raise ModPolyParseError("no terms")
    expected = psi(level)
    deg = max(i for i, _ in coeffs)
    if deg != expected:
        raise ModPolyParseError(f"degree {deg} but psi({level}) = {expected}")
    if coeffs.get((expected, 0)) != 1:
        raise ModPolyParseError(f"coefficient of X^{expected} is not 1")
    return ModularPolynomial(level, coeffs)


def eval_modpoly(phi: ModularPolynomial, j1, j2) -> Fraction:
    """Exact value of Phi_N(j1, j2); denominators are cleared before summing."""
    x, y = as_fraction(j1), as_fraction(j2)
    d = phi.degree
    a, b, c, e = x.numerator, x.denominator, y.numerator, y.denominator
    pa, pb, pc, pe = (_powers(v, d) for v in (a, b, c, e))
    total = 0
    for (i, k), coeff in phi.coeffs.items():
        term = pa[i] * pb[d - i] * pc[k] * pe[d - k]
        if i != k:
            term += pa[k] * pb[d - k] * pc[i] * pe[d - i]
        total += coeff * term
    return Fraction(total, b**d * e**d)


def _powers(a: int, n: int) -> list[int]:
    out = [1]
    for _ in range(n):
        out.append(out[-1] * a)
    return out


# --------------------------------------------------------------------------
# data directory


def resolve_data_dir(flag=None) -> Path:
    """Flag, then $SELMER_DATA_DIR, then ./data."""
    if flag:
        return Path(flag)
    env = os.environ.get(DATA_ENV)
    if env:
        return Path(env)
    return Path("data")


class ModPolyStore:
    """Lazily loaded modular polynomials from a data directory.

    If a MANIFEST file (``level filename sha256`` per line) is present, each
    file is checked against it on load.
    """

    def __init__(self, directory=None):
        self.directory = resolve_data_dir(directory)
        self._cache: dict[int, ModularPolynomial] = {}
        self._manifest = self._read_manifest()

    def _read_manifest(self) -> dict[int, tuple[str, str]]:
        path = self.directory / "MANIFEST"
        if not path.exists():
            return {}
        out = {}
        for line in path.read_text().splitlines():
            parts = line.split()
            if len(parts) == 3:
                out[int(parts[0])] = (parts[1], parts[2])
        return out

    def path(self, level: int) -> Path:
        if level in self._manifest:
            return self.directory / self._manifest[level][0]
        return self.directory / f"phi_j_{level}.txt"

    def available(self, levels: Iterable[int] = EVEN_KENKU_LEVELS) -> list[int]:
        return [n for n in levels if self.path(n).exists()]

    def require(self, levels: Iterable[int] = EVEN_KENKU_LEVELS) -> None:
        levels = list(levels)
        missing = [n for n in levels if not self.path(n).exists()]
        if missing:
            raise MissingLevelsError(missing, self.directory)

    def get(self, level: int) -> ModularPolynomial:
        if level not in self._cache:
            path = self.path(level)
            if not path.exists():
                raise MissingLevelsError([level], self.directory)
            raw = path.read_bytes()
            if level in self._manifest:
                digest = hashlib.sha256(raw).hexdigest()
                if digest != self._manifest[level][1]:
                    raise ModPolyParseError(f"checksum mismatch for {path}")
            self._cache[level] = load_modpoly(level, raw)
        return self._cache[level]

    def __getitem__(self, level: int) -> ModularPolynomial:
        return self.get(level)


# --------------------------------------------------------------------------
# the families as rational functions of t


class DegenerateFamilyError(ValueError):
    pass


def _family_curve_polys(q: int):
    """a-invariants of E_{q,t} and H_{q,t} as integer polynomials in t."""
    t = IntPoly.x()
    zero = IntPoly()
    E = (zero, IntPoly.const(q * q), zero, IntPoly.const(3 * q**3), t * (3 * q**6))
    H = (zero, IntPoly([q * (27 - 2 * q), -81 * q * q]), zero, IntPoly.const(q * (q - 9) ** 3), zero)
    return E, H


def family_j_functions(q: int) -> tuple[tuple[IntPoly, IntPoly], tuple[IntPoly, IntPoly]]:
    """j(E_{q,t}) and j(H_{q,t}) as (numerator, denominator) integer polynomials in t."""
    out = []
    for ainvs in _family_curve_polys(q):
        c4, _, disc = c_invariants(*b_invariants(*ainvs))
        if disc.is_zero():
            raise DegenerateFamilyError(f"family member is singular for every t when q = {q}")
        out.append((c4 * c4 * c4, disc))
    return out[0], out[1]


def _strip_common(num: IntPoly, dens: Iterable[IntPoly]) -> IntPoly:
    """Remove from num every factor it shares with one of the denominators."""
    for d in dens:
        g = num.gcd(d)
        while g.degree >= 1:
            num = num.exact_div(g)
            g = num.gcd(g)
    return num.primitive()


def family_isogeny_poly(phi: ModularPolynomial, q: int) -> IntPoly:
    """Numerator of Phi_N(j(E_{q,t}), j(H_{q,t})) as a primitive polynomial in t.

    Each j is n/d with n = c4^3 and d = Delta; the polynomial is
    sum c_ik nE^i dE^(N-i) nH^k dH^(N-k) with shared factors removed.
    """
    (nE, dE), (nH, dH) = family_j_functions(q)
    d = phi.degree
    dE_pows = [IntPoly.const(1)]
    dH_pows = [IntPoly.const(1)]
    for _ in range(d):
        dE_pows.append(dE_pows[-1] * dE)
        dH_pows.append(dH_pows[-1] * dH)
    result = IntPoly()
    for k in range(d, -1, -1):
        block = IntPoly()
        for i in range(d, -1, -1):
            c = phi.coefficient(i, k)
            block = block * nE
            if c:
                block = block + dE_pows[d - i] * c
        result = result * nH + block * dH_pows[d - k]
    if result.is_zero():
        raise DegenerateFamilyError(f"Phi_{phi.level} vanishes identically on the family q = {q}")
    return _strip_common(result, (dE, dH))


def singular_t_values(q: int, window: int = DEFAULT_WINDOW) -> list[int]:
    """Integer t in the window where E_{q,t} or H_{q,t} is singular."""
    out = set()
    (_, dE), (_, dH) = family_j_functions(q)
    for d in (dE, dH):
        if d.degree >= 1:
            out.update(integer_root_search(d, window))
    return sorted(out)


@dataclass
class ExceptionalScan:
    q: int
    window: int
    roots: list  # (N, t) pairs
    singular: list  # t values
    levels: list

    @property
    def caveat(self) -> str:
        return WINDOW_CAVEAT.format(window=self.window)

    def root_set(self) -> set:
        return {t for _, t in self.roots}

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "window": self.window,
            "levels": list(self.levels),
            "roots": [{"N": n, "t": t} for n, t in self.roots],
            "singular": list(self.singular),
            "caveat": self.caveat,
        }


def find_exceptional_t(
    q: int,
    store: ModPolyStore,
    levels: Iterable[int] = EVEN_KENKU_LEVELS,
    window: int = DEFAULT_WINDOW,
) -> ExceptionalScan:
    levels = list(levels)
    store.require(levels)
    singular = singular_t_values(q, window)
    roots = []
    for n in levels:
        f = family_isogeny_poly(store.get(n), q)
        if f.degree < 1:
            continue
        for t in integer_root_search(f, window):
            if t not in singular:
                roots.append((n, t))
    return ExceptionalScan(q, window, sorted(roots), singular, levels)
