"""Generate classical modular polynomial data files.

Prime levels come from q-expansions of j: the power sums of the conjugates
j(l*tau), j((tau+b)/l) are integral Laurent series, Newton's identities give
the elementary symmetric functions, and each of those is rewritten as a
polynomial in j by peeling off polar parts.  Composite levels are obtained
from resultants:

    Res_Z(Phi_m(X,Z), Phi_n(Z,Y)) = Phi_mn            gcd(m, n) = 1
    Res_Z(Phi_p^k(X,Z), Phi_p(Z,Y)) = Phi_p^(k+1) * Phi_p^(k-1)^p

Output is written as data/phi_j_N.txt, one ``[i,j] c`` line per term with
i >= j, plus a MANIFEST of sha256 checksums.

Requires python-flint (tooling only; the package itself does not use it).
"""

from __future__ import annotations

import argparse
import hashlib
import sys
from pathlib import Path

import flint


def j_series(prec: int) -> list[int]:
    """Coefficients c(-1), c(0), ..., c(prec) of j = 1/q + 744 + ..."""
    n = prec + 2
    sigma3 = [0] * (n + 1)
    for d in range(1, n + 1):
        for m in range(d, n + 1, d):
            sigma3[m] += d**3
    e4 = [1] + [240 * sigma3[m] for m in range(1, n + 1)]
    e4cube = _mul(_mul(e4, e4, n), e4, n)
    # prod (1 - q^k)^24
    eta24 = [1] + [0] * n
    for k in range(1, n + 1):
        for _ in range(24):
            for m in range(n, k - 1, -1):
                eta24[m] -= eta24[m - k]
    # j = E4^3 / (q * eta24)
    inv = [0] * (n + 1)
    inv[0] = 1
    for m in range(1, n + 1):
        inv[m] = -sum(eta24[i] * inv[m - i] for i in range(1, m + 1))
    quot = _mul(e4cube, inv, n)
    return quot[: prec + 2]


def _mul(a: list[int], b: list[int], n: int) -> list[int]:
    out = [0] * (n + 1)
    for i, x in enumerate(a[: n + 1]):
        if x:
            for k, y in enumerate(b[: n + 1 - i]):
                out[i + k] += x * y
    return out


class Laurent:
    """Truncated Laurent series: coeffs[i] is the coefficient of q^(lo+i)."""

    def __init__(self, lo: int, coeffs: list[int]):
        self.lo = lo
        self.coeffs = coeffs

    @property
    def hi(self) -> int:
        return self.lo + len(self.coeffs) - 1

    def __getitem__(self, e: int) -> int:
        i = e - self.lo
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def mul(self, other: "Laurent", hi: int) -> "Laurent":
        lo = self.lo + other.lo
        out = [0] * max(hi - lo + 1, 0)
        for i, x in enumerate(self.coeffs):
            if not x:
                continue
            for k, y in enumerate(other.coeffs):
                idx = i + k
                if idx >= len(out):
                    break
                out[idx] += x * y
        return Laurent(lo, out)


def prime_level(ell: int) -> dict[tuple[int, int], int]:
    psi = ell + 1
    top = (ell + 1) * (psi + 1) + ell
    nmax = ell * top + 2
    base = j_series(nmax)
    j = Laurent(-1, base)
    powers = [Laurent(0, [1])]
    for k in range(1, psi + 1):
        powers.append(powers[-1].mul(j, nmax))

    psums = [None]
    for k in range(1, psi + 1):
        jk = powers[k]
        coeffs: dict[int, int] = {}
        for n in range(-k, top // ell + 1):
            coeffs[ell * n] = coeffs.get(ell * n, 0) + jk[n]
        for m in range(-((k + ell - 1) // ell), top + 1):
            coeffs[m] = coeffs.get(m, 0) + ell * jk[ell * m]
        lo = min(coeffs)
        psums.append(Laurent(lo, [coeffs.get(e, 0) for e in range(lo, top + 1)]))

    elem = [Laurent(0, [1] + [0] * top)]
    for k in range(1, psi + 1):
        acc: dict[int, int] = {}
        for i in range(1, k + 1):
            prod = elem[k - i].mul(psums[i], top)
            sign = 1 if i % 2 else -1
            for idx, c in enumerate(prod.coeffs):
                e = prod.lo + idx
                acc[e] = acc.get(e, 0) + sign * c
        # products beyond this exponent see truncation error
        valid = top - (ell + 1) * k - ell
        lo = min(acc)
        coeffs = []
        for e in range(lo, valid + 1):
            c = acc.get(e, 0)
            if c % k:
                raise ArithmeticError(f"non-integral e_{k} at q^{e}")
            coeffs.append(c // k)
        elem.append(Laurent(lo, coeffs))

    phi: dict[tuple[int, int], int] = {}
    for k in range(psi + 1):
        # e_k(q) as a polynomial in j
        series = dict((elem[k].lo + i, c) for i, c in enumerate(elem[k].coeffs))
        poly: dict[int, int] = {}
        for m in range(psi + 1, -1, -1):
            c = series.get(-m, 0)
            if m == 0:
                poly[0] = c
                break
            if c:
                poly[m] = c
                jm = powers[m]
                for n in range(-m, 1):
                    series[n] = series.get(n, 0) - c * jm[n]
        for e, c in series.items():
            if e < 0 and c:
                raise ArithmeticError("polar part not exhausted")
        sign = -1 if k % 2 else 1
        for m, c in poly.items():
            if c:
                phi[(psi - k, m)] = sign * c
    return phi


def to_flint(ctx, coeffs: dict[tuple[int, int], int], xy: tuple[int, int]):
    gens = ctx.gens()
    x, y = gens[xy[0]], gens[xy[1]]
    out = ctx.from_dict({})
    for (i, k), c in coeffs.items():
        out += c * x**i * y**k
    return out


def from_flint(poly) -> dict[tuple[int, int], int]:
    out = {}
    for exps, c in poly.to_dict().items():
        out[(exps[0], exps[1])] = int(c)
    return out


def compose(ctx, a, b):
    """Res_Z(A(X,Z), B(Z,Y)) for level dicts a, b."""
    A = to_flint(ctx, a, (0, 2))
    B = to_flint(ctx, b, (2, 1))
    return A.resultant(B, "z")


def normalize(poly):
    d = from_flint(poly)
    lead = max(i for i, _ in d)
    c = d[(lead, 0)]
    if c not in (1, -1):
        raise ArithmeticError("leading coefficient is not a unit")
    return poly * c


def generate(levels: list[int]) -> dict[int, dict[tuple[int, int], int]]:
    ctx = flint.fmpz_mpoly_ctx.get(("x", "y", "z"), "lex")
    x, y, _ = ctx.gens()
    cache = {1: from_flint(x - y)}

    def level(n: int):
        if n in cache:
            return cache[n]
        fac = _factor(n)
        if len(fac) == 1 and fac[0][1] == 1:
            cache[n] = prime_level(n)
        elif len(fac) > 1:
            p, e = fac[0]
            m = p**e
            res = compose(ctx, level(m), level(n // m))
            cache[n] = from_flint(normalize(res))
        else:
            p, e = fac[0]
            res = compose(ctx, level(n // p), level(p))
            # the diagonal factor appears once more when n = p^2
            mult = p + 1 if n == p * p else p
            lower = to_flint(ctx, level(n // (p * p)), (0, 1)) ** mult
            quot, rem = divmod(res, lower)
            if not rem.is_zero():
                raise ArithmeticError(f"inexact division at level {n}")
            cache[n] = from_flint(normalize(quot))
        if max(i for i, _ in cache[n]) != psi(n):
            raise ArithmeticError(f"level {n} has the wrong degree")
        return cache[n]

    return {n: level(n) for n in levels}


def psi(n: int) -> int:
    out = n
    for p, _ in _factor(n):
        out = out // p * (p + 1)
    return out


def _factor(n: int) -> list[tuple[int, int]]:
    out = []
    p = 2
    while p * p <= n:
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        if e:
            out.append((p, e))
        p += 1
    if n > 1:
        out.append((n, 1))
    return out


def write_level(path: Path, coeffs: dict[tuple[int, int], int]) -> None:
    lines = [f"[{i},{k}] {c}" for (i, k), c in sorted(coeffs.items(), reverse=True) if i >= k and c]
    path.write_text("\n".join(lines) + "\n")


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("data"))
    ap.add_argument("levels", nargs="*", type=int, default=[2, 4, 6, 8, 10, 12, 14, 16, 18])
    args = ap.parse_args(argv)
    args.out.mkdir(parents=True, exist_ok=True)
    polys = generate(args.levels)
    manifest = []
    for n in args.levels:
        path = args.out / f"phi_j_{n}.txt"
        write_level(path, polys[n])
        digest = hashlib.sha256(path.read_bytes()).hexdigest()
        manifest.append(f"{n} {path.name} {digest}")
        print(f"level {n}: {sum(1 for (i, k) in polys[n] if i >= k)} terms", file=sys.stderr)
    (args.out / "MANIFEST").write_text("\n".join(manifest) + "\n")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
