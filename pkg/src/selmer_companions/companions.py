"""Sufficient-condition checks for 3-Selmer companionship, and the non-isogeny test.

Nothing here computes a Selmer group.  A pair is certified when it meets a
list of local and global conditions that are known to be sufficient, given
that H is the Hessian of E (the torsion and canonical-subgroup compatibility
of a curve with its Hessian is assumed, not recomputed).
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .curves import SingularCurveError, WeierstrassCurve, invariants, is_isomorphic
from .exactmath import squarefree_part, valuation
from .hessian import DegenerateHessianError, family_E, family_H, hessian_curve
from .localred import bad_primes, pot_mult_primes, tate_algorithm
from .modpoly import EVEN_KENKU_LEVELS, ModPolyStore, eval_modpoly

CERTIFIED = "companions-certified"
NOT_CERTIFIED = "not-certified"
DEGENERATE = "degenerate"

NOT_ISOGENOUS = "not-isogenous-certified"
INCONCLUSIVE = "inconclusive"

CONDITIONS = ("hessian_identity", "pot_mult_at_3", "bad_primes_equal", "pot_mult_primes_equal", "kodaira_ok")

ASSUMPTIONS = (
    "E[3] and Hess(E)[3] are isomorphic Galois modules (assumed from the Hessian relation)",
    "canonical 3-subgroups correspond under that isomorphism (assumed from the Hessian relation)",
)

# pairs inside the table classes that are excluded; (3, 0) lies outside its class
EXCEPTIONAL_PAIRS = frozenset({(1, 1), (1, 9), (3, -1), (3, 0), (8, 0)})
SINGULAR_PAIRS = frozenset({(12, 0)})

TABLE1_Q = (-15, 1, 3, 5, 7, 8, 10, 11, 12, 13, 17, 21)

HEURISTIC_LABEL = "heuristic evidence from sampled t; not a proof"


def _primes(ps) -> list[int]:
    return sorted(ps)


@dataclass
class CompanionReport:
    verdict: str
    hessian_identity: bool = False
    pot_mult_at_3: bool = False
    bad_primes_equal: bool = False
    bad_primes_E: list = field(default_factory=list)
    bad_primes_H: list = field(default_factory=list)
    pot_mult_primes_equal: bool = False
    pot_mult_primes_E: list = field(default_factory=list)
    pot_mult_primes_H: list = field(default_factory=list)
    kodaira_ok: bool = False
    kodaira_types: dict = field(default_factory=dict)  # p -> (type of E, type of H)
    partial: bool = False
    reason: str = ""

    def conditions(self) -> dict:
        return {name: getattr(self, name) for name in CONDITIONS}

    def failed(self) -> list[str]:
        return [name for name, ok in self.conditions().items() if not ok]

    @property
    def certified(self) -> bool:
        return self.verdict == CERTIFIED

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "hessian_identity": self.hessian_identity,
            "pot_mult_at_3": self.pot_mult_at_3,
            "bad_primes_equal": {"value": self.bad_primes_equal, "E": self.bad_primes_E, "H": self.bad_primes_H},
            "pot_mult_primes_equal": {
                "value": self.pot_mult_primes_equal,
                "E": self.pot_mult_primes_E,
                "H": self.pot_mult_primes_H,
            },
            "kodaira_ok": {
                "value": self.kodaira_ok,
                "types": {str(p): {"E": e, "H": h} for p, (e, h) in sorted(self.kodaira_types.items())},
            },
            "partial": self.partial,
            "reason": self.reason,
            "assumptions": list(ASSUMPTIONS),
        }


def companion_conditions(E: WeierstrassCurve, H: WeierstrassCurve) -> CompanionReport:
    if E.is_singular() or H.is_singular():
        return CompanionReport(DEGENERATE, reason="singular model")
    jE, jH = E.j, H.j
    if jE == 0:
        return CompanionReport(DEGENERATE, reason="j(E) = 0, the Hessian is three lines")

    rep = CompanionReport(NOT_CERTIFIED)
    try:
        rep.hessian_identity = is_isomorphic(hessian_curve(E), H) is not None
    except DegenerateHessianError:
        return CompanionReport(DEGENERATE, reason="j(E) = 0, the Hessian is three lines")

    rep.pot_mult_at_3 = valuation(jE, 3) < 0

    badE, badH = bad_primes(E), bad_primes(H)
    rep.partial = badE.partial or badH.partial
    rep.bad_primes_E, rep.bad_primes_H = badE.sorted(), badH.sorted()
    rep.bad_primes_equal = not rep.partial and badE.primes == badH.primes

    pmE, pmH = pot_mult_primes(E), pot_mult_primes(H)
    rep.partial = rep.partial or pmE.partial or pmH.partial
    rep.pot_mult_primes_E, rep.pot_mult_primes_H = pmE.sorted(), pmH.sorted()
    rep.pot_mult_primes_equal = not (pmE.partial or pmH.partial) and pmE.primes == pmH.primes

    ok = True
    for p in sorted(badE.primes | badH.primes):
        if p in pmE and p in pmH:
            continue
        kE = tate_algorithm(E, p).kodaira
        kH = tate_algorithm(H, p).kodaira
        rep.kodaira_types[p] = (str(kE), str(kH))
        # a type only matters where that curve has potentially good reduction
        if (p not in pmE and kE.forbidden) or (p not in pmH and kH.forbidden):
            ok = False
    rep.kodaira_ok = ok and not rep.partial

    if all(rep.conditions().values()):
        rep.verdict = CERTIFIED
    elif rep.partial:
        rep.reason = "a discriminant was only partially factored"
    return rep


# --------------------------------------------------------------------------
# non-isogeny


@dataclass
class IsogenyReport:
    cm_excluded: bool
    odd_excluded: bool
    even_levels: list  # (N, vanishes) pairs
    verdict: str

    @property
    def witness_levels(self) -> list[int]:
        return [n for n, vanishes in self.even_levels if vanishes]

    @property
    def certified(self) -> bool:
        return self.verdict == NOT_ISOGENOUS

    def to_dict(self) -> dict:
        return {
            "cm_excluded": self.cm_excluded,
            "odd_excluded": self.odd_excluded,
            "even_levels": [{"N": n, "vanishes": v} for n, v in self.even_levels],
            "verdict": self.verdict,
        }


def non_isogeny_check(
    E: WeierstrassCurve,
    H: WeierstrassCurve,
    store: ModPolyStore,
    levels: Iterable[int] = EVEN_KENKU_LEVELS,
) -> IsogenyReport:
    """Rule out a Q-bar isogeny between E and H.

    A non-CM curve isogenous to another over Q-bar is, after twisting, linked
    by a cyclic isogeny over Q whose degree is bounded; odd degrees are ruled
    out when the discriminants differ by a non-square, and the even degrees
    are tested with Phi_N on the (twist-invariant) j-invariants.
    """
    if E.is_singular() or H.is_singular():
        raise SingularCurveError("both curves must be nonsingular")
    levels = list(levels)
    store.require(levels)
    jE, jH = E.j, H.j
    cm_excluded = jE.denominator != 1 and jH.denominator != 1
    dE, dH = invariants(E).disc, invariants(H).disc
    odd_excluded = squarefree_part(dE * dH) != 1
    even = [(n, eval_modpoly(store.get(n), jE, jH) == 0) for n in levels]
    witnesses = [n for n, v in even if v]
    if witnesses:
        verdict = f"isogenous-witness({witnesses[0]})"
    elif cm_excluded and odd_excluded:
        verdict = NOT_ISOGENOUS
    else:
        verdict = INCONCLUSIVE
    return IsogenyReport(cm_excluded, odd_excluded, even, verdict)


# --------------------------------------------------------------------------
# the table of families


@dataclass(frozen=True)
class TClass:
    residue: int
    modulus: int

    def __contains__(self, t: int) -> bool:
        return t % self.modulus == self.residue % self.modulus

    def __str__(self) -> str:
        if self.modulus == 1:
            return "all t"
        return f"t = {self.residue} mod {self.modulus}"


def table1_class(q: int) -> TClass:
    """Congruence class of t for a tabulated q, derived from q mod 16."""
    if q not in TABLE1_Q:
        raise ValueError(f"q = {q} is not tabulated; use search_q to look for new families")
    if q % 2 == 0:
        return TClass(0, 1)
    if q % 4 == 3:
        return TClass(3, 4)
    if q % 16 in (1, 5, 13):
        return TClass(1, 8)
    raise ValueError(f"q = {q} has no known class")


@dataclass
class TableRecord:
    q: int
    t: int
    companion: CompanionReport
    isogeny: IsogenyReport | None
    exceptional: bool
    singular: bool

    @property
    def ok(self) -> bool:
        """Certified, or an expected exception."""
        if self.exceptional or self.singular:
            return True
        if not self.companion.certified:
            return False
        return self.isogeny is None or self.isogeny.certified

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "t": self.t,
            "exceptional": self.exceptional,
            "singular": self.singular,
            "companion": self.companion.to_dict(),
            "isogeny": self.isogeny.to_dict() if self.isogeny else None,
        }


def check_pair(q: int, t: int, store: ModPolyStore | None = None) -> TableRecord:
    E, H = family_E(q, t), family_H(q, t)
    singular = E.is_singular() or H.is_singular()
    comp = companion_conditions(E, H)
    iso = None
    if store is not None and not singular:
        iso = non_isogeny_check(E, H, store)
    return TableRecord(q, t, comp, iso, (q, t) in EXCEPTIONAL_PAIRS, singular)


def _check_pair_star(args):
    q, t, directory = args
    store = ModPolyStore(directory) if directory is not None else None
    return check_pair(q, t, store)


def verify_table1(
    q: int,
    t_values: Iterable[int],
    store: ModPolyStore | None = None,
    jobs: int = 1,
) -> list[TableRecord]:
    """One record per t in the class of q; t outside the class are dropped."""
    cls = table1_class(q)
    ts = [t for t in t_values if t in cls]
    if jobs > 1 and len(ts) > 1:
        directory = store.directory if store is not None else None
        with ProcessPoolExecutor(jobs) as pool:
            return list(pool.map(_check_pair_star, [(q, t, directory) for t in ts]))
    return [check_pair(q, t, store) for t in ts]


def sample_class(cls: TClass, count: int, bound: int = 200) -> list[int]:
    """Up to count values of t in the class, nearest to 0 first, with |t| <= bound."""
    out = []
    for k in range(bound + 1):
        for t in ((k,) if k == 0 else (k, -k)):
            if t in cls:
                out.append(t)
    return sorted(out[:count])


# --------------------------------------------------------------------------
# search


@dataclass
class ClassEvidence:
    q: int
    residue: int
    modulus: int
    samples: int
    passed: int
    degenerate: int
    failures: dict  # condition -> count

    @property
    def passing(self) -> bool:
        return self.samples > 0 and self.passed == self.samples

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "residue": self.residue,
            "modulus": self.modulus,
            "samples": self.samples,
            "passed": self.passed,
            "degenerate": self.degenerate,
            "failures": dict(sorted(self.failures.items())),
            "passing": self.passing,
            "label": HEURISTIC_LABEL,
        }


def _class_evidence(args) -> ClassEvidence:
    q, r, modulus, samples_per_class, bound = args
    ts = sample_class(TClass(r, modulus), samples_per_class, bound)
    passed = degenerate = 0
    failures: dict = {}
    for t in ts:
        rep = companion_conditions(family_E(q, t), family_H(q, t))
        if rep.verdict == CERTIFIED:
            passed += 1
        elif rep.verdict == DEGENERATE:
            degenerate += 1
        else:
            for name in rep.failed():
                failures[name] = failures.get(name, 0) + 1
    return ClassEvidence(q, r, modulus, len(ts), passed, degenerate, failures)


def search_q(
    q_values: Iterable[int],
    modulus: int,
    samples_per_class: int = 25,
    bound: int = 200,
    jobs: int = 1,
) -> list[ClassEvidence]:
    """Sample each residue class of t mod M for each q.

    Returns one evidence record per (q, class); a passing class is only
    heuristic evidence for a new family.
    """
    if modulus < 1:
        raise ValueError("modulus must be >= 1")
    tasks = [(q, r, modulus, samples_per_class, bound) for q in q_values if q != 0 for r in range(modulus)]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(jobs) as pool:
            return list(pool.map(_class_evidence, tasks))
    return [_class_evidence(task) for task in tasks]


def disc_ratio(q: int, t: int) -> Fraction:
    return invariants(family_H(q, t)).disc / invariants(family_E(q, t)).disc
