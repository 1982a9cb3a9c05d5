"""Exact certification of admissibility and irreducibility of signed index sets.

Two independent routes decide admissibility:

* cone form -- find ``lam >= 0`` with ``R^T A lam = 1`` and ``(Dperp)^T A lam = 0``
  where column t of A is ``alpha_t e_{j_t}``;
* node form -- find coordinates ``xi`` with ``xi_phi = 0``, ``xi_psi = 1``,
  zero length off the set and correctly signed length on it.

Both are phase-1 simplex runs in :mod:`latticeplast.simplex`, no tolerances.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .model import SpringGraph, incidence_matrix, kernel_basis
from .rational import RationalMatrix, dot, fraction_str
from .simplex import check_farkas, solve_lp
from .topology import SignedIndexSet, enumerate_index_sets


class ConsistencyError(RuntimeError):
    """Two results that theory says must agree do not."""


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class LambdaCertificate:
    lambdas: dict  # spring element (alpha, j) -> Fraction
    c1: Fraction

    def to_dict(self) -> dict:
        return {
            "lambdas": [
                {"alpha": a, "spring": j, "lambda": fraction_str(v)}
                for (a, j), v in sorted(self.lambdas.items(), key=lambda kv: (kv[0][1], kv[0][0]))
            ],
            "c1": fraction_str(self.c1),
        }


@dataclass(frozen=True)
class XiCertificate:
    xi: tuple[Fraction, ...]
    c1: Fraction

    def to_dict(self) -> dict:
        return {"xi": [fraction_str(v) for v in self.xi], "c1": fraction_str(self.c1)}


@dataclass(frozen=True)
class AdmissibilityVerdict:
    admissible: bool
    certificate: LambdaCertificate | XiCertificate | None = None
    refutation: str | None = None
    farkas: tuple[Fraction, ...] | None = None

    def __bool__(self) -> bool:
        return self.admissible

    def to_dict(self) -> dict:
        out: dict = {"admissible": self.admissible}
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_dict()
        if self.refutation is not None:
            out["refutation"] = self.refutation
            out["farkas"] = [fraction_str(v) for v in self.farkas]
        return out


@dataclass(frozen=True)
class IrreducibilityReport:
    irreducible: bool
    applicable: bool = True
    failing_subset: SignedIndexSet | None = None
    removal_checks: tuple = ()

    def __bool__(self) -> bool:
        return self.irreducible

    def to_dict(self) -> dict:
        return {
            "irreducible": self.irreducible,
            "applicable": self.applicable,
            "failing_subset": None if self.failing_subset is None else self.failing_subset.to_list(),
            "removal_checks": [
                {"removed": {"alpha": a, "spring": j}, "subset_admissible": ok}
                for (a, j), ok in self.removal_checks
            ],
        }


@lru_cache(maxsize=256)
def _matrices(g: SpringGraph):
    return incidence_matrix(g), kernel_basis(g)


def _check_ids(g: SpringGraph, i0: SignedIndexSet) -> None:
    if not len(i0):
        raise ValueError("index set must be non-empty")
    for _, j in i0:
        if not 1 <= j <= g.m:
            raise ValueError(f"unknown spring {j}")


def _cone_system(g: SpringGraph, i0: SignedIndexSet):
    _, dperp = _matrices(g)
    elems = i0.elements
    rows = [[a * g.r_vector[j - 1] for a, j in elems]]
    for c in range(dperp.shape[1]):
        rows.append([a * dperp[j - 1, c] for a, j in elems])
    rhs = [Fraction(1)] + [Fraction(0)] * dperp.shape[1]
    return rows, rhs


def cone_residuals(g: SpringGraph, i0: SignedIndexSet, lambdas: dict, c1: Fraction):
    """Exact (rel1, rel2) residuals of a lambda certificate."""
    _, dperp = _matrices(g)
    v = [Fraction(0)] * g.m
    for (a, j), lam in lambdas.items():
        v[j - 1] += a * lam
    rel1 = dot(g.r_vector, v) - c1
    rel2 = tuple(dot(dperp.column(c), v) for c in range(dperp.shape[1]))
    return rel1, rel2


def check_admissible(g: SpringGraph, i0: SignedIndexSet) -> AdmissibilityVerdict:
    """Cone-form decision with c1 normalised to 1."""
    _check_ids(g, i0)
    rows, rhs = _cone_system(g, i0)
    res = solve_lp(rows, rhs)
    if res.status == "infeasible":
        if not check_farkas(rows, rhs, res.farkas):
            raise ConsistencyError("simplex produced an invalid Farkas vector")
        y = res.farkas
        return AdmissibilityVerdict(
            False,
            refutation=(
                f"y = ({', '.join(map(fraction_str, y))}) on rows [R^T; Dperp^T]: "
                f"y.column <= 0 for every element, y.(1,0,...,0) = {fraction_str(y[0])} > 0; "
                f"phase-1 row ({', '.join(map(fraction_str, res.phase1_row))})"
            ),
            farkas=y,
        )
    lambdas = dict(zip(i0.elements, res.x))
    cert = LambdaCertificate(lambdas, Fraction(1))
    rel1, rel2 = cone_residuals(g, i0, lambdas, cert.c1)
    if rel1 != 0 or any(rel2):
        raise ConsistencyError(f"certificate residuals nonzero: {rel1}, {rel2}")
    return AdmissibilityVerdict(True, certificate=cert)


def _node_system(g: SpringGraph, i0: SignedIndexSet):
    """Rows/rhs over variables (u_i, v_i for free nodes) + one slack per signed spring."""
    D, _ = _matrices(g)
    free = [i for i in range(1, g.n + 1) if i not in (g.phi, g.psi)]
    signs: dict[int, set[int]] = {}
    for a, j in i0:
        signs.setdefault(j, set()).add(a)
    signed = [j for j in sorted(signs) if len(signs[j]) == 1]
    nvar = 2 * len(free) + len(signed)
    rows, rhs = [], []
    for j in range(1, g.m + 1):
        if j in signs and len(signs[j]) == 2:
            continue
        drow = D.row(j - 1)
        alpha = next(iter(signs[j])) if j in signs else 1
        row = [Fraction(0)] * nvar
        for k, i in enumerate(free):
            row[2 * k] = alpha * drow[i - 1]
            row[2 * k + 1] = -alpha * drow[i - 1]
        if j in signs:
            row[2 * len(free) + signed.index(j)] = Fraction(-1)
        rows.append(row)
        rhs.append(-alpha * drow[g.psi - 1])  # xi_psi = 1, xi_phi = 0
    return rows, rhs, free, nvar


def check_admissible_nodewise(g: SpringGraph, i0: SignedIndexSet) -> AdmissibilityVerdict:
    """Node-coordinate decision; a spring carrying both signs is left unconstrained."""
    _check_ids(g, i0)
    rows, rhs, free, nvar = _node_system(g, i0)
    if not rows:
        rows, rhs = [[Fraction(0)] * nvar], [Fraction(0)]
    res = solve_lp(rows, rhs)
    if res.status == "infeasible":
        if not check_farkas(rows, rhs, res.farkas):
            raise ConsistencyError("simplex produced an invalid Farkas vector")
        return AdmissibilityVerdict(
            False,
            refutation=(
                "no node coordinates with xi_phi=0, xi_psi=1 meet the length constraints; "
                f"Farkas multipliers per constrained spring ({', '.join(map(fraction_str, res.farkas))})"
            ),
            farkas=res.farkas,
        )
    xi = [Fraction(0)] * g.n
    xi[g.psi - 1] = Fraction(1)
    for k, i in enumerate(free):
        xi[i - 1] = res.x[2 * k] - res.x[2 * k + 1]
    cert = XiCertificate(tuple(xi), Fraction(1))
    if not xi_certificate_valid(g, i0, cert.xi):
        raise ConsistencyError("node certificate failed substitution")
    return AdmissibilityVerdict(True, certificate=cert)


def xi_certificate_valid(g: SpringGraph, i0: SignedIndexSet, xi) -> bool:
    D, _ = _matrices(g)
    if xi[g.psi - 1] - xi[g.phi - 1] <= 0:
        return False
    lengths = D @ xi
    signs: dict[int, set[int]] = {}
    for a, j in i0:
        signs.setdefault(j, set()).add(a)
    for j in range(1, g.m + 1):
        length = lengths[j - 1]
        s = signs.get(j)
        if s is None:
            if length != 0:
                return False
        elif len(s) == 1 and next(iter(s)) * length < 0:
            return False
    return True


def check_irreducible(g: SpringGraph, i0: SignedIndexSet) -> IrreducibilityReport:
    """One-element removal scan; enough because admissibility is monotone."""
    if not check_admissible(g, i0):
        return IrreducibilityReport(False, applicable=False)
    checks = []
    failing = None
    for e in i0.elements:
        sub = i0.without(e)
        ok = bool(len(sub)) and check_admissible(g, sub).admissible
        checks.append((e, ok))
        if ok and failing is None:
            failing = sub
    return IrreducibilityReport(failing is None, True, failing, tuple(checks))


def positive_certificate(g: SpringGraph, i0: SignedIndexSet) -> tuple[LambdaCertificate, Fraction]:
    """Certificate with every lambda > 0, plus the attained lower bound t.

    Maximises t subject to t <= lambda_j and t <= 1 on the cone system.
    """
    report = check_irreducible(g, i0)
    if not report.applicable:
        raise ValueError("index set is not admissible")
    if not report.irreducible:
        raise ValueError(f"index set is reducible (admissible subset {report.failing_subset})")
    rows, rhs = _cone_system(g, i0)
    s = len(i0)
    # variables: lambda (s), t, w (s), u
    nvar = 2 * s + 2
    A = [row + [Fraction(0)] * (s + 2) for row in rows]
    b = list(rhs)
    for k in range(s):
        row = [Fraction(0)] * nvar
        row[k] = Fraction(1)
        row[s] = Fraction(-1)
        row[s + 1 + k] = Fraction(-1)
        A.append(row)
        b.append(Fraction(0))
    row = [Fraction(0)] * nvar
    row[s] = Fraction(1)
    row[-1] = Fraction(1)
    A.append(row)
    b.append(Fraction(1))
    cost = [0] * nvar
    cost[s] = 1
    res = solve_lp(A, b, cost)
    if res.status != "optimal":
        raise ConsistencyError(f"bound problem ended {res.status}")
    t = res.x[s]
    if t <= 0:
        raise ConsistencyError("irreducible set admits no strictly positive certificate")
    lambdas = dict(zip(i0.elements, res.x[:s]))
    return LambdaCertificate(lambdas, Fraction(1)), t


# ----------------------------------------------------------------- oracle


def candidate_count(m: int, max_card: int) -> int:
    return sum(math.comb(2 * m, k) for k in range(1, max_card + 1))


def sign_pattern_infeasible(g: SpringGraph, i0: SignedIndexSet) -> bool:
    """Cheap exact refutation of admissibility from the sign pattern alone.

    Springs outside ``i0`` carry zero length, so their end nodes share one
    coordinate and can be merged. Each (alpha, j) in ``i0`` then asks
    alpha * (xi_t - xi_s) >= 0, a difference constraint between merged
    classes. With xi_phi = 0 and xi_psi = 1 this fails exactly when phi's
    class is reachable from psi's class along those constraints.
    """
    parent = list(range(g.n + 1))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    used = set(i0.springs)
    for j, s, t in g.springs:
        if j not in used:
            parent[find(s)] = find(t)
    src, dst = find(g.psi), find(g.phi)
    if src == dst:
        return True
    succ: dict[int, set[int]] = {}
    mixed = {j for a, j in i0 if (-a, j) in i0}
    for a, j in i0:
        if j in mixed:
            continue  # both signs allowed: no constraint on its length
        s, t = g.spring(j)
        lo, hi = (find(s), find(t)) if a > 0 else (find(t), find(s))
        succ.setdefault(lo, set()).add(hi)
    seen, stack = {src}, [src]
    while stack:
        for k in succ.get(stack.pop(), ()):
            if k == dst:
                return True
            if k not in seen:
                seen.add(k)
                stack.append(k)
    return False


def exhaustive_irreducible_sets(
    g: SpringGraph,
    max_card: int | None = None,
    include_mixed: bool = False,
    budget: int = 10**6,
) -> list[SignedIndexSet]:
    """Brute force: every admissible and irreducible set up to ``max_card`` elements.

    Candidates are scanned by increasing size; one that contains an already
    found irreducible set is reducible and skipped without an LP. Any other
    admissible candidate is irreducible, since an admissible proper subset
    would contain a smaller irreducible one found earlier. Candidates refuted
    by ``sign_pattern_infeasible`` are also skipped; every accepted set is
    decided by the exact LP.
    """
    if max_card is None:
        max_card = g.m - g.n + 2
    need = candidate_count(g.m, max_card)
    if need > budget:
        raise BudgetExceeded(f"{need} candidate sets exceed the budget of {budget}")
    signed = [(a, j) for j in range(1, g.m + 1) for a in (1, -1)]
    found: list[SignedIndexSet] = []
    found_sets: list[frozenset] = []
    for k in range(1, max_card + 1):
        for combo in itertools.combinations(signed, k):
            if not include_mixed and len({j for _, j in combo}) < k:
                continue
            cs = frozenset(combo)
            if any(f <= cs for f in found_sets):
                continue
            i0 = SignedIndexSet(combo)
            if sign_pattern_infeasible(g, i0):
                continue
            if check_admissible(g, i0).admissible:
                found.append(i0)
                found_sets.append(cs)
    return sorted(found, key=SignedIndexSet.sort_key)


@dataclass
class CompletenessReport:
    topological: list[SignedIndexSet]
    algebraic: list[SignedIndexSet]
    only_algebraic: list[SignedIndexSet] = field(default_factory=list)
    only_topological: list[SignedIndexSet] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "topological_count": len(self.topological),
            "algebraic_count": len(self.algebraic),
            "only_algebraic": [s.to_list() for s in self.only_algebraic],
            "only_topological": [s.to_list() for s in self.only_topological],
        }


def completeness_report(
    g: SpringGraph, max_card: int | None = None, budget: int = 10**6
) -> CompletenessReport:
    """Compare bipartition-derived sets with the brute-force oracle, both ways."""
    if max_card is None:
        max_card = g.m - g.n + 2
    topo = [e.index_set for e in enumerate_index_sets(g)]
    alg = exhaustive_irreducible_sets(g, max_card, budget=budget)
    topo_in_range = {s for s in topo if len(s) <= max_card}
    alg_set = set(alg)
    return CompletenessReport(
        topological=topo,
        algebraic=alg,
        only_algebraic=[s for s in alg if s not in topo_in_range],
        only_topological=sorted(topo_in_range - alg_set, key=SignedIndexSet.sort_key),
    )


def lambda_matrix(g: SpringGraph, i0: SignedIndexSet) -> RationalMatrix:
    """The constraint matrix [R^T; Dperp^T] restricted to the signed columns of ``i0``."""
    rows, _ = _cone_system(g, i0)
    return RationalMatrix(rows, len(i0))
