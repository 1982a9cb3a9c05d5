"""Two-phase primal simplex over exact rationals, Bland's rule throughout.

Only what the certificates need: ``max c.x  s.t.  A x = b, x >= 0``.
Infeasible problems come back with a Farkas vector ``y`` such that
``y.A <= 0`` componentwise and ``y.b > 0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal", "infeasible" or "unbounded"
    x: tuple[Fraction, ...] | None = None
    objective: Fraction | None = None
    farkas: tuple[Fraction, ...] | None = None
    phase1_row: tuple[Fraction, ...] | None = None
    pivots: int = 0

    @property
    def feasible(self) -> bool:
        return self.status != "infeasible"


def _pivot(T: list[list[Fraction]], r: int, c: int) -> None:
    piv = T[r][c]
    row = T[r] if piv == 1 else [v / piv for v in T[r]]
    T[r] = row
    nz = [k for k, v in enumerate(row) if v]
    for i, other in enumerate(T):
        if i == r:
            continue
        f = other[c]
        if f:
            for k in nz:
                other[k] -= f * row[k]


def _run(T, basis: list[int], allowed: int) -> tuple[str, int]:
    """Minimise with the objective stored as the last row of T."""
    obj = T[-1]
    pivots = 0
    while True:
        enter = next((j for j in range(allowed) if obj[j] < 0), None)
        if enter is None:
            return "optimal", pivots
        best = None
        for i in range(len(T) - 1):
            a = T[i][enter]
            if a > 0:
                ratio = T[i][-1] / a
                key = (ratio, basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            return "unbounded", pivots
        r = best[1]
        _pivot(T, r, enter)
        basis[r] = enter
        obj = T[-1]
        pivots += 1


def solve_lp(
    A: Sequence[Sequence], b: Sequence, c: Sequence | None = None
) -> LPResult:
    """Maximise ``c.x`` over ``{x >= 0 : A x = b}``; pure feasibility if ``c`` is None."""
    A = [[Fraction(v) for v in row] for row in A]
    b = [Fraction(v) for v in b]
    m = len(A)
    n = len(A[0]) if m else (len(c) if c is not None else 0)
    if m == 0:
        x = tuple([ZERO] * n)
        if c is not None and any(Fraction(v) > 0 for v in c):
            return LPResult("unbounded", x=x)
        return LPResult("optimal", x=x, objective=ZERO)

    signs = [(-1 if bi < 0 else 1) for bi in b]
    # tableau columns: n structural, m artificial, rhs
    T = []
    for i in range(m):
        s = signs[i]
        row = [s * v for v in A[i]] + [ZERO] * m + [s * b[i]]
        row[n + i] = ONE
        T.append(row)
    obj = [ZERO] * (n + m + 1)
    for row in T:
        for k in range(n):
            obj[k] -= row[k]
        obj[-1] -= row[-1]
    T.append(obj)
    basis = list(range(n, n + m))

    _, pivots = _run(T, basis, n + m)
    infeas = -T[-1][-1]
    if infeas > 0:
        # reduced cost of artificial k is 1 - y_k
        y = tuple(signs[i] * (ONE - T[-1][n + i]) for i in range(m))
        return LPResult(
            "infeasible",
            farkas=y,
            objective=infeas,
            phase1_row=tuple(T[-1][:n]),
            pivots=pivots,
        )

    # drive zero-level artificials out of the basis; drop redundant rows
    i = 0
    while i < len(T) - 1:
        if basis[i] >= n:
            enter = next((k for k in range(n) if T[i][k] != 0), None)
            if enter is None:
                del T[i]
                del basis[i]
                continue
            _pivot(T, i, enter)
            basis[i] = enter
            pivots += 1
        i += 1
    T = [row[:n] + [row[-1]] for row in T]

    if c is not None:
        cost = [-Fraction(v) for v in c]  # minimise -c.x
        obj = cost + [ZERO]
        for i, bv in enumerate(basis):
            cb = cost[bv]
            if cb:
                obj = [o - cb * v for o, v in zip(obj, T[i])]
        T[-1] = obj
        status, more = _run(T, basis, n)
        pivots += more
        if status == "unbounded":
            return LPResult("unbounded", pivots=pivots)

    x = [ZERO] * n
    for i, bv in enumerate(basis):
        x[bv] = T[i][-1]
    value = sum((Fraction(cv) * xv for cv, xv in zip(c, x)), ZERO) if c is not None else ZERO
    return LPResult("optimal", x=tuple(x), objective=value, pivots=pivots)


def check_farkas(A, b, y) -> bool:
    """Exact check that ``y`` certifies infeasibility of ``A x = b, x >= 0``."""
    ncols = len(A[0]) if A else 0
    yA = [sum((Fraction(y[i]) * Fraction(A[i][k]) for i in range(len(A))), ZERO) for k in range(ncols)]
    yb = sum((Fraction(yi) * Fraction(bi) for yi, bi in zip(y, b)), ZERO)
    return all(v <= 0 for v in yA) and yb > 0
