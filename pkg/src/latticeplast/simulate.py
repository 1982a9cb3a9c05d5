"""Quasistatic evolution of the elastoplastic network under l(t) = l0 + l1 t.

Each step minimises the incremental energy

    E(xi, p) = 1/2 (D xi - p)^T K (D xi - p)
               + sum_j c_j^+ (p_j - p_j^old)^+ - c_j^- (p_j - p_j^old)^-

subject to R^T D xi = l and xi_phi = 0. The minimiser is found by active-set
enumeration: every spring is either elastic (p fixed), at its upper limit or
at its lower limit; a mode fixes a linear system for (xi, r) and is accepted
when its solution satisfies the KKT sign conditions.
"""

from __future__ import annotations

import itertools
import json
import warnings
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from .algebra import (
    AdmissibilityVerdict,
    IrreducibilityReport,
    check_admissible,
    check_irreducible,
)
from .model import SpringGraph, incidence_matrix, validate_assumptions
from .topology import SignedIndexSet, enumerate_index_sets

LOWER, ELASTIC, UPPER = -1, 0, 1


class SimulationError(RuntimeError):
    pass


@dataclass(frozen=True)
class SimParams:
    dt: float = 1 / 64
    t_end: float = 20.0
    tol_eq: float | None = None  # default 1e-9 * max(1, max |c|)
    tol_conv: float = 1e-8
    window: int = 10
    flow_eps: float = 1e-6

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.window < 2:
            raise ValueError("window must be at least 2")
        if self.tol_conv <= 0 or self.flow_eps <= 0 or (self.tol_eq is not None and self.tol_eq <= 0):
            raise ValueError("tolerances must be positive")

    def resolved_tol_eq(self, net: "Network") -> float:
        if self.tol_eq is not None:
            return self.tol_eq
        return 1e-9 * max(1.0, float(np.max(np.abs(np.concatenate([net.c_minus, net.c_plus])))))


@dataclass(frozen=True)
class SimState:
    t: float
    sigma: np.ndarray
    p: np.ndarray
    xi: np.ndarray
    r: float
    mode: tuple[int, ...] = ()

    def to_record(self) -> dict:
        return {
            "t": self.t,
            "sigma": self.sigma.tolist(),
            "p": self.p.tolist(),
            "r": self.r,
        }


@dataclass(frozen=True)
class SimTrace:
    states: tuple[SimState, ...]
    dissipation: tuple[float, ...]
    params: SimParams
    l0: float
    l1: float

    def __len__(self) -> int:
        return len(self.states)

    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.states])

    def sigmas(self) -> np.ndarray:
        return np.array([s.sigma for s in self.states])

    def write_ndjson(self, fh) -> None:
        for s in self.states:
            fh.write(json.dumps(s.to_record()) + "\n")


@dataclass(frozen=True)
class TerminalReport:
    converged: bool
    t_star: float | None
    s_star: np.ndarray
    flow_set: SignedIndexSet
    flow_rates: np.ndarray = field(default_factory=lambda: np.zeros(0))
    l1: float = 1.0

    def to_dict(self) -> dict:
        return {
            "converged": self.converged,
            "t_star": self.t_star,
            "s_star": self.s_star.tolist(),
            "flow_set": self.flow_set.to_list(),
            "flow_rates": self.flow_rates.tolist(),
        }


class Network:
    """Float view of a SpringGraph used by the stepping code."""

    def __init__(self, g: SpringGraph):
        self.g = g
        self.D = incidence_matrix(g).to_float()
        self.R = np.array([float(v) for v in g.r_vector])
        self.k = np.array([float(v) for v in g.stiffness])
        self.c_minus = np.array([float(v) for v in g.c_minus])
        self.c_plus = np.array([float(v) for v in g.c_plus])
        self.DTR = self.D.T @ self.R
        self.RTD = self.R @ self.D
        self.phi = g.phi - 1
        self.keep = [i for i in range(g.n) if i != self.phi]
        self.m, self.n = self.D.shape

    def solve_mode(self, mode, p_old: np.ndarray, load: float):
        """Solve equilibrium + loading for a fixed mode; None when singular."""
        mode = np.asarray(mode)
        el = mode == ELASTIC
        sig_fixed = np.where(mode == UPPER, self.c_plus, np.where(mode == LOWER, self.c_minus, 0.0))
        De = self.D[el]
        ke = self.k[el]
        stiff = De.T @ (ke[:, None] * De)
        rhs_nodes = De.T @ (ke * p_old[el]) - self.D.T @ sig_fixed
        keep = self.keep
        size = len(keep) + 1
        A = np.zeros((size, size))
        A[:-1, :-1] = stiff[np.ix_(keep, keep)]
        A[:-1, -1] = self.DTR[keep]
        A[-1, :-1] = self.RTD[keep]
        b = np.append(rhs_nodes[keep], load)
        if np.linalg.cond(A) > 1e12:
            return None
        z = np.linalg.solve(A, b)
        xi = np.zeros(self.n)
        xi[keep] = z[:-1]
        r = float(z[-1])
        lengths = self.D @ xi
        sigma = np.where(el, self.k * (lengths - p_old), sig_fixed)
        p_new = np.where(el, p_old, lengths - sigma / self.k)
        return xi, r, sigma, p_new

    def mode_violations(self, mode, sigma, dp, tol: float) -> list[tuple[int, int]]:
        """Springs whose mode contradicts the solution, with the suggested new mode."""
        out = []
        for j, md in enumerate(mode):
            if md == ELASTIC:
                if sigma[j] > self.c_plus[j] + tol:
                    out.append((j, UPPER))
                elif sigma[j] < self.c_minus[j] - tol:
                    out.append((j, LOWER))
            elif md == UPPER and dp[j] < -tol:
                out.append((j, ELASTIC))
            elif md == LOWER and dp[j] > tol:
                out.append((j, ELASTIC))
        return out


def kkt_residuals(net: Network, old: SimState, new: SimState, load: float) -> dict:
    """Residuals of equilibrium (a), the discrete flow rule (b) and loading (c)."""
    sigma_check = net.k * (net.D @ new.xi - new.p)
    eq = float(np.max(np.abs(net.D.T @ sigma_check + new.r * net.DTR)))
    dp = new.p - old.p
    flow = 0.0
    for j in range(net.m):
        lo, hi = net.c_minus[j], net.c_plus[j]
        s = sigma_check[j]
        box = max(lo - s, s - hi, 0.0)
        flow = max(flow, box)
        # complementarity: plastic flow only at the matching limit
        flow = max(flow, min(max(dp[j], 0.0), abs(s - hi)), min(max(-dp[j], 0.0), abs(s - lo)))
    load_res = abs(float(net.RTD @ new.xi) - load)
    consistency = float(np.max(np.abs(sigma_check - new.sigma))) if net.m else 0.0
    return {"equilibrium": eq, "flow_rule": flow, "loading": load_res, "stress": consistency}


def dissipation_increment(net: Network, dp: np.ndarray) -> float:
    return float(np.sum(net.c_plus * np.maximum(dp, 0) - net.c_minus * np.maximum(-dp, 0)))


def init_state(g: SpringGraph, params: SimParams | None = None) -> SimState:
    """Elastic solve at l0 with zero plastic strain."""
    net = Network(g)
    params = params or SimParams()
    tol = params.resolved_tol_eq(net)
    for j in range(net.m):
        if not net.c_minus[j] <= 0 <= net.c_plus[j]:
            warnings.warn(
                f"spring {j + 1}: elastic interval [{net.c_minus[j]}, {net.c_plus[j]}] "
                "excludes zero stress",
                stacklevel=2,
            )
    mode = (ELASTIC,) * net.m
    sol = net.solve_mode(mode, np.zeros(net.m), float(g.l0))
    if sol is None:
        raise SimulationError("elastic system is singular")
    xi, r, sigma, p = sol
    for j in range(net.m):
        if sigma[j] > net.c_plus[j] + tol or sigma[j] < net.c_minus[j] - tol:
            raise SimulationError(
                f"initial state infeasible: spring {j + 1} stress {sigma[j]:g} outside "
                f"[{net.c_minus[j]:g}, {net.c_plus[j]:g}]"
            )
    return SimState(0.0, sigma, p, xi, r, mode)


def _accept(net, state, mode, load, tol):
    sol = net.solve_mode(mode, state.p, load)
    if sol is None:
        return None
    xi, r, sigma, p_new = sol
    if net.mode_violations(mode, sigma, p_new - state.p, tol):
        return None
    return xi, r, sigma, p_new


def _search_modes(net: Network, state: SimState, load: float, tol: float):
    start = tuple(state.mode) if state.mode else (ELASTIC,) * net.m
    tried = set()

    # local repair from the previous mode
    mode = list(start)
    for _ in range(2 * net.m + 2):
        key = tuple(mode)
        if key in tried:
            break
        tried.add(key)
        sol = net.solve_mode(key, state.p, load)
        if sol is None:
            break
        xi, r, sigma, p_new = sol
        bad = net.mode_violations(key, sigma, p_new - state.p, tol)
        if not bad:
            return key, sol
        for j, md in bad:
            mode[j] = md

    # exhaustive enumeration, nearest to the previous mode first
    modes = sorted(
        itertools.product((ELASTIC, UPPER, LOWER), repeat=net.m),
        key=lambda md: (sum(a != b for a, b in zip(md, start)), sum(x != ELASTIC for x in md)),
    )
    for key in modes:
        if key in tried:
            continue
        sol = _accept(net, state, key, load, tol)
        if sol is not None:
            return key, sol
    raise SimulationError(f"no KKT-consistent plastic mode at load {load:g}")


def incremental_step(
    g: SpringGraph,
    state: SimState,
    l_next: float,
    t_next: float | None = None,
    params: SimParams | None = None,
    net: Network | None = None,
) -> SimState:
    """One implicit step to the load ``l_next``."""
    net = net or Network(g)
    params = params or SimParams()
    tol = params.resolved_tol_eq(net)
    mode, (xi, r, sigma, p_new) = _search_modes(net, state, float(l_next), tol)
    t = state.t if t_next is None else t_next
    new = SimState(t, sigma, p_new, xi, r, mode)
    res = kkt_residuals(net, state, new, float(l_next))
    if max(res.values()) > tol:
        raise SimulationError(f"step to load {l_next:g} misses tolerance: {res}")
    return new


def run(g: SpringGraph, params: SimParams | None = None, state0: SimState | None = None) -> SimTrace:
    """Uniform steps t_k = k dt up to t_end."""
    params = params or SimParams()
    if g.l1 == 0:
        raise ValueError("loading not unidirectional: l1 must be nonzero")
    report = validate_assumptions(g)
    if not report.rank_DTR_is_1:
        raise ValueError("rank(D^T R) != 1: refusing to simulate")
    net = Network(g)
    l0, l1 = float(g.l0), float(g.l1)
    state = state0 if state0 is not None else init_state(g, params)
    if state0 is not None:
        _validate_supplied(net, state0, l0, params.resolved_tol_eq(net))
    states = [state]
    diss = []
    nsteps = int(round(params.t_end / params.dt))
    for k in range(1, nsteps + 1):
        t = k * params.dt
        new = incremental_step(g, state, l0 + l1 * t, t, params, net)
        diss.append(dissipation_increment(net, new.p - state.p))
        states.append(new)
        state = new
    return SimTrace(tuple(states), tuple(diss), params, l0, l1)


def _validate_supplied(net: Network, st: SimState, l0: float, tol: float) -> None:
    if np.any(st.sigma > net.c_plus + tol) or np.any(st.sigma < net.c_minus - tol):
        raise SimulationError("supplied initial stress violates an elastic limit")
    if abs(st.xi[net.phi]) > tol:
        raise SimulationError("supplied xi must satisfy xi_phi = 0")
    sigma = net.k * (net.D @ st.xi - st.p)
    if np.max(np.abs(sigma - st.sigma)) > tol:
        raise SimulationError("supplied sigma, p, xi are not compatible")
    if np.max(np.abs(net.D.T @ st.sigma + st.r * net.DTR)) > tol:
        raise SimulationError("supplied state is not in equilibrium")
    if abs(float(net.RTD @ st.xi) - l0) > tol:
        raise SimulationError("supplied state does not match l0")


def detect_convergence(trace: SimTrace, params: SimParams | None = None) -> TerminalReport:
    """Stress stationarity over the trace tail and the flow set of that tail."""
    params = params or trace.params
    if not len(trace):
        raise ValueError("empty trace")
    sig = trace.sigmas()
    diffs = np.max(np.abs(np.diff(sig, axis=0)), axis=1) if len(sig) > 1 else np.zeros(0)
    run_len = 0
    for d in diffs[::-1]:
        if d <= params.tol_conv:
            run_len += 1
        else:
            break
    s_star = sig[-1].copy()
    m = sig.shape[1]
    if run_len < params.window:
        return TerminalReport(False, None, s_star, SignedIndexSet(), np.zeros(m), trace.l1)
    start = len(sig) - 1 - run_len
    t_star = trace.states[start].t
    first = len(sig) - 1 - params.window
    dp = (trace.states[-1].p - trace.states[first].p) / params.window
    thresh = params.flow_eps * params.dt * abs(trace.l1)
    flow = SignedIndexSet((1 if dp[j] > 0 else -1, j + 1) for j in range(m) if abs(dp[j]) > thresh)
    return TerminalReport(True, t_star, s_star, flow, dp / params.dt, trace.l1)


@dataclass(frozen=True)
class Certification:
    admissible: object
    irreducible: object
    enumerated: bool
    bipartition: object = None

    @property
    def ok(self) -> bool:
        return bool(self.admissible) and bool(self.irreducible) and self.enumerated

    def to_dict(self) -> dict:
        return {
            "admissible": self.admissible.to_dict(),
            "irreducible": self.irreducible.to_dict(),
            "topologically_enumerated": self.enumerated,
            "bipartition": None if self.bipartition is None else self.bipartition.to_dict(),
        }


def certify_terminal(g: SpringGraph, report: TerminalReport) -> Certification:
    """Run the algebraic and topological checks on a converged flow set.

    With l1 < 0 the roles of phi and psi swap, which negates every alpha;
    the set is negated back before checking against the phi -> psi orientation.
    """
    if not report.converged:
        raise ValueError("report is not converged; nothing to certify")
    flow = report.flow_set if report.l1 > 0 else report.flow_set.negated()
    if not len(flow):
        return Certification(
            AdmissibilityVerdict(False, refutation="empty flow set", farkas=()),
            IrreducibilityReport(False, applicable=False),
            False,
        )
    adm = check_admissible(g, flow)
    irr = check_irreducible(g, flow)
    match = next((e for e in enumerate_index_sets(g) if e.index_set == flow), None)
    return Certification(adm, irr, match is not None, None if match is None else match.bipartition)


def with_limits(g: SpringGraph, c_minus, c_plus) -> SpringGraph:
    """Copy of ``g`` with replaced elastic limits (exact values)."""
    return replace(
        g,
        c_minus=tuple(Fraction(v) for v in c_minus),
        c_plus=tuple(Fraction(v) for v in c_plus),
    )
