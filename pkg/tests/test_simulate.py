import io
import json
import warnings
from fractions import Fraction

import numpy as np
import pytest

from latticeplast.model import benchmark_spec, build_graph, graph_from_edges, model_from_dict, model_to_dict
from latticeplast.simulate import (
    Network,
    SimParams,
    SimulationError,
    certify_terminal,
    detect_convergence,
    incremental_step,
    init_state,
    kkt_residuals,
    run,
    with_limits,
)
from latticeplast.topology import SignedIndexSet


def bench_with(limits=None, l0="0", l1="1", stiffness=None):
    doc = model_to_dict(benchmark_spec())
    for k, s in enumerate(doc["springs"]):
        if limits is not None:
            s["c_minus"], s["c_plus"] = limits[k]
        if stiffness is not None:
            s["stiffness"] = stiffness[k]
    doc["loading"]["l0"], doc["loading"]["l1"] = l0, l1
    return build_graph(model_from_dict(doc))


def one_spring(l0=0, l1=1, lo=-1, hi=1, k=1):
    doc = {
        "nodes": 2,
        "springs": [{"id": 1, "source": 1, "terminus": 2, "stiffness": str(k),
                     "c_minus": str(lo), "c_plus": str(hi)}],
        "loading": {"phi": 1, "psi": 2, "l0": str(l0), "l1": str(l1)},
    }
    return build_graph(model_from_dict(doc))


def elastic_oracle(g, load):
    """Bordered KKT system of min 1/2 xi^T D^T K D xi s.t. xi_phi = 0, R^T D xi = load."""
    net = Network(g)
    H = net.D.T @ np.diag(net.k) @ net.D
    C = np.zeros((2, g.n))
    C[0, g.phi - 1] = 1.0
    C[1] = net.RTD
    kkt = np.block([[H, C.T], [C, np.zeros((2, 2))]])
    sol = np.linalg.solve(kkt, np.concatenate([np.zeros(g.n), [0.0, load]]))
    xi = sol[: g.n]
    return net.k * (net.D @ xi), xi


HUGE = [("-1000000", "1000000")] * 8


def test_init_zero_load(bench):
    st = init_state(bench)
    assert np.all(st.sigma == 0) and np.all(st.p == 0) and np.all(st.xi == 0) and st.r == 0


def test_init_one_spring():
    st = init_state(one_spring(l0=Fraction(1, 2)))
    assert st.sigma == pytest.approx([0.5])


def test_init_infeasible():
    limits = [("1/2", "2")] + [("-100", "100")] * 7
    g = bench_with(limits)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        with pytest.raises(SimulationError, match="initial state infeasible: spring 1"):
            init_state(g)
    with pytest.warns(UserWarning, match="excludes zero stress"):
        with pytest.raises(SimulationError):
            init_state(g)


def test_step_elastic_and_plastic():
    g = one_spring()
    st = init_state(g)
    s1 = incremental_step(g, st, 0.5)
    assert s1.sigma == pytest.approx([0.5]) and s1.p == pytest.approx([0.0])
    s2 = incremental_step(g, st, 2.0)
    assert s2.sigma == pytest.approx([1.0]) and s2.p == pytest.approx([1.0])


def test_step_matches_elastic_oracle():
    g = bench_with(HUGE, stiffness=["1", "2", "3", "1/2", "5", "1", "4", "2"])
    st = init_state(g)
    new = incremental_step(g, st, 0.3)
    sigma_el, xi_el = elastic_oracle(g, 0.3)
    assert new.sigma == pytest.approx(sigma_el, abs=1e-12)
    assert new.xi == pytest.approx(xi_el, abs=1e-12)
    assert np.all(new.p == 0)


def test_run_elastic_regime():
    g = bench_with(HUGE)
    trace = run(g, SimParams(dt=0.05, t_end=0.5))
    sigma_unit, _ = elastic_oracle(g, 1.0)
    for st in trace.states:
        assert np.all(st.p == 0)
        assert st.sigma == pytest.approx(st.t * sigma_unit, abs=1e-12)


def test_run_one_spring_closed_form():
    trace = run(one_spring(), SimParams(dt=1 / 16, t_end=3))
    for st in trace.states:
        assert st.sigma[0] == pytest.approx(min(st.t, 1.0), abs=1e-12)


def test_run_requires_unidirectional_loading():
    with pytest.raises(ValueError, match="not unidirectional"):
        run(bench_with(l1="0"))


def test_convergence_one_spring():
    trace = run(one_spring(), SimParams(dt=1 / 64, t_end=3))
    rep = detect_convergence(trace)
    assert rep.converged
    assert rep.s_star == pytest.approx([1.0])
    assert rep.flow_set == SignedIndexSet([(1, 1)])
    assert rep.t_star == pytest.approx(1.0, abs=1 / 64)
    cert = certify_terminal(one_spring(), rep)
    assert cert.admissible and cert.irreducible


def test_not_converged_elastic(bench):
    g = bench_with(HUGE)
    rep = detect_convergence(run(g, SimParams(t_end=1)))
    assert not rep.converged
    with pytest.raises(ValueError, match="not converged"):
        certify_terminal(g, rep)


def test_benchmark_terminal_set(bench):
    params = SimParams(dt=1 / 64, t_end=20)
    rep = detect_convergence(run(bench, params))
    assert rep.converged
    assert rep.s_star[:2] == pytest.approx([1.0, 1.0], abs=1e-6)
    assert rep.flow_set == SignedIndexSet([(1, 1), (1, 2)])
    half = detect_convergence(run(bench, SimParams(dt=1 / 128, t_end=20)))
    assert np.max(np.abs(half.s_star - rep.s_star)) <= 10 * params.tol_conv
    cert = certify_terminal(bench, rep)
    assert cert.ok and cert.bipartition.a_side == (1,)


def test_negative_loading_rate():
    g = one_spring(l1=-1)
    rep = detect_convergence(run(g, SimParams(dt=1 / 32, t_end=3)))
    assert rep.converged and rep.s_star == pytest.approx([-1.0])
    assert rep.flow_set == SignedIndexSet([(-1, 1)])
    assert certify_terminal(g, rep).admissible


@pytest.mark.parametrize("seed", range(6))
def test_kkt_contracts_random_limits(seed):
    rng = np.random.default_rng(seed)
    lo = [Fraction(-int(v), 4) for v in rng.integers(2, 12, 8)]
    hi = [Fraction(int(v), 4) for v in rng.integers(2, 12, 8)]
    g = with_limits(build_graph(benchmark_spec()), lo, hi)
    params = SimParams(dt=1 / 32, t_end=10)
    trace = run(g, params)
    net = Network(g)
    tol = params.resolved_tol_eq(net)
    for k in range(1, len(trace)):
        old, new = trace.states[k - 1], trace.states[k]
        res = kkt_residuals(net, old, new, float(g.l0 + g.l1 * Fraction(new.t)))
        assert max(res.values()) <= tol
        assert np.all(new.sigma <= net.c_plus + tol) and np.all(new.sigma >= net.c_minus - tol)
        assert trace.dissipation[k - 1] >= -tol


def test_trace_export(bench):
    trace = run(one_spring(), SimParams(dt=0.5, t_end=1))
    buf = io.StringIO()
    trace.write_ndjson(buf)
    recs = [json.loads(line) for line in buf.getvalue().splitlines()]
    assert [r["t"] for r in recs] == [0.0, 0.5, 1.0]
    assert set(recs[0]) == {"t", "sigma", "p", "r"}


def test_params_validation():
    with pytest.raises(ValueError):
        SimParams(dt=0)
    with pytest.raises(ValueError):
        SimParams(window=1)


def test_tree_model_simulates():
    g = graph_from_edges(3, [(1, 2), (2, 3)], 1, 3)
    rep = detect_convergence(run(g, SimParams(dt=1 / 16, t_end=5)))
    assert rep.converged and len(rep.flow_set) == 1
