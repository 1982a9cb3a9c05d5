"""Command-line front end.

    latticeplast {matrices,enumerate,check,collapse,simulate,dot} --model FILE

Exit status: 0 success, 1 invalid input, 2 analysis failure,
3 internal inconsistency (the two admissibility checkers disagree).
"""

from __future__ import annotations

import argparse
import json
import sys

from . import algebra, topology
from .dot import to_dot
from .model import (
    ModelError,
    SpringGraph,
    build_graph,
    incidence_matrix,
    kernel_basis,
    load_model,
    validate_assumptions,
)
from .rational import fraction_str
from .simulate import SimParams, SimulationError, certify_terminal, detect_convergence, run

EXIT_OK, EXIT_INVALID, EXIT_ANALYSIS, EXIT_INTERNAL = 0, 1, 2, 3


class CommandFailed(Exception):
    def __init__(self, status: int, message: str, payload: dict | None = None):
        self.status = status
        self.payload = payload or {}
        super().__init__(message)


def _digest(g: SpringGraph) -> dict:
    return {
        "n": g.n,
        "m": g.m,
        "phi": g.phi,
        "psi": g.psi,
        "path": list(g.path),
        "assumptions": validate_assumptions(g).to_dict(),
    }


def _fmt_matrix(rows) -> list[str]:
    width = max(len(v) for r in rows for v in r)
    return ["  " + " ".join(v.rjust(width) for v in r) for r in rows]


def _parse_sequence(text: str) -> tuple[topology.CollapseMove, ...]:
    moves = []
    for tok in text.replace(" ", "").split(","):
        if not tok:
            continue
        try:
            i, j = tok.split(":")
            moves.append(topology.CollapseMove(int(i), int(j)))
        except ValueError:
            raise ValueError(f"bad move {tok!r}; expected MOVER:ANCHOR") from None
    return tuple(moves)


def _parse_index_set(g: SpringGraph, text: str) -> topology.SignedIndexSet:
    i0 = topology.SignedIndexSet.parse(text)
    for _, j in i0:
        if not 1 <= j <= g.m:
            raise ValueError(f"unknown spring {j}")
    return i0


def _certify(g: SpringGraph, i0: topology.SignedIndexSet) -> tuple[dict, list[str]]:
    lam = algebra.check_admissible(g, i0)
    node = algebra.check_admissible_nodewise(g, i0)
    if lam.admissible != node.admissible:
        raise CommandFailed(
            EXIT_INTERNAL,
            f"checkers disagree on {i0}: cone form {lam.admissible}, node form {node.admissible}",
        )
    irr = algebra.check_irreducible(g, i0)
    payload = {
        "index_set": i0.to_list(),
        "admissible": lam.admissible,
        "cone_form": lam.to_dict(),
        "node_form": node.to_dict(),
        "irreducibility": irr.to_dict(),
    }
    lines = [f"index set {i0}", f"  admissible: {'yes' if lam.admissible else 'no'}"]
    if lam.admissible:
        cert = lam.certificate
        lams = ", ".join(f"{fraction_str(cert.lambdas[e])}" for e in i0.elements)
        lines.append(f"  lambda = ({lams}), c1 = {fraction_str(cert.c1)}")
        xi = node.certificate.xi
        lines.append(f"  xi = ({', '.join(map(fraction_str, xi))})")
        lines.append(f"  irreducible: {'yes' if irr.irreducible else 'no'}")
        if irr.irreducible:
            pos, t = algebra.positive_certificate(g, i0)
            payload["positive_certificate"] = {**pos.to_dict(), "t": fraction_str(t)}
            lines.append(
                "  positive lambda = ("
                + ", ".join(fraction_str(pos.lambdas[e]) for e in i0.elements)
                + f"), min >= {fraction_str(t)}"
            )
        else:
            lines.append(f"  admissible proper subset: {irr.failing_subset}")
    else:
        lines.append(f"  refutation: {lam.refutation}")
    return payload, lines


# ---------------------------------------------------------------- commands


def cmd_matrices(g: SpringGraph, args) -> tuple[dict, list[str]]:
    D = incidence_matrix(g)
    K = kernel_basis(g)
    rep = validate_assumptions(g)
    payload = {
        "D": D.to_strings(),
        "Dperp": K.to_strings(),
        "R": [fraction_str(v) for v in g.r_vector],
        "DTR": [fraction_str(v) for v in rep.DTR],
    }
    lines = [f"D ({g.m} x {g.n}):", *_fmt_matrix(D.to_strings())]
    lines += [f"Dperp ({K.shape[0]} x {K.shape[1]}):"]
    lines += _fmt_matrix(K.to_strings()) if K.shape[1] else ["  (no columns: the graph is a tree)"]
    lines.append("R = (" + ", ".join(payload["R"]) + ")^T")
    lines.append("D^T R = (" + ", ".join(payload["DTR"]) + ")^T")
    lines.append(
        f"connected: {rep.connected}  rank D: {rep.rank_D}  m > n: {rep.m_gt_n}  "
        f"rank(D^T R) = 1: {rep.rank_DTR_is_1}  max |I0|: {rep.max_cardinality}"
    )
    return payload, lines


def cmd_enumerate(g: SpringGraph, args) -> tuple[dict, list[str]]:
    entries = topology.enumerate_index_sets(g)
    if args.max_card is not None:
        entries = [e for e in entries if len(e.index_set) <= args.max_card]
    items = []
    lines = [f"{len(entries)} index sets from connected bipartitions"]
    for e in entries:
        adm = algebra.check_admissible(g, e.index_set).admissible
        irr = algebra.check_irreducible(g, e.index_set).irreducible
        items.append({**e.to_dict(), "admissible": adm, "irreducible": irr})
        seq = " ".join(f"{mv.move}:{mv.anchor}" for mv in e.witness)
        lines.append(
            f"  {str(e.index_set):32s} A={list(e.bipartition.a_side)}  "
            f"admissible={'yes' if adm else 'no'} irreducible={'yes' if irr else 'no'}  "
            f"witness {seq or '(none)'}"
        )
    payload: dict = {"index_sets": items}
    if args.completeness:
        try:
            rep = algebra.completeness_report(g, args.max_card)
        except algebra.BudgetExceeded as exc:
            raise CommandFailed(EXIT_ANALYSIS, str(exc)) from None
        payload["completeness"] = rep.to_dict()
        lines.append(
            f"oracle: {len(rep.algebraic)} irreducible sets up to cardinality "
            f"{args.max_card if args.max_card is not None else g.m - g.n + 2}"
        )
        lines.append(f"  found only algebraically: {len(rep.only_algebraic)}")
        lines += [f"    {s}" for s in rep.only_algebraic]
        lines.append(f"  found only topologically: {len(rep.only_topological)}")
        lines += [f"    {s}" for s in rep.only_topological]
    return payload, lines


def cmd_check(g: SpringGraph, args) -> tuple[dict, list[str]]:
    try:
        i0 = _parse_index_set(g, args.set)
    except ValueError as exc:
        raise CommandFailed(EXIT_INVALID, str(exc)) from None
    return _certify(g, i0)


def cmd_collapse(g: SpringGraph, args) -> tuple[dict, list[str]]:
    try:
        seq = _parse_sequence(args.sequence)
    except ValueError as exc:
        raise CommandFailed(EXIT_INVALID, str(exc)) from None
    states: list = []
    try:
        final = topology.apply_collapse(g, seq, trace=states)
    except topology.IllegalMoveError as exc:
        raise CommandFailed(
            EXIT_INVALID, str(exc), {"position": exc.position, "clause": exc.clause}
        ) from None
    start = topology.initial_state(g)
    lines = [f"start  {start.describe()}"]
    for mv, st in zip(seq, states):
        lines.append(f"{mv.move}:={mv.anchor}".ljust(7) + st.describe())
    payload: dict = {
        "sequence": [mv.to_dict() for mv in seq],
        "states": [
            {"phi": st.phi_side, "psi": st.psi_side, "free": st.free_nodes} for st in states
        ],
        "complete": final.complete,
    }
    if final.complete:
        i0 = topology.index_set_from_final(g, final)
        cert, cert_lines = _certify(g, i0)
        payload["certification"] = cert
        lines += cert_lines
    else:
        payload["free"] = final.free_nodes
        lines.append(f"not fully collapsed; free nodes: {final.free_nodes}")
    return payload, lines


def cmd_simulate(g: SpringGraph, args) -> tuple[dict, list[str]]:
    rep = validate_assumptions(g)
    if not rep.rank_DTR_is_1:
        raise CommandFailed(
            EXIT_ANALYSIS, "rank(D^T R) != 1; refusing to simulate (inspect with `matrices`)"
        )
    params = SimParams(
        dt=args.dt,
        t_end=args.t_end,
        tol_eq=args.tol_eq,
        tol_conv=args.tol_conv,
        window=args.window,
        flow_eps=args.flow_eps,
    )
    try:
        trace = run(g, params)
    except (SimulationError, ValueError) as exc:
        raise CommandFailed(EXIT_ANALYSIS, str(exc)) from None
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as fh:
            trace.write_ndjson(fh)
    report = detect_convergence(trace, params)
    payload: dict = {"terminal": report.to_dict(), "trace": args.trace, "steps": len(trace) - 1}
    lines = [f"steps: {len(trace) - 1}  dt = {params.dt:g}  t_end = {params.t_end:g}"]
    if args.trace:
        lines.append(f"trace written to {args.trace}")
    if not report.converged:
        lines.append("not converged within the horizon")
        return payload, lines
    cert = certify_terminal(g, report)
    payload["certification"] = cert.to_dict()
    lines.append(f"converged at t* = {report.t_star:g}")
    lines.append("s* = (" + ", ".join(f"{v:.9g}" for v in report.s_star) + ")")
    lines.append(f"flow set {report.flow_set}")
    lines.append(
        f"  admissible: {'yes' if cert.admissible else 'no'}  "
        f"irreducible: {'yes' if cert.irreducible else 'no'}  "
        f"from a bipartition: {'yes' if cert.enumerated else 'no'}"
        + (f" (A={list(cert.bipartition.a_side)})" if cert.bipartition else "")
    )
    return payload, lines


def cmd_dot(g: SpringGraph, args) -> tuple[dict, list[str]]:
    bp = i0 = None
    try:
        if args.bipartition:
            a = [int(v) for v in args.bipartition.split(",") if v.strip()]
            bp = topology.Bipartition.from_a_side(g, a)
        if args.set:
            i0 = _parse_index_set(g, args.set)
        text = to_dot(g, bp, i0)
    except ValueError as exc:
        raise CommandFailed(EXIT_INVALID, str(exc)) from None
    return {"dot": text}, text.rstrip("\n").split("\n")


COMMANDS = {
    "matrices": cmd_matrices,
    "enumerate": cmd_enumerate,
    "check": cmd_check,
    "collapse": cmd_collapse,
    "simulate": cmd_simulate,
    "dot": cmd_dot,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="latticeplast", description=__doc__.split("\n")[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", required=True, help="model document (JSON)")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--out", help="write the report here instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("matrices", parents=[common], help="print D, Dperp, R and the assumption report")

    p = sub.add_parser("enumerate", parents=[common], help="index sets from connected bipartitions")
    p.add_argument("--max-card", type=int, default=None)
    p.add_argument("--completeness", action="store_true", help="compare with the brute-force oracle")

    p = sub.add_parser("check", parents=[common], help="certify one index set")
    p.add_argument("--set", required=True, help='signed springs, e.g. --set="+1,-3,-6,+8"')

    p = sub.add_parser("collapse", parents=[common], help="apply a collapse sequence")
    p.add_argument("--sequence", required=True, help='MOVER:ANCHOR pairs, e.g. "3:1,5:3,4:6,2:4"')

    p = sub.add_parser("simulate", parents=[common], help="quasistatic run and terminal certification")
    p.add_argument("--dt", type=float, default=1 / 64)
    p.add_argument("--t-end", type=float, default=20.0)
    p.add_argument("--tol-eq", type=float, default=None)
    p.add_argument("--tol-conv", type=float, default=1e-8)
    p.add_argument("--window", type=int, default=10)
    p.add_argument("--flow-eps", type=float, default=1e-6)
    p.add_argument("--trace", help="write the trace as newline-delimited JSON")

    p = sub.add_parser("dot", parents=[common], help="DOT diagram of the graph")
    p.add_argument("--bipartition", help="comma-separated nodes of side A")
    p.add_argument("--set", help="index set to highlight")
    return parser


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    report: dict = {"command": args.command, "argv": list(argv if argv is not None else sys.argv[1:])}
    status = EXIT_OK
    lines: list[str] = []
    try:
        g = build_graph(load_model(args.model))
        report["model"] = _digest(g)
        payload, lines = COMMANDS[args.command](g, args)
        report["payload"] = payload
    except (ModelError, OSError) as exc:
        status, lines = EXIT_INVALID, [f"validation failed: {exc}"]
        report["error"] = str(exc)
    except CommandFailed as exc:
        status = exc.status
        label = {EXIT_INVALID: "invalid input", EXIT_ANALYSIS: "analysis failed"}.get(
            status, "internal inconsistency"
        )
        lines = [f"{label}: {exc}"]
        report["error"] = str(exc)
        report["payload"] = exc.payload
    except algebra.ConsistencyError as exc:
        status, lines = EXIT_INTERNAL, [f"internal inconsistency: {exc}"]
        report["error"] = str(exc)
    report["status"] = status

    if args.format == "json":
        text = json.dumps(report, indent=1) + "\n"
    else:
        text = "\n".join(lines) + "\n"
    if status == EXIT_OK:
        _emit(text, args.out)
    else:
        (sys.stdout if args.format == "json" else sys.stderr).write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
