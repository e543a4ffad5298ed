"""``toastflow`` command line.

Exit codes: 0 success / all checks passed, 1 a check or algorithm reported
failure, 2 bad usage or malformed input files.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction

from . import io
from .equidecomp import (
    TorusAction,
    block_tiling,
    check_uniform,
    demand_problem,
    equidecompose,
    fractional_transport_flow,
    folner_tiling,
    verify_equidecomposition,
)
from .errors import (
    DomainError,
    EquidecompositionInfeasible,
    FormatError,
    ParameterError,
    RoundingFailure,
)
from .graph import verify_f_flow
from .oracle import enumerate_integral_flows, feasible_integral_flow, lex_least_integral_flow, random_instance
from .rationals import parse_rational
from .render import graph_dot, pieces_svg, toast_svg
from .rounding import round_flow
from .toast import generate_torus_toast, is_k_toast, single_root_toast, validate_toast

COMMANDS = (
    "toast-gen", "toast-check", "round", "check-flow", "oracle",
    "gen-instance", "equidecomp", "verify-pieces", "render",
)


class UsageError(Exception):
    pass


def _emit(args, text: str):
    if getattr(args, "out", None):
        io.write_atomic(args.out, text)
    else:
        sys.stdout.write(text)


def _load_graph(path):
    return io.graph_from_json(io.load_json(path))


def _load_problem(args, graph):
    cap = io.load_json(args.capacity) if getattr(args, "capacity", None) else None
    return io.problem_from_files(graph, io.load_json(args.demand), cap)


def default_toast(w: int, h: int, seed: int = 0):
    """Deepest generator toast that fits ``torus(w, h)``; single tile otherwise."""
    best = None
    if w == h:
        for factor in (2, 3, 4, 1):
            for base in range(6, w + 1):
                try:
                    toast = generate_torus_toast(w, h, base, factor, 3, seed)
                except ParameterError:
                    continue
                if best is None or len(toast) > len(best):
                    best = toast
    if best is None:
        from .graph import Graph

        best = single_root_toast(Graph.torus(w, h))
    return best


def cmd_toast_gen(args):
    toast = generate_torus_toast(args.torus[0], args.torus[1], args.base, args.factor, args.margin, args.seed)
    _emit(args, io.dumps(io.toast_to_json(toast)))
    return 0


def cmd_toast_check(args):
    graph = _load_graph(args.graph)
    toast = io.toast_from_json(graph, io.load_json(args.toast))
    report = validate_toast(graph, toast)
    print(report)
    ok = report.ok
    if args.k is not None:
        kt = is_k_toast(graph, toast, args.k)
        print(f"{args.k}-toast: {'yes' if kt else 'no'}")
        ok = ok and kt
    return 0 if ok else 1


def cmd_round(args):
    graph = _load_graph(args.graph)
    toast = io.toast_from_json(graph, io.load_json(args.toast))
    phi = io.flow_from_json(graph, io.load_json(args.flow))
    problem = _load_problem(args, graph)
    try:
        psi, trace = round_flow(problem, toast, phi)
    except (DomainError, RoundingFailure) as exc:
        print(f"round failed: {exc}", file=sys.stderr)
        return 1
    if args.trace:
        io.write_json(args.trace, io.trace_to_json(trace))
    _emit(args, io.dumps(io.flow_to_json(psi)))
    print(
        f"rounded: max |psi - phi| = {psi.sup_distance(phi)}, steps = {len(trace.steps)}",
        file=sys.stderr,
    )
    return 0


def cmd_check_flow(args):
    graph = _load_graph(args.graph)
    flow = io.flow_from_json(graph, io.load_json(args.flow))
    problem = _load_problem(args, graph)
    report = verify_f_flow(flow, problem)
    print(report)
    ok = report.ok
    if args.integral:
        frac = [e for e, q in flow.items() if q.denominator != 1]
        if frac:
            print(f"non-integral value on {frac[0]}")
            ok = False
    return 0 if ok else 1


def cmd_oracle(args):
    graph = _load_graph(args.graph)
    problem = _load_problem(args, graph)
    if problem.capacity is None:
        raise UsageError("oracle needs --capacity")
    if args.enumerate is not None:
        flows = enumerate_integral_flows(problem, args.enumerate)
        print(f"{len(flows)} integral flows with |value| <= {args.enumerate}")
        return 0 if flows else 1
    flow = lex_least_integral_flow(problem) if args.lex else feasible_integral_flow(problem)
    if flow is None:
        print("infeasible")
        return 1
    _emit(args, io.dumps(io.flow_to_json(flow)))
    return 0


def cmd_gen_instance(args):
    w, h = args.torus
    denominators = [int(d) for d in args.denominators.split(",") if d]
    bundle = random_instance(
        w, h, base=args.base, factor=args.factor, margin=args.margin,
        circuit_count=args.circuits, denominators=denominators, seed=args.seed,
    )
    os.makedirs(args.out_dir, exist_ok=True)
    files = {
        "graph.json": io.graph_to_json(bundle.problem.graph),
        "toast.json": io.toast_to_json(bundle.toast),
        "flow.json": io.flow_to_json(bundle.phi),
        "demand.json": io.demand_to_json(bundle.problem.demand),
        "witness.json": io.flow_to_json(bundle.witness),
    }
    for name, data in files.items():
        io.write_json(os.path.join(args.out_dir, name), data)
    return 0


def _load_sets(args):
    A = io.vertex_set_from_json(io.load_json(args.set_a))
    B = io.vertex_set_from_json(io.load_json(args.set_b))
    n = args.torus[0] * args.torus[1]
    for name, S in (("A", A), ("B", B)):
        if any(not 0 <= v < n for v in S):
            raise FormatError(f"set {name} has vertices outside the torus")
    return A, B


def cmd_equidecomp(args):
    action = TorusAction(*args.torus)
    A, B = _load_sets(args)
    if len(A) != len(B):
        print(f"|A| = {len(A)} != |B| = {len(B)}: no equidecomposition exists", file=sys.stderr)
        return 1
    if args.side:
        tiling = block_tiling(action, args.side, args.epsilon)
    else:
        tiling = folner_tiling(action, args.epsilon)
    if args.uniform is not None:
        for name, S in (("A", A), ("B", B)):
            report = check_uniform(action, S, tiling, args.uniform)
            if not report.ok:
                print(f"{name} is not uniform on the tiling: {report}", file=sys.stderr)
                return 1
    problem = demand_problem(action, A, B)
    if args.flow:
        phi = io.flow_from_json(action.graph, io.load_json(args.flow))
    else:
        phi = fractional_transport_flow(action, A, B, copies=args.copies, seed=args.seed)
    if args.toast:
        toast = io.toast_from_json(action.graph, io.load_json(args.toast))
    else:
        toast = default_toast(*args.torus, seed=args.seed)
    try:
        psi, _ = round_flow(problem, toast, phi)
        pieces = equidecompose(action, A, B, tiling, psi)
    except (DomainError, RoundingFailure, EquidecompositionInfeasible) as exc:
        print(f"equidecomp failed: {exc}", file=sys.stderr)
        return 1
    report = verify_equidecomposition(action, A, B, pieces)
    if not report.ok:  # pragma: no cover - construction guarantees validity
        print(report, file=sys.stderr)
        return 1
    _emit(args, io.dumps(io.pieces_to_json(pieces)))
    print(f"{len(pieces)} pieces, tile side {tiling.side}", file=sys.stderr)
    return 0


def cmd_verify_pieces(args):
    action = TorusAction(*args.torus)
    A, B = _load_sets(args)
    pieces = io.pieces_from_json(io.load_json(args.pieces))
    report = verify_equidecomposition(action, A, B, pieces)
    print(report)
    return 0 if report.ok else 1


def cmd_render(args):
    fmt = args.format
    if fmt is None and args.out:
        fmt = os.path.splitext(args.out)[1].lstrip(".") or None
    fmt = fmt or "svg"
    if args.pieces:
        if not args.torus:
            raise UsageError("render --pieces needs --torus W H")
        if fmt != "svg":
            raise UsageError("pieces can only be rendered as svg")
        pieces = io.pieces_from_json(io.load_json(args.pieces))
        _emit(args, pieces_svg(TorusAction(*args.torus), pieces))
        return 0
    if not args.graph:
        raise UsageError("render needs --pieces or --graph")
    graph = _load_graph(args.graph)
    toast = io.toast_from_json(graph, io.load_json(args.toast)) if args.toast else None
    flow = io.flow_from_json(graph, io.load_json(args.flow)) if args.flow else None
    if fmt == "dot":
        _emit(args, graph_dot(graph, toast, flow))
    elif fmt == "svg":
        if toast is None:
            raise UsageError("svg rendering of a graph needs --toast")
        _emit(args, toast_svg(graph, toast))
    elif fmt == "json":
        _emit(args, io.dumps(io.graph_to_json(graph)))
    else:
        raise UsageError(f"unknown format {fmt!r}")
    return 0


def _rational(text):
    try:
        return parse_rational(text)
    except FormatError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="toastflow", description="Integral flow rounding along connected toasts.")
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    def torus(p, required=True):
        p.add_argument("--torus", nargs=2, type=int, metavar=("W", "H"), required=required)

    p = sub.add_parser("toast-gen", help="generate a nested toast of squares on a torus")
    torus(p)
    p.add_argument("--base", type=int, required=True)
    p.add_argument("--factor", type=int, default=2)
    p.add_argument("--margin", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_toast_gen)

    p = sub.add_parser("toast-check", help="validate a toast against a graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--toast", required=True)
    p.add_argument("--k", type=int, help="also require a k-toast")
    p.set_defaults(func=cmd_toast_check)

    p = sub.add_parser("round", help="round a rational f-flow to an integral one")
    for flag in ("--graph", "--toast", "--flow", "--demand", "--out"):
        p.add_argument(flag, required=True)
    p.add_argument("--capacity")
    p.add_argument("--trace")
    p.set_defaults(func=cmd_round)

    p = sub.add_parser("check-flow", help="check that a flow meets a demand")
    for flag in ("--graph", "--flow", "--demand"):
        p.add_argument(flag, required=True)
    p.add_argument("--capacity")
    p.add_argument("--integral", action="store_true")
    p.set_defaults(func=cmd_check_flow)

    p = sub.add_parser("oracle", help="max-flow feasibility / lex-least / enumeration")
    for flag in ("--graph", "--demand", "--capacity"):
        p.add_argument(flag, required=True)
    p.add_argument("--enumerate", type=int, metavar="N")
    p.add_argument("--lex", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("gen-instance", help="write a seeded random rounding instance")
    torus(p)
    p.add_argument("--base", type=int, required=True)
    p.add_argument("--factor", type=int, default=2)
    p.add_argument("--margin", type=int, default=3)
    p.add_argument("--circuits", type=int, default=20)
    p.add_argument("--denominators", default="3,5,7")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_gen_instance)

    p = sub.add_parser("equidecomp", help="equidecompose two vertex sets of a torus")
    torus(p)
    p.add_argument("--set-a", required=True)
    p.add_argument("--set-b", required=True)
    p.add_argument("--epsilon", type=_rational, default=Fraction(1, 2), help="Folner constant of the tiling")
    p.add_argument("--side", type=int, help="use side x side blocks instead of the least Folner side")
    p.add_argument("--uniform", type=_rational, help="require uniformity with this constant")
    p.add_argument("--flow", help="starting (chi_A - chi_B)-flow; default: averaged transport")
    p.add_argument("--toast")
    p.add_argument("--copies", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_equidecomp)

    p = sub.add_parser("verify-pieces", help="check an equidecomposition file")
    torus(p)
    p.add_argument("--set-a", required=True)
    p.add_argument("--set-b", required=True)
    p.add_argument("--pieces", required=True)
    p.set_defaults(func=cmd_verify_pieces)

    p = sub.add_parser("render", help="write SVG/DOT pictures")
    torus(p, required=False)
    p.add_argument("--pieces")
    p.add_argument("--graph")
    p.add_argument("--toast")
    p.add_argument("--flow")
    p.add_argument("--format", choices=("json", "dot", "svg"))
    p.add_argument("--out")
    p.set_defaults(func=cmd_render)
    return parser


def dispatch(argv=None) -> int:
    """Run one command and return its exit code (argparse usage errors give 2)."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(args)
    except (FormatError, ParameterError, UsageError) as exc:
        print(f"toastflow {args.command}: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"toastflow {args.command}: {exc}", file=sys.stderr)
        return 1


def main(argv=None):
    sys.exit(dispatch(argv))


if __name__ == "__main__":  # pragma: no cover
    main()
