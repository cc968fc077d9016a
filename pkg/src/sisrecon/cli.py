"""Command-line interface.

Exit codes: 0 success, 1 property failure, 2 input error, 3 size limit exceeded.
"""

from __future__ import annotations

import argparse
import sys

from . import io
from .errors import Degenerate, InfeasibleParams, SISReconError, TooLarge
from .graphs import relabel_for_reduction
from .maxcut import maxcut_bruteforce
from .ml import ml_full_bruteforce, ml_reduced_bruteforce
from .reduction import build_full_trace, build_reduced_trace, plan_full_reduction, plan_reduction
from .sis import SISParams, basis_state, log_likelihood, simulate, state_from_bits, validate_params
from .verify import DEFAULT_PARAMS, cmd_verify, run_selftest

EXIT_OK, EXIT_PROPERTY, EXIT_INPUT, EXIT_LIMIT = 0, 1, 2, 3


def _emit(text: str, out: str | None) -> None:
    if out:
        io.write_text(out, text)
    else:
        sys.stdout.write(text)


def _params(args) -> SISParams:
    return SISParams(args.beta_t, args.delta_t)


def _simulate(args) -> int:
    A = io.read_graph(args.graph)
    p = _params(args)
    x0 = state_from_bits(args.x0) if args.x0 else basis_state(A.n, *range(1, A.n + 1))
    trace = simulate(A, p, x0, args.steps, args.seed)
    _emit(io.trace_dumps(trace, p), args.out)
    return EXIT_OK


def _likelihood(args) -> int:
    trace, p = io.read_trace(args.trace)
    A = io.read_graph(args.graph)
    if not validate_params(A, p):
        raise InfeasibleParams("parameters violate delta_T*n + beta_T*L <= 1 for this graph")
    value = log_likelihood(trace, A, p)
    _emit(io.dumps({"log_likelihood": value, "finite": value > float("-inf")}), args.out)
    return EXIT_OK


def _reconstruct(args) -> int:
    trace, p = io.read_trace(args.trace)
    if args.reduced:
        if not args.host:
            raise ValueError("--reduced needs --host")
        host = io.read_graph(args.host)
        if host[1, 2] != 1:
            host = relabel_for_reduction(host)[0]
        result = ml_reduced_bruteforce(trace, host, p)
    else:
        result = ml_full_bruteforce(trace, p, limit_bits=args.limit_bits, connected_only=args.connected_only)
    d = result.to_dict()
    d["finite"] = result.best_value > float("-inf")
    _emit(io.dumps(d), args.out)
    return EXIT_OK


def _maxcut(args) -> int:
    G = io.read_graph(args.graph)
    value, y, count = maxcut_bruteforce(G)
    _emit(io.dumps({"value": value, "assignments": ["".join(map(str, y))], "optimal_count": count}), args.out)
    return EXIT_OK


def _reduce(args) -> int:
    G = io.read_graph(args.graph)
    p = _params(args)
    host = io.read_graph(args.host) if args.host else None
    if args.mode == "full":
        plan = plan_full_reduction(G, p, host)
        trace = build_full_trace(plan)
    else:
        plan = plan_reduction(G, p, host)
        trace = build_reduced_trace(plan)
    io.write_plan(args.out_plan, plan, trace)
    io.write_trace(args.out_trace, trace, p)
    return EXIT_OK


def _verify(args) -> int:
    G = io.read_graph(args.graph)
    report = cmd_verify(G, _params(args))
    _emit(io.dumps(report), args.out)
    return EXIT_OK if report["agree"] and all(report["inequalities"].values()) else EXIT_PROPERTY


def _selftest(args) -> int:
    return run_selftest(fault=args.inject_fault)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sisrecon", description="SIS network reconstruction and the max-cut reduction.")
    sub = ap.add_subparsers(dest="command", required=True)

    def params(sp):
        sp.add_argument("--beta-t", type=float, default=DEFAULT_PARAMS.beta_T)
        sp.add_argument("--delta-t", type=float, default=DEFAULT_PARAMS.delta_T)

    sp = sub.add_parser("simulate", help="draw a viral-state trace")
    sp.add_argument("--graph", required=True)
    params(sp)
    sp.add_argument("--steps", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--x0", help="initial state bitstring, node 1 first (default: all infected)")
    sp.add_argument("--out")
    sp.set_defaults(func=_simulate)

    sp = sub.add_parser("likelihood", help="log-likelihood of a trace under a graph")
    sp.add_argument("--trace", required=True)
    sp.add_argument("--graph", required=True)
    sp.add_argument("--out")
    sp.set_defaults(func=_likelihood)

    sp = sub.add_parser("reconstruct", help="exhaustive ML reconstruction")
    sp.add_argument("--trace", required=True)
    sp.add_argument("--reduced", action="store_true", help="search first-row entries only")
    sp.add_argument("--host", help="known graph for --reduced")
    sp.add_argument("--limit-bits", type=int, default=28)
    sp.add_argument("--connected-only", action="store_true")
    sp.add_argument("--out")
    sp.set_defaults(func=_reconstruct)

    sp = sub.add_parser("maxcut", help="brute-force maximum cut")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--out")
    sp.set_defaults(func=_maxcut)

    sp = sub.add_parser("reduce", help="build the reconstruction instance for a max-cut graph")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--mode", choices=("reduced", "full"), default="reduced")
    sp.add_argument("--host", help="connected host graph on N + 2 nodes (default: path)")
    params(sp)
    sp.add_argument("--out-plan", required=True)
    sp.add_argument("--out-trace", required=True)
    sp.set_defaults(func=_reduce)

    sp = sub.add_parser("verify", help="compare the reduction against the max-cut oracle")
    sp.add_argument("--graph", required=True)
    params(sp)
    sp.add_argument("--out")
    sp.set_defaults(func=_verify)

    sp = sub.add_parser("selftest", help="run the property suite")
    sp.add_argument("--inject-fault", choices=("coefficient",), help=argparse.SUPPRESS)
    sp.set_defaults(func=_selftest)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except TooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except Degenerate as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PROPERTY
    except (SISReconError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
