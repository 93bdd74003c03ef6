"""Command-line front end.

Subcommands:

    cnf        run a clause update stream and keep the assignment satisfying
    color      run an edge update stream and keep the two-layer coloring
    gen-cnf    emit a clause stream safe for the bounded-dependence promise
    gen-graph  emit a triangle-free bounded-degree edge stream
    probe      doubling experiment: total resamplings at growing stream sizes

Exit codes: 0 success, 1 broken input promise, 2 internal failure or budget
exhaustion, 3 file or parse error.  Any option may also be supplied through
``--config FILE`` holding ``key=value`` lines (command-line flags win).
"""

from __future__ import annotations

import argparse
import sys

from .cnf import CnfSystem
from .coloring import ColoringSystem, generate_palettes, parameters_for
from .errors import (
    BudgetExceeded,
    DegenerateParameter,
    GenerationStalled,
    InternalError,
    ProtocolError,
    StreamParseError,
)
from .forests import build_breakage_forest, serialize_forest
from .harness import (
    Metrics,
    Oblivious,
    gen_cnf_stream,
    gen_trianglefree_stream,
    linearity_probe,
    run_stream,
)
from .streams import (
    parse_cnf_stream,
    parse_coloring_stream,
    parse_palettes,
    write_cnf_stream,
    write_coloring_stream,
)

DEFAULT_SEED = 0x5EED

DEFAULTS = {
    "seed": DEFAULT_SEED,
    "step_budget": 10**6,
    "verify_promises": "on",
    "eps": 0.1,
    "k": 8,
    "q": 1000,
    "delta": 100,
    "delete_ratio": 0.3,
    "zipf": None,
    "n": None,
}


def _write_output(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _read(path: str) -> str:
    with open(path) as fh:
        return fh.read()


def _load_config(path: str) -> dict:
    config = {}
    for lineno, raw in enumerate(_read(path).splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise StreamParseError(f"config line {lineno}: expected key=value")
        key, value = line.split("=", 1)
        config[key.strip().replace("-", "_")] = value.strip()
    return config


def _resolve(args: argparse.Namespace) -> argparse.Namespace:
    """Fill unset options from --config, then from built-in defaults."""
    config = _load_config(args.config) if getattr(args, "config", None) else {}
    casts = {
        "seed": lambda s: int(s, 0),
        "step_budget": int,
        "n": int,
        "k": int,
        "q": int,
        "delta": int,
        "eps": float,
        "delete_ratio": float,
        "zipf": float,
        "verify_promises": str,
        "updates": str,
        "out": str,
        "emit_solutions": str,
        "dump_forest": str,
        "stats": str,
    }
    for key, value in vars(args).items():
        if value is not None:
            continue
        if key in config:
            setattr(args, key, casts.get(key, str)(config[key]))
        elif key in DEFAULTS:
            setattr(args, key, DEFAULTS[key])
    return args


def _common_run_flags(sub):
    sub.add_argument("--updates", required=True, help="update stream file")
    sub.add_argument("--seed", type=lambda s: int(s, 0))
    sub.add_argument("--step-budget", type=int, dest="step_budget")
    sub.add_argument("--verify-promises", choices=["on", "off"],
                     dest="verify_promises")
    sub.add_argument("--emit-solutions", dest="emit_solutions",
                     help="write final solution(s) to a file or '-'")
    sub.add_argument("--dump-forest", dest="dump_forest",
                     help="write the breakage forest to a file or '-'")
    sub.add_argument("--stats", help="write per-update metrics to a file or '-'")
    sub.add_argument("--config", help="key=value option file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dynlll")
    subs = parser.add_subparsers(dest="command", required=True)

    cnf = subs.add_parser("cnf", help="run a clause update stream")
    _common_run_flags(cnf)
    cnf.add_argument("--n", type=int, help="number of variables")
    cnf.add_argument("--eps", type=float, help="slack in the dependence bound")

    color = subs.add_parser("color", help="run an edge update stream")
    _common_run_flags(color)

    gen_cnf = subs.add_parser("gen-cnf", help="generate a clause stream")
    for flag, typ in (("--n", int), ("--k", int), ("--eps", float),
                      ("--q", int), ("--delete-ratio", float),
                      ("--seed", lambda s: int(s, 0)), ("--zipf", float)):
        gen_cnf.add_argument(flag, type=typ, dest=flag[2:].replace("-", "_"))
    gen_cnf.add_argument("--out", default="-")
    gen_cnf.add_argument("--config", help="key=value option file")

    gen_graph = subs.add_parser("gen-graph", help="generate an edge stream")
    for flag, typ in (("--n", int), ("--delta", int), ("--q", int),
                      ("--delete-ratio", float),
                      ("--seed", lambda s: int(s, 0)), ("--zipf", float)):
        gen_graph.add_argument(flag, type=typ, dest=flag[2:].replace("-", "_"))
    gen_graph.add_argument("--out", default="-")
    gen_graph.add_argument("--config", help="key=value option file")

    probe = subs.add_parser("probe", help="doubling scaling probe")
    probe.add_argument("--app", choices=["cnf", "color"], required=True)
    for flag, typ in (("--n", int), ("--k", int), ("--eps", float),
                      ("--q", int), ("--delta", int),
                      ("--delete-ratio", float),
                      ("--seed", lambda s: int(s, 0)), ("--zipf", float)):
        probe.add_argument(flag, type=typ, dest=flag[2:].replace("-", "_"))
    probe.add_argument("--step-budget", type=int, dest="step_budget")
    probe.add_argument("--doublings", type=int, default=2)
    probe.add_argument("--config", help="key=value option file")
    return parser


def _finish_run(system, metrics, args, solutions: str) -> None:
    if args.emit_solutions:
        _write_output(args.emit_solutions, solutions)
    if args.dump_forest:
        forest = build_breakage_forest(system.engine.trace, system.engine.updates)
        _write_output(args.dump_forest, serialize_forest(forest))
    if args.stats:
        _write_output(args.stats, metrics.serialize())


def cmd_cnf(args) -> int:
    if args.n is None:
        raise StreamParseError("cnf requires --n (or n= in the config)")
    ops = parse_cnf_stream(_read(args.updates))
    system = CnfSystem(
        n=args.n,
        seed=args.seed,
        step_budget=args.step_budget,
        verify_dependence=args.verify_promises == "on",
        dependence_eps=args.eps,
    )
    metrics = Metrics()
    run_stream(system, Oblivious(ops), metrics)
    solutions = " ".join(str(v) for v in system.assignment) + "\n"
    _finish_run(system, metrics, args, solutions)
    return 0


def cmd_color(args) -> int:
    header, ops = parse_coloring_stream(_read(args.updates))
    n, delta = header["n"], header["delta"]
    list_len, _ = parameters_for(delta)
    if "palettes_file" in header:
        palettes = parse_palettes(_read(header["palettes_file"]))
    else:
        palettes = generate_palettes(n, list_len, header["seed_palettes"])
    system = ColoringSystem(
        n=n,
        delta=delta,
        palettes=palettes,
        seed=args.seed,
        step_budget=args.step_budget,
    )
    metrics = Metrics()
    run_stream(system, Oblivious(ops), metrics)
    solutions = (
        " ".join(str(c) for c in system.sigma1)
        + "\n"
        + " ".join(str(c) for c in system.sigma2)
        + "\n"
    )
    _finish_run(system, metrics, args, solutions)
    return 0


def cmd_gen_cnf(args) -> int:
    if args.n is None:
        raise StreamParseError("gen-cnf requires --n (or n= in the config)")
    ops = gen_cnf_stream(
        n=args.n, k=args.k, eps=args.eps, q=args.q,
        delete_ratio=args.delete_ratio, seed=args.seed, zipf=args.zipf,
    )
    _write_output(args.out, write_cnf_stream(ops))
    return 0


def cmd_gen_graph(args) -> int:
    if args.n is None:
        raise StreamParseError("gen-graph requires --n (or n= in the config)")
    ops = gen_trianglefree_stream(
        n=args.n, delta=args.delta, q=args.q,
        delete_ratio=args.delete_ratio, seed=args.seed, zipf=args.zipf,
    )
    header = {"n": args.n, "delta": args.delta, "seed_palettes": args.seed}
    _write_output(args.out, write_coloring_stream(header, ops))
    return 0


def cmd_probe(args) -> int:
    if args.n is None:
        raise StreamParseError("probe requires --n (or n= in the config)")
    sizes = [args.q * (1 << d) for d in range(args.doublings + 1)]

    def run_cnf_at(q: int) -> int:
        ops = gen_cnf_stream(args.n, args.k, args.eps, q,
                             args.delete_ratio, args.seed, zipf=args.zipf)
        system = CnfSystem(args.n, args.seed, step_budget=args.step_budget)
        run_stream(system, Oblivious(ops))
        return system.engine.stats.resamplings

    def run_color_at(q: int) -> int:
        ops = gen_trianglefree_stream(args.n, args.delta, q,
                                      args.delete_ratio, args.seed,
                                      zipf=args.zipf)
        list_len, _ = parameters_for(args.delta)
        palettes = generate_palettes(args.n, list_len, args.seed)
        system = ColoringSystem(args.n, args.delta, palettes, args.seed,
                                step_budget=args.step_budget)
        run_stream(system, Oblivious(ops))
        return system.engine.stats.resamplings

    run_at = run_cnf_at if args.app == "cnf" else run_color_at
    totals, ratios = linearity_probe(run_at, sizes)
    for q, total in zip(sizes, totals):
        print(f"q={q} resamplings={total}")
    for q, ratio in zip(sizes[1:], ratios):
        print(f"q={q} ratio={ratio:.6f}")
    return 0


COMMANDS = {
    "cnf": cmd_cnf,
    "color": cmd_color,
    "gen-cnf": cmd_gen_cnf,
    "gen-graph": cmd_gen_graph,
    "probe": cmd_probe,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args = _resolve(args)
        return COMMANDS[args.command](args)
    except ProtocolError as exc:
        print(f"protocol error: {exc}", file=sys.stderr)
        return 1
    except (InternalError, BudgetExceeded, GenerationStalled,
            DegenerateParameter) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 2
    except (StreamParseError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
