"""Command-line front end.

Exit codes: 0 success, 1 solver timeout, 2 input error or invalid plan.
"""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .core import InstanceError, format_instance, format_plan, load_instance, parse_plan, validate_plan

EXIT_OK, EXIT_TIMEOUT, EXIT_INPUT = 0, 1, 2


def read_config(path) -> dict[str, str]:
    """key=value lines; '#' starts a comment."""
    out = {}
    if path is None:
        return out
    for ln in Path(path).read_text(encoding="utf-8").splitlines():
        ln = ln.split("#", 1)[0].strip()
        if ln:
            key, sep, value = ln.partition("=")
            if not sep:
                raise InstanceError(f"config line without '=': {ln!r}")
            out[key.strip()] = value.strip()
    return out


def _ilp_backend(args):
    from .ilp_flow import backend_from_config
    cfg = read_config(getattr(args, "config", None))
    return backend_from_config(args.backend or cfg.get("ilp_backend"), cfg.get("ilp_command"))


def cmd_solve(args) -> int:
    from .solvers import AlgorithmSpec, solve

    inst = load_instance(args.inp)
    spec = AlgorithmSpec(args.alg, args.merge_threshold if args.alg == "ma-dbs" else None)
    backend = _ilp_backend(args) if args.alg == "ilp" else None
    res = solve(inst, spec, time_limit=args.time_limit, node_budget=args.node_budget, ilp_backend=backend)
    if not res.solved:
        print("timeout")
        return EXIT_TIMEOUT
    plan = res.plan(inst)
    print(f"cost {plan.cost}")
    if args.out:
        Path(args.out).write_text(format_plan(inst, plan), encoding="utf-8")
    return EXIT_OK


def cmd_validate(args) -> int:
    inst = load_instance(args.inp)
    plan = parse_plan(Path(args.plan).read_text(encoding="utf-8"), inst)
    report = validate_plan(inst, plan)
    if report.ok:
        print(f"ok cost {plan.cost}")
        return EXIT_OK
    for v in report.violations:
        print(v)
    return EXIT_INPUT


def cmd_generate(args) -> int:
    from .bench import PRESETS, GeneratorConfig, generate_instance

    base = PRESETS[args.preset]
    overrides = {k: v for k, v in dict(width=args.width, height=args.height, block_prob=args.block_prob,
                                       deadline=args.deadline, n_agents=args.agents, seed=args.seed).items()
                 if v is not None}
    if args.distances:
        overrides["distances"] = tuple(int(x) for x in args.distances.split(","))
    cfg: GeneratorConfig = replace(base, **overrides)
    text = format_instance(generate_instance(cfg))
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_bench(args) -> int:
    from .bench import PRESETS, generate_suite, run_benchmark, trend_summary
    from .solvers import PAPER_ALGORITHMS, AlgorithmSpec

    algs = [AlgorithmSpec.parse(a) for a in args.algorithms.split(",")] if args.algorithms else list(PAPER_ALGORITHMS)
    counts = [int(x) for x in args.agents.split(",")]
    backend = _ilp_backend(args) if any(a.name == "ilp" for a in algs) else None
    outdir = Path(args.out_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    results = {}
    for preset in args.preset:
        suite = generate_suite(PRESETS[preset], counts, args.instances, base_seed=args.seed)
        res = run_benchmark(suite, algs, args.time_limit, isolate=not args.no_isolate, ilp_backend=backend,
                            progress=(lambda r: print(f"{r.instance} {r.algorithm} {r.status} {r.cost} "
                                                      f"{r.wall_ms:.1f}ms", file=sys.stderr))
                            if args.verbose else None)
        results[preset] = res
        (outdir / f"{preset}.csv").write_text(res.to_csv(), encoding="utf-8")
        for kind, text in res.aggregate_csvs().items():
            (outdir / f"{preset}_{kind}.csv").write_text(text, encoding="utf-8")
        for msg in res.cost_mismatches:
            print(f"COST MISMATCH {msg}")
        print(f"{preset}: {len(res.rows)} runs written to {outdir}")
    if args.trend and len(args.preset) >= 2:
        a, b = args.preset[0], args.preset[1]
        text = trend_summary(results[a], results[b], a, b)
        (outdir / "trend_summary.txt").write_text(text, encoding="utf-8")
        print(text, end="")
    return EXIT_OK


def cmd_export_ilp(args) -> int:
    from .ilp_flow import build_ilp, build_network, export_model, reduce_network

    inst = load_instance(args.inp)
    model = build_ilp(reduce_network(build_network(inst), inst, prune=not args.no_prune))
    Path(args.out).write_text(export_model(model), encoding="utf-8")
    print(f"{model.n_vars} variables, {len(model.rows)} rows")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    from .bench import PRESETS

    p = argparse.ArgumentParser(prog="mapfdl", description="Optimal multi-agent path finding with deadlines")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve an instance file")
    s.add_argument("--alg", required=True, choices=["ilp", "cbs-dl", "dbs", "ma-dbs"])
    s.add_argument("--merge-threshold", type=float, default=10.0, help="MA-DBS merge threshold B")
    s.add_argument("--time-limit", type=float, default=None, help="seconds")
    s.add_argument("--node-budget", type=int, default=None)
    s.add_argument("--backend", choices=["scipy", "bnb", "command"], default=None, help="ILP backend")
    s.add_argument("--config", help="key=value file (ilp_backend, ilp_command)")
    s.add_argument("--in", dest="inp", required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("validate", help="check a plan file against an instance")
    v.add_argument("--in", dest="inp", required=True)
    v.add_argument("--plan", required=True)
    v.set_defaults(func=cmd_validate)

    g = sub.add_parser("generate", help="random grid instance")
    g.add_argument("--preset", choices=sorted(PRESETS), default="desk-small")
    g.add_argument("--width", type=int)
    g.add_argument("--height", type=int)
    g.add_argument("--block-prob", type=float)
    g.add_argument("--deadline", type=int)
    g.add_argument("--agents", type=int)
    g.add_argument("--distances", help="comma-separated admissible start-goal distances")
    g.add_argument("--seed", type=int)
    g.add_argument("--out")
    g.set_defaults(func=cmd_generate)

    b = sub.add_parser("bench", help="run a benchmark suite")
    b.add_argument("--preset", action="append", choices=sorted(PRESETS), required=True)
    b.add_argument("--agents", default="5,10,15", help="comma-separated agent counts")
    b.add_argument("--instances", type=int, default=50, help="instances per agent count")
    b.add_argument("--algorithms", help="comma-separated, e.g. ilp,cbs-dl,dbs,ma-dbs:0 (default: paper set)")
    b.add_argument("--time-limit", type=float, default=60.0)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--backend", choices=["scipy", "bnb", "command"], default=None)
    b.add_argument("--config")
    b.add_argument("--out-dir", default="bench_out")
    b.add_argument("--no-isolate", action="store_true", help="run cells in-process (no watchdog)")
    b.add_argument("--trend", action="store_true", help="compare the first two presets")
    b.set_defaults(func=cmd_bench)

    e = sub.add_parser("export-ilp", help="write the ILP model in LP format")
    e.add_argument("--in", dest="inp", required=True)
    e.add_argument("--out", required=True)
    e.add_argument("--no-prune", action="store_true")
    e.set_defaults(func=cmd_export_ilp)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (InstanceError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
