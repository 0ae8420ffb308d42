"""``optbench`` command line: run experiments, plot them, locate switch points."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .harness.experiment import ExperimentSpec, run_experiment, switch_point_for
from .harness.export import eval_times_in, export_csv, load_results
from .harness.plot import PLOT_KINDS, render_plot

EXIT_OK, EXIT_RUNTIME, EXIT_USAGE = 0, 1, 2

log = logging.getLogger("optbench")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _names(text: str) -> tuple[str, ...]:
    return tuple(v.strip().lower() for v in text.split(",") if v.strip())


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="optbench", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run optimizers and write CSV results")
    run.add_argument("--function", type=_names, required=True, help="griewank|rastrigin|schwefel (comma list)")
    run.add_argument("--algo", type=_names, default=("bo", "ea", "bea"), help="bo|ea|bea or bea:s1..s4 (comma list)")
    run.add_argument("--iters", type=int, default=600)
    run.add_argument("--reps", type=int, default=10)
    run.add_argument("--te", type=_floats, default=(0.1, 1.0, 10.0), help="simulated evaluation times [s]")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--out", type=Path, required=True)
    run.add_argument("--dims", type=int, default=20)
    run.add_argument("--gamma", type=float, default=0.1)
    run.add_argument("--theta", type=float, default=None, help="GP length-scale (default per function)")
    run.add_argument("--pop", type=int, default=10)
    run.add_argument("--switch", type=int, default=250)
    run.add_argument("--strategy", choices=("s1", "s2", "s3", "s4"), type=str.lower, default="s4")
    run.add_argument("--alpha", type=float, default=1.03)
    run.add_argument("--beta", type=float, default=0.99)
    run.add_argument("--top-percent", type=float, default=50.0)
    run.add_argument("--acq-samples", type=int, default=1000)
    run.add_argument("--acq-refine", type=int, default=100)
    run.add_argument("--workers", type=int, default=1)
    run.add_argument("--clock", choices=("wall", "tick"), default="wall",
                     help="'tick' replaces measured overhead with a deterministic counter")

    analyze = sub.add_parser("analyze", help="render SVG plots from a results directory")
    analyze.add_argument("--in", dest="in_dir", type=Path, required=True)
    analyze.add_argument("--plot", choices=PLOT_KINDS, default="objective_vs_time")
    analyze.add_argument("--te", type=float, default=None, help="evaluation time (default: every te in the summary)")
    analyze.add_argument("--log-time", action="store_true")
    analyze.add_argument("--window", type=int, default=10)
    analyze.add_argument("--out", type=Path, default=None, help="directory for SVGs (default: --in)")

    sp = sub.add_parser("switchpoint", help="detect BO/EA gain-per-second crossovers")
    sp.add_argument("--in", dest="in_dir", type=Path, required=True)
    sp.add_argument("--window", type=int, default=10)
    sp.add_argument("--persistence", type=int, default=3)
    sp.add_argument("--te", type=_floats, default=None)
    return parser


def cmd_run(args) -> int:
    spec = ExperimentSpec(
        functions=args.function,
        algorithms=args.algo,
        eval_times=args.te,
        iters=args.iters,
        repetitions=args.reps,
        base_seed=args.seed,
        dims=args.dims,
        gamma=args.gamma,
        theta=args.theta,
        acq_samples=args.acq_samples,
        acq_refine_steps=args.acq_refine,
        pop_size=args.pop,
        switch_point=args.switch,
        strategy=args.strategy,
        alpha=args.alpha,
        beta=args.beta,
        top_percent=args.top_percent,
        workers=args.workers,
        clock=args.clock,
    )
    try:
        spec.validate()
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    results = run_experiment(spec)
    paths = export_csv(results, args.out, spec.eval_times, spec.parameters())
    failed = [r for r in results if not r.ok]
    print(f"{len(results) - len(failed)} runs written to {args.out} ({len(paths)} files)")
    for r in failed:
        print(f"FAILED {r.function} {r.algorithm} seed={r.seed}: {r.error}", file=sys.stderr)
    return EXIT_RUNTIME if failed else EXIT_OK


def cmd_analyze(args) -> int:
    results = load_results(args.in_dir)
    out = args.out or args.in_dir
    out.mkdir(parents=True, exist_ok=True)
    times = [args.te] if args.te is not None else eval_times_in(args.in_dir)
    if args.plot != "objective_vs_time":
        times = times[:1] if args.plot == "overhead_vs_iter" else times
    for function in sorted({r.function for r in results}):
        runs = [r for r in results if r.function == function]
        for te in times:
            suffix = "" if args.plot == "overhead_vs_iter" else f"_te{te:g}"
            path = out / f"{function}_{args.plot}{suffix}.svg"
            render_plot(runs, args.plot, path, t_e=te, log_time=args.log_time, window=args.window)
            print(path)
    return EXIT_OK


def cmd_switchpoint(args) -> int:
    results = load_results(args.in_dir)
    times = args.te or eval_times_in(args.in_dir)
    print("function,te,switch_point")
    for function in sorted({r.function for r in results}):
        for te in times:
            sp = switch_point_for(results, function, te, args.window, args.persistence)
            print(f"{function},{te:g},{'' if sp is None else sp}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"optbench: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    handler = {"run": cmd_run, "analyze": cmd_analyze, "switchpoint": cmd_switchpoint}[args.command]
    try:
        return handler(args)
    except UsageError as exc:
        print(f"optbench: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, FileNotFoundError) as exc:
        print(f"optbench: error: {exc}", file=sys.stderr)
        return EXIT_USAGE if args.command != "run" else EXIT_RUNTIME
    except Exception as exc:
        print(f"optbench: runtime failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
