"""Command-line entry point: ``smoothsat solve [FILE | --bench NAME] ...``.

Exit codes: 0 verified SAT, 1 UNSAT or restarts exhausted, 2 timeout,
64 usage or input error.
"""

import argparse
import csv
from dataclasses import replace
import json
import re
import sys

from .baseline import baseline_smoothing
from .bench.registry import BENCHMARKS, get_benchmark
from .core import SAT, TIMEOUT, CoreConfig, solve
from .ir import ParseError, parse_program, verify
from .optimize import OptimizerConfig

EXIT_SAT, EXIT_FAIL, EXIT_TIMEOUT, EXIT_USAGE = 0, 1, 2, 64

_UNITS = {"": 1.0, "s": 1.0, "m": 60.0, "h": 3600.0}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def duration(text):
    """Seconds from ``"90"``, ``"10s"``, ``"5m"`` or ``"1.5h"``."""
    m = re.fullmatch(r"\s*([0-9]*\.?[0-9]+)\s*([smh]?)\s*", text)
    if not m or float(m.group(1)) <= 0:
        raise argparse.ArgumentTypeError(f"invalid duration {text!r}")
    return float(m.group(1)) * _UNITS[m.group(2)]


def beta_list(text):
    try:
        vals = tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid beta schedule {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("beta schedule is empty")
    return vals


def build_parser():
    ap = _Parser(prog="smoothsat", description="Synthesize unknown constants of a program.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)
    s = sub.add_parser("solve", help="solve a program file or a built-in benchmark")
    s.add_argument("file", nargs="?", help="program in the s-expression format")
    s.add_argument("--bench", choices=sorted(BENCHMARKS), help="built-in benchmark instead of FILE")
    s.add_argument("--steps", type=int, help="unrolling depth for --bench")
    s.add_argument("--dt", type=float, help="time step for --bench")
    s.add_argument("--eta", type=int, default=5, help="conflict threshold (default 5)")
    s.add_argument("--restart-limit", type=int, default=None,
                   help="SAT restarts allowed after soft conflicts (default unlimited)")
    s.add_argument("--timeout", type=duration, default=1800.0, help="e.g. 90, 10s, 5m")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--beta-schedule", type=beta_list, help="comma-separated, increasing")
    s.add_argument("--eps", type=float, help="numeric slack on constraints")
    s.add_argument("--baseline-smoothing", action="store_true",
                   help="random-restart descent on the fully smoothed program only")
    s.add_argument("--restarts", type=int, default=20, help="trials for --baseline-smoothing")
    s.add_argument("--report", metavar="PATH", help="write the JSON run report here")
    s.add_argument("--traj", metavar="PATH", help="write the trajectory CSV here (--bench only)")
    s.add_argument("--trace", metavar="PATH", help="write optimizer iterations as JSON lines")
    return ap


def _load(args):
    if (args.file is None) == (args.bench is None):
        raise UsageError("give exactly one of FILE or --bench")
    if args.bench is None:
        if args.steps is not None or args.dt is not None or args.traj:
            raise UsageError("--steps, --dt and --traj need --bench")
        try:
            with open(args.file) as fh:
                return parse_program(fh.read()), None
        except OSError as exc:
            raise UsageError(f"cannot read {args.file}: {exc.strerror}") from None
        except ParseError as exc:
            raise UsageError(f"{args.file}: {exc}") from None
    if args.steps is not None and args.steps < 1:
        raise UsageError("--steps must be at least 1")
    if args.dt is not None and args.dt <= 0:
        raise UsageError("--dt must be positive")
    bench = get_benchmark(args.bench)
    return bench.generate(args.steps, args.dt), bench


def _optimizer_config(args, trace):
    kw = {}
    if args.beta_schedule:
        kw["beta_schedule"] = args.beta_schedule
    if args.eps is not None:
        kw["eps"] = args.eps
    try:
        return OptimizerConfig(trace=trace, **kw)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _assignment_json(sigma):
    if sigma is None:
        return None
    return {"reals": dict(sigma.reals), "bools": {k: int(v) for k, v in sigma.bools.items()}}


def write_trajectory(path, columns, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(columns)
        w.writerows(rows)


def run(args, out=None):
    out = out or sys.stdout
    p, bench = _load(args)
    if args.restarts < 1:
        raise UsageError("--restarts must be at least 1")
    trace_fh = open(args.trace, "w") if args.trace else None
    trace = (lambda rec: trace_fh.write(json.dumps(rec) + "\n")) if trace_fh else None
    try:
        opt = _optimizer_config(args, trace)
        report = {"program": {"nodes": len(p.nodes), "asserts": len(p.asserts),
                              "bool_unknowns": len(p.bool_unknowns),
                              "real_unknowns": len(p.real_unknowns)}}
        if args.baseline_smoothing:
            res = baseline_smoothing(p, args.restarts, opt, seed=args.seed, timeout=args.timeout)
            status = SAT if res.sat else (TIMEOUT if res.trials < args.restarts else "NOT_FOUND")
            sigma, stats = res.sigma, res.stats
            report["baseline"] = {"trials": res.trials, "found": res.found, "correct": res.correct}
        else:
            try:
                cfg = CoreConfig(eta=args.eta, restart_limit=args.restart_limit,
                                 timeout=args.timeout, optimizer=_with_restarts(opt), seed=args.seed)
            except ValueError as exc:
                raise UsageError(str(exc)) from None
            res = solve(p, cfg)
            status, sigma, stats = res.status, res.sigma, res.stats
    finally:
        if trace_fh:
            trace_fh.close()

    verified = sigma is not None and verify(p, sigma)
    report.update(status=status, assignment=_assignment_json(sigma),
                  stats={k: stats.get(k, 0) for k in ("numeric_calls", "restarts", "wall_ms")},
                  verified=verified)
    if bench is not None:
        report["benchmark"] = bench.name
        report["simulation_ok"] = bool(verified and bench.simulate_ok(sigma, args.steps, args.dt))
        if args.traj and sigma is not None:
            write_trajectory(args.traj, bench.columns, bench.trajectory(sigma, args.steps, args.dt))
    text = json.dumps(report, indent=2)
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(text + "\n")
    print(text, file=out)

    if status == SAT and verified:
        return EXIT_SAT
    if status == TIMEOUT:
        return EXIT_TIMEOUT
    return EXIT_FAIL


def _with_restarts(opt):
    # the solver default runs a few starts per numerical call
    return replace(opt, num_restarts=CoreConfig().optimizer.num_restarts)


def run_cli(argv=None):
    try:
        args = build_parser().parse_args(argv)
        return run(args)
    except UsageError as exc:
        print(f"smoothsat: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"smoothsat: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
