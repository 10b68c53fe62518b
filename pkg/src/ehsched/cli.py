"""Command line entry point: ``ehsched {run,compare,lowerbound,oracle-check}``.

Exit codes: 0 ok, 1 defect (ratio >= 2 or failed certification), 2 parse
error, 3 configuration error or infeasible scenario, 4 precondition violation.
"""
from __future__ import annotations

import argparse
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional

from .adversary import ConfigError, LowerBoundConfig, figure_preset, lower_bound_search, proof_preset
from .channel import ChannelModel
from .offline import offline_schedule
from .online import PreconditionError, run_alpha_policy, run_glo, run_lazy
from .oracle import oracle_search
from .scenario import (ScenarioError, format_curve, format_report, load_scenario, random_corpus,
                       trace_preset)
from .schedule import EnergyTrace, RunReport, bits_delivered, energy_used, verify_energy_neutrality

log = logging.getLogger("ehsched")

EXIT_OK, EXIT_DEFECT, EXIT_PARSE, EXIT_CONFIG, EXIT_PRECONDITION = 0, 1, 2, 3, 4

LB_PRESETS = {
    "proof": proof_preset,
    "figure": figure_preset,
    "lb-siso-proof": lambda channel=None, grid_step=1e-3: proof_preset("siso", grid_step),
    "lb-gmac-proof": lambda channel=None, grid_step=1e-3: proof_preset("gmac", grid_step),
    "lb-figure": figure_preset,
}


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _load(scenario: Optional[str], preset: Optional[str], channel: Optional[str] = None) -> EnergyTrace:
    if (scenario is None) == (preset is None):
        raise CliError("give exactly one of a scenario path or --preset", EXIT_PARSE)
    try:
        trace = trace_preset(preset) if preset else load_scenario(scenario)
    except ScenarioError as exc:
        raise CliError(str(exc), EXIT_PARSE) from None
    except OSError as exc:
        raise CliError(f"cannot read {scenario}: {exc.strerror}", EXIT_PARSE) from None
    return trace.with_channel(channel) if channel else trace


def _default_horizon(trace: EnergyTrace) -> float:
    return trace.events[1].time if len(trace) > 1 else trace.events[0].time + 1.0


def run_algorithm(trace: EnergyTrace, algorithm: str, alpha: Optional[float] = None,
                  horizon: Optional[float] = None) -> RunReport:
    if algorithm == "offline":
        return offline_schedule(trace)
    if algorithm == "lazy":
        return run_lazy(trace)
    if algorithm == "glo":
        return run_glo(trace)
    if algorithm == "alpha":
        return run_alpha_policy(trace, alpha, horizon if horizon is not None else _default_horizon(trace))
    raise ValueError(f"unknown algorithm {algorithm!r}")


def segment_table(report: RunReport, trace: EnergyTrace) -> str:
    rows = [f"{'start':>12} {'duration':>12} {'power':>12} {'bits_so_far':>12} {'energy_so_far':>14}"]
    for s in report.schedule:
        rows.append(f"{s.start:12.4f} {s.duration:12.4f} {s.power:12.6f} "
                    f"{bits_delivered(report.schedule, trace.channel, s.end):12.4f} "
                    f"{energy_used(report.schedule, s.end):14.4f}")
    return "\n".join(rows)


def cmd_run(args) -> int:
    trace = _load(args.scenario, args.preset, args.channel)
    if (args.algorithm == "alpha") != (args.alpha is not None):
        raise CliError("--alpha is required with --algorithm alpha and only then", EXIT_PRECONDITION)
    try:
        report = run_algorithm(trace, args.algorithm, args.alpha, args.horizon)
    except PreconditionError as exc:
        raise CliError(str(exc), EXIT_PRECONDITION) from None

    ok, violation = verify_energy_neutrality(report.schedule, trace)
    print(f"scenario: {trace.label or args.scenario}  channel: {trace.channel.value}  bits: {trace.bits:g}")
    print(f"algorithm: {report.algorithm}")
    print(f"completion_time: {report.completion_time:.6f}")
    print(segment_table(report, trace))
    verdict = "feasible" if report.feasible and ok else "INFEASIBLE"
    if violation:
        verdict += f" (energy overdrawn by {violation[1]:.3g} J at t={violation[0]:.6g})"
    print(f"verdict: {verdict}")
    if args.out:
        Path(args.out).write_text(format_report(report, trace))
    if args.plot:
        from .plotting import plot_schedules
        plot_schedules(trace, [report], args.plot)
    return EXIT_OK if report.feasible else EXIT_CONFIG


def _compare_one(trace: EnergyTrace) -> dict:
    off = offline_schedule(trace)
    if not off.feasible:
        return {"label": trace.label, "error": "infeasible", "code": EXIT_CONFIG}
    glo = run_glo(trace)
    row = {"label": trace.label, "offline": off.completion_time, "glo": glo.completion_time,
           "ratio_glo": glo.completion_time / off.completion_time, "lazy": math.nan, "ratio_lazy": math.nan}
    try:
        lazy = run_lazy(trace)
        row["lazy"] = lazy.completion_time
        row["ratio_lazy"] = lazy.completion_time / off.completion_time
    except PreconditionError:
        pass
    return row


def _collect(args) -> tuple[list[EnergyTrace], list[dict]]:
    traces, errors = [], []
    paths = []
    for p in args.paths:
        p = Path(p)
        paths += sorted(q for q in p.iterdir() if q.is_file()) if p.is_dir() else [p]
    for p in paths:
        try:
            tr = load_scenario(p)
            traces.append(EnergyTrace(tr.events, tr.bits, tr.channel, tr.label or p.name))
        except ScenarioError as exc:
            errors.append({"label": str(p), "error": str(exc), "code": EXIT_PARSE})
        except OSError as exc:
            errors.append({"label": str(p), "error": exc.strerror, "code": EXIT_PARSE})
        except ValueError as exc:
            errors.append({"label": str(p), "error": str(exc), "code": EXIT_PARSE})
    for name in args.preset or []:
        try:
            traces.append(trace_preset(name))
        except ScenarioError as exc:
            errors.append({"label": name, "error": str(exc), "code": EXIT_PARSE})
    if args.random:
        if args.seed is None:
            raise CliError("--random needs an explicit --seed", EXIT_PRECONDITION)
        traces += random_corpus(args.random, args.seed, args.max_arrivals, args.channel or "siso")
    if args.channel:
        traces = [t.with_channel(args.channel) for t in traces]
    return traces, errors


def cmd_compare(args) -> int:
    traces, errors = _collect(args)
    if not traces and not errors:
        raise CliError("nothing to compare: give paths, --preset or --random", EXIT_PARSE)
    if args.jobs > 1 and len(traces) > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            rows = list(pool.map(_compare_one, traces, chunksize=64))
    else:
        rows = [_compare_one(t) for t in traces]

    lines = ["label,offline,glo,ratio_glo,lazy,ratio_lazy"]
    for r in rows:
        if "error" in r:
            errors.append(r)
            continue
        lines.append(f"{r['label']},{r['offline']:.9f},{r['glo']:.9f},{r['ratio_glo']:.9f},"
                     f"{r['lazy']:.9f},{r['ratio_lazy']:.9f}")
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    if not args.quiet:
        sys.stdout.write(text)

    good = [r for r in rows if "error" not in r]
    worst = max((max(r["ratio_glo"], r["ratio_lazy"] if math.isfinite(r["ratio_lazy"]) else 0.0)
                 for r in good), default=math.nan)
    print(f"traces: {len(good)}  errors: {len(errors)}  max_ratio: {worst:.6f}")
    for e in errors:
        print(f"error: {e['label']}: {e['error']}", file=sys.stderr)
    defects = [r["label"] for r in good if r["ratio_glo"] >= 2.0
               or (math.isfinite(r["ratio_lazy"]) and r["ratio_lazy"] >= 2.0)]
    if defects:
        print(f"DEFECT: competitive ratio >= 2 for {', '.join(defects)}", file=sys.stderr)
        return EXIT_DEFECT
    return max((e["code"] for e in errors), default=EXIT_OK)


def _lb_config(args) -> LowerBoundConfig:
    channel = args.channel or "siso"
    try:
        if args.sigma1 or args.sigma2:
            if not (args.sigma1 and args.sigma2):
                raise CliError("--sigma1 and --sigma2 go together", EXIT_CONFIG)
            s1 = _load(args.sigma1, None, channel)
            s2 = _load(args.sigma2, None, channel)
            horizon = args.horizon if args.horizon is not None else _default_horizon(s1)
            return LowerBoundConfig(s1, s2, horizon, channel, args.grid_step, not args.no_refine)
        name = args.preset or "proof"
        if name not in LB_PRESETS:
            raise CliError(f"unknown lower-bound preset {name!r}; choose from {sorted(LB_PRESETS)}",
                           EXIT_CONFIG)
        config = LB_PRESETS[name](channel, args.grid_step)
        if args.no_refine:
            config = LowerBoundConfig(config.sigma1, config.sigma2, config.horizon, config.channel,
                                      config.grid_step, False)
        return config
    except ConfigError as exc:
        raise CliError(str(exc), EXIT_CONFIG) from None


def cmd_lowerbound(args) -> int:
    config = _lb_config(args)
    try:
        result = lower_bound_search(config)
    except ConfigError as exc:
        raise CliError(str(exc), EXIT_CONFIG) from None
    t1, t2 = result.offline_times
    print(f"channel: {config.channel.value}  bits: {config.sigma1.bits:g}  horizon: {config.horizon:g}")
    print(f"offline_sigma1: {t1:.6f}  offline_sigma2: {t2:.6f}")
    print(f"alpha_star: {result.alpha_star:.6f}")
    print(f"r_lower: {result.r_lower:.6f}")
    if args.out:
        Path(args.out).write_text(format_curve(result.curve))
        print(f"curve: {args.out}")
    if args.plot:
        from .plotting import plot_ratio_curve
        plot_ratio_curve(result.curve, result.alpha_star, result.r_lower, args.plot,
                         f"{config.channel.value.upper()}, B={config.sigma1.bits:g}")
        print(f"figure: {args.plot}")
    return EXIT_OK


def cmd_oracle_check(args) -> int:
    trace = _load(args.scenario, args.preset, args.channel)
    if len(trace) > 4:
        raise CliError("oracle-check handles at most 4 arrivals", EXIT_PRECONDITION)
    try:
        report = run_algorithm(trace, args.algorithm, args.alpha, args.horizon)
    except PreconditionError as exc:
        raise CliError(str(exc), EXIT_PRECONDITION) from None
    if not report.feasible:
        print("claimed schedule is infeasible")
        return EXIT_CONFIG
    found = oracle_search(trace, args.power_grid, args.time_grid)
    tolerance = args.tolerance if args.tolerance is not None else max(2 * found.step, 1e-3)
    ok, _ = verify_energy_neutrality(report.schedule, trace)
    delivered = bits_delivered(report.schedule, trace.channel, report.completion_time)
    certified = ok and delivered >= trace.bits * (1 - 1e-6) and report.completion_time <= found.time + tolerance
    print(f"algorithm: {report.algorithm}  completion_time: {report.completion_time:.6f}")
    print(f"oracle_min_time: {found.time:.6f}  grid_step: {found.step:.6g}  tolerance: {tolerance:.6g}")
    print(f"certified: {'yes' if certified else 'no'}")
    return EXIT_OK if certified else EXIT_DEFECT


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ehsched", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    algos = ["offline", "lazy", "glo", "alpha"]
    p = sub.add_parser("run", help="run one algorithm on a scenario")
    p.add_argument("scenario", nargs="?")
    p.add_argument("--preset")
    p.add_argument("--algorithm", "-a", choices=algos, default="offline")
    p.add_argument("--alpha", type=float)
    p.add_argument("--horizon", type=float)
    p.add_argument("--channel", choices=[c.value for c in ChannelModel])
    p.add_argument("--out", help="write the structured report here")
    p.add_argument("--plot", help="write a power-versus-time figure here")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("compare", help="competitive ratios of GLO and lazy against offline")
    p.add_argument("paths", nargs="*", help="scenario files or directories of them")
    p.add_argument("--preset", action="append")
    p.add_argument("--random", type=int, default=0, help="add this many random traces")
    p.add_argument("--seed", type=int)
    p.add_argument("--max-arrivals", type=int, default=10)
    p.add_argument("--channel", choices=[c.value for c in ChannelModel])
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", help="write the ratio table (CSV) here")
    p.add_argument("--quiet", "-q", action="store_true", help="print only the summary line")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("lowerbound", help="min-max lower bound over the alpha policy")
    p.add_argument("--channel", choices=[c.value for c in ChannelModel])
    p.add_argument("--preset", help="proof, figure, lb-siso-proof, lb-gmac-proof or lb-figure")
    p.add_argument("--sigma1")
    p.add_argument("--sigma2")
    p.add_argument("--horizon", type=float)
    p.add_argument("--grid-step", type=float, default=1e-3)
    p.add_argument("--no-refine", action="store_true")
    p.add_argument("--out", help="write the alpha,max_ratio curve here")
    p.add_argument("--plot", help="write the curve figure here")
    p.set_defaults(func=cmd_lowerbound)

    p = sub.add_parser("oracle-check", help="certify a schedule against brute-force search")
    p.add_argument("scenario", nargs="?")
    p.add_argument("--preset")
    p.add_argument("--algorithm", "-a", choices=algos, default="offline")
    p.add_argument("--alpha", type=float)
    p.add_argument("--horizon", type=float)
    p.add_argument("--channel", choices=[c.value for c in ChannelModel])
    p.add_argument("--tolerance", type=float)
    p.add_argument("--power-grid", type=int, default=64)
    p.add_argument("--time-grid", type=int, default=256)
    p.set_defaults(func=cmd_oracle_check)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
