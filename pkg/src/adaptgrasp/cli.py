"""Command-line entry point: bench, grasp, calibrate, massstats, ripeness."""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from .benchmark.calibration import (
    InfeasibleConstraints,
    apply_friction,
    apply_thresholds,
    calibrate_damage_thresholds,
    calibrate_friction,
    calibrate_in_motion_gains,
)
from .benchmark.dataset import SchemaError, UnknownObject, find_object, load_dataset
from .benchmark.outcomes import classify_outcome
from .benchmark.report import FORMATS, UnsupportedFormat, emit_report
from .benchmark.stats import MASS_COLUMNS, canonical_config, mass_error_stats, rank_by_compliance
from .benchmark.suite import (
    DEFAULT_SIGMA,
    DEFAULT_WIDTH_NOISE,
    STRATEGIES,
    UnknownStrategy,
    default_jobs,
    run_suite,
)
from .controller import (
    InsufficientContact,
    InvalidEstimate,
    PropertyEstimate,
    derive_params,
    lift_and_hold,
    measure_spring_constant,
    run_adaptive_grasp,
)
from .estimation.chat import ConfigError, UpstreamError
from .estimation.estimators import EstimatorSpec, ParseFailure, estimate
from .fixtures import ChecksumMismatch
from .physics import DEFAULT_GRIPPER, ObjectModel

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_UPSTREAM = 4
EXIT_INTERNAL = 5

CONFIG_ERRORS = (SchemaError, ChecksumMismatch, UnknownStrategy, ConfigError, UnsupportedFormat, OSError)
UPSTREAM_ERRORS = (UpstreamError, ParseFailure, UnknownObject, InvalidEstimate, InsufficientContact)

ESTIMATOR_KINDS = {"replay": "table_replay", "table_replay": "table_replay", "oracle": "oracle",
                   "noisy": "noisy", "chat": "external_chat", "external_chat": "external_chat"}
PROBE_DEFAULTS = {"rest_width[mm]": 60.0, "mass[g]": 150.0, "delta_x[mm]": 1.0}


class UsageError(ValueError):
    pass


def parse_estimator(text: str) -> EstimatorSpec:
    """'dg4' -> replay of DG4; 'oracle'; 'noisy:dg-ft'; 'chat:dg4'."""
    kind, _, config = text.partition(":")
    if kind.lower() in ESTIMATOR_KINDS:
        kind = ESTIMATOR_KINDS[kind.lower()]
    else:
        kind, config = "table_replay", text
    try:
        return EstimatorSpec(kind=kind, model_config=config or "DG4")
    except ValueError as e:
        raise UsageError(str(e)) from None


def _strategies(text: str) -> list[str]:
    out = [s.strip() for s in text.split(",") if s.strip()]
    unknown = [s for s in out if s not in STRATEGIES]
    if unknown:
        raise UnknownStrategy(f"unknown strategies: {', '.join(unknown)}; known: {', '.join(STRATEGIES)}")
    return out


def _write(path: str | None, data: bytes, stdout) -> None:
    if path is None or path == "-":
        stdout.write(data.decode("utf-8"))
    else:
        Path(path).write_bytes(data)


def cmd_bench(args, out) -> int:
    if args.trials < 1 or args.jobs < 1:
        raise UsageError("--trials and --jobs must be positive")
    objects = load_dataset(args.dataset)
    strategies = _strategies(args.strategies)
    kind = ESTIMATOR_KINDS.get(args.estimator)
    if kind not in ("table_replay", "oracle", "noisy"):
        raise UsageError("bench supports the replay, oracle and noisy estimators")
    report = run_suite(
        strategies, objects, args.trials, args.seed,
        sigma=args.sigma_f, width_noise=args.width_noise,
        estimator_kind=kind, jobs=args.jobs,
    )
    formats = FORMATS if args.format == "both" else (args.format,)
    for fmt in formats:
        target = args.csv_out if fmt == "csv" else args.table_out
        _write(target, emit_report(report, fmt), out)
    if args.log_out:
        Path(args.log_out).write_text(report.trial_log(), encoding="utf-8")
    return EXIT_UPSTREAM if report.errors else EXIT_OK


def cmd_grasp(args, out) -> int:
    spec = parse_estimator(args.estimator)
    cfg = DEFAULT_GRIPPER.with_(force_noise_sigma=args.sigma_f)
    obj = None
    if spec.kind != "external_chat" or args.width is None:
        objects = load_dataset(args.dataset)
        obj = find_object(args.object, objects)
    width = args.width
    if width is None:
        width = obj.model.rest_width + obj.width_bias
    est = estimate(spec, args.object, args.verb, width,
                   objects=None if obj is None else objects, seed=args.seed)
    params = derive_params(est, args.verb, cfg)
    print(f"estimator     {spec.label}", file=out)
    clamp = f" (requested {params.f_requested:.4g} N)" if params.f_requested > params.f_min else ""
    print(f"F_min         {params.f_min:.4g} N{clamp}", file=out)
    print(f"slip floor    {params.slip_threshold:.4g} N", file=out)
    print(f"delta_F       {params.delta_f:.4g} N", file=out)
    print(f"delta_x       {params.delta_x:.4g} mm", file=out)
    print(f"goal          {params.goal_aperture:.4g} mm", file=out)
    print(f"approach      {params.approach_aperture:.4g} mm", file=out)
    if obj is None:
        return EXIT_OK  # no ground-truth object to simulate against
    trace = run_adaptive_grasp(params, obj.model, cfg, args.seed)
    if params.complete_grasp:
        lift_and_hold(obj.model, trace, cfg)
    print(f"steps         {trace.duration_steps}", file=out)
    print(f"x_final       {trace.x_final:.4g} mm", file=out)
    print(f"F_out final   {trace.f_out_final:.4g} N", file=out)
    print(f"max force     {trace.max_true_force:.4g} N", file=out)
    try:
        k_mean, k_max = measure_spring_constant(trace)
        print(f"k measured    {k_mean:.4g} N/m (max {k_max:.4g})", file=out)
    except InsufficientContact as e:
        print(f"k measured    n/a ({e})", file=out)
    if params.complete_grasp:
        outcome = classify_outcome(trace, bool(trace.held), trace.slip_mm, obj.model, "grasp", args.seed)
        print(f"outcome       {outcome.result} (slip {trace.slip_mm:.3g} mm)", file=out)
    if args.trace_out:
        Path(args.trace_out).write_text(trace.to_jsonl(), encoding="utf-8")
    return EXIT_OK


def cmd_calibrate(args, out) -> int:
    objects = load_dataset(args.dataset)
    friction = calibrate_friction(objects)
    objects = apply_friction(objects, friction)
    damage = calibrate_damage_thresholds(objects)
    objects = apply_thresholds(objects, damage)
    gains = calibrate_in_motion_gains(objects)
    print(f"{'object':10s} {'mu':>5s} {'f_damage low':>13s} {'high':>8s} {'chosen':>8s} {'soft':>5s}", file=out)
    for name, d in damage.items():
        print(
            f"{name:10s} {friction[name].mu:5.2f} {d.lower:13.4g} {d.upper:8.4g} {d.chosen:8.4g} "
            f"{d.soft_agreement:>3d}/{d.soft_total}",
            file=out,
        )
    for f0, g in sorted(gains.gains.items()):
        print(f"in-motion {f0:g} N: f_gain {g.f_gain:g}, v_gain {g.v_gain:g}", file=out)
    print(
        f"in-motion agreement: {gains.agreement}/{gains.total} deterministic, "
        f"{gains.soft_agreement}/{gains.soft_total} fractional",
        file=out,
    )
    return EXIT_OK


def cmd_massstats(args, out) -> int:
    try:
        configs = [canonical_config(args.config)] if args.config else list(MASS_COLUMNS)
    except ValueError as e:
        raise UsageError(str(e)) from None
    for c in configs:
        print(f"{c:10s} {mass_error_stats(c):.2f}", file=out)
    return EXIT_OK


def _probe_rows(path: str) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if not reader.fieldnames or not {"label", "k_true[N/m]"} <= set(reader.fieldnames):
            raise SchemaError(1, "label", "probe file needs label and k_true[N/m] columns")
        rows = list(reader)
    if len(rows) < 2:
        raise SchemaError(len(rows) + 1, "rows", "need at least two probes")
    return rows


def cmd_ripeness(args, out) -> int:
    rows = _probe_rows(args.probes)
    cfg = DEFAULT_GRIPPER.with_(force_noise_sigma=args.sigma_f)
    measured = []
    for line, row in enumerate(rows, start=2):
        def num(key):
            text = (row.get(key) or "").strip()
            try:
                return float(text) if text else PROBE_DEFAULTS[key]
            except ValueError:
                raise SchemaError(line, key, f"not a number: {text!r}") from None

        label = row["label"].strip()
        k_true = num("k_true[N/m]")
        width = num("rest_width[mm]")
        obj = ObjectModel(name=label, rest_width=width, mass=num("mass[g]"), mu=0.33,
                          k_true=k_true, f_damage=1e9)
        est = PropertyEstimate(mass_est=obj.mass, mu_est=0.33, k_est=k_true, goal_aperture=width,
                               additional_closure=num("delta_x[mm]"), label=label, source="probe")
        params = derive_params(est, args.verb, cfg)
        trace = run_adaptive_grasp(params, obj, cfg, args.seed + line)
        k_mean, k_max = measure_spring_constant(trace)
        measured.append((label, k_mean, k_max, params.f_min, trace.max_true_force))
    order = rank_by_compliance([(m[0], m[1]) for m in measured])
    by_label = {m[0]: m for m in measured}
    print(f"{'rank':>4s}  {'label':20s} {'k_mean':>10s} {'k_max':>10s} {'target':>7s} {'max F':>7s}", file=out)
    for i, label in enumerate(order, start=1):
        _, k_mean, k_max, target, fmax = by_label[label]
        print(f"{i:4d}  {label:20s} {k_mean:10.1f} {k_max:10.1f} {target:7.2f} {fmax:7.3f}", file=out)
    if args.plot_data:
        lines = ["# rank label k_mean[N/m] k_max[N/m]"]
        for i, label in enumerate(order, start=1):
            _, k_mean, k_max, _, _ = by_label[label]
            lines.append(f'{i} "{label}" {k_mean:.6g} {k_max:.6g}')
        Path(args.plot_data).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="adaptgrasp", description=__doc__)
    p.add_argument("--dataset", help="object table (CSV); defaults to the embedded one")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bench", help="run the benchmark suite and print the success matrix")
    b.add_argument("--strategies", default=",".join(STRATEGIES), help="comma-separated strategy ids")
    b.add_argument("--trials", type=int, default=10, help="trials per (strategy, object) cell")
    b.add_argument("--seed", type=int, default=0, help="suite seed")
    b.add_argument("--sigma-f", type=float, default=DEFAULT_SIGMA, help="force sensing noise (N)")
    b.add_argument("--width-noise", type=float, default=DEFAULT_WIDTH_NOISE, help="perceived width noise half-range (mm)")
    b.add_argument("--estimator", default="replay", choices=["replay", "table_replay", "oracle", "noisy"])
    b.add_argument("--jobs", type=int, default=default_jobs(), help="worker processes; 1 runs serially")
    b.add_argument("--format", default="both", choices=[*FORMATS, "both"])
    b.add_argument("--csv-out", help="write the CSV matrix here instead of stdout")
    b.add_argument("--table-out", help="write the aligned table here instead of stdout")
    b.add_argument("--log-out", help="write one JSON record per trial here")
    b.set_defaults(func=cmd_bench)

    g = sub.add_parser("grasp", help="derive parameters for one object and simulate the grasp")
    g.add_argument("object", help="object name or description")
    g.add_argument("verb", nargs="?", default="pick", help="grasp verb, e.g. pick or 'check ripeness'")
    g.add_argument("--estimator", default="dg4", help="dg4, dg-ft, oracle, noisy:dg4, chat:dg4, ...")
    g.add_argument("--width", type=float, help="measured width (mm); defaults to the perceived width")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--sigma-f", type=float, default=0.0, help="force sensing noise (N)")
    g.add_argument("--trace-out", default="grasp_trace.jsonl", help="per-step trace file ('' to skip)")
    g.set_defaults(func=cmd_grasp)

    c = sub.add_parser("calibrate", help="fit friction, damage thresholds and In-Motion gains")
    c.set_defaults(func=cmd_calibrate)

    m = sub.add_parser("massstats", help="mean mass overestimation factor per estimator configuration")
    m.add_argument("--config", help="one configuration, e.g. dg4 or dg-ft-cot")
    m.set_defaults(func=cmd_massstats)

    r = sub.add_parser("ripeness", help="probe objects for stiffness and rank softest first")
    r.add_argument("--probes", required=True, help="CSV with label, k_true[N/m] and optional "
                   "rest_width[mm], mass[g], delta_x[mm]")
    r.add_argument("--verb", default="check", help="probe verb")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--sigma-f", type=float, default=0.0, help="force sensing noise (N)")
    r.add_argument("--plot-data", help="write a gnuplot-ready data file here")
    r.set_defaults(func=cmd_ripeness)
    return p


def main(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except InfeasibleConstraints as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except CONFIG_ERRORS + (UsageError,) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except UPSTREAM_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_UPSTREAM
    except Exception as e:  # anything else is a bug
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
