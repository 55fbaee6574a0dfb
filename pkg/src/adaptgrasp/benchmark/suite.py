"""Seeded trial orchestration over (strategy, object) cells."""

from __future__ import annotations

import hashlib
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ..baselines import (
    DEFAULT_GAINS,
    InMotionGains,
    run_force_limited,
    run_in_motion,
    run_in_place,
    run_visual,
)
from ..controller import (
    GraspTrace,
    InvalidEstimate,
    derive_params,
    lift_and_hold,
    run_adaptive_grasp,
)
from ..estimation.chat import ConfigError, UpstreamError
from ..estimation.estimators import EstimatorSpec, ParseFailure, estimate
from ..physics import DEFAULT_GRIPPER, GripperConfig
from .dataset import BenchmarkObject, UnknownObject
from .outcomes import TrialOutcome, classify_outcome
from .stats import success_rate

DG_CONFIGS = {"dg": "DG4", "dg-ft": "DG_FT", "dg-ft-cot": "DG_FT_CoT", "dg-d": "DG_D"}
STRATEGIES = ("dg", "dg-ft", "dg-ft-cot", "dg-d", "ip10", "ip2", "im1.5", "im0.5", "visual", "fl")
DEFAULT_SIGMA = 0.05
DEFAULT_WIDTH_NOISE = 2.0
ESTIMATOR_ERRORS = (UnknownObject, InvalidEstimate, ParseFailure, UpstreamError, ConfigError)


class UnknownStrategy(ValueError):
    pass


@dataclass(frozen=True)
class TrialContext:
    obj: BenchmarkObject
    cfg: GripperConfig
    rng: np.random.Generator
    perceived_width: float
    objects: tuple[BenchmarkObject, ...]
    gains: dict
    estimator_kind: str = "table_replay"


def _dg(config: str) -> Callable[[TrialContext], GraspTrace]:
    def run(ctx: TrialContext) -> GraspTrace:
        spec = EstimatorSpec(kind=ctx.estimator_kind, model_config=config)
        est = estimate(
            spec, ctx.obj.name, "pick", ctx.perceived_width,
            objects=list(ctx.objects), seed=ctx.rng,
        )
        params = derive_params(est, "pick", ctx.cfg)
        trace = run_adaptive_grasp(params, ctx.obj.model, ctx.cfg, ctx.rng)
        lift_and_hold(ctx.obj.model, trace, ctx.cfg)
        return trace

    return run


RUNNERS: dict[str, Callable[[TrialContext], GraspTrace]] = {
    **{sid: _dg(cfg) for sid, cfg in DG_CONFIGS.items()},
    "ip10": lambda c: run_in_place(c.obj.model, c.cfg, 10.0, c.rng),
    "ip2": lambda c: run_in_place(c.obj.model, c.cfg, 2.0, c.rng),
    "im1.5": lambda c: run_in_motion(c.obj.model, c.cfg, 1.5, c.gains[1.5], c.rng),
    "im0.5": lambda c: run_in_motion(c.obj.model, c.cfg, 0.5, c.gains[0.5], c.rng),
    "visual": lambda c: run_visual(c.obj.model, c.cfg, c.perceived_width, c.rng),
    "fl": lambda c: run_force_limited(c.obj.model, c.cfg, c.rng),
}


def trial_seed(suite_seed: int, strategy: str, obj: str, index: int) -> int:
    digest = hashlib.sha256(f"{suite_seed}/{strategy}/{obj}/{index}".encode()).hexdigest()
    return int(digest[:16], 16)


@dataclass
class SuiteReport:
    strategies: list[str]
    objects: list[str]
    trials_per_cell: int
    counts: dict[str, dict[str, int]] = field(default_factory=dict)
    outcomes: list[TrialOutcome] = field(default_factory=list)
    errors: dict[str, str] = field(default_factory=dict)  # "strategy/object" -> message

    def aggregate(self, strategy: str) -> float:
        return success_rate([self.counts[strategy][o] for o in self.objects], self.trials_per_cell)

    def trial_log(self) -> str:
        return "".join(o.to_json() + "\n" for o in self.outcomes)


@dataclass(frozen=True)
class _Cell:
    strategy: str
    obj: BenchmarkObject
    objects: tuple[BenchmarkObject, ...]
    trials: int
    seed: int
    sigma: float
    width_noise: float
    cfg: GripperConfig
    gains: dict
    estimator_kind: str


def _run_cell(cell: _Cell) -> tuple[list[TrialOutcome], str | None]:
    runner = RUNNERS[cell.strategy]
    cfg = cell.cfg.with_(force_noise_sigma=cell.sigma)
    model = cell.obj.model
    outcomes = []
    for i in range(cell.trials):
        s = trial_seed(cell.seed, cell.strategy, model.name, i)
        rng = np.random.default_rng(s)
        noise = rng.uniform(-cell.width_noise, cell.width_noise) if cell.width_noise > 0 else 0.0
        width = min(max(model.rest_width + cell.obj.width_bias + noise, cfg.cmd_min), cfg.cmd_max)
        ctx = TrialContext(cell.obj, cfg, rng, width, cell.objects, cell.gains, cell.estimator_kind)
        try:
            trace = runner(ctx)
        except ESTIMATOR_ERRORS as e:  # fail the cell, not the suite
            return outcomes, f"{type(e).__name__}: {e}"
        outcomes.append(classify_outcome(trace, bool(trace.held), trace.slip_mm, model, cell.strategy, s))
    return outcomes, None


def default_jobs() -> int:
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:
        return os.cpu_count() or 1


def run_suite(
    strategies: Sequence[str],
    objects: Sequence[BenchmarkObject],
    trials_per_cell: int = 10,
    seed: int = 0,
    *,
    sigma: float = DEFAULT_SIGMA,
    width_noise: float = DEFAULT_WIDTH_NOISE,
    cfg: GripperConfig = DEFAULT_GRIPPER,
    gains: dict[float, InMotionGains] | None = None,
    estimator_kind: str = "table_replay",
    jobs: int | None = 1,
) -> SuiteReport:
    if not strategies or not objects:
        raise ValueError("need at least one strategy and one object")
    if trials_per_cell < 1:
        raise ValueError("trials_per_cell must be positive")
    unknown = [s for s in strategies if s not in RUNNERS]
    if unknown:
        raise UnknownStrategy(f"unknown strategies: {', '.join(unknown)}")
    gains = dict(DEFAULT_GAINS if gains is None else gains)
    objs = tuple(objects)
    cells = [
        _Cell(s, o, objs, trials_per_cell, seed, sigma, width_noise, cfg, gains, estimator_kind)
        for s in strategies
        for o in objs
    ]
    jobs = default_jobs() if jobs is None else max(1, jobs)
    if jobs == 1:
        results = [_run_cell(c) for c in cells]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_cell, cells))

    report = SuiteReport(list(strategies), [o.name for o in objs], trials_per_cell)
    for s in strategies:
        report.counts[s] = {}
    for cell, (outs, err) in zip(cells, results):
        report.outcomes.extend(outs)
        report.counts[cell.strategy][cell.obj.name] = sum(o.success for o in outs)
        if err is not None:
            report.errors[f"{cell.strategy}/{cell.obj.name}"] = err
    return report
