"""Grid-search oracles fitting damage thresholds and In-Motion gains to reference counts."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from ..baselines import InMotionGains
from ..fixtures import rows_by_name
from ..physics import DEFAULT_GRIPPER, G, GripperConfig
from .dataset import BenchmarkObject
from .outcomes import SUCCESS, TrialOutcome
from .suite import DEFAULT_SIGMA, DEFAULT_WIDTH_NOISE, _Cell, _run_cell

HARD_STRATEGIES = ("dg", "ip10", "ip2", "visual", "fl")
SOFT_STRATEGIES = ("dg-ft", "dg-ft-cot", "dg-d")
IM_STRATEGIES = {"im0.5": 0.5, "im1.5": 1.5}
FORCE_GRID = np.logspace(-2, 2, 2001)
F_GAIN_GRID = (0.0, 50.0, 100.0, 150.0, 200.0, 300.0, 500.0, 1000.0, 2000.0, 4000.0)
V_GAIN_GRID = (0.0, 1000.0, 2500.0, 5000.0, 7500.0, 10000.0, 15000.0, 20000.0)
BASE_MU = 0.33
MU_STEP = 0.05
UNBREAKABLE = 1e9
ZERO_GAINS = {0.5: InMotionGains(0.0, 0.0), 1.5: InMotionGains(0.0, 0.0)}


class InfeasibleConstraints(RuntimeError):
    def __init__(self, obj: str, constraints: list["Constraint"]):
        lines = "; ".join(c.describe() for c in constraints)
        super().__init__(f"{obj}: no damage threshold satisfies {lines}")
        self.object = obj
        self.constraints = constraints


@dataclass(frozen=True)
class Constraint:
    strategy: str
    object: str
    reference: int  # successes out of 10
    max_force: float
    held: bool
    hard: bool

    @property
    def expect_success(self) -> bool:
        return self.reference >= 5

    @property
    def kind(self) -> str:
        """lower / upper bound on the threshold, or explained / unexplained by slip."""
        if self.expect_success:
            return "lower" if self.held else "unexplained"
        return "upper" if self.held else "explained"

    def satisfied_by(self, f_damage: float) -> bool:
        if self.kind == "lower":
            return f_damage > self.max_force
        if self.kind == "upper":
            return f_damage < self.max_force
        return self.kind == "explained"

    def describe(self) -> str:
        rel = {"lower": ">", "upper": "<"}.get(self.kind)
        bound = f"f_damage {rel} {self.max_force:.4g} N" if rel else self.kind
        return f"{self.strategy} {self.reference}/10 ({bound})"


@dataclass
class DamageCalibration:
    object: str
    lower: float
    upper: float
    chosen: float
    soft_agreement: int
    soft_total: int
    constraints: list[Constraint] = field(default_factory=list)

    @property
    def unexplained(self) -> list[Constraint]:
        return [c for c in self.constraints if c.kind == "unexplained"]


def reference_counts() -> dict[str, dict[str, int]]:
    """Reference success counts keyed by object then strategy."""
    return {n: {k: int(v) for k, v in r.items() if k != "name"} for n, r in rows_by_name("table2.csv").items()}


def simulate(
    strategy: str,
    obj: BenchmarkObject,
    objects: Sequence[BenchmarkObject],
    cfg: GripperConfig = DEFAULT_GRIPPER,
    gains: dict | None = None,
) -> TrialOutcome:
    """One noiseless trial at the nominal perceived width."""
    cell = _Cell(strategy, obj, tuple(objects), 1, 0, 0.0, 0.0, cfg, gains or ZERO_GAINS, "table_replay")
    outcomes, err = _run_cell(cell)
    if err:
        raise RuntimeError(err)
    return outcomes[0]


def _unbreakable(obj: BenchmarkObject) -> BenchmarkObject:
    return replace(obj, model=obj.model.with_(f_damage=UNBREAKABLE))


def damage_constraints(
    obj: BenchmarkObject,
    objects: Sequence[BenchmarkObject],
    reference: dict[str, int],
    cfg: GripperConfig = DEFAULT_GRIPPER,
) -> list[Constraint]:
    probe = _unbreakable(obj)
    out = []
    for s in HARD_STRATEGIES + SOFT_STRATEGIES:
        o = simulate(s, probe, objects, cfg)
        det = reference[s] in (0, 10)
        out.append(Constraint(s, obj.name, reference[s], o.max_force, o.result == SUCCESS,
                              hard=det and s in HARD_STRATEGIES))
    # In-Motion cells count only when the slip loop never fires, since then
    # the gains cannot change the outcome
    for s, f0 in IM_STRATEGIES.items():
        o = simulate(s, probe, objects, cfg, ZERO_GAINS)
        if o.result == SUCCESS and o.slip_mm == 0.0:
            det = reference[s] in (0, 10)
            out.append(Constraint(s, obj.name, reference[s], o.max_force, True, hard=det))
    return out


@dataclass
class FrictionCalibration:
    object: str
    mu: float
    required: float  # smallest grid mu holding every 10/10 cell
    blocked_by: list[str] = field(default_factory=list)
    unheld: list[str] = field(default_factory=list)  # 10/10 cells no mu can hold


def _holds(strategy, obj, objects, cfg, trials, seed, sigma, width_noise) -> float:
    if simulate(strategy, obj, objects, cfg).result != SUCCESS:
        return 0.0
    cell = _Cell(strategy, obj, tuple(objects), trials, seed, sigma, width_noise, cfg, ZERO_GAINS, "table_replay")
    outcomes, err = _run_cell(cell)
    if err:
        raise RuntimeError(err)
    return sum(o.success for o in outcomes) / trials


def calibrate_friction(
    objects: Sequence[BenchmarkObject],
    reference: dict[str, dict[str, int]] | None = None,
    cfg: GripperConfig = DEFAULT_GRIPPER,
    base: float = BASE_MU,
    step: float = MU_STEP,
    trials: int = 20,
    quota: float = 0.9,
    seed: int = 0,
    sigma: float = DEFAULT_SIGMA,
    width_noise: float = DEFAULT_WIDTH_NOISE,
) -> dict[str, FrictionCalibration]:
    """Raise mu where a 10/10 cell can only hold with more friction.

    Candidates are ``base`` and the multiples of ``step`` above it up to 1. A
    cell is held at a candidate when the noiseless trial succeeds and at least
    ``quota`` of the seeded noisy trials do. The fit keeps ``base`` when no
    candidate holds a cell (it fails for another reason and is skipped) or when
    the raised value would rescue a 0/10 cell that fails by slip.
    """
    reference = reference or reference_counts()
    grid = [base] + [round(k * step, 4) for k in range(int(np.floor(base / step)) + 1, int(round(1 / step)) + 1)]
    out = {}
    for obj in objects:
        probe = _unbreakable(replace(obj, model=obj.model.with_(mu=base)))
        ref = reference[obj.name]
        need = base
        blocked, unheld = [], []
        for s in HARD_STRATEGIES + SOFT_STRATEGIES:
            if ref[s] != 10:
                continue
            for mu in grid:
                trial = replace(probe, model=probe.model.with_(mu=mu))
                if _holds(s, trial, objects, cfg, trials, seed, sigma, width_noise) >= quota:
                    need = max(need, mu)
                    break
            else:
                unheld.append(s)
        if need > base:
            raised = replace(probe, model=probe.model.with_(mu=need))
            for s in HARD_STRATEGIES + SOFT_STRATEGIES + tuple(IM_STRATEGIES):
                if ref[s] != 0 or simulate(s, probe, objects, cfg).result == SUCCESS:
                    continue
                if simulate(s, raised, objects, cfg).result == SUCCESS:
                    blocked.append(f"{s} 0/10 would hold")
        out[obj.name] = FrictionCalibration(obj.name, base if blocked else need, need, blocked, unheld)
    return out


def apply_friction(objects: Sequence[BenchmarkObject], cal: dict[str, FrictionCalibration]) -> list[BenchmarkObject]:
    return [replace(o, model=o.model.with_(mu=cal[o.name].mu)) for o in objects]


def _longest_run(mask: np.ndarray) -> tuple[int, int] | None:
    best = None
    i = 0
    n = len(mask)
    while i < n:
        if mask[i]:
            j = i
            while j + 1 < n and mask[j + 1]:
                j += 1
            if best is None or j - i > best[1] - best[0]:
                best = (i, j)
            i = j + 1
        else:
            i += 1
    return best


def fit_threshold(
    obj: str,
    constraints: list[Constraint],
    grid: np.ndarray = FORCE_GRID,
    max_force: float = DEFAULT_GRIPPER.max_force,
) -> DamageCalibration:
    hard = [c for c in constraints if c.hard and c.kind in ("lower", "upper")]
    lower = max([c.max_force for c in hard if c.kind == "lower"], default=0.0)
    upper = min([c.max_force for c in hard if c.kind == "upper"], default=np.inf)
    feasible = (grid > lower) & (grid < upper)
    if not feasible.any():
        raise InfeasibleConstraints(obj, hard)
    soft = [c for c in constraints if not c.hard and c.kind in ("lower", "upper")]
    score = np.array([sum(c.satisfied_by(f) for c in soft) for f in grid])
    best = score[feasible].max()
    lo, hi = _longest_run(feasible & (score == best))
    start = grid[lo]
    if hi == len(grid) - 1:
        # nothing caps the threshold, so place it beyond what the gripper can apply
        start = max(start, max_force)
    chosen = float(np.sqrt(start * grid[hi]))
    return DamageCalibration(obj, lower, upper, chosen, int(best), len(soft), constraints)


def calibrate_damage_thresholds(
    objects: Sequence[BenchmarkObject],
    reference: dict[str, dict[str, int]] | None = None,
    cfg: GripperConfig = DEFAULT_GRIPPER,
) -> dict[str, DamageCalibration]:
    reference = reference or reference_counts()
    return {
        o.name: fit_threshold(o.name, damage_constraints(o, objects, reference[o.name], cfg),
                              max_force=cfg.max_force)
        for o in objects
    }


def apply_thresholds(objects: Sequence[BenchmarkObject], cal: dict[str, DamageCalibration]) -> list[BenchmarkObject]:
    return [replace(o, model=o.model.with_(f_damage=cal[o.name].chosen)) for o in objects]


@dataclass
class GainsCalibration:
    gains: dict[float, InMotionGains]
    agreement: int  # deterministic cells matched
    total: int
    per_variant: dict[str, int]
    soft_agreement: int = 0  # fractional cells matched, used only to break ties
    soft_total: int = 0


def in_motion_cells(
    reference: dict[str, dict[str, int]], deterministic: bool = True
) -> list[tuple[str, str, bool]]:
    """(strategy, object, expect success) for 0/10 and 10/10 cells, or the fractional rest."""
    return [
        (s, name, counts[s] >= 5)
        for s in IM_STRATEGIES
        for name, counts in reference.items()
        if (counts[s] in (0, 10)) == deterministic
    ]


def calibrate_in_motion_gains(
    objects: Sequence[BenchmarkObject],
    reference: dict[str, dict[str, int]] | None = None,
    cfg: GripperConfig = DEFAULT_GRIPPER,
    f_grid: Sequence[float] = F_GAIN_GRID,
    v_grid: Sequence[float] = V_GAIN_GRID,
) -> GainsCalibration:
    """Pick the gain pair agreeing with the most deterministic In-Motion cells.

    Ties are broken by agreement with the fractional cells, then by smaller
    gains. The 0.5 N variant's gains must be at least the 1.5 N variant's.
    """
    reference = reference or reference_counts()
    by_name = {o.name: o for o in objects}
    hard = in_motion_cells(reference)
    soft = in_motion_cells(reference, deterministic=False)
    pairs = list(itertools.product(f_grid, v_grid))
    score: dict[tuple[str, tuple[float, float]], tuple[int, int]] = {}
    for s, f0 in IM_STRATEGIES.items():
        for fg, vg in pairs:
            g = {f0: InMotionGains(fg, vg)}
            counts = []
            for cells in (hard, soft):
                hits = 0
                for st, name, want in cells:
                    if st == s:
                        o = simulate(s, by_name[name], objects, cfg, g)
                        hits += (o.result == SUCCESS) == want
                counts.append(hits)
            score[(s, (fg, vg))] = tuple(counts)

    best = None
    for p05, p15 in itertools.product(pairs, pairs):
        if p05[0] < p15[0] or p05[1] < p15[1]:
            continue
        h05, s05 = score[("im0.5", p05)]
        h15, s15 = score[("im1.5", p15)]
        key = (-(h05 + h15), -(s05 + s15), p15[0] + p05[0], p15[1] + p05[1], p15, p05)
        if best is None or key < best[0]:
            best = (key, p05, p15)
    _, p05, p15 = best
    return GainsCalibration(
        gains={0.5: InMotionGains(*p05), 1.5: InMotionGains(*p15)},
        agreement=score[("im0.5", p05)][0] + score[("im1.5", p15)][0],
        total=len(hard),
        per_variant={"im0.5": score[("im0.5", p05)][0], "im1.5": score[("im1.5", p15)][0]},
        soft_agreement=score[("im0.5", p05)][1] + score[("im1.5", p15)][1],
        soft_total=len(soft),
    )
