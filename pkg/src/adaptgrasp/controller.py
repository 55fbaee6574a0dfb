"""Adaptive force-ratcheting grasp controller and compliance measurement."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Iterable

import numpy as np

from .physics import (
    DEFAULT_GRIPPER,
    G,
    GRAM,
    MM,
    ContactState,
    GripperConfig,
    LiftState,
    ObjectModel,
    contact_settle,
    lift_step,
    sense_force,
    slip_check_static,
)

DAMPING = 0.1
MIN_DELTA_F = 0.01
HOLD_TIME = 5.0
HOLD_DT = 1.0 / 80.0
# a compliance probe presses this far inside the perceived width; the force
# cap, not the position, then bounds the squeeze
PROBE_DEPTH = 10.0
DEVIATION_SCALE = {"lower": 0.5, "higher": 1.5}

# (verb, object class) -> probe contact force in N
PROBE_FORCES: dict[tuple[str, str], float] = {
    ("check", "avocado"): 0.5,
    ("check", "tomato"): 0.2,
    ("inspect for ripeness", "avocado"): 0.5,
    ("inspect for ripeness", "tomato"): 0.2,
}
PROBE_FALLBACK = 0.2
PROBE_VERBS = ("check", "inspect for ripeness")


class InvalidEstimate(ValueError):
    pass


class InsufficientContact(ValueError):
    pass


@dataclass(frozen=True)
class PropertyEstimate:
    mass_est: float  # g
    mu_est: float
    k_est: float  # N/m
    goal_aperture: float  # mm
    additional_closure: float  # mm
    additional_force_est: float = 0.0
    force_override: float | None = None
    override_reason: str = ""
    deviation: str | None = None  # "lower" / "higher"
    complete_grasp: bool = True
    source: str = "oracle"
    label: str = ""
    # direct-parameter estimators supply F_min themselves
    direct_f_min: float | None = None

    def validate(self, cfg: GripperConfig = DEFAULT_GRIPPER) -> None:
        problems = []
        if not self.mass_est > 0:
            problems.append("mass_est must be positive")
        if not 0 < self.mu_est <= 1:
            problems.append("mu_est must lie in (0, 1]")
        if not self.k_est > 0:
            problems.append("k_est must be positive")
        if not self.additional_closure > 0:
            problems.append("additional_closure must be positive")
        if not cfg.cmd_min <= self.goal_aperture <= cfg.cmd_max:
            problems.append(
                f"goal_aperture {self.goal_aperture} outside [{cfg.cmd_min}, {cfg.cmd_max}]"
            )
        if self.deviation not in (None, "lower", "higher"):
            problems.append(f"unknown deviation {self.deviation!r}")
        if self.force_override is not None and self.force_override < 0:
            problems.append("force_override must be non-negative")
        if problems:
            raise InvalidEstimate("; ".join(problems))


@dataclass(frozen=True)
class GraspParams:
    f_min: float
    delta_f: float
    delta_x: float
    goal_aperture: float
    approach_aperture: float
    slip_threshold: float
    complete_grasp: bool = True
    f_requested: float = 0.0  # force implied by the estimate, before the actuator clamp


@dataclass(frozen=True)
class TraceStep:
    aperture_cmd: float
    aperture_actual: float
    f_sensed: float
    f_out: float
    k_instant: float
    f_true: float = 0.0


@dataclass
class GraspTrace:
    steps: list[TraceStep] = field(default_factory=list)
    x_final: float = 0.0
    f_out_final: float = 0.0
    k_measured_mean: float = 0.0
    k_measured_max: float = 0.0
    max_true_force: float = 0.0
    limits_exhausted: bool = False
    final_force: float = 0.0
    # filled once the object has been lifted
    held: bool | None = None
    slip_mm: float = 0.0

    @property
    def duration_steps(self) -> int:
        return len(self.steps)

    def to_jsonl(self) -> str:
        lines = []
        for i, s in enumerate(self.steps):
            rec = {
                "step": i,
                "aperture_cmd": s.aperture_cmd,
                "aperture_actual": s.aperture_actual,
                "f_sensed": s.f_sensed,
                "f_out": s.f_out,
                "k_instant": s.k_instant,
            }
            lines.append(json.dumps(rec))
        return "".join(line + "\n" for line in lines)


def probe_force(verb: str, label: str) -> float | None:
    """Contact force for a compliance-probe verb, or None for ordinary verbs."""
    v = verb.strip().lower()
    matched = next((p for p in PROBE_VERBS if v == p or v.startswith(p)), None)
    if matched is None:
        return None
    lab = label.lower()
    for (pv, cls), force in PROBE_FORCES.items():
        if pv == matched and cls in lab:
            return force
    return PROBE_FALLBACK


def derive_params(
    est: PropertyEstimate, verb: str = "pick", cfg: GripperConfig = DEFAULT_GRIPPER
) -> GraspParams:
    est.validate(cfg)
    goal = est.goal_aperture
    complete = est.complete_grasp
    probe = probe_force(verb, est.label)
    if probe is not None:
        f_min = probe
        goal = max(cfg.cmd_min, goal - PROBE_DEPTH)
        complete = False
    elif est.force_override is not None:
        f_min = est.force_override
    elif est.direct_f_min is not None:
        f_min = est.direct_f_min
    else:
        f_min = est.mass_est * GRAM * G / est.mu_est
        if est.deviation is not None:
            f_min *= DEVIATION_SCALE[est.deviation]
    f_requested = max(f_min, 0.0)
    f_min = min(f_requested, cfg.max_force)

    if est.direct_f_min is not None and probe is None:
        delta_f = max(MIN_DELTA_F, est.additional_force_est)
    else:
        delta_f = max(MIN_DELTA_F, DAMPING * est.k_est * est.additional_closure * MM)

    dx = est.additional_closure
    approach = min(max(goal + 2 * dx, cfg.cmd_min), cfg.cmd_max)
    return GraspParams(
        f_min=f_min,
        delta_f=delta_f,
        delta_x=dx,
        goal_aperture=goal,
        approach_aperture=approach,
        slip_threshold=max(f_min, cfg.min_sense_force),
        complete_grasp=complete,
        f_requested=f_requested,
    )


def _k_instants(steps: list[TraceStep]) -> list[float]:
    ks = [0.0]
    for prev, cur in zip(steps, steps[1:]):
        dx = prev.aperture_actual - cur.aperture_actual
        if prev.f_sensed > 0 and cur.f_sensed > 0 and dx > 0:
            ks.append(max(0.0, (cur.f_sensed - prev.f_sensed) / (dx * MM)))
        else:
            ks.append(0.0)
    return ks[: len(steps)]


def run_adaptive_grasp(
    params: GraspParams,
    obj: ObjectModel,
    cfg: GripperConfig = DEFAULT_GRIPPER,
    seed: int | np.random.Generator | None = 0,
) -> GraspTrace:
    rng = np.random.default_rng(seed)
    # opening to the approach aperture never touches an object wider than it
    # would otherwise be approached, so it is not logged
    contact_settle(obj, params.approach_aperture, 0.0, cfg)

    x = params.goal_aperture
    f_out = min(params.f_min, cfg.max_force)
    raw: list[tuple[ContactState, float, float]] = []

    def settle(x, f_out):
        c = contact_settle(obj, x, f_out, cfg)
        raw.append((c, sense_force(c.f_contact, cfg, rng), f_out))
        return raw[-1][1]

    f_c = settle(x, f_out)
    while f_c <= params.slip_threshold and x > cfg.cmd_min and f_out < cfg.max_force:
        f_out = min(f_out + params.delta_f, cfg.max_force)
        x = max(x - params.delta_x, cfg.cmd_min)
        f_c = settle(x, f_out)

    steps = [
        TraceStep(c.aperture_cmd, c.aperture_actual, fs, fo, 0.0, c.f_contact)
        for c, fs, fo in raw
    ]
    ks = _k_instants(steps)
    steps = [replace(s, k_instant=k) for s, k in zip(steps, ks)]
    pos = [k for k in ks if k > 0]
    last = raw[-1][0]
    return GraspTrace(
        steps=steps,
        x_final=last.aperture_actual,
        f_out_final=f_out,
        k_measured_mean=float(np.mean(pos)) if pos else 0.0,
        k_measured_max=max(pos) if pos else 0.0,
        max_true_force=max(c.f_contact for c, _, _ in raw),
        limits_exhausted=f_c <= params.slip_threshold,
        final_force=last.f_contact,
    )


def measure_spring_constant(trace: GraspTrace) -> tuple[float, float]:
    """Mean and max of the positive per-step stiffness readings."""
    contact = [s for s in trace.steps if s.f_sensed > 0]
    if len(contact) < 2:
        raise InsufficientContact(f"{len(contact)} contact step(s); need at least 2")
    pos = [k for k in _k_instants(trace.steps) if k > 0]
    if not pos:
        raise InsufficientContact("no positive stiffness reading between contact steps")
    return float(np.mean(pos)), max(pos)


def hold_object(
    obj: ObjectModel,
    force: float,
    hold_time: float = HOLD_TIME,
    dt: float = HOLD_DT,
    a_lift: float = 0.0,
) -> tuple[bool, float]:
    """Hold at a constant grip force; returns (held, slip in mm)."""
    if slip_check_static(obj, force, a_lift):
        return True, 0.0
    contact = ContactState(0.0, 0.0, force, 0.0, False)
    lift = LiftState(a_lift=a_lift)
    n = int(round(hold_time / dt))
    for _ in range(n):
        lift = lift_step(obj, contact, lift, dt)
        if lift.slip_displacement > obj.slip_budget:
            break
    return lift.slip_displacement <= obj.slip_budget, lift.slip_displacement


def lift_and_hold(
    obj: ObjectModel,
    trace: GraspTrace,
    cfg: GripperConfig = DEFAULT_GRIPPER,
    hold_time: float = HOLD_TIME,
    a_lift: float = 0.0,
) -> tuple[bool, float]:
    held, slip = hold_object(obj, trace.final_force, hold_time, a_lift=a_lift)
    trace.held = held
    trace.slip_mm = slip
    return held, slip


def trace_from_jsonl(lines: Iterable[str]) -> list[dict]:
    return [json.loads(line) for line in lines if line.strip()]
