"""Classical grasp strategies sharing the same physics as the adaptive controller."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .controller import GraspTrace, TraceStep, _k_instants, lift_and_hold
from .physics import (
    DEFAULT_GRIPPER,
    G,
    GripperConfig,
    LiftState,
    ObjectModel,
    contact_settle,
    damage_check,
    lift_step,
    sense_force,
)


@dataclass(frozen=True)
class InMotionGains:
    f_gain: float  # N of output force per N of slip deficit per second
    v_gain: float  # mm/s of lift speed per N of slip deficit per second
    loop_rate: float = 80.0
    lift_speed: float = 10.0
    lift_duration: float = 5.0

    def __post_init__(self):
        if self.f_gain < 0 or self.v_gain < 0:
            raise ValueError("gains must be non-negative")
        if self.loop_rate < 1:
            raise ValueError("loop_rate must be at least 1 Hz")
        if self.lift_speed <= 0 or self.lift_duration <= 0:
            raise ValueError("lift speed and duration must be positive")


# calibrated against the deterministic In-Motion cells; see benchmark.calibration
DEFAULT_GAINS = {
    0.5: InMotionGains(f_gain=100.0, v_gain=7500.0),
    1.5: InMotionGains(f_gain=100.0, v_gain=5000.0),
}

CLOSE_RATE = 80.0  # settle/sense cycles per second while closing


def _finish(steps: list[TraceStep], limits_exhausted: bool) -> GraspTrace:
    ks = _k_instants(steps)
    steps = [replace(s, k_instant=k) for s, k in zip(steps, ks)]
    pos = [k for k in ks if k > 0]
    last = steps[-1]
    return GraspTrace(
        steps=steps,
        x_final=last.aperture_actual,
        f_out_final=last.f_out,
        k_measured_mean=float(np.mean(pos)) if pos else 0.0,
        k_measured_max=max(pos) if pos else 0.0,
        max_true_force=max(s.f_true for s in steps),
        limits_exhausted=limits_exhausted,
        final_force=last.f_true,
    )


def _close_until(obj, cfg, f_cap, rng) -> tuple[list[TraceStep], bool]:
    """Close from fully open until the sensed force reaches f_cap or the floor."""
    step = cfg.closure_speed / CLOSE_RATE
    x = cfg.cmd_max
    steps = []
    while True:
        c = contact_settle(obj, x, f_cap, cfg)
        fs = sense_force(c.f_contact, cfg, rng)
        steps.append(TraceStep(x, c.aperture_actual, fs, f_cap, 0.0, c.f_contact))
        if fs >= f_cap:
            return steps, False
        if x <= cfg.cmd_min:
            return steps, True
        x = max(x - step, cfg.cmd_min)


def run_in_place(
    obj: ObjectModel,
    cfg: GripperConfig = DEFAULT_GRIPPER,
    f_threshold: float = 2.0,
    seed: int | np.random.Generator | None = 0,
) -> GraspTrace:
    if not 0 < f_threshold <= cfg.max_force:
        raise ValueError("f_threshold must lie in (0, max_force]")
    rng = np.random.default_rng(seed)
    steps, exhausted = _close_until(obj, cfg, f_threshold, rng)
    trace = _finish(steps, exhausted)
    lift_and_hold(obj, trace, cfg)
    return trace


def run_in_motion(
    obj: ObjectModel,
    cfg: GripperConfig = DEFAULT_GRIPPER,
    f_initial: float = 0.5,
    gains: InMotionGains | None = None,
    seed: int | np.random.Generator | None = 0,
) -> GraspTrace:
    if f_initial <= 0:
        raise ValueError("f_initial must be positive")
    if gains is None:
        gains = DEFAULT_GAINS.get(f_initial, DEFAULT_GAINS[1.5])
    rng = np.random.default_rng(seed)
    f_initial = min(f_initial, cfg.max_force)
    steps, exhausted = _close_until(obj, cfg, f_initial, rng)

    dt = 1.0 / gains.loop_rate
    f_out = f_initial
    speed = gains.lift_speed
    lift = LiftState()
    max_force = max(s.f_true for s in steps)
    n_ticks = int(round(gains.lift_duration * gains.loop_rate))
    for _ in range(n_ticks):
        c = contact_settle(obj, cfg.cmd_min, f_out, cfg)
        max_force = max(max_force, c.f_contact)
        lift = lift_step(obj, c, lift, dt)
        steps.append(
            TraceStep(
                cfg.cmd_min,
                c.aperture_actual,
                sense_force(c.f_contact, cfg, rng),
                f_out,
                0.0,
                c.f_contact,
            )
        )
        if damage_check(obj, max_force) or lift.slip_displacement > obj.slip_budget:
            break
        # unbalanced force, including the extra load from accelerating the lift
        deficit = max(0.0, obj.mass_kg * (G + lift.a_lift) - obj.mu * c.f_contact)
        if deficit > 0 and cfg.force_noise_sigma > 0:
            deficit = max(0.0, deficit + rng.normal(0.0, cfg.force_noise_sigma))
        f_out = min(f_out + gains.f_gain * deficit / gains.loop_rate, cfg.max_force)
        dv = gains.v_gain * deficit / gains.loop_rate
        speed += dv
        lift = replace(lift, a_lift=dv / dt / 1000.0)

    trace = _finish(steps, exhausted)
    trace.max_true_force = max_force
    trace.held = lift.slip_displacement <= obj.slip_budget
    trace.slip_mm = lift.slip_displacement
    return trace


def run_visual(
    obj: ObjectModel,
    cfg: GripperConfig = DEFAULT_GRIPPER,
    perceived_width: float | None = None,
    seed: int | np.random.Generator | None = 0,
) -> GraspTrace:
    if perceived_width is None:
        perceived_width = obj.rest_width
    rng = np.random.default_rng(seed)
    c = contact_settle(obj, perceived_width, cfg.default_force, cfg)
    fs = sense_force(c.f_contact, cfg, rng)
    trace = _finish(
        [TraceStep(perceived_width, c.aperture_actual, fs, cfg.default_force, 0.0, c.f_contact)],
        False,
    )
    lift_and_hold(obj, trace, cfg)
    return trace


def run_force_limited(
    obj: ObjectModel,
    cfg: GripperConfig = DEFAULT_GRIPPER,
    seed: int | np.random.Generator | None = 0,
) -> GraspTrace:
    rng = np.random.default_rng(seed)
    c = contact_settle(obj, cfg.cmd_min, cfg.max_force, cfg)
    fs = sense_force(c.f_contact, cfg, rng)
    trace = _finish(
        [TraceStep(cfg.cmd_min, c.aperture_actual, fs, cfg.max_force, 0.0, c.f_contact)],
        False,
    )
    lift_and_hold(obj, trace, cfg)
    return trace
