"""Quasi-static physics of a force-capped two-finger gripper and a spring-like object.

All public functions take millimetres and grams at the boundary and work in SI
internally. Forces are always the composite (left + right) finger force.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

G = 9.81  # m/s^2

MM = 1e-3
GRAM = 1e-3


class InvalidCommand(ValueError):
    """Raised when an aperture or force command falls outside the actuator limits."""


@dataclass(frozen=True)
class ObjectModel:
    """Ground-truth physical object.

    rest_width and slip_budget are in mm, mass in g, k_true in N/m and
    f_damage in N.
    """

    name: str
    rest_width: float
    mass: float
    mu: float
    k_true: float
    f_damage: float
    slip_budget: float = 20.0
    description: str = ""

    def __post_init__(self):
        if self.rest_width <= 0:
            raise ValueError(f"{self.name}: rest_width must be positive")
        if self.mass <= 0:
            raise ValueError(f"{self.name}: mass must be positive")
        if not 0 < self.mu <= 1:
            raise ValueError(f"{self.name}: mu must lie in (0, 1]")
        if self.k_true <= 0:
            raise ValueError(f"{self.name}: k_true must be positive")
        if self.f_damage <= 0:
            raise ValueError(f"{self.name}: f_damage must be positive")
        if self.slip_budget < 0:
            raise ValueError(f"{self.name}: slip_budget must be non-negative")

    @property
    def mass_kg(self) -> float:
        return self.mass * GRAM

    @property
    def weight(self) -> float:
        """Gravitational load in N."""
        return self.mass_kg * G

    def with_(self, **changes) -> "ObjectModel":
        return replace(self, **changes)


@dataclass(frozen=True)
class GripperConfig:
    max_force: float = 16.0
    min_sense_force: float = 0.15
    max_aperture: float = 106.0
    cmd_min: float = 1.0
    cmd_max: float = 105.0
    closure_speed: float = 100.0  # mm/s
    force_noise_sigma: float = 0.0
    default_force: float = 4.0

    def __post_init__(self):
        if not 0 < self.min_sense_force < self.max_force:
            raise ValueError("need 0 < min_sense_force < max_force")
        if not 0 <= self.cmd_min < self.cmd_max <= self.max_aperture:
            raise ValueError("command limits must lie within [0, max_aperture]")
        if self.force_noise_sigma < 0:
            raise ValueError("force_noise_sigma must be non-negative")

    def with_(self, **changes) -> "GripperConfig":
        return replace(self, **changes)


DEFAULT_GRIPPER = GripperConfig()


@dataclass(frozen=True)
class ContactState:
    aperture_cmd: float
    aperture_actual: float
    f_contact: float
    compression: float
    stalled: bool


@dataclass(frozen=True)
class LiftState:
    a_lift: float = 0.0
    slip_displacement: float = 0.0  # mm
    slipping: bool = False
    elapsed: float = 0.0
    slip_velocity: float = 0.0  # m/s, relative object/finger


def contact_settle(
    obj: ObjectModel,
    aperture_cmd: float,
    f_cap: float,
    cfg: GripperConfig = DEFAULT_GRIPPER,
) -> ContactState:
    """Close to ``aperture_cmd`` unless the spring load reaches ``f_cap`` first."""
    if not cfg.cmd_min <= aperture_cmd <= cfg.cmd_max:
        raise InvalidCommand(
            f"aperture {aperture_cmd} mm outside [{cfg.cmd_min}, {cfg.cmd_max}]"
        )
    if f_cap < 0 or math.isnan(f_cap):
        raise InvalidCommand(f"force cap must be non-negative, got {f_cap}")
    f_cap = min(f_cap, cfg.max_force)

    if aperture_cmd >= obj.rest_width:
        return ContactState(aperture_cmd, aperture_cmd, 0.0, 0.0, False)

    stall_aperture = obj.rest_width - f_cap / obj.k_true / MM
    if stall_aperture > aperture_cmd:
        # exact cap on the stalled branch so threshold comparisons are not
        # disturbed by round-off in the width/stiffness division
        return ContactState(
            aperture_cmd, stall_aperture, f_cap, obj.rest_width - stall_aperture, True
        )
    compression = obj.rest_width - aperture_cmd
    return ContactState(
        aperture_cmd, aperture_cmd, obj.k_true * compression * MM, compression, False
    )


def sense_force(
    f_true: float,
    cfg: GripperConfig = DEFAULT_GRIPPER,
    rng: np.random.Generator | int | None = None,
) -> float:
    """Current-draw style force reading: Gaussian noise, clamped, floored."""
    if f_true < 0:
        raise ValueError("true force must be non-negative")
    f = f_true
    if cfg.force_noise_sigma > 0:
        if not isinstance(rng, np.random.Generator):
            rng = np.random.default_rng(rng)
        f = f + rng.normal(0.0, cfg.force_noise_sigma)
    f = max(0.0, f)
    return f if f >= cfg.min_sense_force else 0.0


def slip_check_static(obj: ObjectModel, f_applied: float, a_lift: float = 0.0) -> bool:
    """True when friction supports the object: F >= m (g + a_lift) / mu, ties holding."""
    if f_applied < 0:
        raise ValueError("applied force must be non-negative")
    return f_applied >= obj.mass_kg * (G + a_lift) / obj.mu


def slip_accel(obj: ObjectModel, f_applied: float, a_lift: float = 0.0) -> float:
    """Downward acceleration of the object relative to the fingers (m/s^2)."""
    if f_applied < 0:
        raise ValueError("applied force must be non-negative")
    return max(0.0, G + a_lift - obj.mu * f_applied / obj.mass_kg)


def lift_step(
    obj: ObjectModel, contact: ContactState, lift: LiftState, dt: float
) -> LiftState:
    if dt <= 0:
        raise ValueError("dt must be positive")
    f = contact.f_contact
    if slip_check_static(obj, f, lift.a_lift):
        return replace(lift, slipping=False, slip_velocity=0.0, elapsed=lift.elapsed + dt)
    a = slip_accel(obj, f, lift.a_lift)
    dx = 0.5 * a * dt * dt + lift.slip_velocity * dt
    return replace(
        lift,
        slip_displacement=lift.slip_displacement + dx / MM,
        slip_velocity=lift.slip_velocity + a * dt,
        slipping=True,
        elapsed=lift.elapsed + dt,
    )


def damage_check(obj: ObjectModel, trace_max_force: float) -> bool:
    if trace_max_force < 0:
        raise ValueError("force must be non-negative")
    return trace_max_force > obj.f_damage


def min_grasp_force(mass_g: float, mu: float, a_lift: float = 0.0) -> float:
    """m (g + a_lift) / mu in N for a mass given in grams."""
    return mass_g * GRAM * (G + a_lift) / mu
