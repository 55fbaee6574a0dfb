from __future__ import annotations

import math

import numpy as np
import pytest

from adaptgrasp.physics import (
    DEFAULT_GRIPPER,
    G,
    ContactState,
    InvalidCommand,
    LiftState,
    ObjectModel,
    contact_settle,
    damage_check,
    lift_step,
    min_grasp_force,
    sense_force,
    slip_accel,
    slip_check_static,
)

AVOCADO = ObjectModel("avocado", 59.0, 204.0, 0.5, 298.7, 12.68)


def test_object_validation():
    with pytest.raises(ValueError):
        ObjectModel("x", 0, 1, 0.5, 10, 1)
    with pytest.raises(ValueError):
        ObjectModel("x", 10, 1, 1.2, 10, 1)
    with pytest.raises(ValueError):
        ObjectModel("x", 10, 1, 0.5, 10, 1, slip_budget=-1)
    assert AVOCADO.weight == pytest.approx(0.204 * 9.81)


def test_gripper_config_validation():
    with pytest.raises(ValueError):
        DEFAULT_GRIPPER.with_(min_sense_force=20.0)
    with pytest.raises(ValueError):
        DEFAULT_GRIPPER.with_(cmd_max=200.0)
    with pytest.raises(ValueError):
        DEFAULT_GRIPPER.with_(force_noise_sigma=-0.1)


def test_settle_free_space():
    c = contact_settle(AVOCADO, 70.0, 5.0)
    assert c == ContactState(70.0, 70.0, 0.0, 0.0, False)


def test_settle_reaches_command_below_cap():
    c = contact_settle(AVOCADO, 55.0, 5.0)
    assert not c.stalled
    assert c.compression == pytest.approx(4.0)
    assert c.f_contact == pytest.approx(298.7 * 0.004)


def test_settle_stalls_exactly_at_cap():
    c = contact_settle(AVOCADO, 30.0, 2.0)
    assert c.stalled
    assert c.f_contact == 2.0
    assert c.aperture_actual == pytest.approx(59.0 - 2.0 / 298.7 * 1000)


def test_settle_cap_clamped_to_max_force():
    c = contact_settle(AVOCADO.with_(k_true=10.0), 1.0, 100.0)
    assert c.f_contact <= DEFAULT_GRIPPER.max_force


@pytest.mark.parametrize("x", [0.5, 105.5, -3.0])
def test_settle_rejects_out_of_range(x):
    with pytest.raises(InvalidCommand):
        contact_settle(AVOCADO, x, 1.0)


def test_settle_rejects_bad_cap():
    with pytest.raises(InvalidCommand):
        contact_settle(AVOCADO, 50.0, -1.0)
    with pytest.raises(InvalidCommand):
        contact_settle(AVOCADO, 50.0, math.nan)


def test_sense_floor_and_clamp():
    assert sense_force(0.1) == 0.0
    assert sense_force(0.15) == 0.15
    assert sense_force(3.0) == 3.0
    noisy = DEFAULT_GRIPPER.with_(force_noise_sigma=5.0)
    readings = [sense_force(0.2, noisy, np.random.default_rng(s)) for s in range(200)]
    assert min(readings) == 0.0
    assert all(r == 0.0 or r >= 0.15 for r in readings)
    with pytest.raises(ValueError):
        sense_force(-1.0)


def test_sense_is_seeded():
    noisy = DEFAULT_GRIPPER.with_(force_noise_sigma=0.05)
    assert sense_force(2.0, noisy, 7) == sense_force(2.0, noisy, 7)


def test_slip_accel_avocado():
    assert slip_accel(AVOCADO, 3.0) == pytest.approx(9.81 - 7.353, abs=1e-3)
    assert slip_accel(AVOCADO, 10.0) == 0.0


def test_static_check_boundary():
    f = AVOCADO.mass_kg * G / AVOCADO.mu
    assert slip_check_static(AVOCADO, f * (1 + 1e-12))
    assert not slip_check_static(AVOCADO, f * (1 - 1e-9))
    assert not slip_check_static(AVOCADO, f * (1 + 1e-9), a_lift=1.0)


def test_lift_step_integrates_and_resets():
    slipping = ContactState(0, 0, 1.0, 0, False)
    s = lift_step(AVOCADO, slipping, LiftState(), 0.1)
    a = slip_accel(AVOCADO, 1.0)
    assert s.slipping
    assert s.slip_displacement == pytest.approx(0.5 * a * 0.01 * 1000)
    s2 = lift_step(AVOCADO, slipping, s, 0.1)
    assert s2.slip_displacement == pytest.approx(0.5 * a * 0.04 * 1000)
    held = lift_step(AVOCADO, ContactState(0, 0, 10.0, 0, False), s2, 0.1)
    assert not held.slipping and held.slip_velocity == 0.0
    assert held.slip_displacement == s2.slip_displacement
    assert held.elapsed == pytest.approx(0.3)
    with pytest.raises(ValueError):
        lift_step(AVOCADO, slipping, LiftState(), 0.0)


def test_damage_is_strict():
    assert not damage_check(AVOCADO, 12.68)
    assert damage_check(AVOCADO, 12.69)
    with pytest.raises(ValueError):
        damage_check(AVOCADO, -1)


def test_min_grasp_force():
    assert min_grasp_force(900, 0.33) == pytest.approx(26.754545, rel=1e-6)
    assert min_grasp_force(100, 0.5, a_lift=1.0) == pytest.approx(0.1 * 10.81 / 0.5)
