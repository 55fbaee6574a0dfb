from __future__ import annotations

import pytest

from adaptgrasp.baselines import (
    DEFAULT_GAINS,
    InMotionGains,
    run_force_limited,
    run_in_motion,
    run_in_place,
    run_visual,
)
from adaptgrasp.physics import DEFAULT_GRIPPER, ObjectModel

MANDARIN = ObjectModel("mandarin", 55.0, 56.0, 0.9, 151.8, 40.0)
CUP = ObjectModel("cup", 75.0, 3.6, 0.33, 389.8, 4.467)


def test_gains_validation():
    with pytest.raises(ValueError):
        InMotionGains(-1.0, 0.0)
    with pytest.raises(ValueError):
        InMotionGains(1.0, 1.0, loop_rate=0.5)
    assert DEFAULT_GAINS[0.5].f_gain >= DEFAULT_GAINS[1.5].f_gain
    assert DEFAULT_GAINS[0.5].v_gain >= DEFAULT_GAINS[1.5].v_gain


@pytest.mark.parametrize("threshold", [2.0, 10.0])
def test_in_place_stops_at_threshold(threshold):
    t = run_in_place(MANDARIN.with_(k_true=1000.0), f_threshold=threshold)
    assert t.steps[-1].f_sensed >= threshold
    assert all(s.f_sensed < threshold for s in t.steps[:-1])
    assert t.max_true_force == threshold  # stalls exactly at the cap
    assert t.held


def test_in_place_exhausts_aperture_on_soft_object():
    t = run_in_place(MANDARIN, f_threshold=10.0)
    assert t.limits_exhausted
    assert t.steps[-1].aperture_cmd == DEFAULT_GRIPPER.cmd_min
    assert t.max_true_force == pytest.approx(151.8 * 0.054)


def test_in_place_rejects_bad_threshold():
    with pytest.raises(ValueError):
        run_in_place(MANDARIN, f_threshold=0.0)
    with pytest.raises(ValueError):
        run_in_place(MANDARIN, f_threshold=20.0)


def test_force_limited_squeezes_to_max():
    t = run_force_limited(CUP)
    assert t.max_true_force == DEFAULT_GRIPPER.max_force
    assert t.held


def test_visual_uses_default_force_at_perceived_width():
    t = run_visual(CUP, perceived_width=74.0)
    assert t.steps[0].aperture_cmd == 74.0
    assert t.max_true_force == pytest.approx(389.8 * 0.001)
    t2 = run_visual(CUP, perceived_width=76.0)
    assert t2.max_true_force == 0.0 and not t2.held


def test_in_motion_without_gains_slips_light_grip():
    t = run_in_motion(MANDARIN, f_initial=0.5, gains=InMotionGains(0.0, 0.0))
    assert not t.held
    assert t.slip_mm > MANDARIN.slip_budget


def test_in_motion_force_gain_recovers_grip():
    t = run_in_motion(MANDARIN, f_initial=0.5, gains=InMotionGains(4000.0, 0.0))
    assert t.held
    assert t.steps[-1].f_out > 0.5
    assert MANDARIN.mu * t.final_force >= MANDARIN.mass * 1e-3 * 9.81


def test_in_motion_no_slip_keeps_initial_force():
    light = MANDARIN.with_(mass=10.0)
    t = run_in_motion(light, f_initial=1.5)
    assert t.held and t.slip_mm == 0.0
    assert all(s.f_out == 1.5 for s in t.steps)


def test_in_motion_stops_on_damage():
    fragile = MANDARIN.with_(f_damage=1.0)
    t = run_in_motion(fragile, f_initial=0.5, gains=InMotionGains(4000.0, 0.0))
    assert t.max_true_force > 1.0
    assert len(t.steps) < 400


def test_baselines_are_seed_deterministic():
    cfg = DEFAULT_GRIPPER.with_(force_noise_sigma=0.05)
    a = run_in_motion(MANDARIN, cfg, 0.5, DEFAULT_GAINS[0.5], 3)
    b = run_in_motion(MANDARIN, cfg, 0.5, DEFAULT_GAINS[0.5], 3)
    assert a.steps == b.steps and a.slip_mm == b.slip_mm
