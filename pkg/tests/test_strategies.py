import math

import pytest
from hypothesis import given, settings, strategies as st

from perimeter_game.core import GameState, ScenarioConfig
from perimeter_game.strategies import (
    STOP_ATTACKING,
    RegionLabel,
    StageLabel,
    attacker_control,
    classify_region,
    critical_theta,
    defender_control,
    defender_tracking_control,
    equilibrium_heading,
    full_info_existence_interval,
    g,
    partial_flow_line,
    theta_G,
)

from conftest import mp_g, mp_interval_bound, mp_theta_G

PARAMS = ScenarioConfig(nu=0.5, R0=1.8, rA=0.5, attacker_start=(1.8, 0.0), defender_start_angle=0.0)


def test_g_frozen_values():
    assert g(1.0, 0.5) == pytest.approx(float(mp_g(1, 0.5)), abs=1e-13)
    assert g(1.0, 0.5) == pytest.approx(2.25564958316718, abs=1e-12)
    # g depends on R / nu only.
    assert g(2.0, 1.0) == pytest.approx(g(1.0, 0.5), abs=1e-14)


@pytest.mark.parametrize("R, nu, expected", [
    (1.2, 0.5, 0.355868271064494),
    (1.01, 0.5, 0.0173490584841164),
    (1.5, 0.5, 0.912614451033136),
    (1.5, 0.47, 0.982172868124035),
    (2.0, 1.0, 0.684853256372280),
])
def test_theta_G_frozen_values(R, nu, expected):
    assert theta_G(R, nu) == pytest.approx(expected, abs=1e-12)
    assert theta_G(R, nu) == pytest.approx(mp_theta_G(R, nu), abs=1e-13)


def test_theta_G_vanishes_at_target_and_rejects_inside():
    assert theta_G(1.0, 0.3) == 0.0
    with pytest.raises(ValueError):
        theta_G(0.99, 0.5)


@settings(max_examples=200)
@given(st.floats(0.05, 1.0), st.floats(1.0, 3.0), st.floats(1e-4, 1.0))
def test_theta_G_increasing_in_R(nu, R, dR):
    assert theta_G(R + dR, nu) > theta_G(R, nu)


@settings(max_examples=200)
@given(st.floats(0.05, 0.95), st.floats(1.001, 3.0), st.floats(1e-3, 0.04))
def test_theta_G_decreasing_in_nu(nu, R, dnu):
    assert theta_G(R, nu + dnu) < theta_G(R, nu)


@settings(max_examples=200)
@given(st.floats(0.1, 1.0), st.floats(1.0, 3.0), st.floats(0.0, math.pi), st.floats(0.0, 1.0))
def test_region_monotone_in_theta(nu, R, theta, frac):
    # Shrinking |theta| can only help the defender.
    outer = classify_region(GameState(0, R, theta, 0), nu)
    inner = classify_region(GameState(0, R, -theta * frac, 0), nu)
    if outer is RegionLabel.DEFENDER_WIN:
        assert inner is RegionLabel.DEFENDER_WIN


def test_classify_ties_go_to_defender():
    R = 1.4
    tg = theta_G(R, 0.5)
    assert classify_region(GameState(0, R, tg, 0), 0.5) is RegionLabel.DEFENDER_WIN
    assert classify_region(GameState(0, R, -tg - 1e-9, 0), 0.5) is RegionLabel.ATTACKER_WIN


@settings(max_examples=200)
@given(st.floats(0.05, 1.0), st.floats(1.0, 4.0), st.floats(-math.pi, math.pi))
def test_equilibrium_heading_is_odd(nu, R, theta):
    assert equilibrium_heading(R, -theta, nu) == -equilibrium_heading(R, theta, nu)
    assert abs(equilibrium_heading(R, theta, nu)) <= math.pi / 2


def test_equilibrium_heading_values():
    assert equilibrium_heading(2.0, 0.3, 0.5) == pytest.approx(0.252680255142079, abs=1e-13)
    assert equilibrium_heading(2.0, 0.0, 0.5) == 0.0
    with pytest.raises(ValueError):
        equilibrium_heading(0.4, 0.1, 0.5)


def test_defender_control_by_stage():
    assert defender_control(0.3, StageLabel.PARTIAL_INFO) == 1.0
    assert defender_control(-0.3, StageLabel.FULL_INFO) == -1.0
    assert defender_control(0.0, StageLabel.FULL_INFO) == 0.0
    assert defender_control(0.3, StageLabel.PRE_GAME) == 0.0
    assert defender_control(0.3, StageLabel.ESCAPE) == 0.0


def test_tracking_control_cancels_angular_rate():
    R, alpha, nu = 1.3, 0.4, 0.5
    assert nu / R * math.sin(alpha) - defender_tracking_control(R, alpha, nu) == 0.0
    assert defender_tracking_control(R, math.pi, nu) == pytest.approx(0.0, abs=1e-16)


def test_attacker_control_by_stage():
    s = GameState(0, 1.5, 1.5, 0.0)
    assert attacker_control(s, StageLabel.PRE_GAME, PARAMS).alpha == 0.0
    assert attacker_control(s, StageLabel.PARTIAL_INFO, PARAMS).alpha == 0.0
    assert attacker_control(s, StageLabel.ESCAPE, PARAMS).alpha == math.pi
    steer = attacker_control(s, StageLabel.FULL_INFO, PARAMS)
    assert not steer.stop and steer.alpha == pytest.approx(math.asin(0.5 / 1.5))
    inside = GameState(0, 1.5, -0.5, 0.0)
    assert attacker_control(inside, StageLabel.FULL_INFO, PARAMS) is STOP_ATTACKING


def test_existence_interval_values():
    lo, hi = full_info_existence_interval(1.8, 0.5, 0.5)
    assert hi == pytest.approx(2.10536051028416, abs=1e-12)
    assert lo == -hi
    _, hi = full_info_existence_interval(1.2, 0.5, 0.15)
    assert hi == pytest.approx(0.550140982153433, abs=1e-12)
    assert hi == pytest.approx(mp_interval_bound(1.2, 0.5, 0.15), abs=1e-13)


@given(st.floats(1.0, 3.0), st.floats(0.05, 1.0), st.floats(0.01, 1.0), st.floats(0.0, 1.0))
def test_existence_interval_monotone(L0, nu, rA, dL):
    _, a = full_info_existence_interval(L0, nu, rA)
    _, b = full_info_existence_interval(L0 + dL, nu, rA)
    assert b >= a


def test_critical_theta_and_flow_line():
    assert critical_theta(1.3, 0.5) == pytest.approx(0.6)
    # Radial approach from (R_e, theta_e) with the defender closing at unit speed.
    assert partial_flow_line(1.6, 1.8, 1.0, 0.5) == pytest.approx(0.6)
    assert partial_flow_line(1.6, 1.8, -1.0, 0.5) == pytest.approx(-0.6)
    assert partial_flow_line(1.0, 1.8, 0.2, 0.5) == 0.0
