import math

import pytest
from hypothesis import given, settings, strategies as st

from perimeter_game.core import (
    ControlPair,
    GameState,
    PerceptionMode,
    ScenarioConfig,
    initial_state,
    separation_distance,
    theta_p,
    to_cartesian,
    validate,
    wrap_angle,
)

from conftest import mp_theta_p


def make(**kw):
    base = dict(nu=0.5, R0=1.8, rA=0.5, attacker_start=(1.5, 1.5), defender_start_angle=0.0)
    base.update(kw)
    return ScenarioConfig(**base)


def test_valid_config_has_no_violations():
    assert validate(make()) == []


@pytest.mark.parametrize("kw, needle", [
    (dict(nu=1.2), "Assumption 1"),
    (dict(nu=0.0), "Assumption 1"),
    (dict(attacker_start=(0.5, 0.0)), "Assumption 3"),
    (dict(rA=0.9), "Assumption 4"),
    (dict(R0=1.0), "TSR radius"),
    (dict(attacker_start=(-1.5, 0.0), defender_start_angle=0.0), "Assumption 2"),
    (dict(step_size=0.0), "step_size"),
])
def test_violations_are_named(kw, needle):
    problems = validate(make(**kw))
    assert any(needle in p for p in problems), problems


def test_assumption4_uses_min_of_gap_and_one():
    assert validate(make(R0=3.0, rA=1.0)) == []
    assert validate(make(R0=3.0, rA=1.01))


def test_separation_distance_values():
    assert separation_distance(1.0, 0.0) == 0.0
    assert separation_distance(2.0, math.pi) == pytest.approx(3.0)
    assert separation_distance(1.0, math.pi / 2) == pytest.approx(math.sqrt(2.0))


@given(st.floats(1.0, 5.0), st.floats(-math.pi, math.pi))
def test_separation_distance_is_even_in_theta(R, theta):
    assert separation_distance(R, theta) == separation_distance(R, -theta)


@given(st.floats(1.0, 5.0), st.floats(-math.pi, math.pi), st.floats(-10, 10))
def test_separation_matches_cartesian_distance(R, theta, beta):
    state = GameState(0.0, R, theta, beta)
    (ax, ay), (dx, dy) = to_cartesian(state)
    assert math.hypot(ax - dx, ay - dy) == pytest.approx(separation_distance(R, theta), abs=1e-9)


@pytest.mark.parametrize("R, rA", [(1.0, 0.15), (1.0, 0.5), (1.2, 0.5), (1.1, 0.2), (1.49, 0.5)])
def test_theta_p_against_high_precision(R, rA):
    assert theta_p(R, rA) == pytest.approx(mp_theta_p(R, rA), abs=1e-14)


def test_theta_p_frozen_values():
    # Values checked with 40-digit arithmetic.
    assert theta_p(1.0, 0.5) == pytest.approx(0.505360510284157, abs=1e-12)
    assert theta_p(1.0, 0.15) == pytest.approx(0.150140982153433, abs=1e-12)


def test_theta_p_undefined_outside_band():
    assert theta_p(0.99, 0.5) is None
    assert theta_p(1.51, 0.5) is None
    assert theta_p(1.5, 0.5) == pytest.approx(0.0, abs=1e-7)


@settings(max_examples=300)
@given(st.floats(0.01, 1.0), st.floats(0.0, 1.0))
def test_theta_p_puts_defender_on_asr_edge(rA, frac):
    R = 1.0 + frac * rA
    tp = theta_p(R, rA)
    assert tp is not None
    assert separation_distance(R, tp) == pytest.approx(rA, abs=1e-12)


def test_wrap_angle():
    assert wrap_angle(math.pi) == math.pi
    assert wrap_angle(-math.pi) == math.pi
    assert wrap_angle(3 * math.pi / 2) == pytest.approx(-math.pi / 2)
    assert wrap_angle(0.25) == 0.25


def test_control_pair_bounds():
    ControlPair(math.pi, -1.0)
    with pytest.raises(ValueError):
        ControlPair(0.0, 1.5)
    with pytest.raises(ValueError):
        ControlPair(4.0, 0.0)


def test_initial_state_geometry():
    cfg = make(defender_start_angle=2 * math.pi / 3)
    s = initial_state(cfg)
    assert s.R == pytest.approx(1.5 * math.sqrt(2))
    assert s.theta == pytest.approx(math.pi / 4 - 2 * math.pi / 3)
    (ax, ay), (dx, dy) = to_cartesian(s)
    assert (ax, ay) == pytest.approx((1.5, 1.5))
    assert (dx, dy) == pytest.approx((-0.5, math.sqrt(3) / 2))


def test_theta0_is_signed():
    assert make(defender_start_angle=0.0).theta0 == pytest.approx(math.pi / 4)
    assert make(defender_start_angle=math.pi / 2).theta0 == pytest.approx(-math.pi / 4)


def test_from_polar_and_enum_coercion():
    cfg = ScenarioConfig.from_polar(1.3, -0.4, nu=0.5, R0=1.8, rA=0.5, perception_mode="unconstrained")
    assert cfg.perception_mode is PerceptionMode.UNCONSTRAINED
    assert not cfg.constrained
    assert cfg.L0 == pytest.approx(1.3)
    assert cfg.theta0 == pytest.approx(-0.4)
