import math

import numpy as np
import pytest

from perimeter_game.core import GameState, ScenarioConfig
from perimeter_game.oracle import (
    ATTACKER,
    DEFENDER,
    UNKNOWN,
    GridSpec,
    agreement_with_barrier,
    deviation_test,
    discrete_winner_map,
    escape_deviation_test,
)
from perimeter_game.strategies import StageLabel, critical_theta, theta_G

PARAMS = ScenarioConfig(nu=0.5, R0=1.8, rA=0.5, attacker_start=(1.8, 0.0), defender_start_angle=0.0)


@pytest.fixture(scope="module")
def maps():
    return {n: discrete_winner_map(0.5, GridSpec(1.8, n, n)) for n in (100, 200)}


def test_grid_spec_validation():
    with pytest.raises(ValueError):
        GridSpec(1.8, 1, 10)
    with pytest.raises(ValueError):
        GridSpec(1.0)
    alphas = GridSpec(1.8, n_alpha=8).alphas
    assert np.all(np.abs(alphas) < math.pi / 2)
    assert np.allclose(alphas, -alphas[::-1])


def test_trivial_cells(maps):
    wmap = maps[200]
    assert wmap.labels[1, -2] == ATTACKER  # R = 1 + eps, theta = pi - eps
    assert np.all(wmap.labels[:, 0] == DEFENDER)  # already aligned
    assert wmap.unknown_count == 0


def test_agreement_200(maps):
    rep = agreement_with_barrier(maps[200])
    assert rep.agreement >= 0.98
    assert rep.compared > 0.9 * 200 * 200
    assert rep.unknown == 0


def test_agreement_does_not_drop_with_refinement(maps):
    a100 = agreement_with_barrier(maps[100]).agreement
    a200 = agreement_with_barrier(maps[200]).agreement
    assert a200 >= a100


def test_oracle_rejects_the_naive_critical_angle(maps):
    # Between theta_G and theta_c the defender's race-to-the-spot bound says
    # "defender wins"; the game says the attacker does. The oracle must see it.
    wmap = maps[200]
    R, th = wmap.grid.R, wmap.grid.theta
    i = int(np.searchsorted(R, 1.6))
    lo, hi = theta_G(R[i], 0.5), critical_theta(R[i], 0.5)
    assert hi - lo > 0.05
    cols = [j for j, t in enumerate(th) if lo + 0.02 < t < hi - 0.02]
    assert cols and all(wmap.labels[i, j] == ATTACKER for j in cols)


def test_horizon_leaves_unknown_rows():
    wmap = discrete_winner_map(0.5, GridSpec(1.8, 50, 50), horizon=10)
    assert np.all(wmap.labels[11:] == UNKNOWN)
    assert np.all(wmap.labels[:11] != UNKNOWN)
    assert agreement_with_barrier(wmap).unknown > 0


def test_deviation_examples():
    R = 1.5
    state = GameState(0.0, R, theta_G(R, 0.5) + 0.2, 0.0)
    rep = deviation_test(state, PARAMS, n_deviations=64)
    assert rep["attacker"].undominated
    assert len(rep["attacker"].deviations) == 64
    assert rep["attacker"].reference == pytest.approx(0.2, abs=2e-3)
    assert rep["defender"].undominated
    assert list(rep["defender"].deviations) == pytest.approx(list(np.linspace(-1, 1, 9)))


def test_deviation_inside_defender_region():
    rep = deviation_test(GameState(0.0, 1.5, 0.5, 0.0), PARAMS)
    assert rep["attacker"].undominated and rep["defender"].undominated
    assert rep["attacker"].reference == 0.0


def test_deviation_mirror_symmetry():
    a = deviation_test(GameState(0.0, 1.4, 1.1, 0.0), PARAMS)
    b = deviation_test(GameState(0.0, 1.4, -1.1, 0.0), PARAMS)
    for who in ("attacker", "defender"):
        assert a[who].reference == pytest.approx(b[who].reference, abs=1e-12)
        np.testing.assert_allclose(a[who].objectives, b[who].objectives[::-1], atol=1e-9)
        assert len(a[who].dominating) == len(b[who].dominating)


def test_partial_info_radial_is_fastest():
    rep = deviation_test(GameState(0.0, 1.6, 2.5, 0.0), PARAMS, stage=StageLabel.PARTIAL_INFO)
    assert rep["attacker"].undominated
    assert rep["attacker"].reference == pytest.approx(0.6 / 0.5, abs=2e-3)


def test_escape_radial_is_fastest():
    rep = escape_deviation_test(1.3, PARAMS)
    assert rep.undominated
    assert rep.reference == pytest.approx(1.0)
    best = rep.deviations[np.argmin(rep.objectives)]
    assert best == pytest.approx(math.pi)
