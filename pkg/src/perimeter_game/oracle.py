"""Independent checks of the closed-form barrier and control laws.

Nothing here calls the RK4 integrator: the discrete game and the deviation
sweeps propagate the dynamics with their exact constant-control solution

    R(t)     = R - nu cos(alpha) t
    theta(t) = theta - u t - tan(alpha) ln(R(t) / R)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import GameState, ScenarioConfig
from .strategies import RegionLabel, StageLabel, classify_region, theta_G

UNKNOWN, DEFENDER, ATTACKER = -1, 0, 1
DOMINANCE_TOL = 1e-3


@dataclass(frozen=True)
class GridSpec:
    """Discretisation of the (R, |theta|) half-plane for the discrete game.

    Each round of the discrete game lasts until the attacker has dropped one
    R cell, so the round length follows from the attacker's heading.
    """

    R0: float
    nR: int = 200
    ntheta: int = 200
    n_alpha: int = 64
    defender_controls: tuple = (-1.0, 0.0, 1.0)

    def __post_init__(self):
        if self.nR < 2 or self.ntheta < 2:
            raise ValueError("grid needs at least 2 cells per axis")
        if self.n_alpha < 1 or not self.R0 > 1.0:
            raise ValueError("invalid grid specification")

    @property
    def R(self) -> np.ndarray:
        return np.linspace(1.0, self.R0, self.nR)

    @property
    def theta(self) -> np.ndarray:
        return np.linspace(0.0, math.pi, self.ntheta)

    @property
    def alphas(self) -> np.ndarray:
        # Open interval (-pi/2, pi/2): every discrete heading makes radial progress.
        k = np.arange(self.n_alpha)
        return -0.5 * math.pi + (k + 0.5) * math.pi / self.n_alpha


@dataclass
class WinnerMap:
    grid: GridSpec
    nu: float
    value: np.ndarray  # signed payoff, > 0 where the attacker wins; NaN where unknown
    labels: np.ndarray  # UNKNOWN / DEFENDER / ATTACKER
    win_tol: float

    @property
    def unknown_count(self) -> int:
        return int(np.sum(self.labels == UNKNOWN))


def discrete_winner_map(nu: float, grid: GridSpec, horizon: Optional[int] = None,
                        win_tol: float = 0.0) -> WinnerMap:
    """Backward induction over R rows of the discretised game.

    Each round the attacker picks a heading and the defender answers with an
    angular speed held for the round. The payoff is signed: ``+|theta|`` when
    the attacker reaches R = 1, ``-(R_a - 1) / nu`` when the defender aligns at
    radius ``R_a`` and holds alignment from then on; the latter is the angle
    the defender could still have conceded. The attacker wins iff the value
    is positive. Unlike ``max(0, |theta_f|)`` the signed payoff is nearly
    linear across the winner boundary, so interpolation barely smears it.
    Rows the horizon does not reach stay UNKNOWN.
    """
    R, th = grid.R, grid.theta
    dR = R[1] - R[0]
    horizon = grid.nR - 1 if horizon is None else min(horizon, grid.nR - 1)

    alphas = grid.alphas
    us = np.asarray(grid.defender_controls, dtype=float)
    tau = dR / (nu * np.cos(alphas))
    tan_a = np.tan(alphas)

    value = np.full((grid.nR, grid.ntheta), np.nan)
    value[0] = th
    start = th[None, None, :]
    for i in range(1, horizon + 1):
        drift = -tan_a * math.log(R[i - 1] / R[i])
        nxt = start + drift[:, None, None] - us[None, :, None] * tau[:, None, None]
        # Crossing pi is the same configuration seen from the other side.
        nxt = np.where(nxt > math.pi, 2.0 * math.pi - nxt, nxt)
        v = np.interp(np.maximum(nxt, 0.0).ravel(), th, value[i - 1]).reshape(nxt.shape)
        # Crossing zero inside the round: the defender stops there and holds.
        crossed = nxt < 0.0
        with np.errstate(divide="ignore", invalid="ignore"):
            frac = np.where(crossed, start / (start - nxt), 0.0)
        v = np.where(crossed, -(R[i] - frac * dR - 1.0) / nu, v)
        value[i] = v.min(axis=1).max(axis=0)
        value[i, 0] = -(R[i] - 1.0) / nu

    labels = np.full(value.shape, UNKNOWN, dtype=int)
    known = ~np.isnan(value)
    labels[known & (value > win_tol)] = ATTACKER
    labels[known & (value <= win_tol)] = DEFENDER
    return WinnerMap(grid, nu, value, labels, win_tol)


@dataclass
class AgreementReport:
    agreement: float
    compared: int
    excluded_band: int
    unknown: int
    disagreements: list = field(default_factory=list)


def agreement_with_barrier(wmap: WinnerMap) -> AgreementReport:
    """Compare the discrete winners with the closed-form regions, skipping the
    cells within one cell of the barrier curve."""
    grid, nu = wmap.grid, wmap.nu
    R, th = grid.R, grid.theta
    dR, dth = R[1] - R[0], th[1] - th[0]
    agree = compared = band = unknown = 0
    bad = []
    for i, r in enumerate(R):
        nearby = [theta_G(x, nu) for x in (r - dR, r, r + dR) if x >= 1.0]
        for j, t in enumerate(th):
            if min(abs(t - b) for b in nearby) <= dth:
                band += 1
                continue
            lab = wmap.labels[i, j]
            if lab == UNKNOWN:
                unknown += 1
                continue
            analytic = classify_region(GameState(0.0, float(r), float(t), 0.0), nu)
            expected = ATTACKER if analytic is RegionLabel.ATTACKER_WIN else DEFENDER
            compared += 1
            if lab == expected:
                agree += 1
            else:
                bad.append((float(r), float(t)))
    rate = agree / compared if compared else float("nan")
    return AgreementReport(rate, compared, band, unknown, bad)


# ---------------------------------------------------------------------------
# Constant-control deviation sweeps
# ---------------------------------------------------------------------------

def _propagate(R, theta, alpha, u, dt, nu):
    """Exact one-step solution with alpha and u held; R, theta, alpha, u are arrays."""
    c = np.cos(alpha)
    R_next = R - nu * c * dt
    with np.errstate(divide="ignore", invalid="ignore"):
        swing = np.where(np.abs(c) > 1e-12,
                         -np.tan(alpha) * np.log(R_next / R),
                         nu / R * np.sin(alpha) * dt)
    return R_next, theta - u * dt + swing


def _simulate(R0, theta0, nu, attacker, defender, dt, horizon):
    """Roll out a batch of attacker/defender policies from one state.

    ``attacker(R, theta)`` and ``defender(R, theta, alpha, dt)`` return arrays.
    Returns (terminal |theta| at R = 1 or 0 if not reached, time of arrival).
    """
    R = np.asarray(R0, dtype=float).copy()
    theta = np.asarray(theta0, dtype=float).copy()
    n = R.shape[0]
    done = np.zeros(n, dtype=bool)
    theta_f = np.zeros(n)
    t_f = np.full(n, np.inf)
    t = 0.0
    while t < horizon and not done.all():
        alpha = attacker(R, theta)
        u = defender(R, theta, alpha, dt)
        R_next, th_next = _propagate(R, theta, alpha, u, dt, nu)
        hit = (~done) & (R_next <= 1.0)
        if hit.any():
            c = np.cos(alpha[hit])
            frac = (R[hit] - 1.0) / (nu * c)
            _, th_hit = _propagate(R[hit], theta[hit], alpha[hit], u[hit], frac, nu)
            theta_f[hit] = np.abs(np.angle(np.exp(1j * th_hit)))
            t_f[hit] = t + frac
            done |= hit
        R = np.where(done, R, R_next)
        theta = np.where(done, theta, np.angle(np.exp(1j * th_next)))
        # An aligned defender can hold theta at zero for good.
        done |= np.abs(theta) < 1e-12
        t += dt
    return theta_f, t_f


def _equilibrium_attacker(nu):
    def law(R, theta):
        return np.sign(theta) * np.arcsin(np.minimum(nu / R, 1.0))
    return law


def _radial_attacker(R, theta):
    return np.zeros_like(R)


def _aligning_defender(nu):
    """sign(theta), except that it stops exactly on the attacker when it can."""
    def law(R, theta, alpha, dt):
        c = np.cos(alpha)
        R_next = R - nu * c * dt
        with np.errstate(divide="ignore", invalid="ignore"):
            swing = np.where(np.abs(c) > 1e-12, -np.tan(alpha) * np.log(R_next / R),
                             nu / R * np.sin(alpha) * dt)
        return np.clip((theta + swing) / dt, -1.0, 1.0)
    return law


@dataclass
class DeviationReport:
    state: tuple
    player: str
    objective: str
    reference: float
    deviations: np.ndarray
    objectives: np.ndarray
    dominating: list

    @property
    def undominated(self) -> bool:
        return not self.dominating


def deviation_test(state: GameState, params: ScenarioConfig, n_deviations: int = 64,
                   horizon: float = 50.0, stage: StageLabel = StageLabel.FULL_INFO,
                   dt: float = 1e-3, tol: float = DOMINANCE_TOL) -> dict:
    """Sweep constant-control deviations for each player against the other's law.

    Returns ``{"attacker": DeviationReport, "defender": DeviationReport}``.
    In the full-information stage both players are scored on |theta| at R = 1;
    in the partial-information stage the attacker is scored on arrival time.
    """
    nu = params.nu
    stage = StageLabel(stage)
    full = stage is StageLabel.FULL_INFO
    attacker_law = _equilibrium_attacker(nu) if full else _radial_attacker
    defender_law = _aligning_defender(nu)
    R, th = float(state.R), float(state.theta)

    # Attacker deviations: symmetric set of constant headings in (-pi/2, pi/2).
    k = np.arange(n_deviations)
    alphas = -0.5 * math.pi + (k + 0.5) * math.pi / n_deviations
    ref_th, ref_t = _simulate([R], [th], nu, attacker_law, defender_law, dt, horizon)
    dev_th, dev_t = _simulate(np.full(n_deviations, R), np.full(n_deviations, th), nu,
                              lambda _R, _t: alphas, defender_law, dt, horizon)
    if full:
        reference, objectives = float(ref_th[0]), dev_th
        dominating = [float(a) for a, v in zip(alphas, objectives) if v > reference + tol]
        att_obj = "terminal |theta| (maximise)"
    else:
        reference, objectives = float(ref_t[0]), dev_t
        dominating = [float(a) for a, v in zip(alphas, objectives) if v < reference - tol]
        att_obj = "time to reach the target (minimise)"
    attacker = DeviationReport((R, th), "attacker", att_obj, reference, alphas, objectives, dominating)

    # Defender deviations: constant angular speeds on [-1, 1].
    n_u = 9
    us = np.linspace(-1.0, 1.0, n_u)
    dev_th, _ = _simulate(np.full(n_u, R), np.full(n_u, th), nu, attacker_law,
                          lambda _R, _t, _a, _dt: us, dt, horizon)
    reference = float(ref_th[0])
    dominating = [float(u) for u, v in zip(us, dev_th) if v < reference - tol]
    defender = DeviationReport((R, th), "defender", "terminal |theta| (minimise)", reference,
                               us, dev_th, dominating)
    return {"attacker": attacker, "defender": defender}


def escape_deviation_test(R: float, params: ScenarioConfig, n_deviations: int = 64) -> DeviationReport:
    """Escape from alignment: compare outward speed and time to the TSR edge.

    The defender tracks the attacker's angular rate so theta stays at zero;
    only the radial rate -nu cos(alpha) matters.
    """
    nu = params.nu
    alphas = np.linspace(0.5 * math.pi, 1.5 * math.pi, n_deviations + 1)
    rates = -nu * np.cos(alphas)
    with np.errstate(divide="ignore"):
        times = np.where(rates > 0.0, (params.R0 - R) / np.where(rates > 0, rates, 1.0), np.inf)
    reference = (params.R0 - R) / nu
    dominating = [float(a) for a, v in zip(alphas, times) if v < reference - DOMINANCE_TOL]
    return DeviationReport((R, 0.0), "attacker", "time to reach the TSR edge (minimise)",
                           reference, alphas, times, dominating)
