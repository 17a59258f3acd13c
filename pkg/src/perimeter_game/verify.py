"""Verification suites: discrete-game agreement, deviation sweeps, barrier invariance."""

from __future__ import annotations

import math
import time

import numpy as np

from .core import GameState, PerceptionMode, ScenarioConfig
from .oracle import GridSpec, agreement_with_barrier, deviation_test, discrete_winner_map, escape_deviation_test
from .simulator import run_scenario
from .strategies import theta_G

AGREEMENT_THRESHOLD = 0.98
BARRIER_TOL = 1e-3


def sample_states(n: int, R0: float, seed: int = 0) -> list:
    """Deterministic spread of states over (1, R0] x (-pi, pi)."""
    rng = np.random.default_rng(seed)
    Rs = rng.uniform(1.05, R0, n)
    thetas = rng.uniform(-math.pi + 0.05, math.pi - 0.05, n)
    return [GameState(0.0, float(r), float(t), 0.0) for r, t in zip(Rs, thetas)]


def barrier_run(nu: float, R_start: float, capture_tol: float = 1e-3):
    """Equilibrium play in the full-information game starting on the barrier."""
    cfg = ScenarioConfig.from_polar(R_start, theta_G(R_start, nu), nu=nu, R0=2.0, rA=0.5,
                                    perception_mode=PerceptionMode.UNCONSTRAINED,
                                    capture_tol=capture_tol)
    traj = run_scenario(cfg)
    gap = max(abs(s.theta - theta_G(s.R, nu)) for s in traj.samples if s.R >= 1.0)
    final = traj.outcome.terminal_state
    return {
        "nu": nu, "R_start": R_start, "max_barrier_gap": gap,
        "R_f": final.R, "theta_f": final.theta, "verdict": traj.outcome.verdict.value,
        "passed": gap <= BARRIER_TOL and abs(final.R - 1.0) <= BARRIER_TOL and abs(final.theta) <= BARRIER_TOL,
    }


def winner_map_suite(nu: float = 0.5, R0: float = 1.8, n: int = 200) -> dict:
    wmap = discrete_winner_map(nu, GridSpec(R0, n, n))
    rep = agreement_with_barrier(wmap)
    return {
        "nu": nu, "R0": R0, "grid": n, "agreement": rep.agreement, "compared": rep.compared,
        "excluded_band": rep.excluded_band, "unknown": rep.unknown,
        "passed": rep.agreement >= AGREEMENT_THRESHOLD and rep.unknown == 0,
    }


def deviation_suite(nu: float = 0.5, R0: float = 1.8, n_states: int = 20, seed: int = 0) -> dict:
    params = ScenarioConfig(nu=nu, R0=R0, rA=min(R0 - 1.0, 1.0), attacker_start=(R0, 0.0),
                            defender_start_angle=0.0)
    rows = []
    for state in sample_states(n_states, R0, seed):
        rep = deviation_test(state, params)
        rows.append({
            "R": state.R, "theta": state.theta,
            "attacker_reference": rep["attacker"].reference,
            "attacker_dominating": rep["attacker"].dominating,
            "defender_reference": rep["defender"].reference,
            "defender_dominating": rep["defender"].dominating,
        })
    escapes = []
    for R in np.linspace(1.05, R0 - 0.05, 5):
        rep = escape_deviation_test(float(R), params)
        escapes.append({"R": float(R), "reference_time": rep.reference, "dominating": rep.dominating})
    dominating = sum(len(r["attacker_dominating"]) + len(r["defender_dominating"]) for r in rows)
    dominating += sum(len(e["dominating"]) for e in escapes)
    return {"states": rows, "escape": escapes, "dominating_deviations": dominating,
            "passed": dominating == 0}


def barrier_suite(nus=(0.3, 0.5, 0.8), starts=(1.1, 1.15)) -> dict:
    runs = [barrier_run(nu, R) for nu in nus for R in starts]
    return {"runs": runs, "max_barrier_gap": max(r["max_barrier_gap"] for r in runs),
            "passed": all(r["passed"] for r in runs)}


def run_verification(grid: int = 200) -> dict:
    report = {}
    for name, suite in (("winner_map", lambda: winner_map_suite(n=grid)),
                        ("deviations", deviation_suite),
                        ("barrier_invariance", barrier_suite)):
        start = time.perf_counter()
        report[name] = suite()
        report[name]["seconds"] = round(time.perf_counter() - start, 3)
    report["passed"] = all(report[k]["passed"] for k in ("winner_map", "deviations", "barrier_invariance"))
    return report
