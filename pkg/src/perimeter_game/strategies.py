"""Equilibrium control laws, the barrier curve, and win-region classification."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

from .core import EscapePolicy, GameState, ScenarioConfig, sign


class StageLabel(str, enum.Enum):
    PRE_GAME = "PreGame"
    PARTIAL_INFO = "PartialInfo"
    FULL_INFO = "FullInfo"
    ESCAPE = "Escape"


class RegionLabel(str, enum.Enum):
    DEFENDER_WIN = "DefenderWin"
    ATTACKER_WIN = "AttackerWin"


@dataclass(frozen=True)
class AttackerDecision:
    """Either ``Steer(alpha)`` or ``StopAttacking`` (alpha is None)."""

    alpha: Optional[float] = None

    @property
    def stop(self) -> bool:
        return self.alpha is None

    @classmethod
    def steer(cls, alpha: float) -> "AttackerDecision":
        if not -math.pi <= alpha <= math.pi:
            raise ValueError(f"heading {alpha} outside [-pi, pi]")
        return cls(alpha)


STOP_ATTACKING = AttackerDecision(None)


def defender_control(theta: float, stage: StageLabel) -> float:
    stage = StageLabel(stage)
    if stage in (StageLabel.PARTIAL_INFO, StageLabel.FULL_INFO):
        return sign(theta)
    return 0.0


def defender_tracking_control(R: float, alpha: float, nu: float) -> float:
    """Angular speed that keeps theta constant against an attacker heading alpha."""
    return nu / R * math.sin(alpha)


def equilibrium_heading(R: float, theta: float, nu: float) -> float:
    """Full-information attacker heading: turn away from the defender by arcsin(nu/R)."""
    ratio = nu / R
    if ratio > 1.0:
        raise ValueError(f"nu/R = {ratio} > 1: state is corrupted (R={R}, nu={nu})")
    return sign(theta) * math.asin(ratio)


def attacker_control(state: GameState, stage: StageLabel, params: ScenarioConfig) -> AttackerDecision:
    """Attacker decision for the given stage.

    In the full-information stage the attacker gives up whenever the state lies
    in the defender's win region; ``params.escape_policy`` only decides when the
    simulator acts on that (see ``simulator``).
    """
    stage = StageLabel(stage)
    if stage in (StageLabel.PRE_GAME, StageLabel.PARTIAL_INFO):
        return AttackerDecision.steer(0.0)
    if stage is StageLabel.ESCAPE:
        return AttackerDecision.steer(math.pi)
    alpha = equilibrium_heading(state.R, state.theta, params.nu)
    if state.R >= 1.0 and classify_region(state, params.nu) is RegionLabel.DEFENDER_WIN:
        return STOP_ATTACKING
    return AttackerDecision.steer(alpha)


def g(R: float, nu: float) -> float:
    if R < nu:
        raise ValueError(f"g(R) requires R >= nu (R={R}, nu={nu})")
    return math.sqrt(R * R / (nu * nu) - 1.0) + math.asin(nu / R)


def theta_G(R: float, nu: float) -> float:
    """Barrier angle: the largest |theta| from which the defender still wins."""
    if R < 1.0:
        raise ValueError(f"barrier is defined for R >= 1, got {R}")
    return g(R, nu) - g(1.0, nu)


def classify_region(state: GameState, nu: float) -> RegionLabel:
    # Closed region: ties on the barrier go to the defender.
    if abs(state.theta) <= theta_G(state.R, nu):
        return RegionLabel.DEFENDER_WIN
    return RegionLabel.ATTACKER_WIN


def full_info_existence_interval(L0: float, nu: float, rA: float) -> tuple[float, float]:
    """Initial separation angles for which both players eventually see each other."""
    bound = (L0 - 1.0) / nu + math.acos(1.0 - rA * rA / 2.0)
    return -bound, bound


def critical_theta(R: float, nu: float) -> float:
    return (R - 1.0) / nu


def partial_flow_line(R: float, R_entry: float, theta_entry: float, nu: float) -> float:
    """theta(R) under radial approach with the defender closing at full speed.

    Once the defender is aligned it holds theta at zero.
    """
    magnitude = abs(theta_entry) + (R - R_entry) / nu
    return sign(theta_entry) * max(magnitude, 0.0)
