"""Nondimensional game primitives: scenario parameters, state, and geometry.

All lengths are in target radii and all times are scaled so that the
defender's maximum angular speed on the unit circle is 1.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

Point = Tuple[float, float]


class PerceptionMode(str, enum.Enum):
    CONSTRAINED = "constrained"
    UNCONSTRAINED = "unconstrained"


class EscapePolicy(str, enum.Enum):
    ESCAPE_AT_THETA_ZERO = "escape_at_theta_zero"
    SURRENDER_ON_CLASSIFICATION = "surrender_on_classification"


@dataclass(frozen=True)
class ScenarioConfig:
    nu: float
    R0: float
    rA: float
    attacker_start: Point
    defender_start_angle: float
    perception_mode: PerceptionMode = PerceptionMode.CONSTRAINED
    escape_policy: EscapePolicy = EscapePolicy.ESCAPE_AT_THETA_ZERO
    step_size: float = 1e-3
    capture_tol: float = 1e-3
    event_tol: float = 1e-9
    # Pre-game route; the attacker heads for the target centre once exhausted.
    waypoints: Tuple[Point, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "attacker_start", tuple(float(c) for c in self.attacker_start))
        object.__setattr__(self, "waypoints", tuple(tuple(float(c) for c in w) for w in self.waypoints))
        object.__setattr__(self, "perception_mode", PerceptionMode(self.perception_mode))
        object.__setattr__(self, "escape_policy", EscapePolicy(self.escape_policy))

    @property
    def constrained(self) -> bool:
        return self.perception_mode is PerceptionMode.CONSTRAINED

    @property
    def L0(self) -> float:
        return math.hypot(*self.attacker_start)

    @property
    def theta0(self) -> float:
        x, y = self.attacker_start
        return wrap_angle(math.atan2(y, x) - self.defender_start_angle)

    @classmethod
    def from_polar(cls, R: float, theta: float, **kwargs) -> "ScenarioConfig":
        """Place the defender at angle 0 and the attacker at ``(R, theta)``."""
        return cls(attacker_start=(R * math.cos(theta), R * math.sin(theta)),
                   defender_start_angle=0.0, **kwargs)


@dataclass(frozen=True)
class GameState:
    t: float
    R: float
    theta: float
    beta: float
    # Attacker inertial angle, unwrapped. Derived from beta + theta when omitted.
    phi: Optional[float] = None

    def __post_init__(self):
        if self.phi is None:
            object.__setattr__(self, "phi", self.beta + self.theta)


@dataclass(frozen=True)
class ControlPair:
    alpha: float
    u: float

    def __post_init__(self):
        if abs(self.u) > 1.0 + 1e-12:
            raise ValueError(f"defender control |u| must be <= 1, got {self.u}")
        if abs(self.alpha) > math.pi + 1e-12:
            raise ValueError(f"attacker heading must lie in [-pi, pi], got {self.alpha}")


def validate(config: ScenarioConfig) -> list[str]:
    """Return a description of each violated modelling assumption."""
    violations = []
    if not 0.0 < config.nu <= 1.0:
        violations.append(f"Assumption 1: speed ratio nu={config.nu} must lie in (0, 1]")
    if config.L0 < 1.0:
        violations.append(f"Assumption 3: attacker starts inside the target (|start|={config.L0:.6g} < 1)")
    if not config.R0 > 1.0:
        violations.append(f"TSR radius R0={config.R0} must exceed the target radius 1")
    if not 0.0 < config.rA <= min(config.R0 - 1.0, 1.0):
        violations.append(
            f"Assumption 4: ASR radius rA={config.rA} must lie in (0, min(R0-1, 1)] = (0, {min(config.R0 - 1.0, 1.0):.6g}]")
    if not abs(config.theta0) < math.pi:
        violations.append(f"Assumption 2: initial separation angle |theta0|={abs(config.theta0):.6g} must be < pi")
    for name in ("step_size", "capture_tol", "event_tol"):
        value = getattr(config, name)
        if not (value > 0.0 and math.isfinite(value)):
            violations.append(f"solver setting {name}={value} must be positive and finite")
    return violations


def separation_distance(R: float, theta: float) -> float:
    """Distance between an attacker at radius R and a defender on the unit circle."""
    return math.sqrt(max(R * R + 1.0 - 2.0 * R * math.cos(theta), 0.0))


def theta_p(R: float, rA: float) -> Optional[float]:
    """Separation angle at which the defender sits on the edge of the ASR.

    Returns ``None`` when ``R`` lies outside ``[1, 1 + rA]``: there the defender
    cannot be inside the ASR at any angle.
    """
    if R < 1.0 or R > 1.0 + rA:
        return None
    c = (R * R + 1.0 - rA * rA) / (2.0 * R)
    return math.acos(min(1.0, max(-1.0, c)))


def wrap_angle(x: float) -> float:
    """Map ``x`` to the half-open interval (-pi, pi]."""
    y = math.fmod(x, 2.0 * math.pi)
    if y <= -math.pi:
        y += 2.0 * math.pi
    elif y > math.pi:
        y -= 2.0 * math.pi
    return y


def to_cartesian(state: GameState) -> tuple[Point, Point]:
    """Return (attacker, defender) inertial positions."""
    attacker = (state.R * math.cos(state.phi), state.R * math.sin(state.phi))
    defender = (math.cos(state.beta), math.sin(state.beta))
    return attacker, defender


def sign(x: float) -> float:
    if x > 0.0:
        return 1.0
    if x < 0.0:
        return -1.0
    return 0.0


def initial_state(config: ScenarioConfig) -> GameState:
    x, y = config.attacker_start
    phi = math.atan2(y, x)
    beta = config.defender_start_angle
    # Keep phi - beta equal to the wrapped separation so both stay consistent.
    theta = wrap_angle(phi - beta)
    return GameState(t=0.0, R=math.hypot(x, y), theta=theta, beta=beta, phi=beta + theta)


def dimensionless_point(p: Sequence[float], L: float) -> Point:
    return (float(p[0]) / L, float(p[1]) / L)
