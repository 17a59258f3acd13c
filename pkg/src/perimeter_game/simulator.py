"""Fixed-step RK4 integration of the staged game with bisection event location."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Union

from .core import (
    ControlPair,
    GameState,
    ScenarioConfig,
    initial_state,
    separation_distance,
    sign,
    to_cartesian,
    validate,
    wrap_angle,
)
from .stage_machine import (
    ALLOWED_TRANSITIONS,
    Outcome,
    StageError,
    StageLabel,
    Terminal,
    Verdict,
    advance,
    initial_stage,
)
from .strategies import (
    attacker_control,
    classify_region,
    defender_control,
    defender_tracking_control,
    equilibrium_heading,
)

log = logging.getLogger(__name__)

ControlLaw = Callable[[GameState], ControlPair]


class ScenarioError(ValueError):
    """The scenario violates one or more modelling assumptions."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class MissedEventError(RuntimeError):
    pass


@dataclass(frozen=True)
class TrajectorySample:
    t: float
    stage: StageLabel
    R: float
    theta: float
    beta: float
    ax: float
    ay: float
    dx: float
    dy: float
    alpha: float
    u: float
    p: float


@dataclass(frozen=True)
class TransitionEvent:
    kind: str
    from_stage: StageLabel
    to: str
    state: GameState


@dataclass
class Trajectory:
    config: ScenarioConfig
    samples: list = field(default_factory=list)
    events: list = field(default_factory=list)  # [(t, TransitionEvent)]
    outcome: Optional[Outcome] = None

    def stage_segments(self) -> list:
        """Contiguous runs of samples sharing a stage, as (stage, [samples])."""
        segments = []
        for s in self.samples:
            if not segments or segments[-1][0] is not s.stage:
                segments.append((s.stage, []))
            segments[-1][1].append(s)
        return segments


def dynamics(state: GameState, controls: ControlPair, nu: float) -> tuple[float, float, float]:
    """Time derivative of (R, theta, beta) under the given controls."""
    dphi = nu / state.R * math.sin(controls.alpha)
    return -nu * math.cos(controls.alpha), dphi - controls.u, controls.u


def _deriv(R, theta, beta, phi, t, law, nu):
    c = law(GameState(t, R, theta, beta, phi))
    dphi = nu / R * math.sin(c.alpha)
    return -nu * math.cos(c.alpha), dphi - c.u, c.u, dphi


def rk4_step(state: GameState, controls: Union[ControlPair, ControlLaw], h: float, nu: float) -> GameState:
    """Advance one classical RK4 step.

    ``controls`` is either a fixed ControlPair (held over the step) or a
    feedback law re-evaluated at every RK4 stage.
    """
    if h == 0.0:
        return state
    law = controls if callable(controls) else (lambda _s, _c=controls: _c)
    y = (state.R, state.theta, state.beta, state.phi)
    t = state.t
    k1 = _deriv(*y, t, law, nu)
    y2 = [a + 0.5 * h * k for a, k in zip(y, k1)]
    k2 = _deriv(*y2, t + 0.5 * h, law, nu)
    y3 = [a + 0.5 * h * k for a, k in zip(y, k2)]
    k3 = _deriv(*y3, t + 0.5 * h, law, nu)
    y4 = [a + h * k for a, k in zip(y, k3)]
    k4 = _deriv(*y4, t + h, law, nu)
    R, theta, beta, phi = (a + h / 6.0 * (p + 2.0 * q + 2.0 * r + s)
                           for a, p, q, r, s in zip(y, k1, k2, k3, k4))
    wrapped = wrap_angle(theta)
    # Keep phi - beta identical to the wrapped theta.
    phi += wrapped - theta
    return GameState(t + h, R, wrapped, beta, phi)


def locate_event(f: Callable[[GameState], float], propagate: Callable[[float], GameState],
                 h: float, event_tol: float, max_iter: int = 200) -> tuple[float, GameState]:
    """Bisect the step ``[0, h]`` for the first point where ``f`` drops to <= 0.

    ``propagate(tau)`` re-integrates from the start of the step. Returns the
    partial step length and the state just past the crossing, with
    ``-event_tol <= f <= 0``.
    """
    before = propagate(0.0)
    after = propagate(h)
    f_lo, f_hi = f(before), f(after)
    if not (f_lo > 0.0 and f_hi <= 0.0):
        raise ValueError(f"event function does not change sign over the step ({f_lo}, {f_hi})")
    if f_hi >= -event_tol:
        return h, after
    lo, hi, hi_state = 0.0, h, after
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        s = propagate(mid)
        fm = f(s)
        if fm > 0.0:
            lo = mid
        else:
            hi, hi_state = mid, s
            if fm >= -event_tol:
                break
    return hi, hi_state


# Event functions cross from > 0 to <= 0. Listed in resolution priority.
EVENT_PRIORITY = ("breach", "aligned", "tsr_entry", "asr_entry", "escape_complete", "waypoint")


class _Run:
    def __init__(self, config: ScenarioConfig, max_time: float):
        self.cfg = config
        self.max_time = max_time
        self.state = initial_state(config)
        self.stage = initial_stage(self.state, config)
        self.aligned = False
        self.waypoints = list(config.waypoints)
        self.heading = None
        self.traj = Trajectory(config)
        self.visited = [(self.stage, 0.0)]
        self.classification = None
        self.outcome = None
        if self.stage is StageLabel.FULL_INFO:
            self.classification = classify_region(self.state, config.nu)
        self._settle("start")
        self._record()

    # -- controls -------------------------------------------------------
    def _law(self) -> ControlLaw:
        nu = self.cfg.nu
        stage = self.stage
        if stage is StageLabel.PRE_GAME:
            (ax, ay), _ = to_cartesian(self.state)
            tx, ty = self.waypoints[0] if self.waypoints else (0.0, 0.0)
            dist = math.hypot(tx - ax, ty - ay)
            hx, hy = (tx - ax) / dist, (ty - ay) / dist
            self.heading = (hx, hy)

            def law(s):
                c, sn = math.cos(s.phi), math.sin(s.phi)
                # Components of the inertial heading along the inward radial and
                # counter-clockwise tangential directions.
                return ControlPair(math.atan2(-hx * sn + hy * c, -hx * c - hy * sn), 0.0)
            return law

        if stage is StageLabel.ESCAPE:
            escape = ControlPair(math.pi, 0.0)
            return lambda s: escape

        # sign(theta) is frozen over the step; its flips are located as events.
        s0 = 0.0 if self.aligned else sign(self.state.theta)
        if stage is StageLabel.PARTIAL_INFO:
            ctrl = ControlPair(attacker_control(self.state, stage, self.cfg).alpha, defender_control(s0, stage))
            return lambda s: ctrl

        # FullInfo: the attacker keeps the equilibrium heading; a give-up decision
        # only takes effect through the stage machine (Escape).
        if self.aligned:
            def law(s):
                return ControlPair(0.0, defender_tracking_control(s.R, 0.0, nu))
            return law
        u = defender_control(s0, stage)
        return lambda s: ControlPair(equilibrium_heading(s.R, s0, nu), u)

    # -- events ---------------------------------------------------------
    def _event_functions(self) -> dict:
        cfg = self.cfg
        stage = self.stage
        fns = {}
        if stage is StageLabel.ESCAPE:
            fns["escape_complete"] = lambda s: cfg.R0 - s.R
            return fns
        fns["breach"] = lambda s: s.R - 1.0
        if stage is StageLabel.PRE_GAME:
            fns["tsr_entry"] = lambda s: s.R - cfg.R0
            if self.waypoints:
                wx, wy = self.waypoints[0]
                hx, hy = self.heading

                def ahead(s):
                    (ax, ay), _ = to_cartesian(s)
                    return (wx - ax) * hx + (wy - ay) * hy
                fns["waypoint"] = ahead
            return fns
        if not self.aligned:
            fns["aligned"] = lambda s: abs(s.theta) - cfg.capture_tol
        if stage is StageLabel.PARTIAL_INFO:
            fns["asr_entry"] = lambda s: separation_distance(s.R, s.theta) - cfg.rA
        return fns

    def _log_event(self, kind: str, from_stage: StageLabel, to: str):
        self.traj.events.append((self.state.t, TransitionEvent(kind, from_stage, to, self.state)))

    def _settle(self, trigger: str):
        """Apply stage transitions at the current state until none fire."""
        cfg = self.cfg
        for _ in range(len(StageLabel) + 1):
            nxt = advance(self.state, self.stage, cfg)
            if isinstance(nxt, Terminal):
                self._log_event(trigger, self.stage, nxt.verdict.value)
                self.outcome = Outcome(nxt.verdict, self.state, list(self.visited), self.classification)
                return
            if nxt is self.stage:
                if self.stage in (StageLabel.PARTIAL_INFO, StageLabel.FULL_INFO):
                    self.aligned = self.aligned or abs(self.state.theta) <= cfg.capture_tol
                return
            if nxt not in ALLOWED_TRANSITIONS[self.stage]:
                raise StageError(f"illegal transition {self.stage.value} -> {nxt.value}")
            self._log_event(trigger, self.stage, nxt.value)
            self.stage = nxt
            self.visited.append((nxt, self.state.t))
            if nxt is StageLabel.FULL_INFO:
                self.classification = classify_region(self.state, cfg.nu)
            trigger = "transition"
        raise StageError("stage transitions did not settle")

    def _record(self):
        s = self.state
        c = self._law()(s)
        (ax, ay), (dx, dy) = to_cartesian(s)
        self.traj.samples.append(TrajectorySample(
            s.t, self.stage, s.R, s.theta, s.beta, ax, ay, dx, dy, c.alpha, c.u,
            separation_distance(s.R, s.theta)))

    # -- main loop ------------------------------------------------------
    def run(self) -> Trajectory:
        cfg = self.cfg
        h = cfg.step_size
        while self.outcome is None:
            if self.state.t > self.max_time:
                raise RuntimeError(f"no terminal event before t={self.max_time} (stage {self.stage.value})")
            start = self.state
            law = self._law()
            fns = self._event_functions()
            nxt = rk4_step(start, law, h, cfg.nu)
            hits = [name for name, f in fns.items() if f(start) > 0.0 and f(nxt) <= 0.0]
            if not hits:
                if self.stage is not StageLabel.ESCAPE and nxt.R < 1.0 - 10.0 * cfg.event_tol:
                    raise MissedEventError(f"R={nxt.R} below the target edge without a breach event at t={nxt.t}")
                self.state = nxt
                self._record()
                continue

            def propagate(tau, _start=start, _law=law):
                return rk4_step(_start, _law, tau, cfg.nu)

            located = []
            for name in hits:
                tau, st = locate_event(fns[name], propagate, h, cfg.event_tol)
                located.append((tau, EVENT_PRIORITY.index(name), name, st))
            earliest = min(tau for tau, *_ in located)
            # Events within event_tol of the earliest resolve by priority.
            tau, _, name, st = min((x for x in located if x[0] <= earliest + cfg.event_tol),
                                   key=lambda x: x[1])
            self.state = st
            if name == "waypoint":
                self.waypoints.pop(0)
                self._log_event(name, self.stage, self.stage.value)
            elif name == "aligned":
                self.aligned = True
                self._log_event(name, self.stage, self.stage.value)
            self._settle(name)
            self._record()
        self.traj.outcome = self.outcome
        return self.traj


def run_scenario(config: ScenarioConfig, max_time: float = 1e4) -> Trajectory:
    """Simulate one engagement from the configured initial poses to a verdict."""
    violations = validate(config)
    if violations:
        raise ScenarioError(violations)
    return _Run(config, max_time).run()


def run_batch(configs: Iterable[ScenarioConfig], max_workers: Optional[int] = None) -> list:
    """Run independent scenarios, optionally in worker processes; order is preserved."""
    configs = list(configs)
    if max_workers is None or max_workers <= 1:
        return [run_scenario(c) for c in configs]
    with ProcessPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(run_scenario, configs))
