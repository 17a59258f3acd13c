"""Perception predicates and the stage transition function."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Union

from .core import EscapePolicy, GameState, ScenarioConfig, separation_distance
from .strategies import RegionLabel, StageLabel, classify_region

__all__ = [
    "StageLabel", "Verdict", "Terminal", "Outcome", "StageError",
    "defender_sees", "attacker_sees", "initial_stage", "advance", "ALLOWED_TRANSITIONS",
]


class Verdict(str, enum.Enum):
    ATTACKER_BREACH = "AttackerBreach"
    DEFENDER_CAPTURE = "DefenderCapture"
    ATTACKER_REPELLED = "AttackerRepelled"


class StageError(RuntimeError):
    """Raised for an inconsistent (state, stage) pair, i.e. a simulator bug."""


@dataclass(frozen=True)
class Terminal:
    verdict: Verdict


@dataclass
class Outcome:
    verdict: Verdict
    terminal_state: GameState
    stages_visited: list = field(default_factory=list)  # [(StageLabel, entry time)]
    classification_at_full_info: Optional[RegionLabel] = None


ALLOWED_TRANSITIONS = {
    StageLabel.PRE_GAME: {StageLabel.PARTIAL_INFO},
    StageLabel.PARTIAL_INFO: {StageLabel.FULL_INFO},
    StageLabel.FULL_INFO: {StageLabel.ESCAPE},
    StageLabel.ESCAPE: set(),
}


def defender_sees(state: GameState, config: ScenarioConfig) -> bool:
    if not config.constrained:
        return True
    return state.R <= config.R0


def attacker_sees(state: GameState, config: ScenarioConfig, sticky: bool = False) -> bool:
    if not config.constrained or sticky:
        return True
    return separation_distance(state.R, state.theta) <= config.rA


def initial_stage(state: GameState, config: ScenarioConfig) -> StageLabel:
    if not config.constrained:
        return StageLabel.FULL_INFO
    if not defender_sees(state, config):
        return StageLabel.PRE_GAME
    if attacker_sees(state, config):
        return StageLabel.FULL_INFO
    return StageLabel.PARTIAL_INFO


def advance(state: GameState, stage: StageLabel, config: ScenarioConfig) -> Union[StageLabel, Terminal]:
    """Return the stage that applies at ``state``, or a terminal event.

    Terminal conditions are checked before stage transitions. A single call
    moves at most one edge along the stage graph; callers iterate until the
    result is stable.
    """
    stage = StageLabel(stage)
    if not config.constrained and stage is not StageLabel.FULL_INFO:
        raise StageError(f"stage {stage.value} is not reachable without perception limits")

    if stage is StageLabel.ESCAPE:
        if state.R >= config.R0:
            return Terminal(Verdict.ATTACKER_REPELLED)
        return stage

    if state.R <= 1.0:
        if abs(state.theta) <= config.capture_tol:
            return Terminal(Verdict.DEFENDER_CAPTURE)
        return Terminal(Verdict.ATTACKER_BREACH)

    if stage is StageLabel.PRE_GAME:
        # Under Assumption 4 the defender cannot be inside the ASR out here.
        if state.R > config.R0 and separation_distance(state.R, state.theta) < config.rA:
            raise StageError("attacker perceives the defender before entering the TSR")
        return StageLabel.PARTIAL_INFO if defender_sees(state, config) else stage

    if stage is StageLabel.PARTIAL_INFO:
        if state.R > config.R0 + config.event_tol:
            raise StageError(f"PartialInfo with attacker outside the TSR (R={state.R})")
        return StageLabel.FULL_INFO if attacker_sees(state, config) else stage

    # FullInfo
    if not config.constrained:
        return stage
    if config.escape_policy is EscapePolicy.SURRENDER_ON_CLASSIFICATION:
        if classify_region(state, config.nu) is RegionLabel.DEFENDER_WIN:
            return StageLabel.ESCAPE
        return stage
    if abs(state.theta) <= config.capture_tol:
        return StageLabel.ESCAPE
    return stage
