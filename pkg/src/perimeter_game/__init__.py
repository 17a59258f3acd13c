"""Target defense game with bilateral perception limits.

The attacker tries to reach a unit-radius target; the defender patrols its
perimeter. Each side only sees the other inside its sensing region, which
splits the game into PreGame, PartialInfo, FullInfo and Escape stages.
"""

from .core import (
    ControlPair,
    EscapePolicy,
    GameState,
    PerceptionMode,
    ScenarioConfig,
    separation_distance,
    theta_p,
    validate,
)
from .stage_machine import Outcome, Verdict
from .strategies import (
    RegionLabel,
    StageLabel,
    attacker_control,
    classify_region,
    defender_control,
    full_info_existence_interval,
    theta_G,
)
from .simulator import ScenarioError, Trajectory, run_batch, run_scenario

__version__ = "0.1.0"

__all__ = [
    "ControlPair", "EscapePolicy", "GameState", "PerceptionMode", "ScenarioConfig",
    "separation_distance", "theta_p", "validate", "Outcome", "Verdict", "RegionLabel",
    "StageLabel", "attacker_control", "classify_region", "defender_control",
    "full_info_existence_interval", "theta_G", "ScenarioError", "Trajectory",
    "run_batch", "run_scenario",
]
