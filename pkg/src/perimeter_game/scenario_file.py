"""Strict JSON scenario files.

Lengths are in target radii and the speed ratio is nondimensional. An
optional ``dimensional`` block supplies physical quantities instead::

    "dimensional": {"L": 100.0, "v1": 5.0, "v2max": 10.0,
                    "attacker_start": [150.0, 150.0], "defender_start": [0.0, 100.0],
                    "tsr_radius": 120.0, "asr_radius": 15.0}

which converts as nu = v1 / v2max and every length / L. A quantity may be
given in one place only.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any, Mapping

from .core import EscapePolicy, PerceptionMode, ScenarioConfig, dimensionless_point, validate

TOP_LEVEL_KEYS = {
    "nu", "tsr_radius", "asr_radius", "attacker_start", "defender_start_angle",
    "perception_mode", "escape_policy", "solver", "waypoints", "dimensional", "description",
}
REQUIRED_KEYS = ("nu", "tsr_radius", "asr_radius", "attacker_start", "defender_start_angle")
SOLVER_KEYS = {"step_size", "capture_tol", "event_tol"}
DIMENSIONAL_KEYS = {"L", "v1", "v2max", "attacker_start", "defender_start", "tsr_radius",
                    "asr_radius", "waypoints"}


class ScenarioFileError(ValueError):
    """The document is malformed or describes an invalid scenario."""

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


def _number(value, key):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioFileError(f"'{key}' must be a number, got {value!r}")
    return float(value)


def _point(value, key):
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ScenarioFileError(f"'{key}' must be a pair [x, y], got {value!r}")
    return (_number(value[0], key), _number(value[1], key))


def _reject_unknown(doc: Mapping, allowed: set, where: str):
    unknown = sorted(set(doc) - allowed)
    if unknown:
        raise ScenarioFileError([f"unknown key '{k}' in {where}" for k in unknown])


def _convert_dimensional(block: Mapping) -> dict:
    _reject_unknown(block, DIMENSIONAL_KEYS, "dimensional block")
    for key in ("L", "v1", "v2max"):
        if key not in block:
            raise ScenarioFileError(f"dimensional block needs '{key}'")
    L = _number(block["L"], "dimensional.L")
    v1 = _number(block["v1"], "dimensional.v1")
    v2max = _number(block["v2max"], "dimensional.v2max")
    if L <= 0 or v2max <= 0:
        raise ScenarioFileError("dimensional L and v2max must be positive")
    out = {"nu": v1 / v2max}
    if "attacker_start" in block:
        out["attacker_start"] = list(dimensionless_point(_point(block["attacker_start"], "dimensional.attacker_start"), L))
    if "defender_start" in block:
        x, y = _point(block["defender_start"], "dimensional.defender_start")
        out["defender_start_angle"] = math.atan2(y, x)
    for key in ("tsr_radius", "asr_radius"):
        if key in block:
            out[key] = _number(block[key], f"dimensional.{key}") / L
    if "waypoints" in block:
        out["waypoints"] = [list(dimensionless_point(_point(w, "dimensional.waypoints"), L))
                            for w in block["waypoints"]]
    return out


def parse_scenario(doc: Mapping[str, Any], check: bool = True) -> ScenarioConfig:
    """Build a ScenarioConfig from a decoded document, rejecting unknown keys."""
    if not isinstance(doc, Mapping):
        raise ScenarioFileError("scenario document must be an object")
    _reject_unknown(doc, TOP_LEVEL_KEYS, "scenario")
    doc = dict(doc)
    if "dimensional" in doc:
        converted = _convert_dimensional(doc.pop("dimensional"))
        clash = sorted(set(converted) & set(doc))
        if clash:
            raise ScenarioFileError([f"'{k}' given both directly and in the dimensional block" for k in clash])
        doc.update(converted)
    missing = [k for k in REQUIRED_KEYS if k not in doc]
    if missing:
        raise ScenarioFileError([f"missing required key '{k}'" for k in missing])

    solver = doc.get("solver", {})
    if not isinstance(solver, Mapping):
        raise ScenarioFileError("'solver' must be an object")
    _reject_unknown(solver, SOLVER_KEYS, "solver block")
    try:
        mode = PerceptionMode(doc.get("perception_mode", PerceptionMode.CONSTRAINED.value))
        policy = EscapePolicy(doc.get("escape_policy", EscapePolicy.ESCAPE_AT_THETA_ZERO.value))
    except ValueError as exc:
        raise ScenarioFileError(str(exc)) from None

    config = ScenarioConfig(
        nu=_number(doc["nu"], "nu"),
        R0=_number(doc["tsr_radius"], "tsr_radius"),
        rA=_number(doc["asr_radius"], "asr_radius"),
        attacker_start=_point(doc["attacker_start"], "attacker_start"),
        defender_start_angle=_number(doc["defender_start_angle"], "defender_start_angle"),
        perception_mode=mode,
        escape_policy=policy,
        step_size=_number(solver.get("step_size", 1e-3), "solver.step_size"),
        capture_tol=_number(solver.get("capture_tol", 1e-3), "solver.capture_tol"),
        event_tol=_number(solver.get("event_tol", 1e-9), "solver.event_tol"),
        waypoints=tuple(_point(w, "waypoints") for w in doc.get("waypoints", [])),
    )
    if check:
        violations = validate(config)
        if violations:
            raise ScenarioFileError(violations)
    return config


def scenario_to_dict(config: ScenarioConfig) -> dict:
    doc = {
        "nu": config.nu,
        "tsr_radius": config.R0,
        "asr_radius": config.rA,
        "attacker_start": list(config.attacker_start),
        "defender_start_angle": config.defender_start_angle,
        "perception_mode": config.perception_mode.value,
        "escape_policy": config.escape_policy.value,
        "solver": {
            "step_size": config.step_size,
            "capture_tol": config.capture_tol,
            "event_tol": config.event_tol,
        },
    }
    if config.waypoints:
        doc["waypoints"] = [list(w) for w in config.waypoints]
    return doc


def dumps_scenario(config: ScenarioConfig) -> str:
    return json.dumps(scenario_to_dict(config), indent=2) + "\n"


def load_scenario(path) -> ScenarioConfig:
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioFileError(f"{path}: not valid JSON ({exc})") from None
    return parse_scenario(doc)
