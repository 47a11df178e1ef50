"""Scenario files: replayable world descriptions as line-delimited records.

A scenario is a JSONL file; each line is one record tagged by ``kind``:

    {"kind": "meta", "name": ..., "duration_s": ..., "seed": ...,
     "initial_grown_cm": ..., "initial_state": "searching_left"}
    {"kind": "config", <SimConfig and/or ControllerConfig field overrides>}
    {"kind": "obstacle", "x_cm": ..., "y_cm": ..., "radius_cm": ...,
     "stiffness_n_per_cm": ...}
    {"kind": "touch", "at_s": ..., "force_n": ..., "duration_s": ...,
     "x_cm": ..., "y_cm": ...}            (or "pocket_id" instead of x/y)

Identical file + seed reproduce a run byte-for-byte. Parse errors carry the
offending line number.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path
from typing import Iterable

from .controller import ControlPhase, ControllerConfig
from .sim import Obstacle, ScheduledTouch, SimConfig, Touch, World

SCENARIO_SUFFIX = ".jsonl"

_CONTROLLER_KEYS = {f.name for f in dataclasses.fields(ControllerConfig)}
_SIM_KEYS = {f.name for f in dataclasses.fields(SimConfig)}


class ScenarioError(ValueError):
    """Malformed scenario content, with the line it came from."""

    def __init__(self, line: int, detail: str):
        self.line = line
        self.detail = detail
        super().__init__(f"line {line}: {detail}")


@dataclass(frozen=True)
class Scenario:
    name: str = "scenario"
    duration_s: float = 60.0
    seed: int = 0
    initial_grown_cm: float = 0.0
    initial_phase: ControlPhase = ControlPhase.GROWING_STRAIGHT
    sim_cfg: SimConfig = SimConfig()
    controller_cfg: ControllerConfig = ControllerConfig()
    obstacles: tuple[Obstacle, ...] = ()
    touches: tuple[ScheduledTouch, ...] = ()


def parse_scenario(lines: Iterable[str], name: str = "scenario") -> Scenario:
    scenario = Scenario(name=name)
    obstacles: list[Obstacle] = []
    touches: list[ScheduledTouch] = []
    for line_no, raw in enumerate(lines, start=1):
        text = raw.strip()
        if not text or text.startswith("#"):
            continue
        try:
            record = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ScenarioError(line_no, f"invalid JSON: {exc}") from None
        if not isinstance(record, dict) or "kind" not in record:
            raise ScenarioError(line_no, "record must be an object with a 'kind' field")
        kind = record.pop("kind")
        try:
            if kind == "meta":
                scenario = _apply_meta(scenario, record)
            elif kind == "config":
                scenario = _apply_config(scenario, record)
            elif kind == "obstacle":
                obstacles.append(Obstacle(**record))
            elif kind == "touch":
                at_s = record.pop("at_s")
                touches.append(ScheduledTouch(at_s=float(at_s), touch=Touch(**record)))
            else:
                raise ValueError(f"unknown record kind {kind!r}")
        except ScenarioError:
            raise
        except (TypeError, ValueError, KeyError) as exc:
            raise ScenarioError(line_no, f"{kind} record: {exc}") from None
    return replace(scenario, obstacles=tuple(obstacles), touches=tuple(touches))


def _apply_meta(scenario: Scenario, record: dict) -> Scenario:
    updates: dict = {}
    if "name" in record:
        updates["name"] = str(record.pop("name"))
    if "duration_s" in record:
        duration = float(record.pop("duration_s"))
        if duration <= 0:
            raise ValueError("duration_s must be > 0")
        updates["duration_s"] = duration
    if "seed" in record:
        updates["seed"] = int(record.pop("seed"))
    if "initial_grown_cm" in record:
        grown = float(record.pop("initial_grown_cm"))
        if grown < 0:
            raise ValueError("initial_grown_cm must be >= 0")
        updates["initial_grown_cm"] = grown
    if "initial_state" in record:
        updates["initial_phase"] = ControlPhase(record.pop("initial_state"))
    if record:
        raise ValueError(f"unknown meta fields: {sorted(record)}")
    return replace(scenario, **updates)


def _apply_config(scenario: Scenario, record: dict) -> Scenario:
    controller_updates = {k: record[k] for k in record if k in _CONTROLLER_KEYS}
    sim_updates = {k: record[k] for k in record if k in _SIM_KEYS}
    unknown = set(record) - set(controller_updates) - set(sim_updates)
    if unknown:
        raise ValueError(f"unknown config fields: {sorted(unknown)}")
    out = scenario
    if controller_updates:
        out = replace(out, controller_cfg=replace(out.controller_cfg, **controller_updates))
    if sim_updates:
        out = replace(out, sim_cfg=replace(out.sim_cfg, **sim_updates))
    return out


def shipped_scenarios() -> list[str]:
    """Names of the scenario files bundled with the package."""
    names = []
    for entry in resources.files("vinetouch.scenarios").iterdir():
        if entry.name.endswith(SCENARIO_SUFFIX):
            names.append(entry.name[: -len(SCENARIO_SUFFIX)])
    return sorted(names)


def load_scenario(source: str | Path) -> Scenario:
    """Load a scenario from a file path or a shipped scenario name."""
    path = Path(source)
    if path.exists():
        with path.open("r", encoding="utf-8") as handle:
            return parse_scenario(handle, name=path.stem)
    name = str(source).removesuffix(SCENARIO_SUFFIX)
    packaged = resources.files("vinetouch.scenarios").joinpath(name + SCENARIO_SUFFIX)
    if packaged.is_file():
        with packaged.open("r", encoding="utf-8") as handle:
            return parse_scenario(handle, name=name)
    raise FileNotFoundError(
        f"no scenario file at {source!r} and no shipped scenario named {name!r} "
        f"(shipped: {', '.join(shipped_scenarios())})"
    )


def build_world(scenario: Scenario, seed: int | None = None) -> World:
    """Instantiate the world a scenario describes; ``seed`` overrides the file's."""
    return World(
        sim_cfg=scenario.sim_cfg,
        controller_cfg=scenario.controller_cfg,
        obstacles=scenario.obstacles,
        touches=scenario.touches,
        seed=scenario.seed if seed is None else seed,
        initial_grown_cm=scenario.initial_grown_cm,
        initial_phase=scenario.initial_phase,
    )
