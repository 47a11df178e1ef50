"""One simulation run behind the gateway: snapshots, commands, headless replay.

The same session drives both the headless demo runner and the live service,
so a served run with no client commands produces byte-identical snapshot
records to a headless run of the same scenario and seed.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import replace
from typing import Iterator

from .controller import ControllerConfig
from .scenario import Scenario, build_world
from .sim import Touch

TOUCH_FORCE_MAX_N = 50.0
TOUCH_DURATION_MAX_S = 60.0
COMMAND_KINDS = ("touch", "pause", "resume", "reset", "config")

_CONTROLLER_KEYS = {f.name for f in dataclasses.fields(ControllerConfig)}


class CommandError(ValueError):
    """A rejected gateway command; ``code`` goes into the error record."""

    def __init__(self, code: str, detail: str):
        self.code = code
        self.detail = detail
        super().__init__(f"{code}: {detail}")


def serialize_snapshot(snapshot: dict) -> str:
    """Canonical single-line encoding; used for trace files and the wire."""
    return json.dumps(snapshot, separators=(",", ":"))


def parse_touch_command(record: dict) -> Touch:
    """Validate a touch command record into a Touch; raises CommandError."""
    try:
        force = float(record["force"])
    except (KeyError, TypeError, ValueError):
        raise CommandError("MALFORMED_COMMAND", "touch needs a numeric 'force'") from None
    if not 0.0 <= force <= TOUCH_FORCE_MAX_N:
        raise CommandError(
            "MALFORMED_COMMAND", f"force must be in [0, {TOUCH_FORCE_MAX_N}] N, got {force}"
        )
    try:
        duration = float(record["duration"])
    except (KeyError, TypeError, ValueError):
        raise CommandError("MALFORMED_COMMAND", "touch needs a numeric 'duration'") from None
    if not 0.0 < duration <= TOUCH_DURATION_MAX_S:
        raise CommandError(
            "MALFORMED_COMMAND",
            f"duration must be in (0, {TOUCH_DURATION_MAX_S}] s, got {duration}",
        )
    pocket_id = record.get("pocket_id")
    has_position = "x" in record and "y" in record
    if (pocket_id is None) == (not has_position):
        raise CommandError("MALFORMED_COMMAND", "touch needs either x/y or pocket_id")
    try:
        if pocket_id is not None:
            return Touch(force_n=force, duration_s=duration, pocket_id=str(pocket_id))
        return Touch(
            force_n=force,
            duration_s=duration,
            x_cm=float(record["x"]),
            y_cm=float(record["y"]),
        )
    except (TypeError, ValueError) as exc:
        raise CommandError("MALFORMED_COMMAND", str(exc)) from None


def validate_command(record: dict) -> dict:
    """Check a command record; returns it unchanged or raises CommandError."""
    if not isinstance(record, dict):
        raise CommandError("MALFORMED_COMMAND", "command must be a JSON object")
    kind = record.get("kind")
    if kind not in COMMAND_KINDS:
        raise CommandError("MALFORMED_COMMAND", f"unknown command kind {kind!r}")
    if kind == "touch":
        parse_touch_command(record)
    elif kind == "config":
        updates = {k: v for k, v in record.items() if k in _CONTROLLER_KEYS}
        if not updates:
            raise CommandError("MALFORMED_COMMAND", "config command carries no known fields")
        try:
            replace(ControllerConfig(), **{k: float(v) for k, v in updates.items()})
        except (TypeError, ValueError) as exc:
            raise CommandError("MALFORMED_COMMAND", str(exc)) from None
    return record


class SimSession:
    """A scenario instantiated and ticking, with pause/reset/config control."""

    def __init__(self, scenario: Scenario, seed: int | None = None):
        self.scenario = scenario
        self.seed = scenario.seed if seed is None else seed
        self.world = build_world(scenario, self.seed)
        self.paused = False

    @property
    def done(self) -> bool:
        return self.world.time_s >= self.scenario.duration_s - 1e-9

    @property
    def dt_s(self) -> float:
        return self.world.cfg.dt_s

    def tick(self) -> dict | None:
        """Advance one step and return its snapshot; None when paused/finished."""
        if self.paused or self.done:
            return None
        self.world.tick()
        return self.snapshot()

    def run_headless(self) -> Iterator[dict]:
        """Tick to the scenario end, yielding every snapshot."""
        while not self.done:
            snapshot = self.tick()
            if snapshot is None:
                break
            yield snapshot

    def snapshot(self) -> dict:
        """Wire-format session snapshot (exact key names are the contract)."""
        world = self.world
        polyline = world.body.sample_polyline(step_cm=1.0)
        return {
            "t": world.time_s,
            "state": world.state.phase.value,
            "body": [[round(float(x), 3), round(float(y), 3)] for x, y in polyline],
            "pockets": world.pocket_views(),
            "actuators": {"left": world.actuator_left, "right": world.actuator_right},
            "counters": {"frames": world.hub.cycle_count, "dropped": world.hub.dropped},
        }

    def apply_command(self, record: dict) -> None:
        """Apply a validated command; raises CommandError if it is not valid."""
        record = validate_command(record)
        kind = record["kind"]
        if kind == "touch":
            self.world.add_touch(parse_touch_command(record))
        elif kind == "pause":
            self.paused = True
        elif kind == "resume":
            self.paused = False
        elif kind == "reset":
            self.world = build_world(self.scenario, self.seed)
            self.paused = False
        elif kind == "config":
            updates = {
                k: float(v) for k, v in record.items() if k in _CONTROLLER_KEYS
            }
            self.world.controller_cfg = replace(self.world.controller_cfg, **updates)
