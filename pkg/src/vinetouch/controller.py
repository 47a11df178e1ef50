"""Contact-search state machine driving growth and steering.

Five states: until contact is found the robot cycles grow-straight, sweep
left, sweep right; a front-sensor pressure at or above the contact threshold
during a sweep switches to growing toward that side, and each growth episode
lasts one pocket length before handing back to the matching sweep state. A
sweep that times out after a contact-driven growth episode falls back to
growing straight instead of continuing the sweep cycle.

``step`` is a pure function of (state, readings, time, config); the driver
owns the state record and advances it at a fixed rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence


class Side(Enum):
    LEFT = "left"
    RIGHT = "right"


class ControlPhase(Enum):
    """Serialized names are part of the telemetry wire format."""

    GROWING_STRAIGHT = "growing_straight"
    SEARCHING_LEFT = "searching_left"
    SEARCHING_RIGHT = "searching_right"
    GROWING_LEFT = "growing_left"
    GROWING_RIGHT = "growing_right"


GROWING_PHASES = frozenset(
    {ControlPhase.GROWING_STRAIGHT, ControlPhase.GROWING_LEFT, ControlPhase.GROWING_RIGHT}
)
SEARCHING_PHASES = frozenset({ControlPhase.SEARCHING_LEFT, ControlPhase.SEARCHING_RIGHT})


@dataclass(frozen=True)
class ControllerState:
    """Current phase plus the bookkeeping the transition rules need.

    ``prior_contact_side`` is set exactly when the most recent growth state
    was contact-driven; the searching states use it to decide whether a
    timeout continues the sweep cycle or falls back to growing straight.
    """

    phase: ControlPhase = ControlPhase.GROWING_STRAIGHT
    entered_at_s: float = 0.0
    prior_contact_side: Side | None = None


@dataclass(frozen=True)
class ControllerConfig:
    grow_timeout_s: float = 12.0
    search_timeout_s: float = 15.0
    contact_threshold_kpa: float = 1.01
    steer_pressure: float = 1.0

    def __post_init__(self) -> None:
        for name in ("grow_timeout_s", "search_timeout_s", "contact_threshold_kpa", "steer_pressure"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")


@dataclass(frozen=True)
class ActuatorCommand:
    grow: bool
    left_pressure: float
    right_pressure: float

    def __post_init__(self) -> None:
        if self.left_pressure != 0.0 and self.right_pressure != 0.0:
            raise ValueError("at most one steering actuator may be pressurized")


def command_for(phase: ControlPhase, cfg: ControllerConfig) -> ActuatorCommand:
    """Actuator set-points implied by a phase."""
    steer = cfg.steer_pressure
    if phase is ControlPhase.GROWING_STRAIGHT:
        return ActuatorCommand(grow=True, left_pressure=0.0, right_pressure=0.0)
    if phase is ControlPhase.SEARCHING_LEFT:
        return ActuatorCommand(grow=False, left_pressure=steer, right_pressure=0.0)
    if phase is ControlPhase.SEARCHING_RIGHT:
        return ActuatorCommand(grow=False, left_pressure=0.0, right_pressure=steer)
    if phase is ControlPhase.GROWING_LEFT:
        return ActuatorCommand(grow=True, left_pressure=steer, right_pressure=0.0)
    return ActuatorCommand(grow=True, left_pressure=0.0, right_pressure=steer)


def step(
    state: ControllerState,
    front_left_kpa: float,
    front_right_kpa: float,
    now_s: float,
    cfg: ControllerConfig,
) -> tuple[ControllerState, ActuatorCommand]:
    """Advance the state machine one evaluation.

    Contact detection compares the front reading on the steered side against
    the configured threshold (>=, no hysteresis) and takes priority over a
    simultaneous timeout. Timeouts fire once elapsed >= the limit. The
    returned command corresponds to the returned (possibly new) state.
    """
    if not (math.isfinite(front_left_kpa) and math.isfinite(front_right_kpa)):
        raise ValueError("front sensor readings must be finite")
    if now_s < state.entered_at_s:
        raise ValueError("now_s precedes state entry time")

    elapsed = now_s - state.entered_at_s
    phase = state.phase
    new = state

    if phase is ControlPhase.GROWING_STRAIGHT:
        if elapsed >= cfg.grow_timeout_s:
            new = ControllerState(ControlPhase.SEARCHING_LEFT, now_s, None)

    elif phase is ControlPhase.SEARCHING_LEFT:
        if front_left_kpa >= cfg.contact_threshold_kpa:
            new = ControllerState(ControlPhase.GROWING_LEFT, now_s, Side.LEFT)
        elif elapsed >= cfg.search_timeout_s:
            if state.prior_contact_side is Side.LEFT:
                # Timed out re-probing after a left growth episode: give up on
                # the object and rejoin the main cycle.
                new = ControllerState(ControlPhase.GROWING_STRAIGHT, now_s, None)
            else:
                new = ControllerState(ControlPhase.SEARCHING_RIGHT, now_s, None)

    elif phase is ControlPhase.SEARCHING_RIGHT:
        if front_right_kpa >= cfg.contact_threshold_kpa:
            new = ControllerState(ControlPhase.GROWING_RIGHT, now_s, Side.RIGHT)
        elif elapsed >= cfg.search_timeout_s:
            # Destination is growing straight whether this sweep belongs to
            # the main cycle or follows a right growth episode; the prior
            # contact side on the expiring state keeps the two cases apart
            # in telemetry.
            new = ControllerState(ControlPhase.GROWING_STRAIGHT, now_s, None)

    elif phase is ControlPhase.GROWING_LEFT:
        if elapsed >= cfg.grow_timeout_s:
            new = ControllerState(ControlPhase.SEARCHING_LEFT, now_s, Side.LEFT)

    elif phase is ControlPhase.GROWING_RIGHT:
        if elapsed >= cfg.grow_timeout_s:
            new = ControllerState(ControlPhase.SEARCHING_RIGHT, now_s, Side.RIGHT)

    return new, command_for(new.phase, cfg)


def run_trace(
    script: Iterable[tuple[float, float]],
    cfg: ControllerConfig,
    dt_s: float = 0.05,
    initial: ControllerState | None = None,
    start_time_s: float = 0.0,
) -> list[tuple[float, ControllerState]]:
    """Run the machine over a fixed-rate (front_left, front_right) script.

    Sample i is evaluated at start + i * dt; the recorded state is the state
    after that evaluation, so transition entries land exactly on their
    trigger times. Deterministic.
    """
    if dt_s <= 0:
        raise ValueError("dt_s must be > 0")
    state = initial if initial is not None else ControllerState(entered_at_s=start_time_s)
    trace = []
    for i, (front_left, front_right) in enumerate(script):
        now = start_time_s + i * dt_s
        state, _ = step(state, front_left, front_right, now, cfg)
        trace.append((now, state))
    return trace


def phase_sequence(trace: Sequence[tuple[float, ControllerState]]) -> list[str]:
    """Collapse a trace to the ordered distinct phase names it visits."""
    names: list[str] = []
    for _, state in trace:
        name = state.phase.value
        if not names or names[-1] != name:
            names.append(name)
    return names
