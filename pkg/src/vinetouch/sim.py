"""Planar kinematic simulation of an everting vine robot with pocket sensors.

The body is an arc chain growing from the tip; material behind the tip keeps
the shape it everted with. Pouch actuators on the left and right sides steer
by differential pressure, and during search sweeps they elastically re-bend
the distal pocket-length of body without growth. Pocket sensors line both
sides; as the body everts they become exposed in order and start reporting
pressure through the multiplexed hub. Contact forces come from circular
obstacles (penalty on penetration depth) and from point touches near the
body; both drive pocket pressures through the first-order pocket response.

One tick runs: contacts -> pocket pressures -> hub poll -> controller step ->
steer/grow. Everything is deterministic for a fixed seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import geometry
from .controller import (
    SEARCHING_PHASES,
    ActuatorCommand,
    ControlPhase,
    ControllerConfig,
    ControllerState,
    Side,
)
from .controller import step as controller_step
from .geometry import ArcSegment, NearestPoint, Pose
from .hub import SensorAddress, SensorHub, SensorReading
from .pocket import (
    ContactSpec,
    PressureDynamics,
    PressureState,
    Sensitivity,
    estimate_force,
    preset,
    sensitivity_for,
)


@dataclass(frozen=True)
class SimConfig:
    """Simulation constants; defaults match the tabletop demo hardware."""

    growth_rate_cm_s: float = 27.5 / 12.0  # one pocket length per grow timeout
    pocket_length_cm: float = 27.5
    pocket_preset: str = "sealed"
    initial_pressure_kpa: float = 0.4
    contact_area_cm2: float = 12.5
    kappa_max_per_cm: float = 1.0 / 40.0
    kappa_gain_per_cm: float = 1.0 / 40.0
    steer_pressure_max: float = 1.0
    eversion_threshold: float = 0.9
    touch_capture_radius_cm: float = 6.0
    noise_sigma_kpa: float = 0.01
    tau_s: float = 1.0
    dt_s: float = 0.05
    main_tube_lay_flat_cm: float = 20.3

    def __post_init__(self) -> None:
        for name in (
            "growth_rate_cm_s",
            "pocket_length_cm",
            "kappa_max_per_cm",
            "kappa_gain_per_cm",
            "steer_pressure_max",
            "touch_capture_radius_cm",
            "tau_s",
            "dt_s",
        ):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        if not 0.0 < self.eversion_threshold <= 1.0:
            raise ValueError("eversion_threshold must be in (0, 1]")
        if self.noise_sigma_kpa < 0:
            raise ValueError("noise_sigma_kpa must be >= 0")


def min_wrap_diameter_cm(cfg: SimConfig) -> float:
    """Smallest obstacle diameter the robot can continuously wrap around."""
    return 2.0 / cfg.kappa_max_per_cm


def steer(left_pressure: float, right_pressure: float, cfg: SimConfig) -> float:
    """Curvature command from differential actuator pressure; + bends left."""
    if left_pressure < 0 or right_pressure < 0:
        raise ValueError("actuator pressures must be >= 0")
    kappa = cfg.kappa_gain_per_cm * (left_pressure - right_pressure) / cfg.steer_pressure_max
    return min(max(kappa, -cfg.kappa_max_per_cm), cfg.kappa_max_per_cm)


@dataclass(frozen=True)
class Obstacle:
    x_cm: float
    y_cm: float
    radius_cm: float
    stiffness_n_per_cm: float

    def __post_init__(self) -> None:
        if self.radius_cm <= 0:
            raise ValueError("radius_cm must be > 0")
        if self.stiffness_n_per_cm <= 0:
            raise ValueError("stiffness_n_per_cm must be > 0")


@dataclass(frozen=True)
class Touch:
    """A point force near the body, or one addressed to a pocket directly."""

    force_n: float
    duration_s: float
    x_cm: float | None = None
    y_cm: float | None = None
    pocket_id: str | None = None

    def __post_init__(self) -> None:
        if self.force_n < 0:
            raise ValueError("force_n must be >= 0")
        if self.duration_s <= 0:
            raise ValueError("duration_s must be > 0")
        by_position = self.x_cm is not None and self.y_cm is not None
        by_pocket = self.pocket_id is not None
        if by_position == by_pocket:
            raise ValueError("touch needs either a position or a pocket_id")


@dataclass(frozen=True)
class ScheduledTouch:
    at_s: float
    touch: Touch

    def active_at(self, t_s: float) -> bool:
        return self.at_s <= t_s < self.at_s + self.touch.duration_s


@dataclass(frozen=True)
class RobotBody:
    """Arc-chain body; operations return new bodies, the wake never mutates."""

    base_pose: Pose = Pose(0.0, 0.0, 0.0)
    segments: tuple[ArcSegment, ...] = ()
    main_tube_lay_flat_cm: float = 20.3

    @property
    def grown_length_cm(self) -> float:
        return geometry.chain_length(self.segments)

    @property
    def tip_pose(self) -> Pose:
        return geometry.chain_poses(self.base_pose, self.segments)[-1]

    def grow(self, dl_cm: float, curvature_per_cm: float) -> "RobotBody":
        """Evert ``dl_cm`` of new material at the tip with the given curvature."""
        if dl_cm < 0:
            raise ValueError("dl_cm must be >= 0")
        if dl_cm == 0:
            return self
        return replace(
            self, segments=geometry.extend_chain(self.segments, dl_cm, curvature_per_cm)
        )

    def reshape_tail(self, tail_length_cm: float, curvature_per_cm: float) -> "RobotBody":
        """Elastically re-bend the distal ``tail_length_cm`` to one curvature."""
        return replace(
            self,
            segments=geometry.reshape_tail(self.segments, tail_length_cm, curvature_per_cm),
        )

    def sample_polyline(self, step_cm: float = 1.0) -> np.ndarray:
        return geometry.sample_polyline(self.base_pose, self.segments, step_cm)

    def nearest(self, x_cm: float, y_cm: float) -> NearestPoint | None:
        return geometry.nearest_point(self.base_pose, self.segments, x_cm, y_cm)


@dataclass
class PocketInstance:
    """One side-mounted pocket sensor riding on the body."""

    pocket_id: str
    side: Side
    start_arclength_cm: float
    length_cm: float
    sensitivity: Sensitivity
    dynamics: PressureDynamics
    exposed_fraction: float = 0.0
    current_force_n: float = 0.0
    gauge_pressure_kpa: float = 0.0

    def __post_init__(self) -> None:
        self.gauge_pressure_kpa = self.dynamics.p_initial_kpa


@dataclass(frozen=True)
class LayoutPreset:
    """Sensor/actuator arrangement descriptor (geometry bookkeeping only)."""

    name: str
    actuator_count: int
    circumferential_stations: int
    sensors_per_station: int
    description: str


LAYOUT_PRESETS: Mapping[str, LayoutPreset] = {
    "two_actuator_tabletop": LayoutPreset(
        "two_actuator_tabletop",
        actuator_count=2,
        circumferential_stations=2,
        sensors_per_station=3,
        description="pockets along the left and right side actuators; the planar demo layout",
    ),
    "three_actuator_radial": LayoutPreset(
        "three_actuator_radial",
        actuator_count=3,
        circumferential_stations=6,
        sensors_per_station=1,
        description="pockets on top of three actuators and between them",
    ),
    "nine_bottom": LayoutPreset(
        "nine_bottom",
        actuator_count=2,
        circumferential_stations=1,
        sensors_per_station=9,
        description="a single bottom row of nine pockets along the length",
    ),
}

MAX_POCKETS_PER_SIDE = 32  # two hub addresses per index, 64-sensor hub cap


def detect_contacts(
    body: RobotBody,
    pockets: Sequence[PocketInstance],
    obstacles: Iterable[Obstacle],
    touches: Iterable[Touch],
    capture_radius_cm: float = 6.0,
) -> dict[str, float]:
    """Per-pocket contact force in N.

    Obstacles push with stiffness times penetration depth at the body point
    deepest inside them; the force lands on the exposed pocket covering that
    arclength on the side the obstacle faces. Touches go to the nearest
    exposed pocket within the capture radius (or to their addressed pocket).
    Unexposed pockets never receive force.
    """
    forces = {p.pocket_id: 0.0 for p in pockets}
    by_side: dict[Side, dict[int, PocketInstance]] = {Side.LEFT: {}, Side.RIGHT: {}}
    pocket_len = None
    for p in pockets:
        by_side[p.side][round(p.start_arclength_cm / p.length_cm)] = p
        pocket_len = p.length_cm

    def covering_pocket(side: Side, arclength: float) -> PocketInstance | None:
        if pocket_len is None:
            return None
        index = max(int(math.floor((arclength - 1e-9) / pocket_len)), 0)
        return by_side[side].get(index)

    def assign(near: NearestPoint, force: float, cx: float, cy: float) -> None:
        cross = math.cos(near.tangent_rad) * (cy - near.y_cm) - math.sin(near.tangent_rad) * (
            cx - near.x_cm
        )
        side = Side.LEFT if cross >= 0 else Side.RIGHT
        pocket = covering_pocket(side, near.arclength_cm)
        if pocket is not None and pocket.exposed_fraction > 0:
            forces[pocket.pocket_id] += force

    for obstacle in obstacles:
        near = body.nearest(obstacle.x_cm, obstacle.y_cm)
        if near is None:
            continue
        penetration = obstacle.radius_cm - near.distance_cm
        if penetration > 0:
            assign(near, obstacle.stiffness_n_per_cm * penetration, obstacle.x_cm, obstacle.y_cm)

    for touch in touches:
        if touch.pocket_id is not None:
            pocket = next((p for p in pockets if p.pocket_id == touch.pocket_id), None)
            if pocket is not None and pocket.exposed_fraction > 0:
                forces[pocket.pocket_id] += touch.force_n
            continue
        near = body.nearest(touch.x_cm, touch.y_cm)
        if near is None or near.distance_cm > capture_radius_cm:
            continue
        assign(near, touch.force_n, touch.x_cm, touch.y_cm)

    return forces


class World:
    """Mutable simulation state advanced by a single driver."""

    def __init__(
        self,
        sim_cfg: SimConfig | None = None,
        controller_cfg: ControllerConfig | None = None,
        obstacles: Sequence[Obstacle] = (),
        touches: Sequence[ScheduledTouch] = (),
        seed: int = 0,
        initial_grown_cm: float = 0.0,
        initial_phase: ControlPhase = ControlPhase.GROWING_STRAIGHT,
    ):
        self.cfg = sim_cfg or SimConfig()
        self.controller_cfg = controller_cfg or ControllerConfig()
        self.obstacles = list(obstacles)
        self.scheduled_touches = list(touches)
        self.seed = seed
        self.rng = np.random.default_rng(seed)
        self.body = RobotBody(main_tube_lay_flat_cm=self.cfg.main_tube_lay_flat_cm)
        if initial_grown_cm > 0:
            self.body = self.body.grow(initial_grown_cm, 0.0)
        self.hub = SensorHub(poll_rate_hz=1.0 / self.cfg.dt_s)
        self.pockets: list[PocketInstance] = []
        self.state = ControllerState(initial_phase, 0.0, None)
        self.last_command = ActuatorCommand(grow=False, left_pressure=0.0, right_pressure=0.0)
        self.tick_index = 0
        self.last_readings: dict[str, SensorReading] = {}
        self._pocket_sensitivity = sensitivity_for(
            preset(self.cfg.pocket_preset, self.cfg.initial_pressure_kpa),
            ContactSpec(contact_area_cm2=self.cfg.contact_area_cm2),
        )
        self._counts = {Side.LEFT: 0, Side.RIGHT: 0}
        self._ensure_pockets()
        self._update_exposure()

    @property
    def time_s(self) -> float:
        return self.tick_index * self.cfg.dt_s

    @property
    def actuator_left(self) -> float:
        return self.last_command.left_pressure

    @property
    def actuator_right(self) -> float:
        return self.last_command.right_pressure

    def add_touch(self, touch: Touch, at_s: float | None = None) -> None:
        """Schedule a touch; default start time is the current sim time."""
        self.scheduled_touches.append(
            ScheduledTouch(at_s=self.time_s if at_s is None else at_s, touch=touch)
        )

    def front_pocket(self, side: Side) -> PocketInstance | None:
        """Most distal pocket on a side everted past the usable threshold."""
        best = None
        for p in self.pockets:
            if p.side is side and p.exposed_fraction >= self.cfg.eversion_threshold:
                if best is None or p.start_arclength_cm > best.start_arclength_cm:
                    best = p
        return best

    def _ensure_pockets(self) -> None:
        grown = self.body.grown_length_cm
        for side in (Side.LEFT, Side.RIGHT):
            while self._counts[side] * self.cfg.pocket_length_cm < grown - 1e-9:
                index = self._counts[side]
                if index >= MAX_POCKETS_PER_SIDE:
                    raise RuntimeError("hub sensor capacity exhausted; scenario grows too long")
                self._create_pocket(side, index)
                self._counts[side] = index + 1

    def _create_pocket(self, side: Side, index: int) -> None:
        prefix = "L" if side is Side.LEFT else "R"
        pocket = PocketInstance(
            pocket_id=f"{prefix}{index}",
            side=side,
            start_arclength_cm=index * self.cfg.pocket_length_cm,
            length_cm=self.cfg.pocket_length_cm,
            sensitivity=self._pocket_sensitivity,
            dynamics=PressureDynamics(
                self._pocket_sensitivity,
                self.cfg.initial_pressure_kpa,
                tau_s=self.cfg.tau_s,
                noise_sigma_kpa=self.cfg.noise_sigma_kpa,
                rng=self.rng,
            ),
        )
        self.pockets.append(pocket)
        mux = 2 * (index // 8) + (0 if side is Side.LEFT else 1)
        self.hub.attach(
            SensorAddress(mux_index=mux, channel=index % 8, logical_id=pocket.pocket_id),
            (lambda p=pocket: p.gauge_pressure_kpa),
        )

    def _update_exposure(self) -> None:
        grown = self.body.grown_length_cm
        for p in self.pockets:
            p.exposed_fraction = min(
                max((grown - p.start_arclength_cm) / p.length_cm, 0.0), 1.0
            )

    def active_touches(self) -> list[Touch]:
        now = self.time_s
        return [s.touch for s in self.scheduled_touches if s.active_at(now)]

    def tick(self, dt_s: float | None = None) -> "World":
        """Advance one fixed step; see the module docstring for stage order."""
        dt = self.cfg.dt_s if dt_s is None else dt_s
        if dt <= 0:
            raise ValueError("dt_s must be > 0")

        forces = detect_contacts(
            self.body,
            self.pockets,
            self.obstacles,
            self.active_touches(),
            self.cfg.touch_capture_radius_cm,
        )
        for p in self.pockets:
            p.current_force_n = forces[p.pocket_id]
            p.gauge_pressure_kpa = p.dynamics.step(p.current_force_n, dt)

        # Controller and hub run against the interval start, and the command
        # then acts over the whole interval; growth episodes therefore last
        # exactly timeout / dt ticks.
        now = self.tick_index * dt
        if self.pockets:
            for reading in self.hub.poll_cycle(now):
                self.last_readings[reading.logical_id] = reading

        front_left = self._front_reading(Side.LEFT)
        front_right = self._front_reading(Side.RIGHT)
        self.state, command = controller_step(
            self.state, front_left, front_right, now, self.controller_cfg
        )
        self.last_command = command

        kappa = steer(command.left_pressure, command.right_pressure, self.cfg)
        if command.grow:
            self.body = self.body.grow(self.cfg.growth_rate_cm_s * dt, kappa)
        elif self.state.phase in SEARCHING_PHASES:
            self.body = self.body.reshape_tail(
                min(self.cfg.pocket_length_cm, self.body.grown_length_cm), kappa
            )

        self._ensure_pockets()
        self._update_exposure()
        self.tick_index += 1
        return self

    def _front_reading(self, side: Side) -> float:
        front = self.front_pocket(side)
        if front is None:
            return self.cfg.initial_pressure_kpa
        reading = self.last_readings.get(front.pocket_id)
        return reading.gauge_pressure_kpa if reading else front.gauge_pressure_kpa

    def pocket_views(self) -> list[dict]:
        """Per-pocket telemetry including the force implied by its pressure."""
        views = []
        for p in self.pockets:
            views.append(
                {
                    "pocket_id": p.pocket_id,
                    "side": p.side.value,
                    "exposed_fraction": p.exposed_fraction,
                    "gauge_pressure": p.gauge_pressure_kpa,
                    "estimated_force": estimate_force(
                        PressureState(p.dynamics.p_initial_kpa, p.gauge_pressure_kpa),
                        p.sensitivity,
                    ),
                }
            )
        return views
