"""Vine simulation: growth, steering, contact synthesis, tick composition."""

import numpy as np
import pytest

from vinetouch.controller import ControlPhase, ControllerConfig, Side
from vinetouch.controller import run_trace, phase_sequence
from vinetouch.sim import (
    LAYOUT_PRESETS,
    Obstacle,
    RobotBody,
    SimConfig,
    Touch,
    World,
    detect_contacts,
    min_wrap_diameter_cm,
    steer,
)

from conftest import constant_script

CFG = SimConfig()


def world_with(grown_cm=0.0, phase=ControlPhase.GROWING_STRAIGHT, **kwargs):
    return World(initial_grown_cm=grown_cm, initial_phase=phase, **kwargs)


def quiet_cfg(**overrides) -> SimConfig:
    params = {"noise_sigma_kpa": 0.0}
    params.update(overrides)
    return SimConfig(**params)


class TestRobotBody:
    def test_straight_growth_from_empty(self):
        body = RobotBody().grow(27.5, 0.0)
        assert len(body.segments) == 1
        assert body.grown_length_cm == 27.5
        tip = body.tip_pose
        assert (tip.x_cm, tip.y_cm) == (27.5, 0.0)

    def test_constant_curvature_heading_identity(self):
        kappa, length = 0.02, 35.0
        body = RobotBody().grow(length, kappa)
        assert body.tip_pose.heading_rad == pytest.approx(kappa * length)

    def test_growth_merges_segments_at_constant_curvature(self):
        body = RobotBody()
        for _ in range(240):
            body = body.grow(CFG.growth_rate_cm_s * CFG.dt_s, 0.0)
        assert len(body.segments) == 1
        assert body.grown_length_cm == pytest.approx(27.5, abs=1e-9)

    def test_wake_is_frozen_by_growth(self):
        body = RobotBody().grow(30.0, 0.0)
        before = body.sample_polyline(1.0)
        grown = body.grow(20.0, 0.025)
        after = grown.sample_polyline(1.0)[: len(before)]
        assert np.allclose(before, after, atol=1e-12)


class TestSteer:
    def test_balanced_pressures_go_straight(self):
        assert steer(0.7, 0.7, CFG) == 0.0
        assert steer(0.0, 0.0, CFG) == 0.0

    def test_full_left_pressure_saturates_curvature(self):
        assert steer(CFG.steer_pressure_max, 0.0, CFG) == CFG.kappa_max_per_cm
        assert steer(0.0, CFG.steer_pressure_max, CFG) == -CFG.kappa_max_per_cm

    def test_clamp_beyond_max(self):
        assert steer(10.0, 0.0, CFG) == CFG.kappa_max_per_cm

    def test_min_wrap_diameter(self):
        assert min_wrap_diameter_cm(CFG) == pytest.approx(80.0)

    def test_rejects_negative_pressure(self):
        with pytest.raises(ValueError):
            steer(-1.0, 0.0, CFG)


class TestDetectContacts:
    def test_no_contacts_no_forces(self):
        world = world_with(grown_cm=82.5)
        forces = detect_contacts(world.body, world.pockets, [], [])
        assert all(f == 0.0 for f in forces.values())

    def test_touch_isolation_on_middle_left_pocket(self):
        world = world_with(grown_cm=82.5)
        touch = Touch(force_n=2.0, duration_s=1.0, x_cm=41.25, y_cm=1.0)
        forces = detect_contacts(world.body, world.pockets, [], [touch])
        assert forces["L1"] == pytest.approx(2.0)
        assert all(f == 0.0 for pid, f in forces.items() if pid != "L1")

    def test_obstacle_penetration_force_law(self):
        # straight body along +x; obstacle center 9.5 cm below it: 0.5 cm
        # penetration of a radius-10 circle, facing the right side
        world = world_with(grown_cm=82.5)
        obstacle = Obstacle(x_cm=41.25, y_cm=-9.5, radius_cm=10.0, stiffness_n_per_cm=4.0)
        forces = detect_contacts(world.body, world.pockets, [obstacle], [])
        assert forces["R1"] == pytest.approx(4.0 * 0.5, abs=1e-9)
        assert forces["L1"] == 0.0

    def test_touch_outside_capture_radius_is_ignored(self):
        world = world_with(grown_cm=82.5)
        touch = Touch(force_n=2.0, duration_s=1.0, x_cm=41.25, y_cm=10.0)
        forces = detect_contacts(
            world.body, world.pockets, [], [touch], capture_radius_cm=6.0
        )
        assert all(f == 0.0 for f in forces.values())

    def test_pocket_addressed_touch(self):
        world = world_with(grown_cm=82.5)
        touch = Touch(force_n=3.0, duration_s=1.0, pocket_id="R0")
        forces = detect_contacts(world.body, world.pockets, [], [touch])
        assert forces["R0"] == 3.0

    def test_unexposed_pocket_never_receives_force(self):
        world = world_with(grown_cm=82.5)
        hidden = Touch(force_n=3.0, duration_s=1.0, pocket_id="R2")
        world.pockets[[p.pocket_id for p in world.pockets].index("R2")].exposed_fraction = 0.0
        forces = detect_contacts(world.body, world.pockets, [], [hidden])
        assert forces["R2"] == 0.0


class TestTick:
    def test_single_tick_grows_straight(self):
        world = World()
        world.tick()
        assert world.state.phase is ControlPhase.GROWING_STRAIGHT
        assert world.body.grown_length_cm == pytest.approx(CFG.growth_rate_cm_s * CFG.dt_s)

    def test_one_grow_timeout_everts_one_pocket_pair(self):
        world = World(sim_cfg=quiet_cfg())
        for _ in range(240):  # 12 s at dt = 0.05
            world.tick()
        assert world.body.grown_length_cm == pytest.approx(27.5, abs=1e-9)
        exposed = {p.pocket_id: p.exposed_fraction for p in world.pockets}
        assert exposed["L0"] == pytest.approx(1.0, abs=1e-9)
        assert exposed["R0"] == pytest.approx(1.0, abs=1e-9)

    def test_no_contact_run_matches_controller_trace(self):
        world = World(sim_cfg=quiet_cfg())
        world_phases = []
        for _ in range(1200):  # 60 s
            world.tick()
            world_phases.append(world.state.phase.value)
        oracle = run_trace(constant_script(1200, left=0.0, right=0.0), ControllerConfig())
        collapsed = lambda seq: [p for i, p in enumerate(seq) if i == 0 or seq[i - 1] != p]
        assert collapsed(world_phases) == phase_sequence(oracle)

    def test_touch_during_search_reaches_growth_within_two_ticks(self):
        world = world_with(grown_cm=82.5, phase=ControlPhase.SEARCHING_LEFT, sim_cfg=quiet_cfg())
        world.add_touch(Touch(force_n=10.0, duration_s=8.0, pocket_id="L2"), at_s=1.0)
        crossing_tick = None
        for tick in range(400):
            world.tick()
            front = world.front_pocket(Side.LEFT)
            if crossing_tick is None and front.gauge_pressure_kpa >= 1.01:
                crossing_tick = tick
            if crossing_tick is not None and tick >= crossing_tick:
                if world.state.phase is ControlPhase.GROWING_LEFT:
                    assert tick - crossing_tick <= 2
                    return
        pytest.fail("touch never produced a growth episode")

    def test_zero_noise_no_contact_pockets_hold_baseline(self):
        world = world_with(grown_cm=82.5, sim_cfg=quiet_cfg())
        for _ in range(600):
            world.tick()
        for p in world.pockets:
            assert abs(p.gauge_pressure_kpa - 0.4) <= 1e-9

    def test_grown_length_is_monotone(self):
        world = World(sim_cfg=quiet_cfg())
        lengths = []
        for _ in range(1000):
            world.tick()
            lengths.append(world.body.grown_length_cm)
        assert all(b >= a - 1e-12 for a, b in zip(lengths, lengths[1:]))

    def test_exposure_ordering(self):
        world = World(sim_cfg=quiet_cfg())
        for _ in range(1500):
            world.tick()
            for side in (Side.LEFT, Side.RIGHT):
                fractions = [
                    p.exposed_fraction
                    for p in sorted(
                        (p for p in world.pockets if p.side is side),
                        key=lambda p: p.start_arclength_cm,
                    )
                ]
                for earlier, later in zip(fractions, fractions[1:]):
                    if later > 0:
                        assert earlier == pytest.approx(1.0, abs=1e-9)

    def test_front_pocket_selection_respects_eversion_threshold(self):
        world = world_with(grown_cm=100.0)
        # pocket 3 is only 64% everted, so pocket 2 is still the front
        assert world.front_pocket(Side.LEFT).pocket_id == "L2"
        world2 = world_with(grown_cm=108.0)  # 92% everted
        assert world2.front_pocket(Side.LEFT).pocket_id == "L3"

    def test_searching_reshapes_only_the_distal_pocket_length(self):
        world = world_with(grown_cm=82.5, phase=ControlPhase.SEARCHING_RIGHT, sim_cfg=quiet_cfg())
        before = world.body.sample_polyline(1.0)
        world.tick()
        after = world.body.sample_polyline(1.0)
        keep = 82.5 - 27.5
        assert np.allclose(before[: int(keep)], after[: int(keep)], atol=1e-9)
        assert world.body.segments[-1].curvature_per_cm == pytest.approx(-CFG.kappa_max_per_cm)
        assert world.body.grown_length_cm == pytest.approx(82.5, abs=1e-9)

    def test_body_stays_c1_through_a_busy_run(self):
        world = world_with(grown_cm=55.0, phase=ControlPhase.SEARCHING_LEFT, sim_cfg=quiet_cfg())
        world.add_touch(Touch(force_n=8.0, duration_s=10.0, pocket_id="L1"), at_s=0.5)
        for _ in range(1200):
            world.tick()
        points = world.body.sample_polyline(0.5)
        chords = np.diff(points, axis=0)
        lengths = np.hypot(chords[:, 0], chords[:, 1])
        assert np.all(lengths <= 0.5 + 1e-9)
        headings = np.unwrap(np.arctan2(chords[:, 1], chords[:, 0]))
        assert np.all(np.abs(np.diff(headings)) <= CFG.kappa_max_per_cm * 0.5 + 1e-6)

    def test_seeded_runs_are_identical(self):
        def run(seed):
            world = world_with(grown_cm=55.0, seed=seed)
            trail = []
            for _ in range(400):
                world.tick()
                trail.append(
                    (
                        world.state.phase.value,
                        round(world.body.grown_length_cm, 12),
                        tuple(round(p.gauge_pressure_kpa, 15) for p in world.pockets),
                    )
                )
            return trail

        assert run(11) == run(11)
        assert run(11) != run(12)


class TestLayoutPresets:
    def test_demo_layout_matches_hardware(self):
        demo = LAYOUT_PRESETS["two_actuator_tabletop"]
        assert demo.actuator_count == 2
        assert demo.sensors_per_station == 3

    def test_three_actuator_geometry_preset_exists(self):
        radial = LAYOUT_PRESETS["three_actuator_radial"]
        assert radial.actuator_count == 3
        assert radial.circumferential_stations == 6
