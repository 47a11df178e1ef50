"""Contact-search state machine: transitions, timeouts, threshold behavior."""

import pytest

from vinetouch.controller import (
    ActuatorCommand,
    ControlPhase,
    ControllerState,
    Side,
    command_for,
    phase_sequence,
    run_trace,
    step,
)

from conftest import BASELINE_KPA, CONTACT_KPA, constant_script, searching_demo_script

B = BASELINE_KPA


def make(phase, entered=0.0, prior=None):
    return ControllerState(phase, entered, prior)


class TestTransitions:
    def test_contact_during_right_search_starts_growing_right(self, controller_cfg):
        state, cmd = step(make(ControlPhase.SEARCHING_RIGHT), B, 1.02, 1.0, controller_cfg)
        assert state.phase is ControlPhase.GROWING_RIGHT
        assert state.prior_contact_side is Side.RIGHT
        assert cmd.grow and cmd.right_pressure > 0 and cmd.left_pressure == 0

    def test_growing_straight_times_out_to_searching_left(self, controller_cfg):
        state, cmd = step(make(ControlPhase.GROWING_STRAIGHT), B, B, 12.0, controller_cfg)
        assert state.phase is ControlPhase.SEARCHING_LEFT
        assert not cmd.grow
        assert cmd.left_pressure > 0 and cmd.right_pressure == 0

    def test_search_after_left_growth_times_out_to_growing_straight(self, controller_cfg):
        searching = make(ControlPhase.SEARCHING_LEFT, entered=0.0, prior=Side.LEFT)
        state, _ = step(searching, B, B, 15.0, controller_cfg)
        assert state.phase is ControlPhase.GROWING_STRAIGHT
        assert state.prior_contact_side is None

    def test_main_cycle_left_search_times_out_to_searching_right(self, controller_cfg):
        state, _ = step(make(ControlPhase.SEARCHING_LEFT), B, B, 15.0, controller_cfg)
        assert state.phase is ControlPhase.SEARCHING_RIGHT

    def test_right_search_timeout_goes_straight_in_both_variants(self, controller_cfg):
        # red arrow: main-cycle sweep expires
        state, _ = step(make(ControlPhase.SEARCHING_RIGHT), B, B, 15.0, controller_cfg)
        assert state.phase is ControlPhase.GROWING_STRAIGHT
        # brown arrow: sweep after a right growth episode expires
        after_growth = make(ControlPhase.SEARCHING_RIGHT, prior=Side.RIGHT)
        state, _ = step(after_growth, B, B, 15.0, controller_cfg)
        assert state.phase is ControlPhase.GROWING_STRAIGHT

    def test_growth_episodes_return_to_their_search_state(self, controller_cfg):
        state, _ = step(make(ControlPhase.GROWING_LEFT), B, B, 12.0, controller_cfg)
        assert state.phase is ControlPhase.SEARCHING_LEFT
        assert state.prior_contact_side is Side.LEFT
        state, _ = step(make(ControlPhase.GROWING_RIGHT), B, B, 12.0, controller_cfg)
        assert state.phase is ControlPhase.SEARCHING_RIGHT
        assert state.prior_contact_side is Side.RIGHT

    def test_growth_ignores_readings(self, controller_cfg):
        state, _ = step(make(ControlPhase.GROWING_RIGHT), 5.0, 5.0, 6.0, controller_cfg)
        assert state.phase is ControlPhase.GROWING_RIGHT

    def test_contact_wins_over_simultaneous_timeout(self, controller_cfg):
        state, _ = step(make(ControlPhase.SEARCHING_LEFT), 1.5, B, 15.0, controller_cfg)
        assert state.phase is ControlPhase.GROWING_LEFT


class TestThreshold:
    @pytest.mark.parametrize("epsilon", [1e-6, 1e-9])
    def test_strict_comparison_around_threshold(self, controller_cfg, epsilon):
        threshold = controller_cfg.contact_threshold_kpa
        below, _ = step(make(ControlPhase.SEARCHING_RIGHT), B, threshold - epsilon, 1.0, controller_cfg)
        assert below.phase is ControlPhase.SEARCHING_RIGHT
        above, _ = step(make(ControlPhase.SEARCHING_RIGHT), B, threshold + epsilon, 1.0, controller_cfg)
        assert above.phase is ControlPhase.GROWING_RIGHT

    def test_exactly_at_threshold_triggers(self, controller_cfg):
        state, _ = step(
            make(ControlPhase.SEARCHING_LEFT), controller_cfg.contact_threshold_kpa, B, 1.0, controller_cfg
        )
        assert state.phase is ControlPhase.GROWING_LEFT

    def test_below_threshold_never_triggers_across_full_sweep(self, controller_cfg):
        near = controller_cfg.contact_threshold_kpa - 1e-6
        trace = run_trace(
            constant_script(400, left=near),
            controller_cfg,
            initial=make(ControlPhase.SEARCHING_LEFT),
        )
        assert ControlPhase.GROWING_LEFT not in [s.phase for _, s in trace]


class TestStepContract:
    def test_pure_function(self, controller_cfg):
        args = (make(ControlPhase.SEARCHING_LEFT, 2.0), 0.6, 0.5, 9.0, controller_cfg)
        assert step(*args) == step(*args)

    def test_rejects_nonfinite_readings(self, controller_cfg):
        with pytest.raises(ValueError):
            step(make(ControlPhase.GROWING_STRAIGHT), float("nan"), B, 1.0, controller_cfg)

    def test_rejects_time_before_entry(self, controller_cfg):
        with pytest.raises(ValueError):
            step(make(ControlPhase.GROWING_STRAIGHT, entered=5.0), B, B, 4.0, controller_cfg)

    def test_commands_grow_only_in_growing_phases(self, controller_cfg):
        for phase in ControlPhase:
            cmd = command_for(phase, controller_cfg)
            assert cmd.grow == phase.value.startswith("growing")

    def test_commands_steer_toward_the_phase_side(self, controller_cfg):
        for phase in (ControlPhase.SEARCHING_LEFT, ControlPhase.GROWING_LEFT):
            cmd = command_for(phase, controller_cfg)
            assert cmd.left_pressure == controller_cfg.steer_pressure
            assert cmd.right_pressure == 0.0
        for phase in (ControlPhase.SEARCHING_RIGHT, ControlPhase.GROWING_RIGHT):
            cmd = command_for(phase, controller_cfg)
            assert cmd.right_pressure == controller_cfg.steer_pressure
            assert cmd.left_pressure == 0.0

    def test_actuator_command_exclusivity(self):
        with pytest.raises(ValueError):
            ActuatorCommand(grow=False, left_pressure=1.0, right_pressure=1.0)

    def test_serialized_names(self):
        assert [p.value for p in ControlPhase] == [
            "growing_straight",
            "searching_left",
            "searching_right",
            "growing_left",
            "growing_right",
        ]


class TestTraces:
    def test_no_contact_cycles_through_three_states(self, controller_cfg):
        # 90 s covers more than one full grow/sweep/sweep loop
        trace = run_trace(constant_script(1800), controller_cfg)
        assert phase_sequence(trace)[:7] == [
            "growing_straight",
            "searching_left",
            "searching_right",
            "growing_straight",
            "searching_left",
            "searching_right",
            "growing_straight",
        ]

    def test_recorded_demo_sequence(self, controller_cfg):
        script = searching_demo_script(controller_cfg)
        trace = run_trace(
            script, controller_cfg, initial=make(ControlPhase.SEARCHING_LEFT)
        )
        assert phase_sequence(trace) == [
            "searching_left",
            "searching_right",
            "growing_straight",
            "searching_left",
            "searching_right",
            "growing_right",
            "searching_right",
            "growing_straight",
        ]

    def test_sustained_contact_gives_consecutive_growth_episodes(self, controller_cfg):
        # right sensor pressed the whole time: grow, re-probe, grow again
        script = constant_script(1200, right=CONTACT_KPA)
        trace = run_trace(
            script, controller_cfg, initial=make(ControlPhase.SEARCHING_RIGHT)
        )
        assert phase_sequence(trace)[:4] == [
            "growing_right",
            "searching_right",
            "growing_right",
            "searching_right",
        ]

    def test_transition_times_land_on_timeouts(self, controller_cfg):
        trace = run_trace(constant_script(500), controller_cfg)
        changes = [(t, s.phase) for (t, s), (_, prev) in zip(trace[1:], trace) if s.phase is not prev.phase]
        assert changes[0] == (12.0, ControlPhase.SEARCHING_LEFT)

    def test_determinism(self, controller_cfg):
        script = searching_demo_script(controller_cfg)
        a = run_trace(script, controller_cfg, initial=make(ControlPhase.SEARCHING_LEFT))
        b = run_trace(script, controller_cfg, initial=make(ControlPhase.SEARCHING_LEFT))
        assert a == b
