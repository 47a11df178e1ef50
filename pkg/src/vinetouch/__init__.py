"""Air-pocket force sensing toolkit.

Pressure-to-force calibration for pocket sensors, an emulated multiplexed
sensor array, the five-state contact-search controller, and a planar
simulation of a growing vine robot steered by touch.
"""

from .calibration import (
    CalibrationSample,
    DegenerateDataError,
    LinearFit,
    MissingColumnError,
    factor_report,
    fit_line,
    generate_trials,
    ingest_csv,
)
from .controller import (
    ActuatorCommand,
    ControlPhase,
    ControllerConfig,
    ControllerState,
    Side,
    run_trace,
    step,
)
from .hub import SensorAddress, SensorHub, SensorReading
from .pocket import (
    ContactSpec,
    PocketConfig,
    PressureState,
    Provenance,
    RadialFace,
    Sensitivity,
    UnsupportedConfigError,
    control_pocket,
    estimate_force,
    predict_pressure_change,
    preset,
    response_with_dynamics,
    sealed_pocket,
    sensitivity_for,
    small_pocket,
    thin_pocket,
)
from .scenario import Scenario, build_world, load_scenario
from .sim import Obstacle, RobotBody, SimConfig, Touch, World, detect_contacts, steer

__version__ = "0.1.0"

__all__ = [
    "ActuatorCommand",
    "CalibrationSample",
    "ContactSpec",
    "ControlPhase",
    "ControllerConfig",
    "ControllerState",
    "DegenerateDataError",
    "LinearFit",
    "MissingColumnError",
    "Obstacle",
    "PocketConfig",
    "PressureState",
    "Provenance",
    "RadialFace",
    "RobotBody",
    "Scenario",
    "Sensitivity",
    "SensorAddress",
    "SensorHub",
    "SensorReading",
    "Side",
    "SimConfig",
    "Touch",
    "UnsupportedConfigError",
    "World",
    "build_world",
    "control_pocket",
    "detect_contacts",
    "estimate_force",
    "factor_report",
    "fit_line",
    "generate_trials",
    "ingest_csv",
    "load_scenario",
    "predict_pressure_change",
    "preset",
    "response_with_dynamics",
    "run_trace",
    "sealed_pocket",
    "sensitivity_for",
    "small_pocket",
    "steer",
    "step",
    "thin_pocket",
]
