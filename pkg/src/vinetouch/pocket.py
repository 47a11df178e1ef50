"""Air-pocket force sensor model.

A pocket is a sealed, slightly pressurized plastic membrane with an embedded
gauge pressure sensor. Pressing on the pocket raises its internal pressure
linearly with the applied force, so a single measured slope (kPa per N)
calibrates the sensor in both directions:

    delta_p = slope * force        (forward)
    force   = delta_p / slope      (readout)

The measured slopes for the four tested pocket geometries, the two contact
faces, the three disk areas, the three initial pressures, and the two
sub-pocket locations ship as a versioned CSV (``data/sensitivity_table_v1.csv``)
and are loaded here, not hard-coded. Conditions between tabulated points on
the continuous axes (initial pressure, contact area) are piecewise-linearly
interpolated; combined off-table conditions compose multiplicatively against
the control-pocket baseline. Everything outside the tabulated envelope is
refused rather than extrapolated.

Units are fixed package-wide: kPa gauge, N, cm, s.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from enum import Enum
from importlib import resources

import numpy as np

DEFAULT_INITIAL_PRESSURE_KPA = 0.4
SENSITIVITY_TABLE_RESOURCE = "sensitivity_table_v1.csv"

#: Acrylic disk sizes used for contact-area testing: area (cm^2) -> mass (g).
DISK_AREAS_CM2 = (6.9, 12.5, 25.0)
DISK_MASSES_G = {6.9: 4.36, 12.5: 8.75, 25.0: 17.6}
MEDIUM_DISK_AREA_CM2 = 12.5


class RadialFace(Enum):
    """Which face of the pocket the contact presses on."""

    TOP = "top"
    SIDE = "side"


class Provenance(Enum):
    """Where a sensitivity value came from."""

    PAPER_TABLE = "paper_table"
    FITTED = "fitted"
    INTERPOLATED = "interpolated"


class UnsupportedConfigError(ValueError):
    """Pocket/contact condition outside the tabulated rows and envelope."""

    code = "UNSUPPORTED_CONFIG"


@dataclass(frozen=True)
class PocketConfig:
    """Geometry and initial pressure of one sensor pocket.

    Lengths are positive; ``subpocket_lengths_cm`` is empty for pockets
    without interior seals and has ``interior_seal_count + 1`` entries
    otherwise, summing to at most the pre-inflated length.
    """

    membrane_thickness_mm: float
    pre_inflated_length_cm: float
    lay_flat_diameter_cm: float = 10.2
    interior_seal_count: int = 0
    subpocket_lengths_cm: tuple[float, ...] = ()
    initial_pressure_kpa: float = DEFAULT_INITIAL_PRESSURE_KPA

    def __post_init__(self) -> None:
        if self.membrane_thickness_mm <= 0:
            raise ValueError("membrane_thickness_mm must be > 0")
        if self.pre_inflated_length_cm <= 0:
            raise ValueError("pre_inflated_length_cm must be > 0")
        if self.lay_flat_diameter_cm <= 0:
            raise ValueError("lay_flat_diameter_cm must be > 0")
        if self.initial_pressure_kpa < 0:
            raise ValueError("initial_pressure_kpa must be >= 0 (gauge)")
        if self.interior_seal_count < 0:
            raise ValueError("interior_seal_count must be >= 0")
        if self.interior_seal_count == 0:
            if self.subpocket_lengths_cm:
                raise ValueError("subpocket_lengths_cm must be empty without seals")
        else:
            if len(self.subpocket_lengths_cm) != self.interior_seal_count + 1:
                raise ValueError(
                    "need interior_seal_count + 1 subpocket lengths, got "
                    f"{len(self.subpocket_lengths_cm)}"
                )
            if any(length <= 0 for length in self.subpocket_lengths_cm):
                raise ValueError("subpocket lengths must be > 0")
            if sum(self.subpocket_lengths_cm) > self.pre_inflated_length_cm + 1e-9:
                raise ValueError("subpocket lengths exceed pre-inflated length")

    @property
    def subpocket_count(self) -> int:
        return len(self.subpocket_lengths_cm)

    def with_initial_pressure(self, initial_pressure_kpa: float) -> "PocketConfig":
        return replace(self, initial_pressure_kpa=initial_pressure_kpa)


def control_pocket(initial_pressure_kpa: float = DEFAULT_INITIAL_PRESSURE_KPA) -> PocketConfig:
    """Baseline pocket: 0.10 mm membrane, 27.5 cm long, no interior seals."""
    return PocketConfig(0.10, 27.5, initial_pressure_kpa=initial_pressure_kpa)


def small_pocket(initial_pressure_kpa: float = DEFAULT_INITIAL_PRESSURE_KPA) -> PocketConfig:
    """Short pocket: same membrane as control, 15 cm long."""
    return PocketConfig(0.10, 15.0, initial_pressure_kpa=initial_pressure_kpa)


def thin_pocket(initial_pressure_kpa: float = DEFAULT_INITIAL_PRESSURE_KPA) -> PocketConfig:
    """Thin-membrane pocket: 0.05 mm, control length."""
    return PocketConfig(0.05, 27.5, initial_pressure_kpa=initial_pressure_kpa)


def sealed_pocket(initial_pressure_kpa: float = DEFAULT_INITIAL_PRESSURE_KPA) -> PocketConfig:
    """Control-sized pocket with three interior partial seals (four sub-pockets)."""
    return PocketConfig(
        0.10,
        27.5,
        interior_seal_count=3,
        subpocket_lengths_cm=(8.0, 5.75, 5.75, 8.0),
        initial_pressure_kpa=initial_pressure_kpa,
    )


_PRESET_FACTORIES = {
    "control": control_pocket,
    "small": small_pocket,
    "thin": thin_pocket,
    "sealed": sealed_pocket,
}


def preset(name: str, initial_pressure_kpa: float = DEFAULT_INITIAL_PRESSURE_KPA) -> PocketConfig:
    """Build one of the four tested pocket geometries by name."""
    try:
        factory = _PRESET_FACTORIES[name.lower()]
    except KeyError:
        raise UnsupportedConfigError(f"unknown pocket preset {name!r}") from None
    return factory(initial_pressure_kpa)


def preset_names() -> tuple[str, ...]:
    return tuple(_PRESET_FACTORIES)


def classify_geometry(config: PocketConfig) -> str | None:
    """Return the preset name whose geometry matches ``config``, if any.

    Initial pressure is a free factor and is not compared.
    """
    for name, factory in _PRESET_FACTORIES.items():
        ref = factory(config.initial_pressure_kpa)
        if (
            math.isclose(config.membrane_thickness_mm, ref.membrane_thickness_mm, rel_tol=1e-9)
            and math.isclose(config.pre_inflated_length_cm, ref.pre_inflated_length_cm, rel_tol=1e-9)
            and math.isclose(config.lay_flat_diameter_cm, ref.lay_flat_diameter_cm, rel_tol=1e-9)
            and config.interior_seal_count == ref.interior_seal_count
            and len(config.subpocket_lengths_cm) == len(ref.subpocket_lengths_cm)
            and all(
                math.isclose(a, b, rel_tol=1e-9)
                for a, b in zip(config.subpocket_lengths_cm, ref.subpocket_lengths_cm)
            )
        ):
            return name
    return None


@dataclass(frozen=True)
class ContactSpec:
    """Where and how a force meets a pocket."""

    contact_area_cm2: float
    radial_face: RadialFace = RadialFace.TOP
    lengthwise_fraction: float = 0.5
    subpocket_index: int | None = None

    def __post_init__(self) -> None:
        if self.contact_area_cm2 <= 0:
            raise ValueError("contact_area_cm2 must be > 0")
        if not 0.0 <= self.lengthwise_fraction <= 1.0:
            raise ValueError("lengthwise_fraction must be in [0, 1]")
        if self.subpocket_index is not None and self.subpocket_index < 0:
            raise ValueError("subpocket_index must be >= 0")


@dataclass(frozen=True)
class Sensitivity:
    """Calibration slope: pressure change per unit applied force."""

    slope_kpa_per_n: float
    provenance: Provenance

    def __post_init__(self) -> None:
        if self.slope_kpa_per_n <= 0:
            raise ValueError("slope must be > 0")


@dataclass(frozen=True)
class PressureState:
    """One (initial, sensed) gauge pressure pair."""

    p_initial_kpa: float
    p_sensed_kpa: float

    def __post_init__(self) -> None:
        if self.p_initial_kpa < 0 or self.p_sensed_kpa < 0:
            raise ValueError("gauge pressures must be >= 0")

    @property
    def delta_kpa(self) -> float:
        return self.p_sensed_kpa - self.p_initial_kpa


@dataclass(frozen=True)
class TableRow:
    """One tabulated calibration condition from the shipped data file."""

    config_preset: str
    radial_face: RadialFace
    lengthwise_cm: float
    contact_area_cm2: float
    initial_pressure_kpa: float
    subpocket_index: int | None
    slope_kpa_per_n: float
    source_figure: str


def _close(a: float, b: float) -> bool:
    return math.isclose(a, b, rel_tol=1e-9, abs_tol=1e-12)


class SensitivityTable:
    """Tabulated slopes plus the interpolation/composition rules between them.

    The resolution model treats each factor as a multiplicative ratio against
    the control baseline; single-factor table rows are reproduced exactly and
    combined conditions compose those ratios. The sealed pocket carries its
    own contact-area curve because its area response was measured directly.
    """

    def __init__(self, rows: list[TableRow]):
        if not rows:
            raise ValueError("empty sensitivity table")
        self.rows = list(rows)
        self._baseline = self._slope_at("control", RadialFace.TOP, 12.5, 0.4, None)
        self._side_slope = self._slope_at("control", RadialFace.SIDE, 12.5, 0.4, None)
        self._pressure_curve = self._curve(
            lambda r: r.config_preset == "control"
            and r.radial_face is RadialFace.TOP
            and _close(r.contact_area_cm2, 12.5),
            key=lambda r: r.initial_pressure_kpa,
        )
        self._area_curve_control = self._curve(
            lambda r: r.config_preset == "control"
            and r.radial_face is RadialFace.TOP
            and _close(r.initial_pressure_kpa, 0.4),
            key=lambda r: r.contact_area_cm2,
        )
        self._area_curve_sealed = self._curve(
            lambda r: r.config_preset == "sealed" and r.subpocket_index == 1,
            key=lambda r: r.contact_area_cm2,
        )
        self._geometry_base = {
            "control": self._baseline,
            "thin": self._slope_at("thin", RadialFace.TOP, 12.5, 0.4, None),
            "small": self._slope_at("small", RadialFace.TOP, 12.5, 0.4, None),
        }
        self._sealed_base = {
            idx: self._slope_at("sealed", RadialFace.TOP, 12.5, 0.4, idx) for idx in (1, 2)
        }

    @classmethod
    def load_default(cls) -> "SensitivityTable":
        source = resources.files("vinetouch.data").joinpath(SENSITIVITY_TABLE_RESOURCE)
        with source.open("r", encoding="utf-8") as handle:
            return cls.from_csv(handle)

    @classmethod
    def from_csv(cls, stream) -> "SensitivityTable":
        rows = []
        for record in csv.DictReader(stream):
            sub = record.get("subpocket_index", "").strip()
            rows.append(
                TableRow(
                    config_preset=record["config_preset"].strip().lower(),
                    radial_face=RadialFace(record["radial_face"].strip().lower()),
                    lengthwise_cm=float(record["lengthwise_cm"]),
                    contact_area_cm2=float(record["contact_area_cm2"]),
                    initial_pressure_kpa=float(record["initial_pressure_kPa"]),
                    subpocket_index=int(sub) if sub else None,
                    slope_kpa_per_n=float(record["slope_kpa_per_n"]),
                    source_figure=record.get("source_figure", "").strip(),
                )
            )
        return cls(rows)

    # -- anchors ---------------------------------------------------------

    def _matching(self, predicate) -> list[TableRow]:
        return [r for r in self.rows if predicate(r)]

    def _slope_at(
        self,
        preset_name: str,
        face: RadialFace,
        area: float,
        pressure: float,
        subpocket: int | None,
    ) -> float:
        rows = self._matching(
            lambda r: r.config_preset == preset_name
            and r.radial_face is face
            and _close(r.contact_area_cm2, area)
            and _close(r.initial_pressure_kpa, pressure)
            and r.subpocket_index == subpocket
        )
        if not rows:
            raise ValueError(
                f"table lacks anchor row {preset_name}/{face.value}/{area}/{pressure}/{subpocket}"
            )
        slopes = {r.slope_kpa_per_n for r in rows}
        if len(slopes) > 1:
            raise ValueError(f"conflicting slopes for anchor {preset_name}: {sorted(slopes)}")
        return rows[0].slope_kpa_per_n

    def _curve(self, predicate, key) -> tuple[np.ndarray, np.ndarray]:
        points = sorted({(key(r), r.slope_kpa_per_n) for r in self._matching(predicate)})
        xs = np.array([p[0] for p in points])
        ys = np.array([p[1] for p in points])
        if len(xs) < 2:
            raise ValueError("interpolation curve needs at least two table points")
        return xs, ys

    # -- resolution ------------------------------------------------------

    @property
    def pressure_range_kpa(self) -> tuple[float, float]:
        xs = self._pressure_curve[0]
        return float(xs[0]), float(xs[-1])

    @property
    def area_range_cm2(self) -> tuple[float, float]:
        xs = self._area_curve_control[0]
        return float(xs[0]), float(xs[-1])

    def exact_row(
        self,
        preset_name: str,
        face: RadialFace,
        area: float,
        pressure: float,
        subpocket: int | None,
    ) -> TableRow | None:
        for row in self.rows:
            if (
                row.config_preset == preset_name
                and row.radial_face is face
                and _close(row.contact_area_cm2, area)
                and _close(row.initial_pressure_kpa, pressure)
                and row.subpocket_index == subpocket
            ):
                return row
        return None

    def slope_for(
        self,
        preset_name: str,
        face: RadialFace,
        area: float,
        pressure: float,
        subpocket: int | None,
    ) -> tuple[float, Provenance]:
        lo_p, hi_p = self.pressure_range_kpa
        lo_a, hi_a = self.area_range_cm2
        if not (lo_p <= pressure <= hi_p) and not (_close(pressure, lo_p) or _close(pressure, hi_p)):
            raise UnsupportedConfigError(
                f"initial pressure {pressure} kPa outside tabulated range [{lo_p}, {hi_p}]"
            )
        if not (lo_a <= area <= hi_a) and not (_close(area, lo_a) or _close(area, hi_a)):
            raise UnsupportedConfigError(
                f"contact area {area} cm^2 outside tabulated range [{lo_a}, {hi_a}]"
            )

        if preset_name == "sealed":
            if subpocket is None:
                subpocket = 1  # second sub-pocket, the tested default location
            if subpocket not in self._sealed_base:
                raise UnsupportedConfigError(
                    f"no tabulated slope for sealed sub-pocket {subpocket}"
                )
        elif subpocket is not None:
            raise UnsupportedConfigError("subpocket_index only applies to sealed pockets")

        row = self.exact_row(preset_name, face, area, pressure, subpocket)
        if row is not None:
            return row.slope_kpa_per_n, Provenance.PAPER_TABLE

        if preset_name == "sealed":
            base = self._sealed_base[subpocket]
            area_xs, area_ys = self._area_curve_sealed
            area_ref = self._sealed_base[1]
        else:
            if preset_name not in self._geometry_base:
                raise UnsupportedConfigError(f"no tabulated rows for geometry {preset_name!r}")
            base = self._geometry_base[preset_name]
            area_xs, area_ys = self._area_curve_control
            area_ref = self._baseline

        area_ratio = float(np.interp(area, area_xs, area_ys)) / area_ref
        p_xs, p_ys = self._pressure_curve
        pressure_ratio = float(np.interp(pressure, p_xs, p_ys)) / self._baseline
        face_ratio = 1.0 if face is RadialFace.TOP else self._side_slope / self._baseline
        return base * area_ratio * pressure_ratio * face_ratio, Provenance.INTERPOLATED


_default_table: SensitivityTable | None = None


def default_table() -> SensitivityTable:
    global _default_table
    if _default_table is None:
        _default_table = SensitivityTable.load_default()
    return _default_table


def sensitivity_for(
    config: PocketConfig,
    contact: ContactSpec,
    table: SensitivityTable | None = None,
) -> Sensitivity:
    """Resolve the calibration slope for a pocket/contact condition.

    Exact tabulated conditions return the tabulated slope; conditions between
    table points on the continuous axes interpolate. Contact location along
    the pocket length has no effect on the result. Raises
    :class:`UnsupportedConfigError` outside the tabulated envelope.
    """
    table = table or default_table()
    geometry = classify_geometry(config)
    if geometry is None:
        raise UnsupportedConfigError("pocket geometry matches no tested preset")
    if contact.subpocket_index is not None and contact.subpocket_index >= max(
        config.subpocket_count, 1
    ):
        raise UnsupportedConfigError(
            f"subpocket_index {contact.subpocket_index} out of range for {geometry}"
        )
    slope, provenance = table.slope_for(
        geometry,
        contact.radial_face,
        contact.contact_area_cm2,
        config.initial_pressure_kpa,
        contact.subpocket_index,
    )
    return Sensitivity(slope_kpa_per_n=slope, provenance=provenance)


def estimate_force(state: PressureState, s: Sensitivity) -> float:
    """Invert the calibration: force in N from a sensed pressure change.

    Negative results are returned as-is; they flag a reading below the
    baseline (pull, drift, or noise) rather than an error.
    """
    return state.delta_kpa / s.slope_kpa_per_n


def predict_pressure_change(force_n: float, s: Sensitivity) -> float:
    """Forward calibration: expected pressure rise (kPa) for an applied force."""
    if force_n < 0:
        raise ValueError("force_n must be >= 0")
    return s.slope_kpa_per_n * force_n


class PressureDynamics:
    """First-order lag of a pocket's pressure toward its loaded set point.

    The internal pressure relaxes toward ``p_initial + slope * force`` with
    time constant ``tau_s`` (1 s settles within 1% by the 5 s mark used when
    reading loaded pockets). Measurement noise is additive zero-mean Gaussian
    on the returned sample only; it does not feed back into the state.
    """

    def __init__(
        self,
        s: Sensitivity,
        p_initial_kpa: float,
        tau_s: float = 1.0,
        noise_sigma_kpa: float = 0.01,
        rng: np.random.Generator | None = None,
    ):
        if tau_s <= 0:
            raise ValueError("tau_s must be > 0")
        if noise_sigma_kpa < 0:
            raise ValueError("noise_sigma_kpa must be >= 0")
        self.sensitivity = s
        self.p_initial_kpa = p_initial_kpa
        self.tau_s = tau_s
        self.noise_sigma_kpa = noise_sigma_kpa
        self._rng = rng if rng is not None else np.random.default_rng(0)
        self._pressure = p_initial_kpa

    @property
    def true_pressure_kpa(self) -> float:
        """Noise-free internal pressure."""
        return self._pressure

    def reset(self) -> None:
        self._pressure = self.p_initial_kpa

    def step(self, force_n: float, dt_s: float) -> float:
        """Advance one timestep under ``force_n`` and return the measured pressure."""
        if dt_s <= 0:
            raise ValueError("dt_s must be > 0")
        target = self.p_initial_kpa + self.sensitivity.slope_kpa_per_n * force_n
        decay = math.exp(-dt_s / self.tau_s)
        self._pressure = target + (self._pressure - target) * decay
        measured = self._pressure
        if self.noise_sigma_kpa > 0:
            measured += self._rng.normal(0.0, self.noise_sigma_kpa)
        return max(measured, 0.0)


def response_with_dynamics(
    force_trajectory,
    s: Sensitivity,
    dt_s: float,
    p_initial_kpa: float = DEFAULT_INITIAL_PRESSURE_KPA,
    tau_s: float = 1.0,
    noise_sigma_kpa: float = 0.01,
    seed: int | None = 0,
) -> np.ndarray:
    """Simulate the measured gauge pressure for a force time series.

    Sample ``i`` of the result is the pressure after force ``i`` has acted for
    one ``dt_s`` interval, starting from the initial pressure at t = 0.
    """
    rng = np.random.default_rng(seed)
    dynamics = PressureDynamics(
        s, p_initial_kpa, tau_s=tau_s, noise_sigma_kpa=noise_sigma_kpa, rng=rng
    )
    return np.array([dynamics.step(force, dt_s) for force in force_trajectory])
