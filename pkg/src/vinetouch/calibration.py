"""Calibration trials: ingestion, least-squares fitting, factor comparison.

The bench procedure behind this module: rest the pocket on a table, put an
acrylic disk on it for a known contact area, stack a known mass on the disk,
wait for the pressure to settle, record the change from the initial pressure.
Three masses (150/300/450 g) times three trials per condition give nine
points; an ordinary least-squares line through (force, delta_pressure) yields
the sensitivity slope. ``generate_trials`` re-enacts that procedure
synthetically through the pocket forward model so fits can be checked against
known ground truth.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .pocket import (
    DISK_MASSES_G,
    ContactSpec,
    PocketConfig,
    RadialFace,
    SensitivityTable,
    sensitivity_for,
)

G_M_PER_S2 = 9.81
TEST_MASSES_G = (150.0, 300.0, 450.0)

CSV_COLUMNS = (
    "pocket_id",
    "trial",
    "radial_face",
    "lengthwise_cm",
    "contact_area_cm2",
    "initial_pressure_kpa",
    "subpocket_index",
    "force_n",
    "delta_pressure_kpa",
)


class DegenerateDataError(ValueError):
    """Not enough distinct data to fit a line."""

    code = "DEGENERATE_DATA"


class MissingColumnError(ValueError):
    """CSV header lacks one or more required columns."""

    code = "MISSING_COLUMN"

    def __init__(self, missing: Sequence[str]):
        self.missing = tuple(missing)
        super().__init__(f"missing required columns: {', '.join(self.missing)}")


@dataclass(frozen=True)
class RowError:
    """A single unparseable CSV row; parsing continues past it."""

    line: int
    detail: str
    code: str = "MALFORMED_ROW"


@dataclass(frozen=True)
class CalibrationSample:
    """One (applied force, pressure change) observation."""

    pocket_id: str
    trial: int
    applied_force_n: float
    delta_pressure_kpa: float
    contact: ContactSpec
    initial_pressure_kpa: float

    def __post_init__(self) -> None:
        if self.applied_force_n <= 0:
            raise ValueError("applied_force_n must be > 0")
        if self.trial < 1:
            raise ValueError("trial must be >= 1")


@dataclass(frozen=True)
class LinearFit:
    """Least-squares line through (force, delta_pressure)."""

    slope_kpa_per_n: float
    intercept_kpa: float
    r_squared: float
    n_samples: int

    def __post_init__(self) -> None:
        if self.n_samples < 2:
            raise ValueError("a fit needs at least 2 samples")
        if not 0.0 <= self.r_squared <= 1.0:
            raise ValueError("r_squared must be in [0, 1]")


@dataclass(frozen=True)
class IngestResult:
    samples: tuple[CalibrationSample, ...]
    errors: tuple[RowError, ...]


def fit_line(samples: Iterable[CalibrationSample]) -> LinearFit:
    """Ordinary least squares of pressure change against applied force.

    Raises :class:`DegenerateDataError` for fewer than two samples or when
    every sample shares the same force (the slope is unidentifiable).
    """
    samples = list(samples)
    if len(samples) < 2:
        raise DegenerateDataError(f"need >= 2 samples, got {len(samples)}")
    forces = np.array([s.applied_force_n for s in samples])
    deltas = np.array([s.delta_pressure_kpa for s in samples])
    if np.allclose(forces, forces[0]):
        raise DegenerateDataError("all samples share one force value")
    slope, intercept = np.polyfit(forces, deltas, 1)
    predicted = slope * forces + intercept
    ss_res = float(np.sum((deltas - predicted) ** 2))
    ss_tot = float(np.sum((deltas - np.mean(deltas)) ** 2))
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return LinearFit(
        slope_kpa_per_n=float(slope),
        intercept_kpa=float(intercept),
        r_squared=min(max(r_squared, 0.0), 1.0),
        n_samples=len(samples),
    )


def generate_trials(
    config: PocketConfig,
    contact: ContactSpec,
    masses_g: Sequence[float] = TEST_MASSES_G,
    disk_mass_g: float | None = None,
    trials: int = 3,
    noise_sigma_kpa: float = 0.0,
    seed: int = 0,
    pocket_id: str = "synthetic",
    table: SensitivityTable | None = None,
) -> list[CalibrationSample]:
    """Synthetic re-enactment of the weight-stacking procedure.

    Force is (mass + disk mass) * g. The pressure reading is taken settled
    (the first-order response has fully converged by the settle wait), so
    with zero noise the samples sit exactly on the calibration line.
    Deterministic for a fixed seed.
    """
    if not masses_g:
        raise ValueError("masses_g must be non-empty")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if disk_mass_g is None:
        disk_mass_g = DISK_MASSES_G.get(contact.contact_area_cm2, 0.0)
    s = sensitivity_for(config, contact, table)
    rng = np.random.default_rng(seed)
    samples = []
    for mass_g in masses_g:
        force_n = (mass_g + disk_mass_g) * G_M_PER_S2 / 1000.0
        for trial in range(1, trials + 1):
            delta = s.slope_kpa_per_n * force_n
            if noise_sigma_kpa > 0:
                delta += rng.normal(0.0, noise_sigma_kpa)
            samples.append(
                CalibrationSample(
                    pocket_id=pocket_id,
                    trial=trial,
                    applied_force_n=force_n,
                    delta_pressure_kpa=delta,
                    contact=contact,
                    initial_pressure_kpa=config.initial_pressure_kpa,
                )
            )
    return samples


@dataclass(frozen=True)
class GroupResult:
    label: str
    fit: LinearFit | None
    error: str | None = None

    def record(self) -> dict:
        if self.fit is None:
            return {"group": self.label, "error": DegenerateDataError.code, "detail": self.error}
        return {
            "group": self.label,
            "slope": self.fit.slope_kpa_per_n,
            "intercept": self.fit.intercept_kpa,
            "r2": self.fit.r_squared,
            "n": self.fit.n_samples,
        }


@dataclass(frozen=True)
class PlotSeries:
    label: str
    points: tuple[tuple[float, float], ...]
    slope: float | None
    intercept: float | None


@dataclass(frozen=True)
class FactorReport:
    """Per-group fits plus pairwise slope ratios, mirroring the factor panels."""

    groups: tuple[GroupResult, ...]
    ratios: tuple[tuple[str, str, float], ...]
    plot_series: tuple[PlotSeries, ...]

    def fit_records(self) -> list[dict]:
        return [g.record() for g in self.groups]

    def ratio_records(self) -> list[dict]:
        return [{"group_a": a, "group_b": b, "ratio": r} for a, b, r in self.ratios]

    def to_jsonl(self) -> str:
        lines = [json.dumps(rec) for rec in self.fit_records()]
        lines += [json.dumps(rec) for rec in self.ratio_records()]
        return "\n".join(lines) + "\n"

    def plot_data_jsonl(self) -> str:
        lines = []
        for series in self.plot_series:
            lines.append(
                json.dumps(
                    {
                        "group": series.label,
                        "points": [[f, dp] for f, dp in series.points],
                        "fit": None
                        if series.slope is None
                        else {"slope": series.slope, "intercept": series.intercept},
                    }
                )
            )
        return "\n".join(lines) + "\n"


def factor_report(groups: Mapping[str, Iterable[CalibrationSample]]) -> FactorReport:
    """Fit each labelled group and compare slopes across groups.

    Groups that cannot be fitted are reported as degenerate instead of
    aborting the rest. Ratios cover every ordered pair of fitted groups.
    """
    results: list[GroupResult] = []
    series: list[PlotSeries] = []
    for label, samples in groups.items():
        samples = list(samples)
        points = tuple((s.applied_force_n, s.delta_pressure_kpa) for s in samples)
        try:
            fit = fit_line(samples)
        except DegenerateDataError as exc:
            results.append(GroupResult(label=label, fit=None, error=str(exc)))
            series.append(PlotSeries(label=label, points=points, slope=None, intercept=None))
        else:
            results.append(GroupResult(label=label, fit=fit))
            series.append(
                PlotSeries(
                    label=label,
                    points=points,
                    slope=fit.slope_kpa_per_n,
                    intercept=fit.intercept_kpa,
                )
            )
    fitted = [g for g in results if g.fit is not None]
    ratios = tuple(
        (a.label, b.label, a.fit.slope_kpa_per_n / b.fit.slope_kpa_per_n)
        for a in fitted
        for b in fitted
        if a.label != b.label and b.fit.slope_kpa_per_n != 0
    )
    return FactorReport(groups=tuple(results), ratios=ratios, plot_series=tuple(series))


def ingest_csv(stream, pocket_length_cm: float = 27.5) -> IngestResult:
    """Parse calibration samples from the documented CSV schema.

    Unknown columns are ignored. Rows that fail to parse are collected as
    :class:`RowError` with their line number; the rest of the file is still
    ingested. A missing required column aborts with
    :class:`MissingColumnError`. ``lengthwise_cm`` is normalized to a
    fraction of ``pocket_length_cm`` at this boundary.
    """
    reader = csv.DictReader(stream)
    if reader.fieldnames is None:
        raise MissingColumnError(CSV_COLUMNS)
    have = {name.strip().lower() for name in reader.fieldnames}
    missing = [col for col in CSV_COLUMNS if col not in have]
    if missing:
        raise MissingColumnError(missing)

    samples: list[CalibrationSample] = []
    errors: list[RowError] = []
    for record in reader:
        line = reader.line_num
        try:
            sub_raw = (record.get("subpocket_index") or "").strip()
            contact = ContactSpec(
                contact_area_cm2=float(record["contact_area_cm2"]),
                radial_face=RadialFace(record["radial_face"].strip().lower()),
                lengthwise_fraction=min(
                    max(float(record["lengthwise_cm"]) / pocket_length_cm, 0.0), 1.0
                ),
                subpocket_index=int(sub_raw) if sub_raw else None,
            )
            samples.append(
                CalibrationSample(
                    pocket_id=record["pocket_id"].strip(),
                    trial=int(record["trial"]),
                    applied_force_n=float(record["force_n"]),
                    delta_pressure_kpa=float(record["delta_pressure_kpa"]),
                    contact=contact,
                    initial_pressure_kpa=float(record["initial_pressure_kpa"]),
                )
            )
        except (ValueError, TypeError, KeyError) as exc:
            errors.append(RowError(line=line, detail=f"{type(exc).__name__}: {exc}"))
    return IngestResult(samples=tuple(samples), errors=tuple(errors))
