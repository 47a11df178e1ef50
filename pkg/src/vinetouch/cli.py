"""Command line front door: calibrate, demo, serve.

    vinetouch calibrate --reproduce-paper
    vinetouch calibrate --input trials.csv --output report.jsonl
    vinetouch calibrate --synthetic "control,top,medium,0.4,noise=0.02,seed=7"
    vinetouch demo --scenario small_object --headless --out trace.jsonl
    vinetouch serve --bind 127.0.0.1:8000 --scenario large_object

Failures print a single machine-readable error record to stderr and exit
nonzero.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import calibration
from .calibration import DegenerateDataError, MissingColumnError, factor_report
from .pocket import (
    ContactSpec,
    RadialFace,
    UnsupportedConfigError,
    default_table,
    preset,
)
from .scenario import ScenarioError, load_scenario, shipped_scenarios
from .session import SimSession, serialize_snapshot

DISK_NAMES = {"small": 6.9, "medium": 12.5, "large": 25.0}

PAPER_SLOPE_TOL = 1e-6
PAPER_INTERCEPT_TOL_KPA = 1e-6


def _error_record(code: str, detail: str) -> int:
    print(json.dumps({"error": code, "detail": detail}), file=sys.stderr)
    return 1


def _open_out(path: str):
    if path == "-":
        return sys.stdout
    return open(path, "w", encoding="utf-8")


def _row_label(row) -> str:
    label = (
        f"{row.config_preset}/{row.radial_face.value}"
        f"/L{row.lengthwise_cm:g}cm/A{row.contact_area_cm2:g}cm2"
        f"/P{row.initial_pressure_kpa:g}kPa"
    )
    if row.subpocket_index is not None:
        label += f"/sub{row.subpocket_index}"
    return label


def _reproduce_paper(output: str, plot_path: str | None) -> int:
    """Re-run every tabulated condition on noiseless synthetic trials."""
    table = default_table()
    groups = {}
    expected = {}
    for row in table.rows:
        config = preset(row.config_preset, row.initial_pressure_kpa)
        contact = ContactSpec(
            contact_area_cm2=row.contact_area_cm2,
            radial_face=row.radial_face,
            lengthwise_fraction=min(row.lengthwise_cm / config.pre_inflated_length_cm, 1.0),
            subpocket_index=row.subpocket_index,
        )
        label = _row_label(row)
        groups[label] = calibration.generate_trials(
            config, contact, noise_sigma_kpa=0.0, seed=0, pocket_id=label, table=table
        )
        expected[label] = row.slope_kpa_per_n
    report = factor_report(groups)

    all_ok = True
    records = []
    for group in report.groups:
        want = expected[group.label]
        fit = group.fit
        ok = (
            fit is not None
            and abs(fit.slope_kpa_per_n - want) <= PAPER_SLOPE_TOL
            and abs(fit.intercept_kpa) < PAPER_INTERCEPT_TOL_KPA
        )
        all_ok &= ok
        record = group.record()
        record.update({"expected_slope": want, "ok": ok})
        records.append(record)

    out = _open_out(output)
    try:
        for record in records:
            print(json.dumps(record), file=out)
        print(
            json.dumps({"summary": "reproduce-paper", "rows": len(records), "ok": all_ok}),
            file=out,
        )
    finally:
        if out is not sys.stdout:
            out.close()
    if plot_path:
        Path(plot_path).write_text(report.plot_data_jsonl(), encoding="utf-8")
    return 0 if all_ok else 1


def _parse_synthetic_spec(spec: str):
    """Parse "preset,face,disk,pressure[,key=value...]" into generator args."""
    tokens = [token.strip() for token in spec.split(",") if token.strip()]
    positional = [t for t in tokens if "=" not in t]
    options = dict(t.split("=", 1) for t in tokens if "=" in t)
    if len(positional) != 4:
        raise ValueError(
            "synthetic spec needs preset,face,disk,initial_pressure "
            "(e.g. control,top,medium,0.4)"
        )
    preset_name, face_name, disk, pressure = positional
    area = DISK_NAMES.get(disk.lower())
    if area is None:
        area = float(disk)
    config = preset(preset_name, float(pressure))
    contact = ContactSpec(contact_area_cm2=area, radial_face=RadialFace(face_name.lower()))
    return config, contact, {
        "noise_sigma_kpa": float(options.pop("noise", 0.0)),
        "seed": int(options.pop("seed", 0)),
        "trials": int(options.pop("trials", 3)),
    }, options


def _cmd_calibrate(args: argparse.Namespace) -> int:
    chosen = [bool(args.reproduce_paper), args.synthetic is not None, args.input is not None]
    if sum(chosen) != 1:
        return _error_record(
            "BAD_ARGUMENTS", "choose exactly one of --input, --synthetic, --reproduce-paper"
        )
    try:
        if args.reproduce_paper:
            return _reproduce_paper(args.output, args.plot_data)

        if args.synthetic is not None:
            config, contact, gen_args, extra = _parse_synthetic_spec(args.synthetic)
            if extra:
                return _error_record("BAD_ARGUMENTS", f"unknown synthetic options: {sorted(extra)}")
            samples = calibration.generate_trials(config, contact, **gen_args)
            report = factor_report({args.synthetic: samples})
        else:
            with open(args.input, "r", encoding="utf-8", newline="") as handle:
                result = calibration.ingest_csv(handle)
            if not result.samples:
                return _error_record("DEGENERATE_DATA", "no parseable samples in input")
            by_pocket: dict[str, list] = {}
            for sample in result.samples:
                by_pocket.setdefault(sample.pocket_id, []).append(sample)
            report = factor_report(by_pocket)
            for row_error in result.errors:
                print(
                    json.dumps(
                        {"error": row_error.code, "line": row_error.line, "detail": row_error.detail}
                    ),
                    file=sys.stderr,
                )

        out = _open_out(args.output)
        try:
            out.write(report.to_jsonl())
        finally:
            if out is not sys.stdout:
                out.close()
        if args.plot_data:
            Path(args.plot_data).write_text(report.plot_data_jsonl(), encoding="utf-8")
        return 0
    except FileNotFoundError as exc:
        return _error_record("NO_SUCH_FILE", str(exc))
    except (MissingColumnError, DegenerateDataError, UnsupportedConfigError) as exc:
        return _error_record(exc.code, str(exc))
    except ValueError as exc:
        return _error_record("BAD_ARGUMENTS", str(exc))


def _cmd_demo(args: argparse.Namespace) -> int:
    try:
        scenario = load_scenario(args.scenario)
    except FileNotFoundError as exc:
        return _error_record("NO_SUCH_SCENARIO", str(exc))
    except ScenarioError as exc:
        return _error_record("SCENARIO_PARSE", str(exc))
    session = SimSession(scenario, seed=args.seed)
    pace = None if args.headless else session.dt_s / args.speed
    with open(args.out, "w", encoding="utf-8") as trace:
        for snapshot in session.run_headless():
            trace.write(serialize_snapshot(snapshot) + "\n")
            if pace:
                time.sleep(pace)
    print(
        json.dumps(
            {
                "scenario": scenario.name,
                "duration_s": scenario.duration_s,
                "seed": session.seed,
                "trace": args.out,
            }
        )
    )
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    try:
        scenario = load_scenario(args.scenario)
    except FileNotFoundError as exc:
        return _error_record("NO_SUCH_SCENARIO", str(exc))
    except ScenarioError as exc:
        return _error_record("SCENARIO_PARSE", str(exc))
    host, _, port = args.bind.rpartition(":")
    if not host or not port.isdigit():
        return _error_record("BAD_ARGUMENTS", f"--bind must be host:port, got {args.bind!r}")
    app = create_app(scenario, seed=args.seed, speed=args.speed)
    uvicorn.run(app, host=host, port=int(port), log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vinetouch",
        description="Air-pocket force sensing toolkit: calibration, demos, live service.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    cal = sub.add_parser("calibrate", help="fit sensitivity lines from trials")
    cal.add_argument("--input", help="CSV of calibration trials")
    cal.add_argument("--synthetic", help="generate trials, e.g. 'control,top,medium,0.4,noise=0.02,seed=7'")
    cal.add_argument(
        "--reproduce-paper",
        action="store_true",
        help="refit every tabulated condition on noiseless synthetic data and check the slopes",
    )
    cal.add_argument("--output", default="-", help="report path (JSONL), '-' for stdout")
    cal.add_argument("--plot-data", help="optional plot-data sidecar path (JSONL)")
    cal.set_defaults(func=_cmd_calibrate)

    demo = sub.add_parser("demo", help="replay a scenario and write its trace")
    demo.add_argument(
        "--scenario",
        required=True,
        help=f"scenario file or shipped name ({', '.join(shipped_scenarios())})",
    )
    demo.add_argument("--headless", action="store_true", help="run unpaced, as fast as possible")
    demo.add_argument("--speed", type=float, default=1.0, help="real-time multiplier when paced")
    demo.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    demo.add_argument("--out", default="trace.jsonl", help="trace output path")
    demo.set_defaults(func=_cmd_demo)

    serve = sub.add_parser("serve", help="serve a live simulation over WebSocket")
    serve.add_argument("--bind", default="127.0.0.1:8000", help="host:port to listen on")
    serve.add_argument("--scenario", default="empty", help="scenario file or shipped name")
    serve.add_argument("--speed", type=float, default=1.0, help="real-time multiplier")
    serve.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    serve.set_defaults(func=_cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
