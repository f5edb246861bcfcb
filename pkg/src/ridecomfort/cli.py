"""Command-line entry point.

Exit codes: 0 success, 2 bad usage, 3 unreadable input/config/scenario,
4 pipeline failure, 5 output could not be written.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .config import Config
from .errors import ConfigError, InvalidScenario, ParseError, StageError
from .io import parse_input, write_csv, write_outputs
from .pipeline import run_pipeline
from .synth import Scenario, generate_ride

EXIT_OK = 0
EXIT_INPUT = 3
EXIT_PIPELINE = 4
EXIT_IO = 5

log = logging.getLogger("ridecomfort")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="ridecomfort",
        description="Detect comfort-reducing driving events in a smartphone IMU log.",
    )
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", metavar="PATH", help="CSV with header t_s,ax,ay,az,gx,gy,gz")
    src.add_argument("--synth", metavar="SCENARIO_PATH", help="generate a synthetic ride from a scenario JSON")
    p.add_argument("--config", metavar="PATH", help="JSON config file")
    p.add_argument("--time-constant", type=float, metavar="S", help="low-pass time constant in seconds")
    p.add_argument("--accel-threshold", type=float, metavar="MS2")
    p.add_argument("--brake-threshold", type=float, metavar="MS2")
    p.add_argument("--lateral-threshold", type=float, metavar="MS2")
    p.add_argument("--pothole-threshold", type=float, metavar="MS2")
    p.add_argument("--report", metavar="PATH", help="write the report JSON here (default: stdout)")
    p.add_argument("--events", metavar="PATH", help="write events as JSON Lines")
    p.add_argument("--emit-plot-data", metavar="PATH", help="write vehicle-frame t_s,ax,ay,az CSV")
    p.add_argument("--emit-input", metavar="PATH", help="with --synth: also write the generated device-frame CSV")
    return p


def _load(args) -> tuple[Config, object]:
    cfg = Config.load(args.config) if args.config else Config()
    cfg = cfg.with_overrides(
        time_constant=args.time_constant,
        accel_x=args.accel_threshold,
        brake_x=args.brake_threshold,
        lateral_y=args.lateral_threshold,
        pothole_z=args.pothole_threshold,
    )
    if args.synth:
        try:
            scenario = Scenario.from_dict(json.loads(Path(args.synth).read_text()))
        except (OSError, json.JSONDecodeError) as exc:
            raise InvalidScenario(f"cannot read scenario {args.synth}: {exc}") from exc
        series, _ = generate_ride(scenario, cfg.thresholds)
    else:
        try:
            series = parse_input(args.input)
        except OSError as exc:
            raise ParseError(f"cannot read {args.input}: {exc.strerror or exc}") from exc
    return cfg, series


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    if args.emit_input and not args.synth:
        log.error("--emit-input requires --synth")
        return 2

    try:
        cfg, series = _load(args)
    except (ParseError, ConfigError, InvalidScenario) as exc:
        log.error("%s", exc)
        return EXIT_INPUT

    try:
        if args.emit_input:
            write_csv(series, args.emit_input)
    except OSError as exc:
        log.error("cannot write %s: %s", args.emit_input, exc)
        return EXIT_IO

    try:
        result = run_pipeline(series, cfg)
    except StageError as exc:
        log.error("%s stage failed: %s", exc.stage, exc.cause)
        return EXIT_PIPELINE

    try:
        text = write_outputs(
            result.report,
            result.estimate,
            result.aligned,
            report_path=args.report,
            events_path=args.events,
            plot_path=args.emit_plot_data,
        )
    except OSError as exc:
        log.error("%s", exc)
        return EXIT_IO
    if args.report is None:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
