"""Regenerate the golden trace and report used by the regression tests.

    python scripts/make_golden.py [--scenario scripts/scenarios/city_ride.json]
"""

import argparse
import json
from pathlib import Path

from ridecomfort.io import parse_input, write_csv, write_outputs
from ridecomfort.pipeline import run_pipeline
from ridecomfort.synth import Scenario, generate_ride

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--scenario", default=ROOT / "scripts/scenarios/city_ride.json")
    ap.add_argument("--out", default=ROOT / "tests/data")
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    scenario = Scenario.from_dict(json.loads(Path(args.scenario).read_text()))
    series, truth = generate_ride(scenario)
    write_csv(series, out / "golden_ride.csv")

    result = run_pipeline(parse_input(out / "golden_ride.csv"))
    write_outputs(
        result.report,
        result.estimate,
        result.aligned,
        report_path=out / "golden_report.json",
        events_path=out / "golden_events.jsonl",
    )
    print(f"{len(series)} samples, {len(truth.true_events)} true events, "
          f"{len(result.report.events)} detected, score {result.report.score}")


if __name__ == "__main__":
    main()
