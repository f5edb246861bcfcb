import io
import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ridecomfort.cli import EXIT_INPUT, EXIT_IO, EXIT_OK, EXIT_PIPELINE, main
from ridecomfort.config import Config
from ridecomfort.core import Frame, SampleSeries
from ridecomfort.errors import ConfigError, EmptyInput, MalformedRow, MissingHeader, NonMonotoneTimestamp
from ridecomfort.io import parse_input, plot_csv, report_to_dict, write_csv, write_outputs
from ridecomfort.pipeline import run_pipeline
from ridecomfort.synth import Scenario, Segment, generate_ride

DATA = Path(__file__).parent / "data"
SCENARIO = Path(__file__).parents[1] / "scripts" / "scenarios" / "city_ride.json"
HEADER = "t_s,ax,ay,az,gx,gy,gz\n"


def parse_text(text):
    return parse_input(io.StringIO(text))


# --- parsing --------------------------------------------------------------------


def test_parse_one_row():
    s = parse_text(HEADER + "0.0,1,2,3,0.1,0.2,0.3\n")
    assert len(s) == 1 and s.frame is Frame.DEVICE
    assert tuple(s.samples[0].gyro) == (0.1, 0.2, 0.3)


def test_parse_short_row_reports_line():
    with pytest.raises(MalformedRow) as exc:
        parse_text(HEADER + "0.0,1,2,3,0.1,0.2,0.3\n0.1,1,2,3,0.1,0.2\n")
    assert exc.value.line == 3


def test_parse_equal_timestamps_reports_line():
    with pytest.raises(NonMonotoneTimestamp) as exc:
        parse_text(HEADER + "0.5,1,2,3,0,0,0\n0.5,1,2,3,0,0,0\n")
    assert exc.value.line == 3


def test_parse_requires_exact_header():
    with pytest.raises(MissingHeader):
        parse_text("t,ax,ay,az,gx,gy,gz\n0,1,2,3,0,0,0\n")
    with pytest.raises(MissingHeader):
        parse_text("0,1,2,3,0,0,0\n")


@pytest.mark.parametrize("text", ["", "\n\n", HEADER])
def test_parse_empty(text):
    with pytest.raises(EmptyInput):
        parse_text(text)


@pytest.mark.parametrize("row", ["0,1,2,x,0,0,0", "0,1,2,nan,0,0,0", "0,1,2,inf,0,0,0"])
def test_parse_rejects_non_numeric(row):
    with pytest.raises(MalformedRow):
        parse_text(HEADER + row + "\n")


finite = st.floats(-1e6, 1e6, allow_nan=False, allow_subnormal=True)


@given(st.lists(st.tuples(*[finite] * 6), min_size=1, max_size=30), st.floats(1e-6, 10.0))
def test_csv_round_trip_is_bit_identical(rows, step):
    n = len(rows)
    data = np.array(rows)
    s = SampleSeries(np.arange(n) * step + 0.1, data[:, :3], data[:, 3:])
    first = io.StringIO()
    write_csv(s, first)
    parsed = parse_text(first.getvalue())
    second = io.StringIO()
    write_csv(parsed, second)
    assert first.getvalue() == second.getvalue()
    assert np.array_equal(parsed.accel, s.accel) and np.array_equal(parsed.t, s.t)


# --- outputs --------------------------------------------------------------------


@pytest.fixture(scope="module")
def still_and_launch():
    dev, truth = generate_ride(Scenario([Segment(5), Segment(3, 6.0), Segment(5)], 50.0))
    return run_pipeline(dev), truth


def test_report_schema_and_order(still_and_launch):
    result, _ = still_and_launch
    d = report_to_dict(result.report, result.estimate)
    assert list(d) == ["duration_s", "score", "counts", "alignment", "events"]
    assert list(d["alignment"]) == ["vertical_axis", "heading_rad", "residual_rad", "mode_used"]
    assert list(d["counts"]) == ["FastAcceleration", "HardBraking", "AggressiveCornering", "Pothole"]
    assert d["counts"]["FastAcceleration"] == 1 and d["score"] == 95.0


def test_event_lines(still_and_launch, tmp_path):
    result, _ = still_and_launch
    write_outputs(result.report, result.estimate, result.aligned, events_path=tmp_path / "e.jsonl")
    lines = (tmp_path / "e.jsonl").read_text().splitlines()
    assert len(lines) == 1
    assert list(json.loads(lines[0])) == ["kind", "t_start", "t_end", "peak", "threshold"]


def test_plot_export_keeps_length(still_and_launch):
    result, _ = still_and_launch
    lines = plot_csv(result.aligned).splitlines()
    assert lines[0] == "t_s,ax,ay,az" and len(lines) == len(result.aligned) + 1


def test_empty_event_report(tmp_path):
    dev, _ = generate_ride(Scenario([Segment(5), Segment(4, 2.0), Segment(5)], 50.0))
    result = run_pipeline(dev)
    text = write_outputs(result.report, result.estimate, result.aligned, report_path=tmp_path / "r.json")
    d = json.loads(text)
    assert d["events"] == [] and d["score"] == 100.0
    assert (tmp_path / "r.json").read_text() == text


def test_write_outputs_names_bad_path(still_and_launch, tmp_path):
    result, _ = still_and_launch
    bad = tmp_path / "missing" / "r.json"
    with pytest.raises(OSError, match="missing"):
        write_outputs(result.report, result.estimate, result.aligned, report_path=bad)


# --- config ---------------------------------------------------------------------


def test_config_defaults():
    cfg = Config()
    assert cfg.thresholds.accel_x == 5.0 and cfg.thresholds.lateral_y == 0.75
    assert cfg.time_constant == 0.5 and cfg.filter_orientation == "paper"


def test_config_from_dict_and_gravity_override():
    cfg = Config.from_dict({"gravity": 9.81, "thresholds": {"lateral_y": 1.0}, "alignment": {"window_s": 3.0}})
    assert cfg.thresholds.lateral_y == 1.0 and cfg.alignment.window_s == 3.0
    assert cfg.alignment.gravity == 9.81


@pytest.mark.parametrize(
    "d",
    [
        {"colour": 1},
        {"thresholds": {"accel": 5}},
        {"alignment": {"window": 2}},
        {"time_constant": -1},
        {"filter_orientation": "sideways"},
        {"weights": {"Speeding": 1}},
        {"thresholds": {"accel_x": 0}},
    ],
)
def test_config_rejects(d):
    with pytest.raises(ConfigError):
        Config.from_dict(d)


# --- CLI ------------------------------------------------------------------------


def test_cli_golden_report_is_byte_identical(tmp_path):
    out = tmp_path / "r.json"
    events = tmp_path / "e.jsonl"
    assert main(["--input", str(DATA / "golden_ride.csv"), "--report", str(out), "--events", str(events)]) == EXIT_OK
    assert out.read_bytes() == (DATA / "golden_report.json").read_bytes()
    assert events.read_bytes() == (DATA / "golden_events.jsonl").read_bytes()


def test_cli_synth_reproduces_golden_input(tmp_path):
    emitted = tmp_path / "ride.csv"
    assert main(["--synth", str(SCENARIO), "--emit-input", str(emitted), "--report", str(tmp_path / "r.json")]) == 0
    assert emitted.read_bytes() == (DATA / "golden_ride.csv").read_bytes()
    assert (tmp_path / "r.json").read_bytes() == (DATA / "golden_report.json").read_bytes()


def test_cli_stdout_and_plot(tmp_path, capsys):
    plot = tmp_path / "p.csv"
    assert main(["--input", str(DATA / "golden_ride.csv"), "--emit-plot-data", str(plot)]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["counts"]["AggressiveCornering"] == 1
    n_rows = len((DATA / "golden_ride.csv").read_text().splitlines())
    assert len(plot.read_text().splitlines()) == n_rows


def test_cli_threshold_flags(tmp_path, capsys):
    assert main(["--input", str(DATA / "golden_ride.csv"), "--accel-threshold", "7", "--brake-threshold", "7"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["counts"]["FastAcceleration"] == 0 and report["counts"]["HardBraking"] == 0


def test_cli_config_file(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"thresholds": {"lateral_y": 50.0}}))
    assert main(["--input", str(DATA / "golden_ride.csv"), "--config", str(cfg)]) == 0
    assert json.loads(capsys.readouterr().out)["counts"]["AggressiveCornering"] == 0


def test_cli_parse_error_exit_code(tmp_path, caplog):
    bad = tmp_path / "bad.csv"
    bad.write_text(HEADER + "0,1,2,3,0,0\n")
    assert main(["--input", str(bad)]) == EXIT_INPUT
    assert "line 2" in caplog.text


def test_cli_missing_file_exit_code(tmp_path):
    assert main(["--input", str(tmp_path / "nope.csv")]) == EXIT_INPUT


def test_cli_bad_config_exit_code(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text('{"unknown": 1}')
    assert main(["--input", str(DATA / "golden_ride.csv"), "--config", str(cfg)]) == EXIT_INPUT


def test_cli_no_motion_fails_in_alignment_stage(tmp_path, caplog):
    still = tmp_path / "still.csv"
    dev, _ = generate_ride(Scenario([Segment(15.0)], 50.0))
    write_csv(dev, still)
    assert main(["--input", str(still)]) == EXIT_PIPELINE
    assert "alignment stage" in caplog.text and "horizontal" in caplog.text


def test_cli_unwritable_report(tmp_path):
    code = main(["--input", str(DATA / "golden_ride.csv"), "--report", str(tmp_path / "no" / "r.json")])
    assert code == EXIT_IO


def test_cli_requires_a_source():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2
