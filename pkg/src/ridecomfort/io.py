"""CSV ingestion and JSON/JSONL/CSV output."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import IO

import numpy as np

from .alignment import AlignmentEstimate
from .core import Frame, SampleSeries
from .detect import EventKind, RideReport
from .errors import EmptyInput, MalformedRow, MissingHeader, NonMonotoneTimestamp

HEADER = ("t_s", "ax", "ay", "az", "gx", "gy", "gz")
PLOT_HEADER = ("t_s", "ax", "ay", "az")


def _open_text(source) -> tuple[IO[str], bool]:
    if isinstance(source, (str, Path)):
        return open(source, newline="", encoding="utf-8"), True
    return source, False


def parse_input(source) -> SampleSeries:
    """Read a device-frame series from a CSV path or text stream.

    The first line must be exactly ``t_s,ax,ay,az,gx,gy,gz``. Blank lines are
    ignored. Errors carry the 1-based line number of the offending row.
    """
    stream, owned = _open_text(source)
    try:
        lines = stream.read().splitlines()
    finally:
        if owned:
            stream.close()
    if not lines or all(not ln.strip() for ln in lines):
        raise EmptyInput("input is empty")
    if lines[0].lstrip("﻿").strip() != ",".join(HEADER):
        raise MissingHeader(f"expected header {','.join(HEADER)!r}, got {lines[0]!r}", line=1)

    rows: list[list[float]] = []
    prev_t = -math.inf
    for lineno, row in enumerate(csv.reader(lines[1:]), start=2):
        if not row or all(not f.strip() for f in row):
            continue
        if len(row) != len(HEADER):
            raise MalformedRow(f"expected {len(HEADER)} fields, got {len(row)}", line=lineno)
        try:
            values = [float(f) for f in row]
        except ValueError:
            raise MalformedRow(f"non-numeric field in {row!r}", line=lineno) from None
        if not all(math.isfinite(v) for v in values):
            raise MalformedRow(f"non-finite field in {row!r}", line=lineno)
        if values[0] <= prev_t:
            raise NonMonotoneTimestamp(
                f"timestamp {values[0]!r} does not increase past {prev_t!r}", line=lineno
            )
        prev_t = values[0]
        rows.append(values)
    if not rows:
        raise EmptyInput("input has a header but no data rows")
    data = np.array(rows)
    return SampleSeries(data[:, 0], data[:, 1:4], data[:, 4:7], Frame.DEVICE)


def _fmt(v: float) -> str:
    return repr(float(v))


def write_csv(series: SampleSeries, dest) -> None:
    """Write a series in the ingestion format; floats use shortest round-trip repr."""
    stream, owned = (open(dest, "w", newline="", encoding="utf-8"), True) if isinstance(dest, (str, Path)) else (dest, False)
    try:
        w = csv.writer(stream, lineterminator="\n")
        w.writerow(HEADER)
        for t, a, g in zip(series.t, series.accel, series.gyro):
            w.writerow([_fmt(t), *map(_fmt, a), *map(_fmt, g)])
    finally:
        if owned:
            stream.close()


def report_to_dict(report: RideReport, estimate: AlignmentEstimate) -> dict:
    return {
        "duration_s": report.duration,
        "score": report.score,
        "counts": {kind.value: report.counts[kind] for kind in EventKind},
        "alignment": {
            "vertical_axis": list(estimate.vertical_axis),
            "heading_rad": estimate.heading_phi,
            "residual_rad": estimate.residual,
            "mode_used": estimate.mode_used.value,
        },
        "events": [e.as_dict() for e in report.events],
    }


def report_json(report: RideReport, estimate: AlignmentEstimate) -> str:
    return json.dumps(report_to_dict(report, estimate), indent=2) + "\n"


def events_jsonl(report: RideReport) -> str:
    return "".join(json.dumps(e.as_dict()) + "\n" for e in report.events)


def plot_csv(aligned: SampleSeries) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(PLOT_HEADER)
    for t, a in zip(aligned.t, aligned.accel):
        w.writerow([_fmt(t), *map(_fmt, a)])
    return buf.getvalue()


def write_outputs(
    report: RideReport,
    estimate: AlignmentEstimate,
    aligned: SampleSeries,
    report_path=None,
    events_path=None,
    plot_path=None,
) -> str:
    """Write whichever outputs have a destination and return the report JSON.

    Raises ``OSError`` naming the path that could not be written.
    """
    text = report_json(report, estimate)
    for path, content in (
        (report_path, lambda: text),
        (events_path, lambda: events_jsonl(report)),
        (plot_path, lambda: plot_csv(aligned)),
    ):
        if path is None:
            continue
        try:
            Path(path).write_text(content(), encoding="utf-8")
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return text
