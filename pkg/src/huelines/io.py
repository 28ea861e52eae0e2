"""Parsers that normalize raw trajectory and time-series files into LineSets.

Two text layouts are supported, both UTF-8:

* long-format trajectory CSV: ``line_id,x,y`` rows ordered by line then
  sequence, header optional;
* wide-format time-series CSV: one row per series, columns are successive
  time steps, empty cells mark missing samples.

Either parser also accepts the JSON alternative
``{"lines": [{"id": ..., "points": [[x, y], ...]}]}``.
"""

from __future__ import annotations

import csv
import io as _io
import json
import warnings
from typing import TextIO

import numpy as np

from .model import LineKind, LineSet, Polyline


class ParseError(ValueError):
    """Malformed input; carries a 1-based row number when known."""

    def __init__(self, message: str, row: int | None = None):
        self.row = row
        super().__init__(f"row {row}: {message}" if row is not None else message)


def _as_text(source: str | TextIO) -> str:
    if hasattr(source, "read"):
        return source.read()
    return source


def _looks_like_json(text: str) -> bool:
    stripped = text.lstrip()
    return stripped.startswith("{") or stripped.startswith("[")


def _parse_json_lines(text: str, kind: LineKind) -> tuple[LineSet, list[str]]:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    records = payload.get("lines") if isinstance(payload, dict) else payload
    if not isinstance(records, list) or not records:
        raise ParseError("JSON input must contain a non-empty 'lines' list")
    lines: list[Polyline] = []
    original_ids: list[str] = []
    for rec in records:
        points = np.asarray(rec.get("points", []), dtype=np.float64)
        orig = str(rec.get("id", len(original_ids)))
        if points.ndim != 2 or points.shape[1] != 2 or points.shape[0] < 2:
            warnings.warn(f"line {orig}: fewer than 2 points, skipped")
            continue
        lines.append(Polyline(id=len(lines), vertices=points))
        original_ids.append(orig)
    if not lines:
        raise ParseError("no usable polylines in JSON input")
    return LineSet.from_lines(lines, kind=kind), original_ids


def parse_trajectories(source: str | TextIO, format: str = "csv_long") -> tuple[LineSet, list[str]]:
    """Parse long-format trajectory data into a LineSet.

    Returns the LineSet plus the original id of each polyline, indexed by
    the new dense id. Lines with fewer than 2 vertices are dropped with a
    warning; malformed rows raise ParseError with their row number.
    """
    if format != "csv_long":
        raise ValueError(f"unsupported trajectory format {format!r}")
    text = _as_text(source)
    if _looks_like_json(text):
        return _parse_json_lines(text, LineKind.TRAJECTORY)
    if not text.strip():
        raise ParseError("empty input")

    by_id: dict[str, list[tuple[float, float]]] = {}
    reader = csv.reader(_io.StringIO(text))
    for row_no, row in enumerate(reader, start=1):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != 3:
            raise ParseError(f"expected 3 fields, got {len(row)}", row=row_no)
        key, xs, ys = (cell.strip() for cell in row)
        try:
            x, y = float(xs), float(ys)
        except ValueError:
            if row_no == 1:
                continue  # header row
            raise ParseError(f"non-numeric coordinate {xs!r},{ys!r}", row=row_no) from None
        if not (np.isfinite(x) and np.isfinite(y)):
            raise ParseError("non-finite coordinate", row=row_no)
        by_id.setdefault(key, []).append((x, y))

    if not by_id:
        raise ParseError("no data rows found")
    lines: list[Polyline] = []
    original_ids: list[str] = []
    for key, pts in by_id.items():
        if len(pts) < 2:
            warnings.warn(f"line {key}: only {len(pts)} vertex, skipped")
            continue
        lines.append(Polyline(id=len(lines), vertices=np.asarray(pts, dtype=np.float64)))
        original_ids.append(key)
    if not lines:
        raise ParseError("every line had fewer than 2 vertices")
    return LineSet.from_lines(lines, kind=LineKind.TRAJECTORY), original_ids


def _series_pieces(values: list[float | None]) -> list[list[tuple[float, float]]]:
    """Split one wide-CSV row into vertex runs.

    A single interior missing cell is skipped (the line continues across
    the gap); two or more consecutive missing cells split the series.
    """
    pieces: list[list[tuple[float, float]]] = []
    current: list[tuple[float, float]] = []
    gap = 0
    for t, v in enumerate(values):
        if v is None:
            gap += 1
            continue
        if current and gap >= 2:
            pieces.append(current)
            current = []
        current.append((float(t), v))
        gap = 0
    if current:
        pieces.append(current)
    return pieces


def parse_timeseries(source: str | TextIO) -> tuple[LineSet, list[str]]:
    """Parse wide-format time series into a LineSet with x = time-step index.

    Returns the LineSet plus a source label per polyline: the 1-based input
    row, with a ``.k`` suffix when interior gaps split a row into pieces.
    """
    text = _as_text(source)
    if _looks_like_json(text):
        return _parse_json_lines(text, LineKind.TIMESERIES)
    if not text.strip():
        raise ParseError("empty input")

    lines: list[Polyline] = []
    original_ids: list[str] = []
    reader = csv.reader(_io.StringIO(text))
    for row_no, row in enumerate(reader, start=1):
        if not row:
            continue
        values: list[float | None] = []
        for col_no, cell in enumerate(row, start=1):
            cell = cell.strip()
            if not cell:
                values.append(None)
                continue
            try:
                v = float(cell)
            except ValueError:
                raise ParseError(f"non-numeric cell {cell!r} in column {col_no}", row=row_no) from None
            if not np.isfinite(v):
                raise ParseError(f"non-finite cell in column {col_no}", row=row_no)
            values.append(v)
        if all(v is None for v in values):
            raise ParseError("all-empty row", row=row_no)
        pieces = _series_pieces(values)
        usable = [p for p in pieces if len(p) >= 2]
        if not usable:
            warnings.warn(f"row {row_no}: no run of 2+ samples, skipped")
            continue
        for k, piece in enumerate(usable):
            lines.append(Polyline(id=len(lines), vertices=np.asarray(piece, dtype=np.float64)))
            original_ids.append(str(row_no) if len(usable) == 1 else f"{row_no}.{k}")
    if not lines:
        raise ParseError("no usable series found")
    return LineSet.from_lines(lines, kind=LineKind.TIMESERIES), original_ids


def write_trajectory_csv(ls: LineSet, target: str | TextIO) -> None:
    """Write a LineSet as long-format line_id,x,y rows (the parse_trajectories layout)."""
    own = isinstance(target, str)
    fh = open(target, "w", newline="") if own else target
    try:
        writer = csv.writer(fh)
        for line in ls.lines:
            for x, y in line.vertices:
                writer.writerow([line.id, repr(float(x)), repr(float(y))])
    finally:
        if own:
            fh.close()


def write_labels_csv(labels, target: str | TextIO) -> None:
    """Write per-line labels as line_id,label rows with a header.

    `labels` is either a sequence indexed by line id or a {line_id: label}
    mapping.
    """
    if isinstance(labels, dict):
        items = sorted(labels.items())
    else:
        items = list(enumerate(np.asarray(labels)))
    own = isinstance(target, str)
    fh = open(target, "w", newline="") if own else target
    try:
        writer = csv.writer(fh)
        writer.writerow(["line_id", "label"])
        for i, lab in items:
            writer.writerow([int(i), int(lab)])
    finally:
        if own:
            fh.close()


def read_labels_csv(source: str | TextIO) -> dict[int, int]:
    """Read line_id,label rows (header optional) into a dict."""
    text = _as_text(source) if hasattr(source, "read") else None
    if text is None:
        with open(source) as fh:
            text = fh.read()
    labels: dict[int, int] = {}
    for row_no, row in enumerate(csv.reader(_io.StringIO(text)), start=1):
        if not row or all(not c.strip() for c in row):
            continue
        try:
            labels[int(row[0])] = int(row[1])
        except (ValueError, IndexError):
            if row_no == 1:
                continue
            raise ParseError("expected line_id,label", row=row_no) from None
    return labels
