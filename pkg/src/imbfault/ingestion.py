"""CSV ingestion: time-series files, fault-interval files, label joining.

Files are UTF-8, comma-separated, with a header row. Interval files carry
exactly the columns ``t_start,t_end,label``. Floats are written with
``repr`` so a write/read round trip is bit-exact.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .core import FaultInterval, TimeSeriesFrame
from .errors import DataError, LabelConflictError, ParseError, SchemaError

INTERVAL_COLUMNS = ("t_start", "t_end", "label")


@dataclass(frozen=True)
class LabeledSeries:
    """A TimeSeriesFrame plus one class label per timestamp."""

    frame: TimeSeriesFrame
    labels: np.ndarray

    def __post_init__(self):
        labels = np.array([str(v) for v in np.asarray(self.labels).ravel()], dtype=object)
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        if len(self.labels) != self.frame.n_ticks:
            raise DataError("label vector length must equal timestamp count")


def _parse_float(cell: str, row_num: int, column: str) -> float:
    cell = cell.strip()
    if cell == "":
        raise ParseError(f"blank cell in column {column!r} at row {row_num}")
    try:
        return float(cell)
    except ValueError:
        raise ParseError(f"non-numeric cell {cell!r} in column {column!r} at row {row_num}") from None


def read_timeseries_csv(path, timestamp_col: str, channel_cols) -> TimeSeriesFrame:
    """Read a multichannel series; rows are sorted by timestamp.

    Channels are parsed in the declared order. Duplicate timestamps are an
    error because the sliced windows would be ambiguous.
    """
    channel_cols = list(channel_cols)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file, header row required") from None
        header = [h.strip() for h in header]
        missing = [c for c in [timestamp_col] + channel_cols if c not in header]
        if missing:
            raise SchemaError(f"{path}: missing columns {missing}")
        col_idx = {c: header.index(c) for c in [timestamp_col] + channel_cols}
        ts, rows = [], []
        for row_num, row in enumerate(reader, start=2):
            if not row or all(c.strip() == "" for c in row):
                continue
            ts.append(_parse_float(row[col_idx[timestamp_col]], row_num, timestamp_col))
            rows.append([_parse_float(row[col_idx[c]], row_num, c) for c in channel_cols])
    if not ts:
        raise DataError(f"{path}: no data rows")
    ts = np.asarray(ts, dtype=float)
    values = np.asarray(rows, dtype=float).T
    order = np.argsort(ts, kind="stable")
    ts, values = ts[order], values[:, order]
    if np.any(np.diff(ts) == 0):
        raise DataError(f"{path}: duplicate timestamps after sorting")
    return TimeSeriesFrame(timestamps=ts, channel_names=tuple(channel_cols), values=values)


def read_intervals_csv(path) -> list:
    """Read fault intervals; a zero-byte file yields an empty list."""
    intervals = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            return []
        header = tuple(h.strip() for h in header)
        if header != INTERVAL_COLUMNS:
            raise SchemaError(f"{path}: interval header must be {','.join(INTERVAL_COLUMNS)}")
        for row_num, row in enumerate(reader, start=2):
            if not row or all(c.strip() == "" for c in row):
                continue
            if len(row) < 3:
                raise ParseError(f"{path}: short row at {row_num}")
            t0 = _parse_float(row[0], row_num, "t_start")
            t1 = _parse_float(row[1], row_num, "t_end")
            label = row[2].strip()
            if label == "":
                raise ParseError(f"{path}: blank label at row {row_num}")
            intervals.append(FaultInterval(t0, t1, label))
    return intervals


def write_intervals_csv(intervals, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(INTERVAL_COLUMNS)
        for iv in intervals:
            writer.writerow([repr(float(iv.t_start)), repr(float(iv.t_end)), iv.label])


def label_timestamps(frame: TimeSeriesFrame, intervals, default_label: str = "normal") -> LabeledSeries:
    """Assign each timestamp the label of any interval containing it
    (inclusive bounds), else the default.

    Same-label overlaps merge silently; a timestamp covered by two
    different labels raises LabelConflictError. Idempotent by construction.
    """
    ts = frame.timestamps
    labels = np.array([default_label] * len(ts), dtype=object)
    for iv in intervals:
        mask = (ts >= iv.t_start) & (ts <= iv.t_end)
        clash = mask & (labels != default_label) & (labels != iv.label)
        if np.any(clash):
            t_bad = ts[clash][0]
            raise LabelConflictError(
                f"timestamp {t_bad} covered by labels {labels[clash][0]!r} and {iv.label!r}"
            )
        labels[mask] = iv.label
    return LabeledSeries(frame=frame, labels=labels)


def write_labeled_csv(series: LabeledSeries, path, timestamp_col: str = "timestamp") -> None:
    """Write timestamp, channels..., label. Floats use repr (round-trip exact)."""
    frame = series.frame
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([timestamp_col, *frame.channel_names, "label"])
        for i in range(frame.n_ticks):
            row = [repr(float(frame.timestamps[i]))]
            row += [repr(float(v)) for v in frame.values[:, i]]
            row.append(series.labels[i])
            writer.writerow(row)


def read_labeled_csv(path, timestamp_col: str = "timestamp") -> LabeledSeries:
    """Inverse of write_labeled_csv; channel order is taken from the header."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise SchemaError(f"{path}: empty file") from None
        if timestamp_col not in header or "label" not in header:
            raise SchemaError(f"{path}: need {timestamp_col!r} and 'label' columns")
        channels = [c for c in header if c not in (timestamp_col, "label")]
        t_i, l_i = header.index(timestamp_col), header.index("label")
        ch_i = [header.index(c) for c in channels]
        ts, rows, labels = [], [], []
        for row_num, row in enumerate(reader, start=2):
            if not row or all(c.strip() == "" for c in row):
                continue
            ts.append(_parse_float(row[t_i], row_num, timestamp_col))
            rows.append([_parse_float(row[j], row_num, channels[k]) for k, j in enumerate(ch_i)])
            labels.append(row[l_i].strip())
    if not ts:
        raise DataError(f"{path}: no data rows")
    frame = TimeSeriesFrame(np.asarray(ts, float), tuple(channels), np.asarray(rows, float).T)
    return LabeledSeries(frame=frame, labels=np.asarray(labels, dtype=object))


def write_feature_csv(fm, path, extra_columns=None) -> None:
    """Feature matrix CSV: feature columns, then `label`, then any extras.

    extra_columns: optional dict name -> sequence (e.g. a synthetic flag).
    """
    extras = extra_columns or {}
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([*fm.feature_names, "label", *extras.keys()])
        for i in range(fm.n_rows):
            row = [repr(float(v)) for v in fm.data[i]]
            row.append(fm.labels[i])
            row += [str(col[i]) for col in extras.values()]
            writer.writerow(row)


def read_feature_csv(path):
    """Read a feature CSV written by write_feature_csv; extras are ignored."""
    from .core import FeatureMatrix

    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise SchemaError(f"{path}: empty file") from None
        if "label" not in header:
            raise SchemaError(f"{path}: missing 'label' column")
        l_i = header.index("label")
        feature_names = header[:l_i]
        data, labels = [], []
        for row_num, row in enumerate(reader, start=2):
            if not row or all(c.strip() == "" for c in row):
                continue
            data.append([_parse_float(row[j], row_num, feature_names[j]) for j in range(l_i)])
            labels.append(row[l_i].strip())
    if not data:
        raise DataError(f"{path}: no data rows")
    return FeatureMatrix(np.asarray(data, float), labels, tuple(feature_names))
