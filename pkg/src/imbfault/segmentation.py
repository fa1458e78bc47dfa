"""Slice a labeled series into fixed-length sliding windows."""

from __future__ import annotations

import logging
from collections import Counter

import numpy as np

from .core import WindowInstance
from .errors import ConfigError, DataError
from .ingestion import LabeledSeries

log = logging.getLogger(__name__)

LABEL_RULES = ("majority", "any_fault", "midpoint")


def window_label(labels, rule: str, default_label: str = "normal") -> str:
    """Label one window from its per-timestamp labels.

    majority   most frequent label; ties toward a fault label; a tie between
               two faults picks the lexicographically first (and is logged).
    any_fault  any non-default timestamp makes the window faulty (most
               frequent fault wins, ties as above).
    midpoint   label of the middle timestamp (lower middle for even length).
    """
    labels = [str(v) for v in labels]
    if not labels:
        raise DataError("empty window slice")
    if rule == "midpoint":
        return labels[(len(labels) - 1) // 2]
    counts = Counter(labels)
    fault_counts = {c: n for c, n in counts.items() if c != default_label}
    if rule == "any_fault":
        if not fault_counts:
            return default_label
        return _best_fault(fault_counts)
    if rule == "majority":
        if not fault_counts:
            return default_label
        best = _best_fault(fault_counts)
        if counts.get(default_label, 0) > fault_counts[best]:
            return default_label
        return best
    raise ConfigError(f"unknown window labeling rule {rule!r}")


def _best_fault(fault_counts: dict) -> str:
    top = max(fault_counts.values())
    tied = sorted(c for c, n in fault_counts.items() if n == top)
    if len(tied) > 1:
        log.warning("ambiguous window: fault labels %s tie at %d timestamps", tied, top)
    return tied[0]


def segment(series: LabeledSeries, window_len: int, slide_len: int,
            rule: str = "majority", default_label: str = "normal") -> list:
    """Windows start at 0, N, 2N, ... while start + L <= series length;
    trailing partial windows are dropped."""
    n_ticks = series.frame.n_ticks
    if slide_len < 1:
        raise DataError("slide length must be >= 1")
    if window_len < 1 or window_len > n_ticks:
        raise DataError(f"window length {window_len} outside [1, {n_ticks}]")
    if rule not in LABEL_RULES:
        raise ConfigError(f"unknown window labeling rule {rule!r}")
    values = series.frame.values
    windows = []
    for start in range(0, n_ticks - window_len + 1, slide_len):
        label = window_label(series.labels[start:start + window_len], rule, default_label)
        windows.append(WindowInstance(
            start_index=start,
            values=values[:, start:start + window_len],
            label=label,
        ))
    return windows


def window_starts(n_ticks: int, window_len: int, slide_len: int) -> np.ndarray:
    """Start indices produced by segment() for a series of the given length."""
    return np.arange(0, n_ticks - window_len + 1, slide_len)
