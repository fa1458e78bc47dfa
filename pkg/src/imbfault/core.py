"""Shared domain types and class-distribution utilities.

All container types copy their array arguments and mark them read-only, so
instances are immutable after construction and safe to share across threads.
Class labels are opaque strings; wherever an ordering is needed (majority
tie-breaks, classifier column order, dense ids) it is lexicographic.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import DataError


def _frozen_array(values, dtype=float, ndim=None) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    if ndim is not None and arr.ndim != ndim:
        raise DataError(f"expected a {ndim}-d array, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class TimeSeriesFrame:
    """Multichannel time series: `values` is (n_channels, n_ticks)."""

    timestamps: np.ndarray
    channel_names: tuple
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "timestamps", _frozen_array(self.timestamps, ndim=1))
        object.__setattr__(self, "channel_names", tuple(str(c) for c in self.channel_names))
        object.__setattr__(self, "values", _frozen_array(self.values, ndim=2))
        if self.values.shape != (len(self.channel_names), len(self.timestamps)):
            raise DataError(
                f"values shape {self.values.shape} does not match "
                f"{len(self.channel_names)} channels x {len(self.timestamps)} ticks"
            )
        if len(self.timestamps) == 0:
            raise DataError("empty time series")
        if np.any(np.diff(self.timestamps) <= 0):
            raise DataError("timestamps must be strictly increasing")
        if not np.all(np.isfinite(self.values)):
            raise DataError("channel values must be finite")

    @property
    def n_channels(self) -> int:
        return len(self.channel_names)

    @property
    def n_ticks(self) -> int:
        return len(self.timestamps)


@dataclass(frozen=True, order=True)
class FaultInterval:
    """Closed interval [t_start, t_end] carrying a class label.

    Orders by (t_start, t_end, label)."""

    t_start: float
    t_end: float
    label: str

    def __post_init__(self):
        if self.t_start > self.t_end:
            raise DataError(f"inverted interval ({self.t_start}, {self.t_end})")

    def contains(self, t) -> bool:
        return self.t_start <= t <= self.t_end


# Prognostic outputs share the interval shape; the alias keeps call sites readable.
FaultEvent = FaultInterval


@dataclass(frozen=True)
class WindowInstance:
    """One sliding-window slice: `values` is (n_channels, window_len)."""

    start_index: int
    values: np.ndarray
    label: str

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen_array(self.values, ndim=2))
        if self.values.shape[1] < 1:
            raise DataError("window length must be >= 1")
        if not np.all(np.isfinite(self.values)):
            raise DataError("window values must be finite")


@dataclass(frozen=True)
class FeatureMatrix:
    """(m, d) feature rows with aligned string labels and feature names."""

    data: np.ndarray
    labels: np.ndarray
    feature_names: tuple

    def __post_init__(self):
        object.__setattr__(self, "data", _frozen_array(self.data, ndim=2))
        labels = np.array([str(v) for v in np.asarray(self.labels).ravel()], dtype=object)
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "feature_names", tuple(str(n) for n in self.feature_names))
        if len(self.labels) != self.data.shape[0]:
            raise DataError("labels length must equal row count")
        if len(self.feature_names) != self.data.shape[1]:
            raise DataError("feature_names length must equal column count")
        if not np.all(np.isfinite(self.data)):
            raise DataError("feature values must be finite")

    @property
    def n_rows(self) -> int:
        return self.data.shape[0]

    @property
    def n_features(self) -> int:
        return self.data.shape[1]

    def classes(self) -> tuple:
        return tuple(sorted(set(self.labels)))

    def rows_of(self, label: str) -> np.ndarray:
        return np.asarray(self.data[self.labels == label])

    def select(self, idx) -> "FeatureMatrix":
        return FeatureMatrix(self.data[idx], self.labels[idx], self.feature_names)

    def with_data(self, data, feature_names=None) -> "FeatureMatrix":
        names = self.feature_names if feature_names is None else feature_names
        return FeatureMatrix(data, self.labels, names)


@dataclass(frozen=True)
class ClassDistribution:
    """Per-class counts plus imbalance ratios majority_count / class_count."""

    counts: dict
    majority_label: str
    ratios: dict

    @property
    def total(self) -> int:
        return sum(self.counts.values())


def class_distribution(labels) -> ClassDistribution:
    """Count classes; majority is the largest count, ties going to the
    lexicographically first label."""
    labels = [str(v) for v in np.asarray(labels).ravel()]
    if not labels:
        raise DataError("empty label vector")
    counts = dict(Counter(labels))
    majority = min(counts, key=lambda c: (-counts[c], c))
    ratios = {c: counts[majority] / counts[c] for c in counts}
    return ClassDistribution(counts=counts, majority_label=majority, ratios=ratios)


@dataclass
class SamplerParams:
    """Knobs shared by the neighbour-based oversamplers.

    k       SMOTE neighbour count.
    k1      neighbours used to drop noisy minority samples.
    k2      majority neighbours defining the borderline majority set.
    k3      minority neighbours defining the informative set; None means
            ceil(|S_min| / 2), resolved at sampling time.
    cp      cluster-size tuning constant (threshold = cp * mean nn distance).
    cf_th   closeness cutoff; cmax  closeness scale.
    n_synthetic  optional fixed per-class count overriding the balance rule.
    emi_ridge    ridge scale for the imputation Gaussian's covariance.
    """

    k: int = 5
    k1: int = 5
    k2: int = 3
    k3: int | None = None
    cp: float = 3.0
    cf_th: float = 5.0
    cmax: float = 2.0
    n_synthetic: int | None = None
    seed: int = 0
    emi_ridge: float = 1e-6

    def __post_init__(self):
        if self.k < 1 or self.k1 < 1 or self.k2 < 1:
            raise DataError("neighbor counts must be >= 1")
        if self.k3 is not None and self.k3 < 1:
            raise DataError("k3 must be >= 1 when given")
        if self.cp <= 0 or self.cf_th <= 0 or self.cmax <= 0:
            raise DataError("cp, cf_th and cmax must be positive")
        if self.n_synthetic is not None and self.n_synthetic < 0:
            raise DataError("n_synthetic must be >= 0")
        if self.emi_ridge < 0:
            raise DataError("emi_ridge must be >= 0")
