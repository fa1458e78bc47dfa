"""Per-window statistical features in time, frequency and time-frequency domains.

Each channel of each window is a segment; a segment yields nine statistics:

    mean, rms, max, min, median, range,
    crest   = max|x| / rms,
    impulse = max|x| / mean|x|,
    margin  = max|x| / (mean sqrt|x|)^2.

The frequency domain applies the same nine to the unnormalized full-length
DFT magnitude spectrum; the time-frequency domain applies them to every
terminal subband of a wavelet packet tree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import FeatureMatrix
from .errors import ConfigError, DataError

STAT_NAMES = ("mean", "rms", "max", "min", "median", "range", "crest", "impulse", "margin")
DOMAINS = ("origin", "time", "frequency", "timefreq")

_SQRT2 = math.sqrt(2.0)
_SQRT3 = math.sqrt(3.0)

# Orthonormal analysis filters (low-pass); the high-pass is the quadrature
# mirror g_k = (-1)^k h_{L-1-k}.
WAVELETS = {
    "haar": np.array([1.0 / _SQRT2, 1.0 / _SQRT2]),
    "db2": np.array([(1 + _SQRT3), (3 + _SQRT3), (3 - _SQRT3), (1 - _SQRT3)]) / (4.0 * _SQRT2),
}


def time_stats(segment) -> np.ndarray:
    """The nine segment statistics, in STAT_NAMES order.

    The dimensionless factors (crest, impulse, margin) are defined as 0 on an
    all-zero segment so downstream matrices stay finite.
    """
    x = np.asarray(segment, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise DataError("segment must be a non-empty 1-d vector")
    if not np.all(np.isfinite(x)):
        raise DataError("segment must be finite")
    mean = x.mean()
    rms = math.sqrt(float(np.mean(x * x)))
    mx, mn = float(x.max()), float(x.min())
    s = np.sort(x)
    n = x.size
    median = float(s[n // 2]) if n % 2 else float((s[n // 2 - 1] + s[n // 2]) / 2.0)
    rng = mx - mn
    ax = np.abs(x)
    max_abs = float(ax.max())
    # Each factor is 0 when its denominator vanishes (all-zero segments, or
    # values tiny enough that the squares underflow to 0).
    mean_abs = float(ax.mean())
    mean_sqrt_sq = float(np.sqrt(ax).mean()) ** 2
    crest = max_abs / rms if rms > 0.0 else 0.0
    impulse = max_abs / mean_abs if mean_abs > 0.0 else 0.0
    margin = max_abs / mean_sqrt_sq if mean_sqrt_sq > 0.0 else 0.0
    return np.array([mean, rms, mx, mn, median, rng, crest, impulse, margin])


def fft_magnitude(segment) -> np.ndarray:
    """Unnormalized DFT magnitudes |X_k|, k = 0..l-1 (full spectrum)."""
    x = np.asarray(segment, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise DataError("segment must be a non-empty 1-d vector")
    return np.abs(np.fft.fft(x))


def freq_stats(segment) -> np.ndarray:
    return time_stats(fft_magnitude(segment))


def _filter_pair(wavelet: str):
    if wavelet not in WAVELETS:
        raise ConfigError(f"unsupported wavelet {wavelet!r}; available: {sorted(WAVELETS)}")
    lo = WAVELETS[wavelet]
    k = np.arange(len(lo))
    hi = ((-1.0) ** k) * lo[::-1]
    return lo, hi


def _wpt_step(x: np.ndarray, lo: np.ndarray, hi: np.ndarray):
    # Periodic extension; an odd-length signal wraps its first sample so the
    # filter bank always halves the (possibly padded) length.
    if len(x) % 2:
        x = np.concatenate([x, x[:1]])
    n = len(x)
    idx = (2 * np.arange(n // 2)[:, None] + np.arange(len(lo))[None, :]) % n
    tap = x[idx]
    return tap @ lo, tap @ hi


def wpt_decompose(segment, depth: int, wavelet: str = "haar") -> list:
    """Full wavelet-packet tree of the given depth.

    Both approximation and detail branches are recursed; the 2^depth terminal
    subbands come back in natural filter-bank order (all-approximation first).
    """
    x = np.asarray(segment, dtype=float)
    if depth < 1:
        raise DataError("depth must be >= 1")
    if x.size < 2 ** depth:
        raise DataError(f"segment of length {x.size} too short for depth {depth}")
    lo, hi = _filter_pair(wavelet)

    def recurse(v, d):
        if d == 0:
            return [v]
        a, dt = _wpt_step(v, lo, hi)
        return recurse(a, d - 1) + recurse(dt, d - 1)

    return recurse(x, depth)


def wpt_stats(segment, depth: int, wavelet: str = "haar") -> np.ndarray:
    """time_stats of each terminal subband, concatenated in subband order."""
    bands = wpt_decompose(segment, depth, wavelet)
    return np.concatenate([time_stats(b) for b in bands])


@dataclass
class FeatureConfig:
    """Which feature domains to compute per channel.

    `origin` flattens the raw window values; `timefreq` uses a wavelet packet
    tree of depth `wpt_depth`. Domains are always assembled in the canonical
    order origin, time, frequency, timefreq no matter how they were listed.
    """

    domains: tuple = ("time",)
    wpt_depth: int = 3
    wavelet: str = "haar"

    def __post_init__(self):
        domains = tuple(self.domains)
        unknown = [d for d in domains if d not in DOMAINS]
        if unknown:
            raise ConfigError(f"unknown feature domains {unknown}; available: {DOMAINS}")
        if not domains:
            raise ConfigError("at least one feature domain required")
        self.domains = tuple(d for d in DOMAINS if d in domains)
        if "timefreq" in self.domains:
            if self.wpt_depth < 1:
                raise ConfigError("wpt_depth must be >= 1 for the timefreq domain")
            _filter_pair(self.wavelet)


def _channel_features(x: np.ndarray, config: FeatureConfig):
    blocks, names = [], []
    for domain in config.domains:
        if domain == "origin":
            blocks.append(x)
            names += [f"origin.t{i}" for i in range(len(x))]
        elif domain == "time":
            blocks.append(time_stats(x))
            names += [f"time.{s}" for s in STAT_NAMES]
        elif domain == "frequency":
            blocks.append(freq_stats(x))
            names += [f"freq.{s}" for s in STAT_NAMES]
        else:
            blocks.append(wpt_stats(x, config.wpt_depth, config.wavelet))
            names += [f"wpt{b}.{s}"
                      for b in range(2 ** config.wpt_depth) for s in STAT_NAMES]
    return np.concatenate(blocks), names


def featurize(windows, config: FeatureConfig) -> FeatureMatrix:
    """One FeatureMatrix row per window; channel-major feature layout with
    deterministic names like ``ch3.time.rms``."""
    if not windows:
        raise DataError("no windows to featurize")
    shape = windows[0].values.shape
    if any(w.values.shape != shape for w in windows):
        raise DataError("windows must share channel count and length")
    n_channels = shape[0]
    rows, labels = [], []
    feature_names = None
    for w in windows:
        parts, names = [], []
        for ch in range(n_channels):
            block, block_names = _channel_features(w.values[ch], config)
            parts.append(block)
            names += [f"ch{ch}.{n}" for n in block_names]
        rows.append(np.concatenate(parts))
        labels.append(w.label)
        if feature_names is None:
            feature_names = tuple(names)
    return FeatureMatrix(np.vstack(rows), labels, feature_names)


@dataclass
class Standardizer:
    """Per-column z-score fitted on training rows only.

    Zero-variance columns keep scale 1 so transforms stay finite.
    """

    mean_: np.ndarray = field(default=None, repr=False)
    scale_: np.ndarray = field(default=None, repr=False)

    def fit(self, X) -> "Standardizer":
        X = np.asarray(X, dtype=float)
        self.mean_ = X.mean(axis=0)
        scale = X.std(axis=0)
        scale[scale == 0.0] = 1.0
        self.scale_ = scale
        return self

    def transform(self, X) -> np.ndarray:
        if self.mean_ is None:
            raise DataError("standardizer not fitted")
        X = np.asarray(X, dtype=float)
        if X.shape[1] != self.mean_.shape[0]:
            raise DataError("column count does not match the fitted standardizer")
        return (X - self.mean_) / self.scale_
