"""Oversamplers and their shared neighbour/cluster machinery.

Five generators are provided: plain random duplication, SMOTE interpolation,
imputation-based generation (emicil), weighted cluster interpolation
(mwmote) and the weighted imputation sampler (ewmote) that combines the
selection weights of mwmote with the Gaussian imputation generator.

All neighbour searches are brute-force exact, with distance ties broken by
lower row index, so results are deterministic given (inputs, seed).
Degenerate inputs fall back down a documented ladder instead of failing:
ewmote -> emicil -> random duplication, mwmote -> smote -> random.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .core import FeatureMatrix, SamplerParams, class_distribution
from .errors import ConfigError, DataError
from .imputation import fit_gaussian, impute_conditional
from .rng import Pcg32

METHODS = ("none", "random", "smote", "emicil", "mwmote", "ewmote")


def _rows(x, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 2:
        raise DataError(f"{name} must be a 2-d row array")
    return arr


def _cross_sq_dists(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Squared Euclidean distances, shape (len(a), len(b)).

    Quadratic expansion instead of a (n, m, d) difference tensor so large
    minority/majority sets stay within memory; clipped at 0 against float
    cancellation."""
    sq_a = np.einsum("ij,ij->i", a, a)
    sq_b = np.einsum("ij,ij->i", b, b)
    d2 = sq_a[:, None] + sq_b[None, :] - 2.0 * (a @ b.T)
    return np.clip(d2, 0.0, None, out=d2)


def knn(query, pool, k: int) -> np.ndarray:
    """Indices of the k nearest pool rows; exact ties go to the lower index.

    The query must not itself be a pool member when searching within its own
    set; callers exclude it before the call.
    """
    pool = _rows(pool, "pool")
    query = np.asarray(query, dtype=float)
    if k < 1:
        raise DataError("k must be >= 1")
    if k > len(pool):
        raise DataError(f"k={k} exceeds pool size {len(pool)}")
    d2 = np.einsum("ij,ij->i", pool - query, pool - query)
    return np.argsort(d2, kind="stable")[:k]


def _knn_rows(queries: np.ndarray, pool: np.ndarray, k: int) -> np.ndarray:
    """Row-wise k nearest pool indices for many queries (stable ties)."""
    d2 = _cross_sq_dists(queries, pool)
    return np.argsort(d2, axis=1, kind="stable")[:, :k]


def random_oversample(s_min, n: int, rng: Pcg32) -> np.ndarray:
    """n exact copies of minority rows, sampled with replacement."""
    s_min = _rows(s_min, "s_min")
    if len(s_min) == 0:
        raise DataError("cannot oversample an empty minority set")
    out = np.empty((n, s_min.shape[1]))
    for t in range(n):
        out[t] = s_min[rng.randint(len(s_min))]
    return out


def smote(s_min, n: int, k: int, rng: Pcg32) -> np.ndarray:
    """n interpolated rows x + alpha * (z - x), z one of x's k minority
    neighbours, alpha uniform in [0, 1)."""
    s_min = _rows(s_min, "s_min")
    if n == 0:
        return np.empty((0, s_min.shape[1]))
    if len(s_min) < 2:
        warnings.warn("smote needs >= 2 minority rows; falling back to random duplication")
        return random_oversample(s_min, n, rng)
    k_eff = min(k, len(s_min) - 1)
    if k_eff < k:
        warnings.warn(f"smote k clipped from {k} to {k_eff}")
    d2 = _cross_sq_dists(s_min, s_min)
    np.fill_diagonal(d2, np.inf)
    nbrs = np.argsort(d2, axis=1, kind="stable")[:, :k_eff]
    out = np.empty((n, s_min.shape[1]))
    for t in range(n):
        i = rng.randint(len(s_min))
        z = s_min[nbrs[i][rng.randint(k_eff)]]
        alpha = rng.random()
        out[t] = s_min[i] + alpha * (z - s_min[i])
    return out


def filtered_minority(s_min, s_maj, k1: int) -> np.ndarray:
    """Indices of minority rows that keep at least one minority row among
    their k1 nearest neighbours in the pooled set (self excluded)."""
    s_min = _rows(s_min, "s_min")
    s_maj = _rows(s_maj, "s_maj")
    n_min = len(s_min)
    pooled = np.vstack([s_min, s_maj]) if len(s_maj) else s_min
    k1_eff = min(k1, len(pooled) - 1)
    if k1_eff < 1:
        return np.empty(0, dtype=int)
    d2 = _cross_sq_dists(s_min, pooled)
    d2[np.arange(n_min), np.arange(n_min)] = np.inf    # minority i sits at pooled position i
    nbrs = np.argsort(d2, axis=1, kind="stable")[:, :k1_eff]
    keep = np.any(nbrs < n_min, axis=1)
    return np.flatnonzero(keep)


def borderline_majority(s_minf, s_maj, k2: int) -> np.ndarray:
    """Sorted unique indices (into s_maj) of the k2 nearest majority rows of
    each filtered minority row."""
    s_minf = _rows(s_minf, "s_minf")
    s_maj = _rows(s_maj, "s_maj")
    if len(s_minf) == 0 or len(s_maj) == 0:
        return np.empty(0, dtype=int)
    k2_eff = min(k2, len(s_maj))
    if k2_eff < k2:
        warnings.warn(f"k2 clipped from {k2} to {k2_eff}")
    return np.unique(_knn_rows(s_minf, s_maj, k2_eff))


def informative_minority(s_bmaj, s_minf, k3: int) -> np.ndarray:
    """Sorted unique indices (into s_minf) of the k3 nearest filtered-minority
    rows of each borderline majority row."""
    s_bmaj = _rows(s_bmaj, "s_bmaj")
    s_minf = _rows(s_minf, "s_minf")
    if len(s_bmaj) == 0 or len(s_minf) == 0:
        return np.empty(0, dtype=int)
    k3_eff = min(k3, len(s_minf))
    if k3_eff < k3:
        warnings.warn(f"k3 clipped from {k3} to {k3_eff}")
    return np.unique(_knn_rows(s_bmaj, s_minf, k3_eff))


def closeness_factor(y, x, cf_th: float, cmax: float) -> float:
    """Capped reciprocal of the dimension-normalized distance, rescaled so the
    cap maps to cmax. Zero distance hits the cap."""
    y = np.asarray(y, dtype=float)
    x = np.asarray(x, dtype=float)
    d_n = float(np.linalg.norm(y - x)) / y.size
    recip = math.inf if d_n == 0.0 else 1.0 / d_n
    return min(recip, cf_th) / cf_th * cmax


def information_weight(y, x_index: int, s_imin, nmin_indices, cf_th: float, cmax: float) -> float:
    """I_w for one (borderline-majority y, informative-minority x) pair.

    nmin_indices are the indices (into s_imin) of y's nearest-minority set;
    rows outside it contribute zero closeness. The weight is the closeness of
    x times its share of y's total closeness.
    """
    s_imin = _rows(s_imin, "s_imin")
    cf = np.zeros(len(s_imin))
    for q in np.unique(np.asarray(nmin_indices, dtype=int)):
        cf[q] = closeness_factor(y, s_imin[q], cf_th, cmax)
    total = cf.sum()
    if total == 0.0 or cf[x_index] == 0.0:
        return 0.0
    return float(cf[x_index] * cf[x_index] / total)


@dataclass(frozen=True)
class WeightedMinoritySet:
    """Informative minority rows with their selection weights.

    Index arrays tie the rows back to the caller's sets: minf_indices and
    imin_indices index s_min, bmaj_indices indexes s_maj, imin_in_minf
    indexes the filtered set. nmin_member[i, j] says whether informative row
    j belongs to the nearest-minority set of borderline row i.
    """

    s_imin: np.ndarray
    s_bmaj: np.ndarray
    weights: np.ndarray
    probabilities: np.ndarray
    minf_indices: np.ndarray
    bmaj_indices: np.ndarray
    imin_in_minf: np.ndarray
    imin_indices: np.ndarray
    nmin_member: np.ndarray

    def __post_init__(self):
        if len(self.probabilities) and abs(self.probabilities.sum() - 1.0) > 1e-9:
            raise DataError("selection probabilities must sum to 1")

    @property
    def is_empty(self) -> bool:
        return len(self.s_imin) == 0


def _empty_weighted_set(d: int, minf_indices=None) -> WeightedMinoritySet:
    empty_i = np.empty(0, dtype=int)
    return WeightedMinoritySet(
        s_imin=np.empty((0, d)), s_bmaj=np.empty((0, d)),
        weights=np.empty(0), probabilities=np.empty(0),
        minf_indices=empty_i if minf_indices is None else minf_indices,
        bmaj_indices=empty_i, imin_in_minf=empty_i, imin_indices=empty_i,
        nmin_member=np.empty((0, 0), dtype=bool),
    )


def selection_probabilities(s_min, s_maj, params: SamplerParams) -> WeightedMinoritySet:
    """Run the weighting cascade: filter noisy minority rows, find borderline
    majority rows, collect the informative minority set and normalize its
    summed information weights into selection probabilities."""
    s_min = _rows(s_min, "s_min")
    s_maj = _rows(s_maj, "s_maj")
    d = s_min.shape[1]

    minf_idx = filtered_minority(s_min, s_maj, params.k1)
    if len(minf_idx) == 0:
        return _empty_weighted_set(d)
    s_minf = s_min[minf_idx]

    bmaj_idx = borderline_majority(s_minf, s_maj, params.k2)
    if len(bmaj_idx) == 0:
        return _empty_weighted_set(d, minf_idx)
    s_bmaj = s_maj[bmaj_idx]

    k3 = params.k3 if params.k3 is not None else math.ceil(len(s_min) / 2)
    k3_eff = min(k3, len(s_minf))
    nmin = _knn_rows(s_bmaj, s_minf, k3_eff)           # (n_bmaj, k3) into s_minf
    imin_in_minf = np.unique(nmin)
    s_imin = s_minf[imin_in_minf]

    pos = {int(j): p for p, j in enumerate(imin_in_minf)}
    member = np.zeros((len(s_bmaj), len(s_imin)), dtype=bool)
    for i in range(len(s_bmaj)):
        for j in nmin[i]:
            member[i, pos[int(j)]] = True

    dist = np.sqrt(_cross_sq_dists(s_bmaj, s_imin)) / d
    with np.errstate(divide="ignore"):
        recip = np.where(dist > 0.0, 1.0 / np.where(dist > 0.0, dist, 1.0), np.inf)
    cf = np.minimum(recip, params.cf_th) / params.cf_th * params.cmax
    cf = np.where(member, cf, 0.0)
    row_sums = cf.sum(axis=1, keepdims=True)
    iw = np.divide(cf * cf, row_sums, out=np.zeros_like(cf), where=row_sums > 0)
    weights = iw.sum(axis=0)
    total = weights.sum()
    if total <= 0.0:
        warnings.warn("no borderline structure: uniform selection probabilities")
        probs = np.full(len(s_imin), 1.0 / len(s_imin))
    else:
        probs = weights / total
    return WeightedMinoritySet(
        s_imin=s_imin, s_bmaj=s_bmaj, weights=weights, probabilities=probs,
        minf_indices=minf_idx, bmaj_indices=bmaj_idx,
        imin_in_minf=imin_in_minf, imin_indices=minf_idx[imin_in_minf],
        nmin_member=member,
    )


def agglomerative_clusters(points, cp: float) -> np.ndarray:
    """Average-linkage agglomeration; merging stops once the smallest
    inter-cluster distance exceeds cp times the mean nearest-neighbour
    distance. Returns one cluster id per row, numbered by first member."""
    points = _rows(points, "points")
    n = len(points)
    if n == 0:
        raise DataError("cannot cluster an empty set")
    if n == 1:
        return np.zeros(1, dtype=int)
    dist = np.sqrt(_cross_sq_dists(points, points))
    np.fill_diagonal(dist, np.inf)
    d_avg = dist.min(axis=1).mean()
    threshold = d_avg * cp

    cd = dist.copy()
    size = np.ones(n)
    active = np.ones(n, dtype=bool)
    members = [[i] for i in range(n)]
    idx = np.arange(n)
    while active.sum() > 1:
        flat = int(np.argmin(cd))
        i, j = divmod(flat, n)
        if cd[i, j] > threshold:
            break
        # Lance-Williams average-linkage update, merging j into i (i < j).
        ks = idx[active & (idx != i) & (idx != j)]
        if len(ks):
            merged = (size[i] * cd[i, ks] + size[j] * cd[j, ks]) / (size[i] + size[j])
            cd[i, ks] = merged
            cd[ks, i] = merged
        size[i] += size[j]
        members[i] += members[j]
        active[j] = False
        cd[j, :] = np.inf
        cd[:, j] = np.inf
    labels = np.empty(n, dtype=int)
    clusters = sorted((members[i] for i in idx[active]), key=min)
    for cid, rows in enumerate(clusters):
        labels[rows] = cid
    return labels


def mwmote(s_maj, s_min, n: int, params: SamplerParams, rng: Pcg32) -> np.ndarray:
    """n synthetic rows interpolated between a weighted base sample and a
    uniform partner from the base's filtered-minority cluster."""
    s_min = _rows(s_min, "s_min")
    s_maj = _rows(s_maj, "s_maj")
    d = s_min.shape[1]
    if n == 0:
        return np.empty((0, d))
    if len(s_min) < 2:
        warnings.warn("mwmote needs >= 2 minority rows; falling back to random duplication")
        return random_oversample(s_min, n, rng)
    wset = selection_probabilities(s_min, s_maj, params)
    if wset.is_empty:
        warnings.warn("mwmote found no informative minority rows; falling back to smote")
        return smote(s_min, n, params.k, rng)
    s_minf = s_min[wset.minf_indices]
    clusters = agglomerative_clusters(s_minf, params.cp)
    cum = np.cumsum(wset.probabilities)
    out = np.empty((n, d))
    for t in range(n):
        u = rng.random() * cum[-1]
        b = min(int(np.searchsorted(cum, u, side="right")), len(cum) - 1)
        base_pos = int(wset.imin_in_minf[b])
        pool = np.flatnonzero(clusters == clusters[base_pos])
        partner = int(pool[rng.randint(len(pool))])
        x = s_minf[base_pos]
        z = s_minf[partner]
        out[t] = x + rng.random() * (z - x)
    return out


def emicil(s_min, n: int, rng: Pcg32, ridge_scale: float = 1e-6) -> np.ndarray:
    """n rows built by masking one uniformly chosen attribute of a uniformly
    chosen minority row and filling it with the conditional Gaussian mean."""
    s_min = _rows(s_min, "s_min")
    d = s_min.shape[1]
    if n == 0:
        return np.empty((0, d))
    if len(s_min) < 2 or d < 2:
        warnings.warn("emicil needs >= 2 rows and >= 2 attributes; falling back to random duplication")
        return random_oversample(s_min, n, rng)
    model = fit_gaussian(s_min, ridge_scale)
    out = np.empty((n, d))
    for t in range(n):
        i = rng.randint(len(s_min))
        attr = rng.randint(d)
        out[t] = impute_conditional(model, s_min[i], [attr])
    return out


def ewmote(s_maj, s_min, n: int, params: SamplerParams, rng: Pcg32) -> np.ndarray:
    """The oversampled minority set: the original rows followed by n rows
    generated by weighted base selection plus single-attribute imputation.

    Per generated row the draw order is fixed: one uniform selects the base
    from the informative set by selection probability, one bounded draw picks
    the masked attribute. The Gaussian is fitted on the whole minority set.
    """
    s_min = _rows(s_min, "s_min")
    s_maj = _rows(s_maj, "s_maj")
    d = s_min.shape[1]
    if n == 0:
        return s_min.copy()
    if len(s_min) < 2:
        warnings.warn("ewmote needs >= 2 minority rows; falling back to random duplication")
        return np.vstack([s_min, random_oversample(s_min, n, rng)])
    if d < 2:
        warnings.warn("ewmote needs >= 2 attributes; falling back to random duplication")
        return np.vstack([s_min, random_oversample(s_min, n, rng)])
    wset = selection_probabilities(s_min, s_maj, params)
    if wset.is_empty:
        warnings.warn("ewmote found no informative minority rows; falling back to emicil")
        return np.vstack([s_min, emicil(s_min, n, rng, params.emi_ridge)])
    model = fit_gaussian(s_min, params.emi_ridge)
    cum = np.cumsum(wset.probabilities)
    synth = np.empty((n, d))
    for t in range(n):
        u = rng.random() * cum[-1]
        b = min(int(np.searchsorted(cum, u, side="right")), len(cum) - 1)
        attr = rng.randint(d)
        synth[t] = impute_conditional(model, wset.s_imin[b], [attr])
    return np.vstack([s_min, synth])


def resample_multiclass(fm: FeatureMatrix, method: str, params: SamplerParams,
                        rng: Pcg32) -> FeatureMatrix:
    """Raise every non-majority class to the majority count with `method`.

    Each class is oversampled against all remaining rows using its own child
    random stream (classes in sorted order), so per-class work is independent
    and parallelizable. Original rows come first in the output, synthetics
    follow grouped by class.
    """
    if method not in METHODS:
        raise ConfigError(f"unknown sampler {method!r}; available: {METHODS}")
    if method == "none":
        return fm
    dist = class_distribution(fm.labels)
    target = dist.counts[dist.majority_label]
    blocks = [fm.data]
    label_blocks = [list(fm.labels)]
    for ci, c in enumerate(sorted(cl for cl in dist.counts if cl != dist.majority_label)):
        n_new = params.n_synthetic if params.n_synthetic is not None else target - dist.counts[c]
        if n_new <= 0:
            continue
        s_min = fm.data[fm.labels == c]
        s_maj = fm.data[fm.labels != c]
        crng = rng.child(ci)
        if method == "random":
            synth = random_oversample(s_min, n_new, crng)
        elif method == "smote":
            synth = smote(s_min, n_new, params.k, crng)
        elif method == "emicil":
            synth = emicil(s_min, n_new, crng, params.emi_ridge)
        elif method == "mwmote":
            synth = mwmote(s_maj, s_min, n_new, params, crng)
        else:
            synth = ewmote(s_maj, s_min, n_new, params, crng)[len(s_min):]
        blocks.append(synth)
        label_blocks.append([c] * n_new)
    data = np.vstack(blocks)
    labels = [lab for block in label_blocks for lab in block]
    return FeatureMatrix(data, labels, fm.feature_names)
