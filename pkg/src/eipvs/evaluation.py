"""Nearest-neighbour classification, stiffness selection and baselines."""
from __future__ import annotations

import math
from collections import Counter

import numpy as np

from . import _numeric
from .index import build_elastic_matrix
from .product import ElasticParams, _map_pairs, eip_distance
from .series import LabeledDataset, TimeSeries, _label_key, embed_on_grid

__all__ = [
    "NU_GRID",
    "euclidean_distance",
    "dtw_distance",
    "distance_matrix",
    "knn_classify",
    "knn_predict",
    "select_nu",
    "test_error",
    "confusion_matrix",
    "roc_auc",
    "cbf_generate",
    "CBF_CLASSES",
]

NU_GRID = (100.0, 10.0, 1.0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 0.0)
CBF_CLASSES = ("cylinder", "bell", "funnel")
DISTANCES = ("ed", "dtw", "eip")


def _float_values(S: TimeSeries):
    if S.nested or S.is_object:
        raise TypeError("plain float series required")
    return S.values


def euclidean_distance(A: TimeSeries, B: TimeSeries) -> float:
    """``sqrt(sum ||a_i - b_i||^2)`` for aligned series of equal length."""
    if len(A) != len(B) or not np.array_equal(A.times, B.times):
        raise ValueError("euclidean distance needs aligned series of equal length")
    if A.dim != B.dim:
        raise ValueError(f"dimension mismatch: {A.dim} vs {B.dim}")
    return math.sqrt(_numeric.euclid_sq_distance(_float_values(A), _float_values(B)))


def dtw_distance(A: TimeSeries, B: TimeSeries) -> float:
    """Unconstrained DTW, squared local cost, root of the accumulated cost."""
    if A.is_empty or B.is_empty:
        raise ValueError("dtw needs nonempty series")
    if A.dim != B.dim:
        raise ValueError(f"dimension mismatch: {A.dim} vs {B.dim}")
    return math.sqrt(_numeric.dtw_sq(_float_values(A), _float_values(B)))


def _shared_times(series):
    t0 = series[0].times
    return all(np.array_equal(s.times, t0) for s in series[1:])


def _eip_matrix_dense(X, Y, params, symmetric):
    # all series share one grid: eip(a, b) = a^T E b
    E = build_elastic_matrix(X[0].times, params.nu, params.kernel)
    dim = X[0].dim
    A = np.stack([embed_on_grid(s, E.grid) for s in X])
    EA = E.apply(A, dim)
    sa = np.einsum("ij,ij->i", A, EA)
    if symmetric:
        B, sb, cross = A, sa, A @ EA.T
        cross = 0.5 * (cross + cross.T)
    else:
        B = np.stack([embed_on_grid(s, E.grid) for s in Y])
        sb = np.einsum("ij,ij->i", B, E.apply(B, dim))
        cross = EA @ B.T
    sq = sa[:, None] + sb[None, :] - 2.0 * cross
    D = np.sqrt(np.maximum(sq, 0.0))
    if symmetric:
        np.fill_diagonal(D, 0.0)
    return D


def distance_matrix(X, Y=None, distance="eip", params: ElasticParams = ElasticParams(), threads=1):
    """Distances between the series of ``X`` (rows) and ``Y`` (columns).

    ``Y=None`` means ``Y = X``.  For ``eip`` the matrix form is used when every
    series shares one timestamp vector, the recursion otherwise.
    """
    if distance not in DISTANCES:
        raise ValueError(f"unknown distance {distance!r}; expected one of {DISTANCES}")
    X = list(X)
    symmetric = Y is None
    Y = X if symmetric else list(Y)
    if not X or not Y:
        return np.zeros((len(X), len(Y)))
    if distance == "eip" and params.precision is None and _shared_times(X + ([] if symmetric else Y)):
        if X[0].nested:
            raise TypeError("nested series need the recursive form")
        return _eip_matrix_dense(X, Y, params, symmetric)
    if distance == "ed":
        fn = euclidean_distance
    elif distance == "dtw":
        fn = dtw_distance
    else:
        def fn(a, b):
            return float(eip_distance(a, b, params))
    if symmetric:
        pairs = [(i, j) for i in range(len(X)) for j in range(i + 1, len(X))]
        D = np.zeros((len(X), len(X)))
        for (i, j), v in zip(pairs, _map_pairs(lambda ij: fn(X[ij[0]], X[ij[1]]), pairs, threads)):
            D[i, j] = D[j, i] = v
        return D
    pairs = [(i, j) for i in range(len(X)) for j in range(len(Y))]
    vals = _map_pairs(lambda ij: fn(X[ij[0]], Y[ij[1]]), pairs, threads)
    return np.asarray(vals, dtype=np.float64).reshape(len(X), len(Y))


def _vote(labels, dists):
    """Majority label; ties by smallest mean distance, then label order."""
    counts = Counter(labels)
    top = max(counts.values())
    tied = [l for l, c in counts.items() if c == top]
    if len(tied) == 1:
        return tied[0]

    def key(label):
        mean = np.mean([d for l, d in zip(labels, dists) if l == label])
        return (mean, _label_key(label))

    return min(tied, key=key)


def _neighbours(row, k, skip=None):
    order = [j for j in np.argsort(row, kind="stable") if j != skip]
    return order[:k]


def knn_predict(train: LabeledDataset, D: np.ndarray, k=1, leave_one_out=False):
    """Labels from a query-by-train distance matrix ``D``."""
    if len(train) == 0:
        raise ValueError("empty training set")
    if k < 1:
        raise ValueError("k must be >= 1")
    out = []
    for i, row in enumerate(np.asarray(D)):
        nn = _neighbours(row, k, skip=i if leave_one_out else None)
        out.append(_vote([train.labels[j] for j in nn], [row[j] for j in nn]))
    return out


def knn_classify(train: LabeledDataset, query: TimeSeries, k=1, distance="eip",
                 params: ElasticParams = ElasticParams()):
    """Predicted label of one query by ``k``-NN over ``train``."""
    D = distance_matrix([query], train.items, distance, params)
    return knn_predict(train, D, k)[0]


def _errors(truth, pred):
    return sum(1 for a, b in zip(truth, pred) if a != b)


def select_nu(train: LabeledDataset, grid=NU_GRID, kernel="gaussian", threads=1):
    """Leave-one-out 1-NN stiffness selection.

    Returns ``(nu, loo_error, errors_by_nu)``.  Ties go to the larger ``nu``.
    """
    if len(train) < 2:
        raise ValueError("leave-one-out needs at least 2 training items")
    grid = list(grid)
    if not grid:
        raise ValueError("empty stiffness grid")
    table = {}
    for nu in grid:
        D = distance_matrix(train.items, None, "eip", ElasticParams(nu=nu, kernel=kernel), threads)
        pred = knn_predict(train, D, 1, leave_one_out=True)
        table[nu] = _errors(train.labels, pred) / len(train)
    best = min(sorted(grid, reverse=True), key=lambda nu: table[nu])
    return best, table[best], table


def test_error(train: LabeledDataset, test: LabeledDataset, distance="eip",
               params: ElasticParams = ElasticParams(), k=1, threads=1, return_predictions=False):
    """Error rate of ``k``-NN on ``test``."""
    if len(test) == 0:
        raise ValueError("empty test set")
    D = distance_matrix(test.items, train.items, distance, params, threads)
    pred = knn_predict(train, D, k)
    err = _errors(test.labels, pred) / len(test)
    return (err, pred) if return_predictions else err


def confusion_matrix(truth, pred, classes=None):
    """``(classes, counts)`` with rows the true class, columns the prediction."""
    classes = list(classes or sorted(set(truth) | set(pred), key=_label_key))
    pos = {c: i for i, c in enumerate(classes)}
    M = np.zeros((len(classes), len(classes)), dtype=np.int64)
    for a, b in zip(truth, pred):
        M[pos[a], pos[b]] += 1
    return classes, M


def roc_auc(scored) -> float:
    """Area under the ROC curve from ``(score, is_positive)`` pairs.

    Rank form: the fraction of positive/negative pairs ordered correctly,
    ties counting one half.
    """
    scored = list(scored)
    pos = np.array([s for s, y in scored if y], dtype=np.float64)
    neg = np.array([s for s, y in scored if not y], dtype=np.float64)
    if pos.size == 0 or neg.size == 0:
        raise ValueError("need at least one positive and one negative")
    allv = np.concatenate([pos, neg])
    order = np.argsort(allv, kind="stable")
    ranks = np.empty(allv.size)
    sv = allv[order]
    i = 0
    while i < sv.size:
        j = i
        while j + 1 < sv.size and sv[j + 1] == sv[i]:
            j += 1
        ranks[order[i:j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    u = ranks[: pos.size].sum() - pos.size * (pos.size + 1) / 2.0
    return float(u / (pos.size * neg.size))


def cbf_generate(per_class=10, length=128, seed=0, epsilon=2.0 ** -52, name="CBF", split="train"):
    """Cylinder-Bell-Funnel series with index timestamps ``1..length``.

    Onset ``a ~ U[16, 32]``, duration ``b - a ~ U[32, 96]`` (scaled with
    ``length / 128``), amplitude ``6 + N(0, 1)``, unit gaussian noise.
    Items cycle through the three classes.  Exact zeros become ``epsilon``.
    """
    if per_class < 1 or length < 2:
        raise ValueError("per_class >= 1 and length >= 2 required")
    rng = np.random.default_rng(seed)
    t = np.arange(1, length + 1, dtype=np.float64)
    r = length / 128.0
    items, labels = [], []
    for _ in range(per_class):
        for cls in CBF_CLASSES:
            a = rng.uniform(16, 32) * r
            b = a + rng.uniform(32, 96) * r
            amp = 6.0 + rng.standard_normal()
            noise = rng.standard_normal(length)
            inside = (t >= a) & (t <= b)
            if cls == "cylinder":
                shape = inside.astype(float)
            elif cls == "bell":
                shape = inside * (t - a) / (b - a)
            else:
                shape = inside * (b - t) / (b - a)
            v = amp * shape + noise
            v[v == 0] = epsilon
            items.append(TimeSeries(v, t))
            labels.append(cls)
    return LabeledDataset(items, labels, name=name, split=split)
