"""Elastic products, the elastic inner product (eip), its norm and distance.

The general elastic product of ``A`` (length p) and ``B`` (length q) is the
value ``M[p, q]`` of the table::

    M[i, j] = alpha * M[i-1, j] + alpha * M[i, j-1] + beta * M[i-1, j-1]
              + f(a_i, b_j) * g(t_i, s_j)

with ``M[0, .] = M[., 0] = xi``.  ``alpha=1, beta=-1, xi=0`` with a symmetric
strictly positive ``g`` and an inner product ``f`` gives a genuine inner
product on U*; that instance is :func:`eip`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _numeric
from .series import TimeSeries, oplus, scale

__all__ = [
    "ElasticParams",
    "elastic_product",
    "eip",
    "eip_norm",
    "eip_distance",
    "eip_matrix",
    "euclidean_inner",
    "MAX_NESTING",
]

KERNELS = {"gaussian": _numeric.GAUSSIAN, "laplace": _numeric.LAPLACE}

#: deepest allowed chain of nested spatial products
MAX_NESTING = 1


@dataclass(frozen=True)
class ElasticParams:
    """Parameters of an elastic product.

    ``nu`` is the stiffness (1/time^2 for the gaussian time kernel).  When
    ``spatial`` is set, sample values are inner series compared with that
    nested product instead of the Euclidean dot product.  ``precision``
    (decimal digits) switches evaluation to mpmath arithmetic.
    """

    nu: float = 1.0
    kernel: str = "gaussian"
    alpha: float = 1.0
    beta: float = -1.0
    xi: float = 0.0
    spatial: Optional["ElasticParams"] = None
    precision: Optional[int] = None

    def __post_init__(self):
        if not (self.nu >= 0 and math.isfinite(self.nu)):
            raise ValueError(f"nu must be finite and >= 0, got {self.nu}")
        if self.kernel not in KERNELS:
            raise ValueError(f"unknown time kernel {self.kernel!r}")
        if self.precision is not None and self.precision < 15:
            raise ValueError("precision below double is pointless")
        depth, inner = 0, self.spatial
        while inner is not None:
            depth += 1
            inner = inner.spatial
        if depth > MAX_NESTING:
            raise ValueError(f"nesting depth {depth} exceeds {MAX_NESTING}")

    @property
    def is_eip(self):
        ok = self.alpha == 1 and self.beta == -1 and self.xi == 0
        return ok and (self.spatial is None or self.spatial.is_eip)

    def time_weight(self, t, s):
        d = t - s
        if self.kernel == "gaussian":
            return math.exp(-self.nu * (d * d))
        return math.exp(-self.nu * abs(d))


def _check_pair(A: TimeSeries, B: TimeSeries):
    if A.dim != B.dim:
        raise ValueError(f"dimension mismatch: {A.dim} vs {B.dim}")
    if not A.is_empty and not B.is_empty and A.nested != B.nested:
        raise ValueError("cannot pair a nested series with a flat one")
    for S in (A, B):
        if S.nested or S.is_empty:
            continue
        if S.is_object:
            if not all(_finite_mp(v) for v in S.values.ravel()):
                raise ValueError("non-finite sample value")
        elif not np.all(np.isfinite(S.values)):
            raise ValueError("non-finite sample value")


def _finite_mp(v):
    import mpmath

    return mpmath.isfinite(v)


def _canonical(A: TimeSeries, B: TimeSeries):
    """Order the pair so evaluation is identical for (A, B) and (B, A)."""
    if len(A) != len(B):
        return (A, B) if len(A) > len(B) else (B, A)
    ka = (A.times.tobytes(), A.values.tobytes())
    kb = (B.times.tobytes(), B.values.tobytes())
    return (A, B) if ka <= kb else (B, A)


def _float_values(S: TimeSeries):
    return S.values if S.values.dtype == np.float64 else S.values.astype(np.float64)


def _python_product(A, B, a, b, xi, local):
    """Literal recursion in whatever arithmetic ``local`` returns."""
    if len(A) < len(B):
        A, B = B, A
    q = len(B)
    prev = [xi] * (q + 1)
    for i in range(len(A)):
        cur = [xi] * (q + 1)
        for j in range(q):
            cur[j + 1] = (a * prev[j + 1] + a * cur[j]) + b * prev[j] + local(A, i, B, j)
        prev = cur
    return prev[q]


def _mp_local(params):
    import mpmath

    nu = mpmath.mpf(params.nu)
    gauss = params.kernel == "gaussian"

    def local(A, i, B, j):
        d = mpmath.mpf(A.times[i]) - mpmath.mpf(B.times[j])
        w = mpmath.exp(-nu * (d * d)) if gauss else mpmath.exp(-nu * abs(d))
        f = mpmath.fsum(mpmath.mpf(x) * mpmath.mpf(y) for x, y in zip(A.values[i], B.values[j]))
        return f * w

    return local


def _nested_local(params):
    inner = params.spatial

    def local(A, i, B, j):
        f = _evaluate(A.values[i], B.values[j], inner)
        return f * params.time_weight(A.times[i], B.times[j])

    return local


def _evaluate(A: TimeSeries, B: TimeSeries, params: ElasticParams):
    _check_pair(A, B)
    if A.is_empty or B.is_empty:
        return params.xi
    if A.nested or B.nested:
        if params.spatial is None:
            raise ValueError("nested series need params.spatial")
        return _python_product(A, B, params.alpha, params.beta, params.xi,
                               _nested_local(params))
    if params.spatial is not None:
        raise ValueError("params.spatial set but series values are not series")
    if params.precision is not None:
        import mpmath

        with mpmath.workdps(params.precision):
            mpf = mpmath.mpf
            return _python_product(A, B, mpf(params.alpha), mpf(params.beta), mpf(params.xi),
                                   _mp_local(params))
    kind = KERNELS[params.kernel]
    if params.is_eip:
        X, Y = _canonical(A, B)
        return float(_numeric.eip_pair(_float_values(X), X.times, _float_values(Y), Y.times,
                                       float(params.nu), kind))
    X, Y = (A, B) if len(A) >= len(B) else (B, A)
    return float(_numeric.ep_pair(_float_values(X), X.times, _float_values(Y), Y.times,
                                  float(params.nu), kind, float(params.alpha),
                                  float(params.beta), float(params.xi)))


def elastic_product(A: TimeSeries, B: TimeSeries, params: ElasticParams = ElasticParams()):
    """Value of the elastic product recursion for arbitrary (alpha, beta, xi).

    Runs in O(|A| |B|) time with two rolling rows of length min(|A|, |B|).
    """
    return _evaluate(A, B, params)


def eip(A: TimeSeries, B: TimeSeries, params: ElasticParams = ElasticParams()):
    """Elastic inner product of two series.

    Examples
    --------
    >>> eip(TimeSeries([2.0], [0.0]), TimeSeries([3.0], [0.0]))
    6.0
    """
    if not params.is_eip:
        raise ValueError("eip requires alpha=1, beta=-1, xi=0")
    return _evaluate(A, B, params)


def _sqrt(x):
    if isinstance(x, float):
        return math.sqrt(x)
    import mpmath

    return mpmath.sqrt(x)


def _magnitude(A: TimeSeries):
    # upper bound of |eip(A, A)| for flat series since 0 < g <= 1
    if A.nested or A.is_empty:
        return 1.0
    r = np.sqrt(np.sum(np.asarray(A.values, dtype=np.float64) ** 2, axis=1)).sum()
    return float(r * r)


def eip_norm(A: TimeSeries, params: ElasticParams = ElasticParams()):
    """Induced norm ``sqrt(eip(A, A))``.

    A self-product below ``-1e-12`` times its magnitude bound is an internal
    error; smaller negative values are rounding noise and read as zero.
    """
    v = eip(A, A, params)
    if v < 0:
        if v < -1e-12 * _magnitude(A):
            raise ArithmeticError(f"negative self-product {v!r}")
        return 0.0 * v
    return _sqrt(v)


def eip_distance(A: TimeSeries, B: TimeSeries, params: ElasticParams = ElasticParams(),
                 method="expansion"):
    """Distance induced by the eip.

    ``method="expansion"`` evaluates ``sqrt(<A,A> + <B,B> - 2<A,B>)``;
    ``method="oplus"`` evaluates the norm of ``A (+) (-1 (x) B)``.
    """
    if method == "oplus":
        return eip_norm(oplus(A, scale(-1, B)), params)
    if method != "expansion":
        raise ValueError(f"unknown method {method!r}")
    aa = eip(A, A, params)
    bb = eip(B, B, params)
    ab = eip(A, B, params)
    return _distance_from_products(aa, bb, ab)


def _distance_from_products(aa, bb, ab):
    sq = aa + bb - 2 * ab
    if sq < 0:
        if sq < -1e-10 * (abs(aa) + abs(bb)):
            raise ArithmeticError(f"negative squared distance {sq!r}")
        return 0.0 * sq
    return _sqrt(sq)


def eip_matrix(series, params: ElasticParams = ElasticParams(), others=None, threads=1):
    """Matrix of pairwise eip values.

    With ``others=None`` the result is the symmetric Gram matrix of
    ``series``, each unordered pair evaluated once.
    """
    series = list(series)
    if others is None:
        m = len(series)
        pairs = [(i, j) for i in range(m) for j in range(i, m)]
        vals = _map_pairs(lambda ij: eip(series[ij[0]], series[ij[1]], params), pairs, threads)
        out = np.empty((m, m), dtype=object if params.precision else np.float64)
        for (i, j), v in zip(pairs, vals):
            out[i, j] = out[j, i] = v
        return out
    others = list(others)
    pairs = [(i, j) for i in range(len(series)) for j in range(len(others))]
    vals = _map_pairs(lambda ij: eip(series[ij[0]], others[ij[1]], params), pairs, threads)
    out = np.empty((len(series), len(others)), dtype=object if params.precision else np.float64)
    for (i, j), v in zip(pairs, vals):
        out[i, j] = v
    return out


def _map_pairs(fn, items, threads):
    if threads and threads > 1 and len(items) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def euclidean_inner(A: TimeSeries, B: TimeSeries):
    """Dot product of two aligned series, summed with the same compensation
    as the eip kernel so that the large-stiffness limit matches bit for bit."""
    if len(A) != len(B) or not np.array_equal(A.times, B.times):
        raise ValueError("Euclidean inner product needs aligned series")
    if A.dim != B.dim:
        raise ValueError(f"dimension mismatch: {A.dim} vs {B.dim}")
    return float(_numeric.euclid_inner(_float_values(A), _float_values(B)))
