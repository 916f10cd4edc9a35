"""Gram-Schmidt orthonormalisation inside an elastic inner product space.

Combinations are formed with the series algebra itself, so intermediate
series may grow (timestamps of all inputs merge) and exact cancellations
drop samples.  Families that are badly conditioned under the elastic
matrix (small stiffness on a short time span) need ``params.precision``.
"""
from __future__ import annotations

import math

import numpy as np

from .product import ElasticParams, eip, eip_norm
from .series import TimeSeries, oplus, scale

__all__ = [
    "LinearDependenceError",
    "gram_schmidt",
    "make_spike_basis",
    "make_sincos_basis",
    "DEFAULT_EPSILON",
]

DEFAULT_EPSILON = 2.0 ** -52


class LinearDependenceError(ValueError):
    def __init__(self, index, ratio):
        super().__init__(f"family member {index} is linearly dependent on its predecessors "
                         f"(residual/input norm = {float(ratio):.3g})")
        self.index = index
        self.ratio = ratio


def _to_precision(S: TimeSeries, mpmath):
    return TimeSeries(np.vectorize(mpmath.mpf, otypes=[object])(S.values), S.times)


def gram_schmidt(family, params: ElasticParams = ElasticParams(), tol=None):
    """Orthonormalise ``family`` with the eip (modified Gram-Schmidt).

    Parameters
    ----------
    family : sequence of TimeSeries
    params : ElasticParams
        eip-mode parameters.  With ``precision`` set, values are converted to
        mpmath numbers and every step runs at that many digits.
    tol : float, optional
        Relative residual below which a member counts as dependent.  Defaults
        to ``1e-10`` in double precision, ``10**(-precision/2)`` otherwise.

    Raises
    ------
    LinearDependenceError
        With the index of the first dependent member.
    """
    if not params.is_eip:
        raise ValueError("gram_schmidt needs eip-mode parameters")
    if params.precision is None:
        return _mgs(list(family), params, 1e-10 if tol is None else tol, math.sqrt)
    import mpmath

    with mpmath.workdps(params.precision):
        fam = [_to_precision(s, mpmath) for s in family]
        t = mpmath.mpf(10) ** (-(params.precision // 2)) if tol is None else mpmath.mpf(tol)
        return _mgs(fam, params, t, mpmath.sqrt)


def _mgs(family, params, tol, sqrt):
    out = []
    for k, v in enumerate(family):
        w = v
        for q in out:
            c = eip(w, q, params)
            w = oplus(w, scale(-c, q))
        vn = eip_norm(v, params)
        wn2 = eip(w, w, params)
        wn = sqrt(wn2) if wn2 > 0 else 0 * wn2
        if vn == 0 or wn <= tol * vn:
            raise LinearDependenceError(k, wn / vn if vn else 0.0)
        out.append(scale(1 / wn, w))
    return out


def make_spike_basis(count=11, epsilon=DEFAULT_EPSILON):
    """Family of ``count`` series of growing length on ``[0, 1]``.

    Member ``k`` (1-based) has ``k`` samples at timestamps ``0, h, ..., (k-1)h``
    with ``h = 1/(count-1)``; every value is ``epsilon`` except the last, 1.
    """
    if count < 1 or not epsilon > 0:
        raise ValueError("count >= 1 and epsilon > 0 required")
    t = np.arange(count) / (count - 1) if count > 1 else np.zeros(1)
    fam = []
    for k in range(1, count + 1):
        vals = np.full(k, float(epsilon))
        vals[-1] = 1.0
        fam.append(TimeSeries(vals, t[:k]))
    return fam


def make_sincos_basis(pairs=4, length=128, epsilon=DEFAULT_EPSILON):
    """``sin``/``cos`` pairs of frequency ``1..pairs`` sampled uniformly on ``[0, 1]``.

    Exact zeros are replaced by ``epsilon`` so that every member is in U*.
    Order: ``sin1, cos1, sin2, cos2, ...``.
    """
    if pairs < 1 or length < 2:
        raise ValueError("pairs >= 1 and length >= 2 required")
    i = np.arange(length)
    t = i / (length - 1)
    fam = []
    for k in range(1, pairs + 1):
        for f in (np.sin, np.cos):
            v = f(2.0 * np.pi * k * i / length)
            v[v == 0] = epsilon
            fam.append(TimeSeries(v, t))
    return fam
