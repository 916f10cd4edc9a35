"""Compiled inner loops.

Everything here works on plain float64 arrays; the public modules do the
validation and argument canonicalization.  Kernel codes: 0 = gaussian,
1 = laplace.
"""
import math

import numba as nb
import numpy as np

GAUSSIAN = 0
LAPLACE = 1

_jit = dict(nogil=True, cache=True)


@nb.njit(**_jit)
def time_weight(t, s, nu, kind):
    dt = t - s
    if kind == GAUSSIAN:
        return math.exp(-nu * (dt * dt))
    return math.exp(-nu * abs(dt))


@nb.njit(**_jit)
def _dot(a, i, b, j):
    acc = 0.0
    for k in range(a.shape[1]):
        acc += a[i, k] * b[j, k]
    return acc


@nb.njit(**_jit)
def _row_update(x, mh, mc):
    # One row of the alpha=1, beta=-1 recursion.  The running difference
    # D[j] = M[i, j] - M[i-1, j] obeys D[j] = D[j-1] + x[j], so
    # M[i, j] = M[i-1, j] + D[j].  Both accumulations carry a TwoSum error term.
    dh = 0.0
    dc = 0.0
    for j in range(x.shape[0]):
        xj = x[j]
        t = dh + xj
        z = t - dh
        dc += (dh - (t - z)) + (xj - z)
        dh = t
        m = mh[j]
        s = m + dh
        z = s - m
        mc[j] += ((m - (s - z)) + (dh - z)) + dc
        mh[j] = s


@nb.njit(**_jit)
def eip_pair(av, at, bv, bt, nu, kind):
    """Elastic inner product of two series; b is the inner (row) dimension."""
    p = av.shape[0]
    q = bv.shape[0]
    if p == 0 or q == 0:
        return 0.0
    mh = np.zeros(q)
    mc = np.zeros(q)
    x = np.empty(q)
    for i in range(p):
        ti = at[i]
        for j in range(q):
            x[j] = _dot(av, i, bv, j) * time_weight(ti, bt[j], nu, kind)
        _row_update(x, mh, mc)
    return mh[q - 1] + mc[q - 1]


@nb.njit(**_jit)
def eip_pair_table(av, bv, g):
    """Same recursion with the time weights precomputed in ``g`` (p x q)."""
    p = av.shape[0]
    q = bv.shape[0]
    mh = np.zeros(q)
    mc = np.zeros(q)
    x = np.empty(q)
    for i in range(p):
        for j in range(q):
            x[j] = _dot(av, i, bv, j) * g[i, j]
        _row_update(x, mh, mc)
    return mh[q - 1] + mc[q - 1]


@nb.njit(**_jit)
def ep_pair(av, at, bv, bt, nu, kind, alpha, beta, xi):
    """General elastic product, literal three-branch recursion."""
    p = av.shape[0]
    q = bv.shape[0]
    prev = np.full(q + 1, xi)
    cur = np.empty(q + 1)
    for i in range(p):
        cur[0] = xi
        ti = at[i]
        for j in range(q):
            x = _dot(av, i, bv, j) * time_weight(ti, bt[j], nu, kind)
            # pairing the two alpha branches keeps the result transpose-invariant
            cur[j + 1] = (alpha * prev[j + 1] + alpha * cur[j]) + beta * prev[j] + x
        prev, cur = cur, prev
    return prev[q]


@nb.njit(**_jit)
def euclid_inner(a, b):
    """Compensated sequential dot product of aligned sample rows."""
    s = 0.0
    c = 0.0
    for i in range(a.shape[0]):
        x = _dot(a, i, b, i)
        t = s + x
        z = t - s
        c += ((s - (t - z)) + (x - z)) + 0.0
        s = t
    return s + c


@nb.njit(**_jit)
def euclid_sq_distance(a, b):
    s = 0.0
    c = 0.0
    for i in range(a.shape[0]):
        x = 0.0
        for k in range(a.shape[1]):
            d = a[i, k] - b[i, k]
            x += d * d
        t = s + x
        z = t - s
        c += ((s - (t - z)) + (x - z)) + 0.0
        s = t
    return s + c


@nb.njit(**_jit)
def dtw_sq(a, b):
    """Accumulated squared-Euclidean DTW cost, symmetric unit steps."""
    p = a.shape[0]
    q = b.shape[0]
    prev = np.full(q + 1, np.inf)
    cur = np.empty(q + 1)
    prev[0] = 0.0
    for i in range(p):
        cur[0] = np.inf
        for j in range(q):
            c = 0.0
            for k in range(a.shape[1]):
                d = a[i, k] - b[j, k]
                c += d * d
            m = prev[j]
            if prev[j + 1] < m:
                m = prev[j + 1]
            if cur[j] < m:
                m = cur[j]
            cur[j + 1] = c + m
        prev, cur = cur, prev
    return prev[q]


@nb.njit(**_jit)
def token_eip(ia, pa, ib, pb, weights, nu):
    """Text-matching recursion; delta(a, b) = weights[a] when a == b else 0."""
    p = ia.shape[0]
    q = ib.shape[0]
    if p == 0 or q == 0:
        return 0.0
    mh = np.zeros(q)
    mc = np.zeros(q)
    x = np.empty(q)
    for i in range(p):
        for j in range(q):
            if ia[i] == ib[j]:
                dt = pa[i] - pb[j]
                x[j] = math.exp(-nu * (dt * dt)) * weights[ia[i]]
            else:
                x[j] = 0.0
        _row_update(x, mh, mc)
    return mh[q - 1] + mc[q - 1]


# --- batch loops used by the timing harness -------------------------------
# X has shape (m, n, d); all rows share one timestamp vector.


@nb.njit(**_jit)
def batch_ed(X):
    m = X.shape[0]
    out = np.zeros((m, m))
    for i in range(m):
        for j in range(i + 1, m):
            v = math.sqrt(euclid_sq_distance(X[i], X[j]))
            out[i, j] = v
            out[j, i] = v
    return out


@nb.njit(**_jit)
def batch_dtw(X):
    m = X.shape[0]
    out = np.zeros((m, m))
    for i in range(m):
        for j in range(i + 1, m):
            v = math.sqrt(dtw_sq(X[i], X[j]))
            out[i, j] = v
            out[j, i] = v
    return out


@nb.njit(**_jit)
def batch_eip(X, t, nu, kind):
    m = X.shape[0]
    n = t.shape[0]
    g = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            g[i, j] = time_weight(t[i], t[j], nu, kind)
    self_ = np.empty(m)
    for i in range(m):
        self_[i] = eip_pair_table(X[i], X[i], g)
    out = np.zeros((m, m))
    for i in range(m):
        for j in range(i + 1, m):
            sq = self_[i] + self_[j] - 2.0 * eip_pair_table(X[i], X[j], g)
            v = math.sqrt(sq) if sq > 0.0 else 0.0
            out[i, j] = v
            out[j, i] = v
    return out


@nb.njit(**_jit)
def batch_indexed(Q, V, self_q, self_v):
    """Distances from flattened queries Q to transformed corpus rows V."""
    mq = Q.shape[0]
    mv = V.shape[0]
    L = Q.shape[1]
    out = np.empty((mq, mv))
    for i in range(mq):
        for j in range(mv):
            acc = 0.0
            for k in range(L):
                acc += Q[i, k] * V[j, k]
            sq = self_q[i] + self_v[j] - 2.0 * acc
            out[i, j] = math.sqrt(sq) if sq > 0.0 else 0.0
    return out
