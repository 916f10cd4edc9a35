"""Random data generators and slow reference implementations for the tests."""
import math

import numpy as np

from eipvs import TimeSeries


def nonzero_values(rng, n, d, low=None):
    v = rng.standard_normal((n, d))
    if low is not None:
        v = rng.uniform(low, 2.0, (n, d))
    v[v == 0] = 0.5
    return v


def random_series(rng, n, d=1, grid=None, low=None):
    """Random member of U*.  With ``grid`` the timestamps are a sorted random
    subset of it (so that sums of series share timestamps)."""
    if grid is None:
        t = np.cumsum(rng.uniform(0.1, 1.0, n))
    else:
        t = np.sort(rng.choice(grid, size=n, replace=False))
    return TimeSeries(nonzero_values(rng, n, d, low), t)


def double_sum_eip(A, B, nu, kernel="gaussian"):
    """eip as the plain double sum over sample pairs, summed with fsum."""
    terms = []
    for a, t in zip(A.values, A.times):
        for b, s in zip(B.values, B.times):
            dt = t - s
            g = math.exp(-nu * dt * dt) if kernel == "gaussian" else math.exp(-nu * abs(dt))
            terms.append(float(np.dot(a, b)) * g)
    return math.fsum(terms)


def unrolled_product(A, B, alpha, beta, xi, nu):
    """Literal recursion with a full (p+1) x (q+1) table."""
    p, q = len(A), len(B)
    M = [[xi] * (q + 1) for _ in range(p + 1)]
    for i in range(1, p + 1):
        for j in range(1, q + 1):
            dt = A.times[i - 1] - B.times[j - 1]
            f = float(np.dot(A.values[i - 1], B.values[j - 1]))
            M[i][j] = alpha * M[i - 1][j] + alpha * M[i][j - 1] + beta * M[i - 1][j - 1] + f * math.exp(-nu * dt * dt)
    return M[p][q]


def brute_tf_dot(A, B, weight=None):
    from collections import Counter

    ca, cb = Counter(A.tokens), Counter(B.tokens)
    w = weight or (lambda t: 1.0)
    return math.fsum(ca[t] * cb[t] * w(t) for t in ca if t in cb)
