"""Kernels built on the eip and empirical definiteness checks."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .product import ElasticParams, _map_pairs, eip
from .series import LabeledDataset, TimeSeries

__all__ = [
    "KernelSpec",
    "kernel_eval",
    "gram_matrix",
    "PSDReport",
    "check_psd",
    "jacobi_eigenvalues",
    "centered_distance_matrix",
    "write_gram_csv",
    "write_precomputed_kernel",
]

KINDS = ("gaussian_eip", "gaussian_euclid", "polynomial_eip", "exp_eip", "exp_neg_distance_p")


@dataclass(frozen=True)
class KernelSpec:
    """Which kernel to evaluate and its parameters.

    ``sigma`` is the gaussian width, ``p`` the polynomial degree or the
    distance exponent, ``rate`` the multiplier of ``exp_neg_distance_p``.
    """

    kind: str = "gaussian_eip"
    params: ElasticParams = field(default_factory=ElasticParams)
    sigma: float = 1.0
    p: float = 1
    rate: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if not self.params.is_eip:
            raise ValueError("kernels need eip-mode parameters")
        if not self.sigma > 0:
            raise ValueError("sigma must be > 0")
        if self.kind == "polynomial_eip" and (self.p < 1 or int(self.p) != self.p):
            raise ValueError("polynomial degree must be a positive integer")
        if self.kind == "exp_neg_distance_p":
            if not 0 < self.p <= 2:
                raise ValueError("exp_neg_distance_p needs 0 < p <= 2")
            if not self.rate > 0:
                raise ValueError("rate must be > 0")


def _sq_distance(aa, bb, ab):
    return max(aa + bb - 2.0 * ab, 0.0)


def _euclid_sq(A: TimeSeries, B: TimeSeries):
    if len(A) != len(B) or not np.array_equal(A.times, B.times):
        raise ValueError("gaussian_euclid needs aligned series")
    d = A.values - B.values
    return float(np.sum(d * d))


def _transform(spec: KernelSpec, aa, bb, ab):
    kind = spec.kind
    if kind == "gaussian_eip":
        return math.exp(-_sq_distance(aa, bb, ab) / (2.0 * spec.sigma ** 2))
    if kind == "polynomial_eip":
        return ab ** int(spec.p)
    if kind == "exp_eip":
        return math.exp(ab)
    return math.exp(-spec.rate * math.sqrt(_sq_distance(aa, bb, ab)) ** spec.p)


def kernel_eval(spec: KernelSpec, A: TimeSeries, B: TimeSeries) -> float:
    """Evaluate the kernel on one pair; exactly symmetric in its arguments."""
    if spec.kind == "gaussian_euclid":
        return math.exp(-_euclid_sq(A, B) / (2.0 * spec.sigma ** 2))
    ab = eip(A, B, spec.params)
    if spec.kind in ("polynomial_eip", "exp_eip"):
        return _transform(spec, 0.0, 0.0, ab)
    return _transform(spec, eip(A, A, spec.params), eip(B, B, spec.params), ab)


def gram_matrix(spec: KernelSpec, dataset, threads=1) -> np.ndarray:
    """Symmetric ``m x m`` kernel matrix, one evaluation per unordered pair."""
    items = list(dataset.items if isinstance(dataset, LabeledDataset) else dataset)
    m = len(items)
    if m == 0:
        raise ValueError("empty dataset")
    pairs = [(i, j) for i in range(m) for j in range(i, m)]
    if spec.kind == "gaussian_euclid":
        vals = _map_pairs(lambda ij: kernel_eval(spec, items[ij[0]], items[ij[1]]), pairs, threads)
    else:
        prods = _map_pairs(lambda ij: eip(items[ij[0]], items[ij[1]], spec.params), pairs, threads)
        G = np.empty((m, m))
        for (i, j), v in zip(pairs, prods):
            G[i, j] = G[j, i] = v
        vals = [_transform(spec, G[i, i], G[j, j], G[i, j]) for i, j in pairs]
    K = np.empty((m, m))
    for (i, j), v in zip(pairs, vals):
        K[i, j] = K[j, i] = v
    return K


def jacobi_eigenvalues(A, tol=1e-12, max_sweeps=100):
    """Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.

    Sweeps stop once the off-diagonal Frobenius norm drops below
    ``tol * max(1, ||A||_F)``.  Returns eigenvalues in ascending order.
    """
    A = np.array(A, dtype=np.float64)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("square matrix required")
    if not np.allclose(A, A.T, rtol=0, atol=1e-12 * max(1.0, np.abs(A).max(initial=0))):
        raise ValueError("matrix is not symmetric")
    A = 0.5 * (A + A.T)
    bound = tol * max(1.0, np.linalg.norm(A))

    mask = ~np.eye(n, dtype=bool)

    def off(M):
        return float(np.linalg.norm(M[mask]))

    for _ in range(max_sweeps):
        if off(A) < bound:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                g = 100.0 * abs(apq)
                if g == 0.0 or (abs(A[p, p]) + g == abs(A[p, p]) and abs(A[q, q]) + g == abs(A[q, q])):
                    # negligible next to both diagonal entries
                    A[p, q] = A[q, p] = 0.0
                    continue
                h = A[q, q] - A[p, p]
                if abs(h) + g == abs(h):
                    t = apq / h
                else:
                    theta = h / (2.0 * apq)
                    t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(1.0, theta))
                c = 1.0 / math.hypot(1.0, t)
                s = t * c
                rp = A[p, :].copy()
                rq = A[q, :].copy()
                A[p, :] = c * rp - s * rq
                A[q, :] = s * rp + c * rq
                cp = A[:, p].copy()
                cq = A[:, q].copy()
                A[:, p] = c * cp - s * cq
                A[:, q] = s * cp + c * cq
                A[p, q] = A[q, p] = 0.0
    else:
        raise RuntimeError("Jacobi iteration did not converge")
    return np.sort(np.diag(A))


@dataclass(frozen=True)
class PSDReport:
    min_eigenvalue: float
    max_eigenvalue: float
    is_psd: bool
    eigenvalues: np.ndarray


def check_psd(matrix, tol=1e-8, method="jacobi") -> PSDReport:
    """PSD verdict: ``lambda_min >= -tol * max(1, lambda_max)``."""
    M = np.asarray(matrix, dtype=np.float64)
    if method == "jacobi":
        ev = jacobi_eigenvalues(M)
    elif method == "numpy":
        ev = np.linalg.eigvalsh(M)
    else:
        raise ValueError(f"unknown method {method!r}")
    lo, hi = float(ev[0]), float(ev[-1])
    return PSDReport(lo, hi, lo >= -tol * max(1.0, hi), ev)


def centered_distance_matrix(D):
    """``-1/2 J D^2 J`` for a distance matrix ``D`` (J the centering matrix).

    PSD exactly when the distance embeds in an inner-product space.
    """
    D = np.asarray(D, dtype=np.float64)
    m = D.shape[0]
    J = np.eye(m) - np.full((m, m), 1.0 / m)
    C = -0.5 * J @ (D * D) @ J
    return 0.5 * (C + C.T)


def write_gram_csv(path, K, ids):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["id", *ids])
        for i, row in zip(ids, K):
            w.writerow([i, *(repr(float(v)) for v in row)])


def write_precomputed_kernel(path, K, labels):
    """LIBSVM precomputed-kernel layout: ``label 0:serial 1:k(x,x1) ...``."""
    with open(path, "w", encoding="utf-8") as fh:
        for n, (label, row) in enumerate(zip(labels, K), start=1):
            cells = " ".join(f"{j}:{float(v)!r}" for j, v in enumerate(row, start=1))
            fh.write(f"{label} 0:{n} {cells}\n")
