"""Wall-clock scaling of the distance computations.

Each measurement computes a full pairwise distance matrix over ``n_series``
random series of one length; the reported value is the median of
``repeats`` runs after a warm-up call.  Distances: ``ed``, ``dtw``, ``eip``
(recursion, time weights tabulated once per grid) and ``ieip`` (queries
scored against a prebuilt index, the index build is not timed).
"""
from __future__ import annotations

import csv
import statistics
import time
from dataclasses import dataclass

import numpy as np

from . import _numeric
from .index import build_elastic_matrix

__all__ = ["TimingRow", "timing_bench", "growth_exponent", "write_timing_csv", "BENCH_DISTANCES"]

BENCH_DISTANCES = ("ed", "dtw", "eip", "ieip")


@dataclass(frozen=True)
class TimingRow:
    distance: str
    length: int
    seconds: float


def _runner(distance, X, t, nu):
    if distance == "ed":
        return lambda: _numeric.batch_ed(X)
    if distance == "dtw":
        return lambda: _numeric.batch_dtw(X)
    if distance == "eip":
        return lambda: _numeric.batch_eip(X, t, nu, _numeric.GAUSSIAN)
    if distance == "ieip":
        E = build_elastic_matrix(t, nu)
        Q = np.ascontiguousarray(X[:, :, 0])
        V = np.ascontiguousarray(Q @ E.entries)
        s = np.einsum("ij,ij->i", Q, V)
        return lambda: _numeric.batch_indexed(Q, V, s, s)
    raise ValueError(f"unknown distance {distance!r}")


def timing_bench(lengths=(10, 100, 1000), n_series=100, distances=BENCH_DISTANCES,
                 repeats=5, nu=1.0, seed=0):
    """Median elapsed seconds per ``(distance, length)``."""
    if repeats < 1 or n_series < 2:
        raise ValueError("repeats >= 1 and n_series >= 2 required")
    rng = np.random.default_rng(seed)
    rows = []
    for distance in distances:
        warm = rng.standard_normal((3, 4, 1))
        _runner(distance, warm, np.arange(1.0, 5.0), nu)()
        for n in lengths:
            X = rng.standard_normal((n_series, n, 1))
            t = np.arange(1.0, n + 1.0)
            run = _runner(distance, X, t, nu)
            times = []
            for _ in range(repeats):
                t0 = time.perf_counter()
                run()
                times.append(time.perf_counter() - t0)
            rows.append(TimingRow(distance, int(n), statistics.median(times)))
    return rows


def growth_exponent(rows, distance):
    """Least-squares slope of ``log(seconds)`` against ``log(length)``."""
    pts = sorted((r.length, r.seconds) for r in rows if r.distance == distance)
    if len(pts) < 2:
        raise ValueError(f"need two lengths for {distance!r}")
    x = np.log([p[0] for p in pts])
    y = np.log([max(p[1], 1e-12) for p in pts])
    return float(np.polyfit(x, y, 1)[0])


def write_timing_csv(rows, fh):
    w = csv.writer(fh)
    w.writerow(["distance", "length", "seconds"])
    for r in rows:
        w.writerow([r.distance, r.length, repr(r.seconds)])
