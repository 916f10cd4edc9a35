"""Elastic matrix and the precomputed corpus index.

For series embedded on a common grid ``t_1 < ... < t_n`` the eip equals the
quadratic form ``a^T E b`` with ``E[i, j] = g(t_i, t_j)``.  Storing ``E b``
for every corpus item once (O(m n^2)) makes each query a plain dot product
per item (O(n)).  Multivariate values use ``E`` block-wise per coordinate.

The gaussian ``E`` on a uniform grid is Toeplitz; that structure is not
exploited here, the matrix is stored dense.
"""
from __future__ import annotations

import io
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _numeric
from .product import KERNELS, ElasticParams, eip
from .series import LabeledDataset, TimeSeries, embed_on_grid

__all__ = [
    "ElasticMatrix",
    "ElasticIndex",
    "build_elastic_matrix",
    "index_corpus",
    "query_scores",
    "query_knn",
    "save_index",
    "load_index",
    "union_grid",
]

MAGIC = b"EIPX"
FORMAT_VERSION = 1
_KERNEL_CODES = {"gaussian": 0, "laplace": 1}
_KERNEL_NAMES = {v: k for k, v in _KERNEL_CODES.items()}
_NOISE = 64 * np.finfo(np.float64).eps


@dataclass(frozen=True)
class ElasticMatrix:
    grid: np.ndarray
    nu: float
    kernel: str
    entries: np.ndarray

    @property
    def n(self):
        return self.grid.shape[0]

    def apply(self, flat: np.ndarray, dim: int) -> np.ndarray:
        """``E`` applied block-wise to a time-major ``n * dim`` vector (or a
        stack of them, one per row)."""
        flat = np.asarray(flat, dtype=np.float64)
        if flat.ndim == 1:
            return (self.entries @ flat.reshape(self.n, dim)).reshape(-1)
        m = flat.shape[0]
        blocks = flat.reshape(m, self.n, dim)
        return np.einsum("ij,mjk->mik", self.entries, blocks).reshape(m, -1)


def build_elastic_matrix(grid, nu, kernel="gaussian") -> ElasticMatrix:
    """Dense symmetric matrix of time-kernel values on ``grid``."""
    grid = np.ascontiguousarray(grid, dtype=np.float64).reshape(-1)
    if grid.size == 0:
        raise ValueError("grid must not be empty")
    if not np.all(grid[1:] > grid[:-1]):
        raise ValueError("grid must be strictly ascending")
    ElasticParams(nu=nu, kernel=kernel)  # parameter validation
    d = grid[:, None] - grid[None, :]
    if kernel == "gaussian":
        raw = np.exp(-nu * (d * d))
    else:
        raw = np.exp(-nu * np.abs(d))
    upper = np.triu(raw, 1)
    E = upper + upper.T
    E[np.diag_indices_from(E)] = np.diag(raw)
    E.setflags(write=False)
    grid.setflags(write=False)
    return ElasticMatrix(grid, float(nu), kernel, E)


def union_grid(series) -> np.ndarray:
    ts = [s.times for s in series]
    if not ts:
        return np.empty(0)
    return np.unique(np.concatenate(ts))


@dataclass(frozen=True)
class ElasticIndex:
    """Corpus transformed by ``E``: row ``i`` of ``vectors`` is ``E b_i``."""

    matrix: ElasticMatrix
    dim: int
    ids: tuple
    labels: tuple
    vectors: np.ndarray
    self_products: np.ndarray

    def __len__(self):
        return len(self.ids)

    @property
    def params(self):
        return ElasticParams(nu=self.matrix.nu, kernel=self.matrix.kernel)

    def embed(self, A: TimeSeries) -> np.ndarray:
        if A.dim != self.dim:
            raise ValueError(f"dimension mismatch: {A.dim} vs {self.dim}")
        return embed_on_grid(A, self.matrix.grid)

    def scores(self, A: TimeSeries) -> np.ndarray:
        if not len(self):
            return np.empty(0)
        return self.vectors @ self.embed(A)


def index_corpus(dataset, grid=None, nu=1.0, kernel="gaussian") -> ElasticIndex:
    """Build the index of a :class:`LabeledDataset` (or a plain list of series).

    ``grid`` defaults to the union of all corpus timestamps.
    """
    if not isinstance(dataset, LabeledDataset):
        dataset = LabeledDataset(list(dataset), [""] * len(dataset))
    series = list(dataset.items)
    dim = series[0].dim if series else 1
    if grid is None:
        grid = union_grid(series) if series else np.zeros(1)
    E = build_elastic_matrix(grid, nu, kernel)
    L = E.n * dim
    if series:
        B = np.stack([embed_on_grid(s, E.grid) for s in series])
        V = np.ascontiguousarray(E.apply(B, dim))
        self_p = np.einsum("ij,ij->i", B, V)
    else:
        V = np.empty((0, L))
        self_p = np.empty(0)
    V.setflags(write=False)
    self_p.setflags(write=False)
    return ElasticIndex(E, dim, tuple(dataset.ids), tuple(str(l) for l in dataset.labels), V, self_p)


def query_scores(index: ElasticIndex, A: TimeSeries):
    """eip of ``A`` with every indexed item, as ``(id, score)`` pairs."""
    return list(zip(index.ids, index.scores(A).tolist()))


def query_knn(index: ElasticIndex, A: TimeSeries, k=1):
    """The ``k`` nearest items under the eip distance.

    Returns ``(id, label, distance)`` triples sorted by distance, ties by id.
    Squared distances within rounding noise of ``<A,A> + <B,B>`` read as 0.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if A.is_empty:
        raise ValueError("query must not be empty")
    aa = eip(A, A, index.params)
    total = aa + index.self_products
    sq = total - 2.0 * index.scores(A)
    sq[sq <= _NOISE * np.abs(total)] = 0.0
    dist = np.sqrt(sq)
    order = sorted(range(len(index)), key=lambda i: (dist[i], index.ids[i]))[:k]
    return [(index.ids[i], index.labels[i], float(dist[i])) for i in order]


def aligned_distances(index: ElasticIndex, Q: np.ndarray, self_q: np.ndarray) -> np.ndarray:
    """Distances from embedded queries (rows of ``Q``) to all indexed items."""
    return _numeric.batch_indexed(np.ascontiguousarray(Q, dtype=np.float64), index.vectors,
                                  np.asarray(self_q, dtype=np.float64), index.self_products)


# --- persistence -----------------------------------------------------------


def _write_str(buf, s):
    b = s.encode("utf-8")
    buf.write(struct.pack("<I", len(b)))
    buf.write(b)


def _read_str(buf):
    (n,) = struct.unpack("<I", buf.read(4))
    return buf.read(n).decode("utf-8")


def save_index(index: ElasticIndex, path):
    """Write the little-endian binary index file.

    Layout: ``EIPX``, u32 version, u32 n, u32 d, f64 nu, u8 kernel code,
    n f64 grid, u32 item count, then per item: u32 + UTF-8 id, u32 + UTF-8
    label, n*d f64 transformed vector, f64 self-product.
    """
    buf = io.BytesIO()
    E = index.matrix
    buf.write(MAGIC)
    buf.write(struct.pack("<IIIdB", FORMAT_VERSION, E.n, index.dim, E.nu, _KERNEL_CODES[E.kernel]))
    buf.write(E.grid.astype("<f8").tobytes())
    buf.write(struct.pack("<I", len(index)))
    for i in range(len(index)):
        _write_str(buf, index.ids[i])
        _write_str(buf, index.labels[i])
        buf.write(index.vectors[i].astype("<f8").tobytes())
        buf.write(struct.pack("<d", index.self_products[i]))
    Path(path).write_bytes(buf.getvalue())


def load_index(path) -> ElasticIndex:
    buf = io.BytesIO(Path(path).read_bytes())
    if buf.read(4) != MAGIC:
        raise ValueError(f"{path}: not an elastic index file")
    version, n, d, nu, kcode = struct.unpack("<IIIdB", buf.read(struct.calcsize("<IIIdB")))
    if version != FORMAT_VERSION:
        raise ValueError(f"{path}: unsupported index version {version}")
    grid = np.frombuffer(buf.read(8 * n), dtype="<f8").astype(np.float64)
    E = build_elastic_matrix(grid, nu, _KERNEL_NAMES[kcode])
    (count,) = struct.unpack("<I", buf.read(4))
    ids, labels, vecs, selfs = [], [], [], []
    for _ in range(count):
        ids.append(_read_str(buf))
        labels.append(_read_str(buf))
        vecs.append(np.frombuffer(buf.read(8 * n * d), dtype="<f8"))
        (sp,) = struct.unpack("<d", buf.read(8))
        selfs.append(sp)
    V = np.ascontiguousarray(np.stack(vecs) if vecs else np.empty((0, n * d)), dtype=np.float64)
    S = np.asarray(selfs, dtype=np.float64)
    V.setflags(write=False)
    S.setflags(write=False)
    return ElasticIndex(E, d, tuple(ids), tuple(labels), V, S)
