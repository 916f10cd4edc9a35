"""Time series values, membership checks and the (oplus, otimes) algebra.

A series is an ordered list of samples ``(value, timestamp)``.  Values are
real vectors of a fixed dimension ``d``; for nested (two elastic levels)
series each value is itself a :class:`TimeSeries`.  The empty series plays
the role of the null element and is the identity of :func:`oplus`.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple, Sequence

import numpy as np

__all__ = [
    "Sample",
    "TimeSeries",
    "Membership",
    "MembershipReport",
    "LabeledDataset",
    "validate",
    "scale",
    "oplus",
    "negate",
    "embed_on_grid",
    "index_timestamps",
]


class Sample(NamedTuple):
    value: object
    timestamp: float


class TimeSeries:
    """Immutable sampled series.

    Parameters
    ----------
    values : array_like or sequence of TimeSeries
        ``(n,)`` or ``(n, d)`` numeric values, or ``n`` inner series for a
        nested series.  Object arrays (e.g. ``mpmath.mpf``) are kept as-is.
    times : array_like, optional
        ``n`` timestamps; defaults to the sample index ``1..n``.
    dim : int, optional
        Value dimension, only needed to build an empty series with ``d > 1``.
    """

    __slots__ = ("values", "times", "nested", "dim")

    def __init__(self, values, times=None, dim=None):
        nested = isinstance(values, (list, tuple)) and len(values) > 0 and all(
            isinstance(v, TimeSeries) for v in values
        )
        if nested:
            vals = tuple(values)
            dims = {v.dim for v in vals}
            if len(dims) != 1:
                raise ValueError("inner series must share one dimension")
            d = dims.pop()
            n = len(vals)
        else:
            arr = np.asarray(values)
            if arr.dtype != object:
                arr = arr.astype(np.float64)
            if arr.ndim == 1:
                arr = arr.reshape(-1, 1) if arr.size else arr.reshape(0, dim or 1)
            if arr.ndim != 2:
                raise ValueError(f"values must be 1-D or 2-D, got shape {arr.shape}")
            vals = np.ascontiguousarray(arr)
            vals.setflags(write=False)
            n, d = vals.shape
        if times is None:
            t = index_timestamps(n)
        else:
            t = np.ascontiguousarray(times, dtype=np.float64).reshape(-1)
        if t.shape[0] != n:
            raise ValueError(f"{n} values but {t.shape[0]} timestamps")
        t.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "nested", nested)
        object.__setattr__(self, "dim", int(dim if (n == 0 and dim) else d))

    def __setattr__(self, name, value):
        raise AttributeError("TimeSeries is immutable")

    @classmethod
    def empty(cls, dim=1):
        return cls(np.empty((0, dim)), np.empty(0), dim=dim)

    def __len__(self):
        return self.times.shape[0]

    def __iter__(self) -> Iterator[Sample]:
        for i in range(len(self)):
            v = self.values[i]
            yield Sample(v, float(self.times[i]))

    @property
    def samples(self) -> list[Sample]:
        return list(self)

    @property
    def is_empty(self):
        return len(self) == 0

    @property
    def is_object(self):
        """True for high-precision (object dtype) numeric values."""
        return not self.nested and self.values.dtype == object

    def __eq__(self, other):
        if not isinstance(other, TimeSeries):
            return NotImplemented
        if len(self) != len(other) or self.dim != other.dim or self.nested != other.nested:
            return False
        if not np.array_equal(self.times, other.times):
            return False
        if self.nested:
            return all(a == b for a, b in zip(self.values, other.values))
        return bool(np.all(self.values == other.values))

    __hash__ = None

    def __repr__(self):
        if self.nested:
            body = ", ".join(f"(<{len(v)} samples>, {t:g})" for v, t in zip(self.values, self.times))
        elif self.dim == 1:
            body = ", ".join(f"({v[0]}, {t:g})" for v, t in zip(self.values, self.times))
        else:
            body = ", ".join(f"({list(v)}, {t:g})" for v, t in zip(self.values, self.times))
        return f"TimeSeries([{body}])"

    def with_values(self, values):
        return TimeSeries(values, self.times, dim=self.dim)


def index_timestamps(n, normalize=False):
    """Timestamps ``1..n``, or mapped affinely onto ``[0, 1]``."""
    t = np.arange(1, n + 1, dtype=np.float64)
    if normalize:
        t = (t - 1.0) / (n - 1) if n > 1 else np.zeros(n)
    return t


def _is_zero(value):
    if isinstance(value, TimeSeries):
        return value.is_empty
    return not np.any(np.asarray(value) != 0)


class Membership(enum.Enum):
    U_STAR = "U*"
    U = "U"
    INVALID = "invalid"


@dataclass(frozen=True)
class MembershipReport:
    membership: Membership
    non_increasing: tuple[int, ...] = ()
    zero_values: tuple[int, ...] = ()

    @property
    def in_u_star(self):
        return self.membership is Membership.U_STAR


def validate(series: TimeSeries) -> MembershipReport:
    """Check strict timestamp order and absence of null sample values.

    ``non_increasing`` lists every index ``i`` with ``t[i] <= t[i-1]``;
    ``zero_values`` lists samples whose value is the null vector.
    """
    t = series.times
    bad_t = tuple(int(i) + 1 for i in np.flatnonzero(~(t[1:] > t[:-1])))
    if series.nested:
        zeros = tuple(i for i, v in enumerate(series.values) if v.is_empty)
    else:
        zeros = tuple(int(i) for i in np.flatnonzero(~np.any(series.values != 0, axis=1)))
    if bad_t or not np.all(np.isfinite(t)):
        status = Membership.INVALID
    elif zeros:
        status = Membership.U
    else:
        status = Membership.U_STAR
    return MembershipReport(status, bad_t, zeros)


def require_member(series: TimeSeries, name="series"):
    rep = validate(series)
    if not rep.in_u_star:
        raise ValueError(f"{name} is not a member of U*: {rep}")


def scale(lam, A: TimeSeries) -> TimeSeries:
    """Multiply every value by ``lam``; timestamps are unchanged.

    ``lam == 0`` gives the empty series, as does any sample whose product
    underflows to exactly zero (such samples would leave U*).
    """
    if lam == 0 or A.is_empty:
        return TimeSeries.empty(A.dim)
    if A.nested:
        vals = [scale(lam, v) for v in A.values]
        keep = [i for i, v in enumerate(vals) if not v.is_empty]
        return TimeSeries([vals[i] for i in keep], A.times[keep]) if keep else TimeSeries.empty(A.dim)
    vals = A.values * lam
    keep = np.any(vals != 0, axis=1)
    if keep.all():
        return TimeSeries(vals, A.times)
    return TimeSeries(vals[keep], A.times[keep], dim=A.dim)


def negate(A: TimeSeries) -> TimeSeries:
    return scale(-1, A)


def _add_values(a, b):
    if isinstance(a, TimeSeries):
        return oplus(a, b)
    return a + b


def oplus(A: TimeSeries, B: TimeSeries) -> TimeSeries:
    """Timestamp-merging addition.

    Samples at distinct timestamps are copied in time order; samples sharing
    a timestamp are summed, and a sum that is exactly the null value is
    dropped.  No tolerance is applied: cancellation must be exact.
    """
    if A.dim != B.dim:
        raise ValueError(f"dimension mismatch: {A.dim} vs {B.dim}")
    if A.is_empty:
        return B
    if B.is_empty:
        return A
    if A.nested != B.nested:
        raise ValueError("cannot add a nested series to a flat one")
    ta, tb = A.times, B.times
    p, q = len(A), len(B)
    out_v, out_t = [], []
    i = j = 0
    while i < p and j < q:
        if ta[i] < tb[j]:
            out_v.append(A.values[i])
            out_t.append(ta[i])
            i += 1
        elif ta[i] > tb[j]:
            out_v.append(B.values[j])
            out_t.append(tb[j])
            j += 1
        else:
            s = _add_values(A.values[i], B.values[j])
            if not _is_zero(s):
                out_v.append(s)
                out_t.append(ta[i])
            i += 1
            j += 1
    out_v.extend(A.values[i:])
    out_t.extend(ta[i:])
    out_v.extend(B.values[j:])
    out_t.extend(tb[j:])
    if not out_t:
        return TimeSeries.empty(A.dim)
    if A.nested:
        return TimeSeries(out_v, out_t)
    return TimeSeries(np.stack(out_v), out_t)


def embed_on_grid(A: TimeSeries, grid) -> np.ndarray:
    """Place the values of ``A`` on ``grid``, zero elsewhere.

    Returns a flat vector of length ``n * d`` laid out time-major
    (``v[i * d + k]`` is coordinate ``k`` at ``grid[i]``).
    """
    grid = np.asarray(grid, dtype=np.float64)
    if grid.size > 1 and not np.all(grid[1:] > grid[:-1]):
        raise ValueError("grid must be strictly ascending")
    if A.nested:
        raise TypeError("nested series have no grid embedding")
    out = np.zeros((grid.shape[0], A.dim), dtype=A.values.dtype if A.is_object else np.float64)
    if A.is_object:
        out[:] = 0
    if len(A):
        pos = np.searchsorted(grid, A.times)
        ok = (pos < grid.shape[0]) & (grid[np.minimum(pos, grid.shape[0] - 1)] == A.times)
        if not ok.all():
            missing = A.times[~ok]
            raise ValueError(f"timestamps not on grid: {missing[:5].tolist()}")
        out[pos] = A.values
    return out.reshape(-1)


@dataclass
class LabeledDataset:
    """Labelled collection of series (or symbol sequences)."""

    items: list
    labels: list
    name: str = ""
    split: str = "train"
    ids: list = field(default=None)
    zero_repairs: int = 0

    def __post_init__(self):
        if len(self.items) != len(self.labels):
            raise ValueError("items and labels differ in length")
        if self.ids is None:
            self.ids = [str(i) for i in range(len(self.items))]
        dims = {s.dim for s in self.items if isinstance(s, TimeSeries)}
        if len(dims) > 1:
            raise ValueError(f"mixed dimensions in dataset: {sorted(dims)}")

    def __len__(self):
        return len(self.items)

    def __iter__(self):
        return iter(zip(self.items, self.labels))

    @property
    def classes(self):
        return sorted(set(self.labels), key=_label_key)

    def subset(self, indices: Sequence[int], split=None):
        return LabeledDataset(
            [self.items[i] for i in indices],
            [self.labels[i] for i in indices],
            name=self.name,
            split=split or self.split,
            ids=[self.ids[i] for i in indices],
        )


def _label_key(label):
    try:
        return (0, float(label), "")
    except (TypeError, ValueError):
        return (1, 0.0, str(label))
