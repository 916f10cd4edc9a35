"""Readers and writers for datasets, series files and results."""
from __future__ import annotations

import csv
import json
import math
import re
from collections import OrderedDict
from pathlib import Path

import numpy as np

from .sequences import SymbolSequence
from .series import LabeledDataset, TimeSeries

__all__ = [
    "DEFAULT_EPSILON",
    "load_ucr",
    "write_ucr",
    "read_series",
    "write_series",
    "read_family",
    "write_family",
    "read_corpus",
    "emit",
]

DEFAULT_EPSILON = 2.0 ** -52
_SPLIT = re.compile(r"[,\s]+")


def _normalize_label(tok: str) -> str:
    # "1.0000000e+00" and "1" name the same class
    try:
        x = float(tok)
    except ValueError:
        return tok
    if math.isfinite(x) and x == int(x):
        return str(int(x))
    return tok


def load_ucr(path, epsilon=DEFAULT_EPSILON, variable_length=False, name=None, split=None) -> LabeledDataset:
    """Read a UCR-style file: label then values, comma or whitespace separated.

    Timestamps are the sample indices ``1..L``.  Exact zeros are replaced by
    ``epsilon``; the count is kept in ``zero_repairs``.
    """
    path = Path(path)
    items, labels = [], []
    repairs = 0
    width = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            toks = [t for t in _SPLIT.split(line) if t]
            if len(toks) < 2:
                raise ValueError(f"{path}:{lineno}: row has no values")
            try:
                vals = np.array([float(t) for t in toks[1:]])
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
            if not np.all(np.isfinite(vals)):
                raise ValueError(f"{path}:{lineno}: non-finite value")
            if width is None:
                width = vals.size
            elif vals.size != width and not variable_length:
                raise ValueError(f"{path}:{lineno}: ragged row ({vals.size} values, expected {width})")
            zero = vals == 0
            repairs += int(zero.sum())
            vals[zero] = epsilon
            items.append(TimeSeries(vals, np.arange(1.0, vals.size + 1.0)))
            labels.append(_normalize_label(toks[0]))
    if not items:
        raise ValueError(f"{path}: no series found")
    if split is None:
        split = "test" if "TEST" in path.name.upper() else "train"
    return LabeledDataset(items, labels, name=name or path.stem, split=split, zero_repairs=repairs)


def write_ucr(dataset: LabeledDataset, path):
    with open(path, "w", encoding="utf-8") as fh:
        for s, label in dataset:
            fh.write(",".join([str(label), *(repr(float(v)) for v in s.values[:, 0])]) + "\n")


def read_series(path) -> TimeSeries:
    """One sample per line: ``t v1 [v2 ...]`` (whitespace or commas, ``#`` comments)."""
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                rows.append([float(t) for t in _SPLIT.split(line) if t])
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
    if not rows:
        raise ValueError(f"{path}: empty series file")
    if len({len(r) for r in rows}) != 1 or len(rows[0]) < 2:
        raise ValueError(f"{path}: every row needs a timestamp and the same number of values")
    arr = np.array(rows)
    return TimeSeries(arr[:, 1:], arr[:, 0])


def write_series(S: TimeSeries, path):
    with open(path, "w", encoding="utf-8") as fh:
        for t, v in zip(S.times, S.values):
            fh.write(" ".join([repr(float(t)), *(repr(float(x)) for x in v)]) + "\n")


def read_family(path) -> "OrderedDict[str, TimeSeries]":
    """Long CSV with header ``series_id,timestamp,value[,value2...]``."""
    groups: OrderedDict = OrderedDict()
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[:2] != ["series_id", "timestamp"] or len(header) < 3:
            raise ValueError(f"{path}: expected header series_id,timestamp,value")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                groups.setdefault(row[0], []).append([float(x) for x in row[1:]])
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
    if not groups:
        raise ValueError(f"{path}: empty family")
    out = OrderedDict()
    for sid, rows in groups.items():
        arr = np.array(sorted(rows, key=lambda r: r[0]))
        out[sid] = TimeSeries(arr[:, 1:], arr[:, 0])
    return out


def write_family(family, path, ids=None):
    family = list(family)
    ids = ids or [str(i + 1) for i in range(len(family))]
    dim = family[0].dim if family else 1
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["series_id", "timestamp"] + (["value"] if dim == 1 else [f"value{k + 1}" for k in range(dim)]))
        for sid, s in zip(ids, family):
            for t, v in zip(s.times, s.values):
                w.writerow([sid, repr(float(t)), *(repr(float(x)) for x in v)])


def read_corpus(path) -> LabeledDataset:
    """One sequence per line, whitespace-separated tokens, optional ``label<TAB>`` prefix."""
    items, labels = [], []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line.strip():
                continue
            label, _, text = line.rpartition("\t")
            items.append(SymbolSequence.from_text(text))
            labels.append(label)
    if not items:
        raise ValueError(f"{path}: empty corpus")
    return LabeledDataset(items, labels, name=Path(path).stem)


def _plain(v):
    if isinstance(v, np.ndarray):
        return [_plain(x) for x in v.tolist()]
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    return v


def emit(records, fmt, fh):
    """Write a list of flat dicts as CSV (header from the first record) or JSON.

    Floats are written with ``repr`` in CSV so both formats carry the same values.
    """
    records = [_plain(r) for r in records]
    if fmt == "json":
        json.dump(records, fh, indent=2)
        fh.write("\n")
        return
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    if not records:
        return
    cols = list(records[0])
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(cols)
    for r in records:
        w.writerow([repr(r[c]) if isinstance(r[c], float) else r[c] for c in cols])
