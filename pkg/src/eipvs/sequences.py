"""Elastic inner product and elastic cosine for symbol sequences.

Tokens are compared with a weighting ``delta``: indicator (1 on a match),
squared IDF on a match, or the dot product of user-supplied word vectors.
Positions are 1-based token indices.  At ``nu = 0`` the indicator and idf
variants reduce to the tf and tf-idf dot products.
"""
from __future__ import annotations

import math
import warnings
from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from . import _numeric
from .product import ElasticParams, eip
from .series import TimeSeries

__all__ = [
    "SymbolSequence",
    "Weighting",
    "compute_idf",
    "eip_tm",
    "ecos",
    "tf_vector",
]


@dataclass(frozen=True)
class SymbolSequence:
    tokens: tuple
    positions: tuple = None

    def __post_init__(self):
        toks = tuple(self.tokens)
        if not toks:
            raise ValueError("empty symbol sequence")
        pos = tuple(float(p) for p in (self.positions or range(1, len(toks) + 1)))
        if len(pos) != len(toks):
            raise ValueError("positions and tokens differ in length")
        if any(b <= a for a, b in zip(pos, pos[1:])):
            raise ValueError("positions must strictly increase")
        object.__setattr__(self, "tokens", toks)
        object.__setattr__(self, "positions", pos)

    @classmethod
    def from_text(cls, text: str):
        return cls(tuple(text.split()))

    @classmethod
    def from_string(cls, chars: str):
        """One token per character (``"abab"`` -> a, b, a, b)."""
        return cls(tuple(chars))

    def __len__(self):
        return len(self.tokens)


@dataclass(frozen=True)
class Weighting:
    """Token similarity ``delta``.

    ``kind`` is ``"indicator"``, ``"idf"`` (needs ``idf``) or ``"embedded"``
    (needs ``vectors``).
    """

    kind: str = "indicator"
    idf: Optional[Mapping[str, float]] = None
    vectors: Optional[Mapping[str, np.ndarray]] = field(default=None, hash=False)

    def __post_init__(self):
        if self.kind not in ("indicator", "idf", "embedded"):
            raise ValueError(f"unknown weighting {self.kind!r}")
        if self.kind == "idf" and self.idf is None:
            raise ValueError("idf weighting needs an idf table")
        if self.kind == "embedded" and self.vectors is None:
            raise ValueError("embedded weighting needs word vectors")

    def delta(self, a, b):
        if self.kind == "embedded":
            return float(np.dot(self.vectors[a], self.vectors[b]))
        if a != b:
            return 0.0
        return 1.0 if self.kind == "indicator" else self.idf[a] ** 2


def compute_idf(corpus, smooth=False):
    """IDF table ``ln(N / df)``; ``smooth=True`` gives ``ln((N+1)/(df+1)) + 1``."""
    docs = list(corpus)
    if not docs:
        raise ValueError("empty corpus")
    df = Counter()
    for doc in docs:
        df.update(set(doc.tokens))
    N = len(docs)
    if smooth:
        return {t: math.log((N + 1) / (c + 1)) + 1.0 for t, c in df.items()}
    return {t: math.log(N / c) for t, c in df.items()}


def _drop_null(seq: SymbolSequence, weighting: Weighting):
    if weighting.kind != "idf":
        return seq
    missing = [t for t in seq.tokens if t not in weighting.idf]
    if missing:
        raise ValueError(f"out-of-vocabulary tokens: {sorted(set(missing))[:5]}")
    keep = [i for i, t in enumerate(seq.tokens) if weighting.idf[t] != 0]
    if len(keep) < len(seq.tokens):
        dropped = sorted({t for t in seq.tokens if weighting.idf[t] == 0})
        warnings.warn(f"dropping zero-idf tokens {dropped}", stacklevel=3)
    return [seq.tokens[i] for i in keep], [seq.positions[i] for i in keep]


def eip_tm(A: SymbolSequence, B: SymbolSequence, nu=1.0, weighting: Weighting = Weighting()):
    """Elastic inner product of two token sequences."""
    if weighting.kind == "embedded":
        try:
            va = np.stack([np.asarray(weighting.vectors[t], dtype=float) for t in A.tokens])
            vb = np.stack([np.asarray(weighting.vectors[t], dtype=float) for t in B.tokens])
        except KeyError as exc:
            raise ValueError(f"no vector for token {exc.args[0]!r}") from None
        return eip(TimeSeries(va, A.positions), TimeSeries(vb, B.positions), ElasticParams(nu=nu))
    if weighting.kind == "idf":
        ta, pa = _drop_null(A, weighting)
        tb, pb = _drop_null(B, weighting)
    else:
        ta, pa, tb, pb = A.tokens, A.positions, B.tokens, B.positions
    if not ta or not tb:
        return 0.0
    vocab = {t: i for i, t in enumerate(sorted(set(ta) | set(tb)))}
    w = np.ones(len(vocab))
    if weighting.kind == "idf":
        for t, i in vocab.items():
            w[i] = weighting.idf[t] ** 2
    ia = np.array([vocab[t] for t in ta], dtype=np.int64)
    ib = np.array([vocab[t] for t in tb], dtype=np.int64)
    pa = np.asarray(pa, dtype=np.float64)
    pb = np.asarray(pb, dtype=np.float64)
    # same canonical argument order as the numeric eip, for exact symmetry
    if len(ia) < len(ib) or (len(ia) == len(ib) and (tuple(tb), tuple(pb)) < (tuple(ta), tuple(pa))):
        ia, pa, ib, pb = ib, pb, ia, pa
    return float(_numeric.token_eip(ia, pa, ib, pb, w, float(nu)))


def ecos(A: SymbolSequence, B: SymbolSequence, nu=1.0, weighting: Weighting = Weighting(), tol=1e-12):
    """Elastic cosine similarity in ``[0, 1]``.

    Values outside ``[0, 1]`` by more than ``tol`` signal an inconsistent
    weighting and raise ``ArithmeticError``.
    """
    aa = eip_tm(A, A, nu, weighting)
    bb = eip_tm(B, B, nu, weighting)
    if aa <= 0 or bb <= 0:
        raise ValueError("zero self-product")
    c = eip_tm(A, B, nu, weighting) / (math.sqrt(aa) * math.sqrt(bb))
    if c < -tol or c > 1 + tol:
        raise ArithmeticError(f"elastic cosine {c!r} outside [0, 1]")
    return min(max(c, 0.0), 1.0)


def tf_vector(seq: SymbolSequence) -> Counter:
    return Counter(seq.tokens)
