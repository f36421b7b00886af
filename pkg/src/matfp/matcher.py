"""Cosine-similarity search over a fingerprint database.

The query is normalized with the same split-norm rule as the database, every
record is scored by the sum of per-part inner products, and the best record's
homogeneity parameters are rescaled by the query's first-part norm.

Scores are computed row by row as ``(rows * q).sum(axis=1)`` rather than with
a BLAS matrix-vector product.  BLAS kernels may change their summation order
with the block shape, which would make the parallel scan differ from the
sequential one in the last bit.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .database import FingerprintDatabase, normalize
from .errors import ProtocolMismatch
from .models import Family, MaterialModel

DEFAULT_BLOCK = 2048


@dataclass(frozen=True)
class Candidate:
    index: int
    family: Family
    similarity: float
    score: float


@dataclass(frozen=True)
class MatchResult:
    index: int
    similarity: float
    score: float
    model: MaterialModel
    query_norms: tuple[float, ...]
    ties: tuple[int, ...] = ()
    top_k: tuple[Candidate, ...] = field(default_factory=tuple)

    @property
    def family(self) -> Family:
        return self.model.family

    def to_dict(self) -> dict:
        theta_names, alpha_names = self.model.parameter_names()
        return {
            "index": self.index,
            "family": self.model.family.value,
            "similarity": self.similarity,
            "score": self.score,
            "theta": dict(zip(theta_names, self.model.theta)),
            "alpha": dict(zip(alpha_names, self.model.alpha)),
            "model": self.model.describe(),
            "ties": list(self.ties),
            "top_k": [{"index": c.index, "family": c.family.value, "similarity": c.similarity,
                       "score": c.score} for c in self.top_k],
        }


def _block_scores(matrix: np.ndarray, q: np.ndarray, lo: int, hi: int) -> np.ndarray:
    return (matrix[lo:hi] * q).sum(axis=1)


def similarities(matrix: np.ndarray, qbar: np.ndarray, workers: int | None = None,
                 block: int = DEFAULT_BLOCK) -> np.ndarray:
    """All record scores, scanned in row blocks on a thread pool."""
    n = len(matrix)
    bounds = [(lo, min(lo + block, n)) for lo in range(0, n, block)]
    if workers == 1 or len(bounds) <= 1:
        parts = [_block_scores(matrix, qbar, lo, hi) for lo, hi in bounds]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda b: _block_scores(matrix, qbar, *b), bounds))
    return np.concatenate(parts) if parts else np.zeros(0)


def sequential_scan(matrix: np.ndarray, qbar: np.ndarray) -> tuple[int, float]:
    """Reference brute-force scan, one record at a time."""
    best, best_s = -1, -np.inf
    for i in range(len(matrix)):
        s = _block_scores(matrix, qbar, i, i + 1)[0]
        if s > best_s:
            best, best_s = i, s
    return best, float(best_s)


def argmax_with_ties(scores: np.ndarray) -> tuple[int, tuple[int, ...]]:
    top = scores.max()
    hits = np.flatnonzero(scores == top)
    return int(hits[0]), tuple(int(h) for h in hits)


def prepare_query(query, db: FingerprintDatabase, query_hash: str | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Check a raw query against the database protocol and normalize it."""
    if query_hash is not None and query_hash != db.protocol_hash:
        raise ProtocolMismatch(f"query protocol {query_hash[:12]} does not match database {db.protocol_hash[:12]}")
    q = np.asarray(query, dtype=float).ravel()
    if q.size != db.n_f:
        raise ProtocolMismatch(f"query has {q.size} entries, database fingerprints have {db.n_f}")
    qbar, _, norms = normalize(q, (), db.parts)
    return qbar, norms


def rescale(db: FingerprintDatabase, index: int, query_norms) -> MaterialModel:
    """Discovered model: ``theta* = ||f*_0|| theta_bar``, ``alpha* = alpha``."""
    return db.record(index).model(float(np.atleast_1d(query_norms)[0]))


def match(query, db: FingerprintDatabase, k: int = 5, sparsity_weight: float = 0.0,
          workers: int | None = None, query_hash: str | None = None) -> MatchResult:
    qbar, norms = prepare_query(query, db, query_hash)
    sim = similarities(db.matrix, qbar, workers)
    score = sim - sparsity_weight * db.nonzero_theta() if sparsity_weight else sim
    best, ties = argmax_with_ties(score)
    order = np.argsort(-score, kind="stable")[:max(k, 0)]
    top = tuple(Candidate(int(i), Family(db.record(int(i)).family), float(sim[i]), float(score[i])) for i in order)
    return MatchResult(best, float(sim[best]), float(score[best]), rescale(db, best, norms),
                       tuple(float(v) for v in norms), ties, top)
