"""Row-stochastic transition matrices and the transposed matvec.

The matvec is a single scatter pass over edges, ``q[dst] += p[src] * prob``,
which is the same access pattern the disk-sharded backend uses; see
``shards`` for the out-of-core variant.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from .errors import ValidationError
from .graph import Graph
from .instrumentation import EngineStats

ROW_SUM_TOL = 1e-12
DIST_SUM_TOL = 1e-9

# rows denser than this are propagated with dense BLAS instead of CSR
DENSE_SWITCH = 0.05


@dataclass(frozen=True)
class TransitionMatrix:
    """In-memory sparse row-stochastic matrix in CSR-like edge-array form.

    ``src``/``dst``/``prob`` are parallel arrays sorted by (src, dst);
    ``indptr`` delimits each vertex's row, so row u is the slice
    ``indptr[u]:indptr[u+1]``.
    """

    n: int
    src: np.ndarray
    dst: np.ndarray
    prob: np.ndarray
    indptr: np.ndarray

    storage = "in-memory"

    @property
    def nnz(self) -> int:
        return int(self.prob.size)

    def row(self, u: int) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self.indptr[u], self.indptr[u + 1]
        return self.dst[lo:hi], self.prob[lo:hi]

    def diagonal(self) -> np.ndarray:
        """Self-transition probability per vertex (0 where absent)."""
        d = np.zeros(self.n, dtype=np.float64)
        loops = self.src == self.dst
        d[self.src[loops]] = self.prob[loops]
        return d

    @cached_property
    def csr(self) -> sp.csr_matrix:
        return sp.csr_matrix(
            (self.prob, (self.src, self.dst)), shape=(self.n, self.n)
        )

    @cached_property
    def dense(self) -> np.ndarray:
        return self.csr.toarray()

    @property
    def density(self) -> float:
        return self.nnz / max(1, self.n * self.n)

    def apply_transposed(
        self,
        p: np.ndarray,
        out: np.ndarray | None = None,
        stats: EngineStats | None = None,
        check: bool = True,
        threads: int = 1,
    ) -> np.ndarray:
        """One walk step: returns q with q[v] = sum_u p[u] * P[u, v].

        Preserves total mass, so a distribution stays a distribution.
        """
        if check:
            validate_distribution(p, self.n)
        q = np.bincount(
            self.dst, weights=p[self.src] * self.prob, minlength=self.n
        )
        if stats is not None:
            stats.pass_completed()
        if out is not None:
            np.copyto(out, q)
            return out
        return q

    def propagate_rows(self, rows: np.ndarray) -> np.ndarray:
        """One step applied to every row at once: returns ``rows @ P``.

        Row i of the result is the distribution after one more step for a
        walk whose current distribution is row i.  Dense BLAS is used for
        dense matrices, CSR multiplication otherwise.
        """
        if self.density > DENSE_SWITCH:
            return rows @ self.dense
        return rows @ self.csr

    def left_multiply(self, mat: np.ndarray) -> np.ndarray:
        """Returns ``P @ mat`` with the same dense/sparse switch."""
        if self.density > DENSE_SWITCH:
            return self.dense @ mat
        return self.csr @ mat


def build_transition(g: Graph, dangling: str = "self_loop") -> TransitionMatrix:
    """Normalize out-weights into transition probabilities.

    Zero-weight edges are dropped.  Vertices without out-edges get a unit
    self-loop under the ``self_loop`` policy or raise under ``reject``.
    """
    if dangling not in ("self_loop", "reject"):
        raise ValidationError(f"unknown dangling policy {dangling!r}")
    if g.n <= 0:
        raise ValidationError("cannot build a transition matrix for an empty graph")

    keep = g.weight > 0
    src = g.src[keep]
    dst = g.dst[keep]
    w = g.weight[keep]

    sums = np.bincount(src, weights=w, minlength=g.n)
    dangling_ids = np.flatnonzero(sums == 0)
    if dangling_ids.size:
        if dangling == "reject":
            raise ValidationError(
                f"vertex {int(dangling_ids[0])} has no out-edges"
            )
        src = np.concatenate([src, dangling_ids])
        dst = np.concatenate([dst, dangling_ids])
        w = np.concatenate([w, np.ones(dangling_ids.size)])
        order = np.lexsort((dst, src))
        src, dst, w = src[order], dst[order], w[order]
        sums = np.bincount(src, weights=w, minlength=g.n)

    prob = w / sums[src]
    indptr = np.zeros(g.n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=g.n), out=indptr[1:])
    return TransitionMatrix(
        n=g.n,
        src=src.astype(np.int64),
        dst=dst.astype(np.int64),
        prob=prob,
        indptr=indptr,
    )


def validate_distribution(p: np.ndarray, n: int) -> np.ndarray:
    """Check the probability-vector invariants; returns p as float64."""
    p = np.asarray(p, dtype=np.float64)
    if p.shape != (n,):
        raise ValidationError(f"distribution has shape {p.shape}, expected ({n},)")
    if np.any(~np.isfinite(p)) or np.any(p < 0) or np.any(p > 1):
        raise ValidationError("distribution entries must lie in [0, 1]")
    total = float(p.sum())
    if abs(total - 1.0) > DIST_SUM_TOL:
        raise ValidationError(f"distribution sums to {total!r}, expected 1")
    return p
