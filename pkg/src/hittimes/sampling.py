"""Monte-Carlo estimation of per-vertex return probabilities.

Simulating L independent length-T walks from each vertex gives empirical
return frequencies mu(j, t) estimating the probability that a walk started
at j sits at j again after t steps.  A Hoeffding bound sizes L for a given
per-entry accuracy and failure probability.  The estimates substitute for
the exact return probabilities in the first-passage decomposition, giving
a hitting-time estimator that needs no dense matrix powers.

Sampling requires the in-memory backend: chasing individual walk steps
through disk-resident shards would be random access, not streaming.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .engine import HittingProfile
from .errors import (
    GraphIOError,
    UnsupportedBackendError,
    ValidationError,
)
from .transition import TransitionMatrix

_HEADER = struct.Struct("<4sIIQQ")
_MAGIC = b"RPE1"


@dataclass(frozen=True)
class ReturnProbEstimate:
    """Empirical return frequencies: mu[j, t] for t = 0..T-1, mu[:, 0] = 1."""

    n: int
    horizon: int
    walks_per_vertex: int
    seed: int
    mu: np.ndarray

    def save(self, path) -> None:
        path = Path(path)
        try:
            with path.open("wb") as fh:
                fh.write(
                    _HEADER.pack(
                        _MAGIC, self.n, self.horizon, self.walks_per_vertex, self.seed
                    )
                )
                fh.write(self.mu.astype("<f8").tobytes())
        except OSError as exc:
            raise GraphIOError(f"cannot write estimate {path}: {exc}") from exc


def load_estimate(path) -> ReturnProbEstimate:
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise GraphIOError(f"cannot read estimate {path}: {exc}") from exc
    if len(raw) < _HEADER.size:
        raise GraphIOError(f"{path}: truncated estimate file")
    magic, n, horizon, walks, seed = _HEADER.unpack_from(raw)
    if magic != _MAGIC:
        raise GraphIOError(f"{path}: not a return-probability estimate file")
    body = raw[_HEADER.size :]
    if len(body) != n * horizon * 8:
        raise GraphIOError(f"{path}: body size does not match n={n}, T={horizon}")
    mu = np.frombuffer(body, dtype="<f8").reshape(n, horizon).copy()
    return ReturnProbEstimate(
        n=n, horizon=horizon, walks_per_vertex=walks, seed=seed, mu=mu
    )


def hoeffding_walk_count(eps: float, rho: float) -> int:
    """Walks per vertex for an eps-accurate estimate with failure prob rho."""
    if not (0.0 < eps < 1.0):
        raise ValidationError(f"eps must lie in (0, 1), got {eps}")
    if not (0.0 < rho < 1.0):
        raise ValidationError(f"rho must lie in (0, 1), got {rho}")
    return math.ceil(math.log(2.0 / rho) / (2.0 * eps * eps))


def sample_return_probabilities(
    P: TransitionMatrix, horizon: int, walks: int, seed: int
) -> ReturnProbEstimate:
    """Simulate ``walks`` length-T walks from every vertex (seed-deterministic).

    Each vertex uses its own RNG stream derived from (seed, vertex), so the
    result does not depend on evaluation order.
    """
    if P.storage != "in-memory":
        raise UnsupportedBackendError(
            "sampling walks over a disk-sharded matrix is unsupported: "
            "per-step random access to shards would thrash; load the graph in memory"
        )
    if not isinstance(horizon, (int, np.integer)) or horizon < 1:
        raise ValidationError(f"horizon must be a positive integer, got {horizon!r}")
    if walks < 1:
        raise ValidationError(f"walk count must be >= 1, got {walks}")
    if seed < 0:
        raise ValidationError(f"seed must be nonnegative, got {seed}")

    n = P.n
    # per-row inverse-CDF tables, built once
    cums = []
    dsts = []
    for v in range(n):
        row_dst, row_prob = P.row(v)
        cums.append(np.cumsum(row_prob))
        dsts.append(row_dst)

    mu = np.zeros((n, horizon))
    mu[:, 0] = 1.0
    for j in range(n):
        rng = np.random.default_rng([seed, j])
        pos = np.full(walks, j, dtype=np.int64)
        for t in range(1, horizon):
            u = rng.random(walks)
            for v in np.unique(pos):
                here = pos == v
                idx = np.searchsorted(cums[v], u[here], side="right")
                np.clip(idx, 0, dsts[v].size - 1, out=idx)
                pos[here] = dsts[v][idx]
            mu[j, t] = np.count_nonzero(pos == j) / walks
    return ReturnProbEstimate(
        n=n, horizon=horizon, walks_per_vertex=walks, seed=seed, mu=mu
    )


def hitting_via_sampled_diagonal(
    P: TransitionMatrix,
    start: int,
    horizon: int,
    estimate: ReturnProbEstimate,
) -> HittingProfile:
    """First-passage decomposition with sampled return probabilities.

    Visit probabilities from the start vertex are still exact (iterated
    transposed products); only the target return probabilities come from
    the estimate.  Per-step masses are clipped to [0, 1] and capped so the
    total never exceeds one; leftover mass lands on the horizon.  Sampling
    noise in the return probabilities can be amplified by the step index
    when taking the expectation, so estimates need L large enough for the
    horizon in use.
    """
    if estimate.n != P.n:
        raise ValidationError(
            f"estimate covers n={estimate.n} vertices, matrix has {P.n}"
        )
    if estimate.horizon < horizon:
        raise ValidationError(
            f"estimate horizon {estimate.horizon} shorter than requested {horizon}"
        )
    if not (0 <= start < P.n):
        raise ValidationError(f"start vertex {start} out of range [0, {P.n})")

    n = P.n
    rows = np.zeros((horizon, n))
    p = np.zeros(n)
    p[start] = 1.0
    for t in range(1, horizon):
        p = P.apply_transposed(p, check=False)
        rows[t] = p

    mu = estimate.mu
    star = np.zeros((horizon + 1, n))
    cum = np.zeros(n)
    for t in range(1, horizon):
        s = rows[t].copy()
        for k in range(1, t):
            s -= star[k] * mu[:, t - k]
        np.clip(s, 0.0, 1.0, out=s)
        np.minimum(s, 1.0 - cum, out=s)  # keep the total a sub-distribution
        s[start] = 0.0
        star[t] = s
        cum += s
    star[horizon] = 1.0 - cum
    star[horizon, start] = 0.0
    star[0, start] = 1.0

    values = np.arange(horizon + 1, dtype=np.float64) @ star
    values[start] = 0.0
    lam = np.zeros(n)
    lam[start] = 1.0
    return HittingProfile(
        values=values,
        horizon=horizon,
        order=None,
        start=lam,
        start_vertex=start,
        backend="sampled-diagonal",
    )
