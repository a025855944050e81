"""Approximate mean truncated hitting times from one start distribution.

The engine walks the chain for ``T`` steps while keeping three per-vertex
state vectors:

* ``p`` -- the walk's distribution over vertices after t steps,
* ``f`` -- per target j, the running product of estimated "not yet hit j
  by step k" survival factors,
* ``h`` -- per target j, the accumulated sum of t * (probability the
  first visit to j happens at step t).

Order 0 treats the per-step visit events as independent, so the step-t
arrival estimate for j is simply ``p[t][j]``.  Order 1 conditions each
event on the previous step instead, replacing ``p[t][j]`` with the hazard

    g[t][j] = (p[t][j] - p[t-1][j] * P[j][j]) / (1 - p[t-1][j])

clipped to [0, 1]; when the denominator vanishes the walk is already at j
almost surely and the survival factor is set to 0.  Both orders assign
whatever survival mass is left at the horizon to the value ``T``.

The loop runs T-1 edge passes and works in place: besides the three state
vectors there is exactly one scratch vector, which swaps roles with ``p``
after every step.  That keeps the streaming (disk-sharded) backend at
three resident state vectors plus one shard buffer, which is what makes
horizon-truncated hitting times computable on graphs far larger than RAM.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import GraphIOError, UnsupportedBackendError, ValidationError
from .instrumentation import EngineStats
from .transition import TransitionMatrix, validate_distribution

DIVZERO_GUARD = 1e-15


@dataclass
class StateTriple:
    """The three per-vertex engine vectors at one iteration (live views)."""

    h: np.ndarray
    p: np.ndarray
    f: np.ndarray


@dataclass
class HittingProfile:
    """Mean truncated hitting times from one start distribution."""

    values: np.ndarray
    horizon: int
    order: int | None
    start: np.ndarray
    start_vertex: int | None
    backend: str
    passes: int = 0
    wall_time_s: float = 0.0

    @property
    def n(self) -> int:
        return int(self.values.size)

    def to_json_dict(self, include_timing: bool = True) -> dict:
        doc: dict = {
            "n": self.n,
            "T": self.horizon,
            "order": self.order,
            "engine": self.backend,
            "passes": self.passes,
        }
        if self.start_vertex is not None:
            doc["start_vertex"] = self.start_vertex
        else:
            doc["start_distribution"] = [float(x) for x in self.start]
        if include_timing:
            doc["wall_time_s"] = self.wall_time_s
        doc["values"] = [float(x) for x in self.values]
        return doc

    def write_tsv(self, path) -> None:
        path = Path(path)
        try:
            with path.open("w", encoding="utf-8") as fh:
                fh.write("vertex\thitting_time\n")
                for v, x in enumerate(self.values):
                    fh.write(f"{v}\t{x:.17g}\n")
        except OSError as exc:
            raise GraphIOError(f"cannot write profile {path}: {exc}") from exc

    def write_json(self, path, include_timing: bool = True) -> None:
        path = Path(path)
        try:
            path.write_text(
                json.dumps(self.to_json_dict(include_timing), indent=2) + "\n",
                encoding="utf-8",
            )
        except OSError as exc:
            raise GraphIOError(f"cannot write profile {path}: {exc}") from exc

    def write(self, path, fmt: str = "tsv", include_timing: bool = True) -> None:
        if fmt == "tsv":
            self.write_tsv(path)
        elif fmt == "json":
            self.write_json(path, include_timing)
        else:
            raise ValidationError(f"unknown output format {fmt!r}")


def start_distribution(
    n: int,
    kind: str = "delta",
    vertex: int | None = None,
    weights=None,
) -> np.ndarray:
    """Build a start distribution: a point mass, uniform, or custom weights."""
    if n < 1:
        raise ValidationError(f"need at least one vertex, got n={n}")
    if kind == "delta":
        if vertex is None or not (0 <= vertex < n):
            raise ValidationError(
                f"start vertex {vertex} out of range [0, {n})"
            )
        lam = np.zeros(n, dtype=np.float64)
        lam[vertex] = 1.0
        return lam
    if kind == "uniform":
        return np.full(n, 1.0 / n, dtype=np.float64)
    if kind == "custom":
        w = np.asarray(weights, dtype=np.float64)
        if w.shape != (n,):
            raise ValidationError(f"weights have shape {w.shape}, expected ({n},)")
        if np.any(~np.isfinite(w)) or np.any(w < 0):
            raise ValidationError("weights must be finite and nonnegative")
        total = w.sum()
        if total <= 0:
            raise ValidationError("weights must have a positive sum")
        return w / total
    raise ValidationError(f"unknown start kind {kind!r}")


def _resolve_start(P, start) -> tuple[np.ndarray, int | None]:
    if isinstance(start, (int, np.integer)):
        return start_distribution(P.n, "delta", vertex=int(start)), int(start)
    lam = validate_distribution(np.array(start, dtype=np.float64, copy=True), P.n)
    hot = np.flatnonzero(lam == 1.0)
    vertex = int(hot[0]) if hot.size == 1 and lam.sum() == lam[hot[0]] else None
    return lam, vertex


def approximate_hitting_times(
    P,
    start,
    horizon: int,
    order: int = 0,
    stats: EngineStats | None = None,
    on_state: Callable[[int, StateTriple], None] | None = None,
    threads: int = 1,
) -> HittingProfile:
    """Run the iterative approximation over an in-memory or sharded matrix.

    ``start`` is a vertex id or a length-n distribution.  ``on_state`` is
    called with (t, StateTriple) after initialization (t=0) and after each
    iteration; the arrays are live buffers, copy before storing.
    """
    if not isinstance(horizon, (int, np.integer)) or horizon < 1:
        raise ValidationError(
            f"horizon must be a positive integer, got {horizon!r} "
            "(a horizon of 0 would make every hitting time trivially 0)"
        )
    if order not in (0, 1):
        raise ValidationError(f"order must be 0 or 1, got {order}")

    if stats is None:
        stats = EngineStats()
    stats.backend = "stream" if P.storage == "sharded" else "mem"
    t_begin = time.perf_counter()

    lam, start_vertex = _resolve_start(P, start)
    n = P.n

    h = np.zeros(n, dtype=np.float64)
    f = 1.0 - lam
    p = lam
    stats.state_allocated(3)
    scratch = np.empty(n, dtype=np.float64)
    stats.scratch_allocated(1)

    if order == 1:
        diag = P.diagonal()
        work = np.empty(n, dtype=np.float64)
        stats.scratch_allocated(2)

    if on_state is not None:
        on_state(0, StateTriple(h=h, p=p, f=f))

    for t in range(1, horizon):
        q = P.apply_transposed(p, out=scratch, stats=stats, check=False, threads=threads)
        if order == 0:
            # mass first hit at step t is f * p[t]; fold it out of f into h
            np.multiply(f, q, out=p)  # old p is dead: reuse as the delta buffer
            f -= p
            p *= t
            h += p
        else:
            np.multiply(p, diag, out=work)
            np.subtract(q, work, out=work)  # arrival mass q - p_prev * diag
            np.subtract(1.0, p, out=p)  # p now holds the denominator 1 - p_prev
            stuck = p < DIVZERO_GUARD
            np.divide(work, p, out=work, where=~stuck)
            work[stuck] = 1.0  # walk almost surely at j already: survival 0
            np.clip(work, 0.0, 1.0, out=work)
            np.multiply(f, work, out=p)
            f -= p
            p *= t
            h += p
        p, scratch = scratch, p
        if on_state is not None:
            on_state(t, StateTriple(h=h, p=p, f=f))

    # remaining survival mass is truncated at the horizon
    np.multiply(f, float(horizon), out=scratch)
    h += scratch

    stats.scratch_released(3 if order == 1 else 1)
    stats.state_released(3)
    stats.wall_time_s = time.perf_counter() - t_begin
    return HittingProfile(
        values=h,
        horizon=horizon,
        order=order,
        start=lam,
        start_vertex=start_vertex,
        backend=stats.backend,
        passes=stats.edge_passes,
        wall_time_s=stats.wall_time_s,
    )


def approximate_hitting_matrix(
    P: TransitionMatrix, horizon: int, order: int = 0
) -> np.ndarray:
    """All-starts variant: row i equals the profile for start vertex i.

    Runs the same recurrences on whole n-by-n matrices, which shares each
    walk-propagation step across all start vertices; meant for evaluation
    at oracle scale, not for large graphs.
    """
    if not isinstance(horizon, (int, np.integer)) or horizon < 1:
        raise ValidationError(f"horizon must be a positive integer, got {horizon!r}")
    if order not in (0, 1):
        raise ValidationError(f"order must be 0 or 1, got {order}")
    if P.storage != "in-memory":
        raise UnsupportedBackendError(
            "the all-starts engine needs the in-memory backend"
        )

    n = P.n
    eye = np.eye(n)
    rows = eye.copy()  # row i = walk distribution for start i
    h = np.zeros((n, n))
    f = 1.0 - eye
    diag = P.diagonal() if order == 1 else None

    for t in range(1, horizon):
        prev = rows
        rows = P.propagate_rows(rows)
        if order == 0:
            arrive = rows
        else:
            denom = 1.0 - prev
            arrive = rows - prev * diag[np.newaxis, :]
            stuck = denom < DIVZERO_GUARD
            np.divide(arrive, denom, out=arrive, where=~stuck)
            arrive[stuck] = 1.0
            np.clip(arrive, 0.0, 1.0, out=arrive)
        h += t * (arrive * f)
        f *= 1.0 - arrive
    h += horizon * f
    return h
