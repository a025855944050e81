"""Exact mean truncated hitting times, three independent ways.

All three are desk-scale ground-truth computations used to validate the
approximation engine and each other:

* ``exact_hitting_matrix`` -- dynamic programming on the full n-by-n
  table: H(t) = 1 + P @ H(t-1) with a zero diagonal after every step.
* ``exact_first_passage`` -- builds the first-passage distribution for a
  single start vertex by peeling earlier arrivals off the t-step visit
  probabilities (deconvolution against the target's return probabilities)
  and takes the expectation.
* ``brute_force_paths`` -- enumerates every length-T walk from the start
  and accumulates first-arrival probability mass directly.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import GraphIOError, NumericalError, ResourceLimitError, ValidationError
from .engine import HittingProfile
from .transition import TransitionMatrix

DENSE_ORACLE_CAP = 2000
POWER_ORACLE_CAP = 500
PATH_BUDGET = 10_000_000

NEG_MASS_TOL = 1e-9


@dataclass(frozen=True)
class HittingMatrix:
    """Exact mean truncated hitting times for every (start, target) pair."""

    n: int
    horizon: int
    values: np.ndarray

    def row(self, start: int) -> np.ndarray:
        return self.values[start]

    def write_tsv(self, path) -> None:
        """Grid TSV: header row of target ids, one row per start vertex."""
        path = Path(path)
        try:
            with path.open("w", encoding="utf-8") as fh:
                fh.write("start\t" + "\t".join(str(j) for j in range(self.n)) + "\n")
                for i in range(self.n):
                    cells = "\t".join(f"{x:.17g}" for x in self.values[i])
                    fh.write(f"{i}\t{cells}\n")
        except OSError as exc:
            raise GraphIOError(f"cannot write matrix {path}: {exc}") from exc

    def write_json(self, path) -> None:
        doc = {
            "n": self.n,
            "T": self.horizon,
            "method": "recursive",
            "values": [[float(x) for x in row] for row in self.values],
        }
        path = Path(path)
        try:
            path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
        except OSError as exc:
            raise GraphIOError(f"cannot write matrix {path}: {exc}") from exc

    def write(self, path, fmt: str = "tsv") -> None:
        if fmt == "tsv":
            self.write_tsv(path)
        elif fmt == "json":
            self.write_json(path)
        else:
            raise ValidationError(f"unknown output format {fmt!r}")


def _check_horizon(horizon: int) -> None:
    if not isinstance(horizon, (int, np.integer)) or horizon < 1:
        raise ValidationError(f"horizon must be a positive integer, got {horizon!r}")


def exact_hitting_matrix(
    P: TransitionMatrix, horizon: int, cap: int = DENSE_ORACLE_CAP
) -> HittingMatrix:
    """Full table by the recurrence H(t) = 1 + P @ H(t-1), diagonal pinned to 0."""
    _check_horizon(horizon)
    if P.n > cap:
        raise ResourceLimitError(
            f"n={P.n} exceeds the dense oracle cap of {cap} vertices"
        )
    H = np.zeros((P.n, P.n))
    for _ in range(horizon):
        H = 1.0 + P.left_multiply(H)
        np.fill_diagonal(H, 0.0)
    return HittingMatrix(n=P.n, horizon=horizon, values=H)


def first_passage_masses(
    P: TransitionMatrix, start: int, horizon: int, cap: int = POWER_ORACLE_CAP
) -> np.ndarray:
    """First-arrival probabilities: entry (t, j) is P[walk first hits j at t].

    Shape (horizon + 1, n); row ``horizon`` holds the leftover mass of
    walks that arrive at the horizon or never.  Rows sum to one per target.
    """
    _check_horizon(horizon)
    if P.n > cap:
        raise ResourceLimitError(
            f"n={P.n} exceeds the dense power cap of {cap} vertices"
        )
    if not (0 <= start < P.n):
        raise ValidationError(f"start vertex {start} out of range [0, {P.n})")

    n = P.n
    rows = np.zeros((horizon, n))  # rows[t] = t-step visit probs from start
    diags = np.zeros((horizon, n))  # diags[t] = t-step return probs per vertex
    diags[0] = 1.0
    power = np.eye(n)
    for t in range(1, horizon):
        power = P.propagate_rows(power)
        rows[t] = power[start]
        diags[t] = np.diag(power)

    star = np.zeros((horizon + 1, n))
    for t in range(1, horizon):
        s = rows[t].copy()
        for k in range(1, t):
            s -= star[k] * diags[t - k]
        _clamp_masses(s)
        s[start] = 0.0
        star[t] = s
    residual = 1.0 - star[1:horizon].sum(axis=0)
    _clamp_masses(residual)
    star[horizon] = residual
    # by convention the start vertex is hit at time 0
    star[horizon, start] = 0.0
    star[0, start] = 1.0
    return star


def _clamp_masses(s: np.ndarray) -> None:
    low = s.min() if s.size else 0.0
    if low < -NEG_MASS_TOL:
        raise NumericalError(
            f"first-passage mass {low} is negative beyond the {NEG_MASS_TOL} tolerance"
        )
    np.clip(s, 0.0, None, out=s)


def exact_first_passage(
    P: TransitionMatrix, start: int, horizon: int, cap: int = POWER_ORACLE_CAP
) -> HittingProfile:
    """Single-start exact profile via the first-passage decomposition."""
    star = first_passage_masses(P, start, horizon, cap)
    steps = np.arange(horizon + 1, dtype=np.float64)
    values = steps @ star
    values[start] = 0.0
    lam = np.zeros(P.n)
    lam[start] = 1.0
    return HittingProfile(
        values=values,
        horizon=horizon,
        order=None,
        start=lam,
        start_vertex=start,
        backend="first-passage",
    )


def count_walks(P: TransitionMatrix, start: int, horizon: int) -> float:
    """Number of length-``horizon`` walks out of ``start`` (exact DP count)."""
    counts = np.zeros(P.n)
    counts[start] = 1.0
    for _ in range(horizon):
        counts = np.bincount(P.dst, weights=counts[P.src], minlength=P.n)
    return float(counts.sum())


def brute_force_paths(
    P: TransitionMatrix,
    start: int,
    horizon: int,
    budget: int = PATH_BUDGET,
) -> HittingProfile:
    """Enumerate all length-T walks, tallying first-arrival mass per vertex.

    Refuses to start if the exact walk count exceeds ``budget``.
    """
    _check_horizon(horizon)
    if not (0 <= start < P.n):
        raise ValidationError(f"start vertex {start} out of range [0, {P.n})")
    total_paths = count_walks(P, start, horizon)
    if total_paths > budget:
        raise ResourceLimitError(
            f"{total_paths:.0f} walks of length {horizon} exceed the budget {budget}"
        )

    n = P.n
    rows = [list(zip(P.row(v)[0].tolist(), P.row(v)[1].tolist())) for v in range(n)]
    mass = np.zeros((horizon, n))
    first_visit: dict[int, int] = {}
    last_level = horizon - 1

    sys.setrecursionlimit(max(sys.getrecursionlimit(), horizon + 100))

    def descend(v: int, t: int, prob: float) -> None:
        newly = v not in first_visit
        if newly:
            first_visit[v] = t
        if t == last_level:
            # every one-step extension is a leaf; they carry mass `prob`
            # in total, and vertices first reached at the horizon itself
            # fall into the residual bucket anyway
            for w, tw in first_visit.items():
                mass[tw, w] += prob
        else:
            for w, q in rows[v]:
                descend(w, t + 1, prob * q)
        if newly:
            del first_visit[v]

    descend(start, 0, 1.0)

    hit_by = mass.sum(axis=0)
    values = np.arange(horizon, dtype=np.float64) @ mass + horizon * (1.0 - hit_by)
    values[start] = 0.0
    lam = np.zeros(n)
    lam[start] = 1.0
    return HittingProfile(
        values=values,
        horizon=horizon,
        order=None,
        start=lam,
        start_vertex=start,
        backend="paths",
    )
