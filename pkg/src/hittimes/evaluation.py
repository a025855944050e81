"""Accuracy metrics and the synthetic-graph benchmark pipeline.

Two metrics compare an approximate hitting-time table against the exact
one: per-pair relative error, and the fraction of target pairs whose
relative order flips between the exact and approximate rankings for a
fixed start vertex (strict inversions; ties on either side do not count).
The benchmark generates seeded graph instances per (model, size) cell,
scores each instance and aggregates mean-of-averages / max-of-maxima.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .engine import approximate_hitting_matrix
from .errors import ResourceLimitError, ValidationError
from .generators import MODELS, GenSpec, generate
from .oracles import DENSE_ORACLE_CAP, HittingMatrix, exact_hitting_matrix
from .transition import build_transition

_inversion_kernel = None


def _get_inversion_kernel():
    """Compile the Fenwick-tree inversion counter on first use."""
    global _inversion_kernel
    if _inversion_kernel is None:
        import numba

        @numba.njit(cache=True)
        def count_rank_inversions(ranks: np.ndarray, num_ranks: int) -> int:
            tree = np.zeros(num_ranks + 1, dtype=np.int64)
            inversions = 0
            for idx in range(ranks.size):
                r = ranks[idx]
                i = r + 1
                seen_le = 0
                while i > 0:
                    seen_le += tree[i]
                    i -= i & (-i)
                inversions += idx - seen_le
                i = r + 1
                while i <= num_ranks:
                    tree[i] += 1
                    i += i & (-i)
            return inversions

        _inversion_kernel = count_rank_inversions
    return _inversion_kernel


def _as_table(values, name: str) -> np.ndarray:
    if isinstance(values, HittingMatrix):
        return values.values
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValidationError(f"{name} must be a square matrix, got shape {arr.shape}")
    return arr


def relative_error_stats(exact, approx) -> tuple[float, float]:
    """Mean and max of |(h - h_hat) / h| over all ordered pairs i != j."""
    E = _as_table(exact, "exact")
    A = _as_table(approx, "approx")
    if E.shape != A.shape:
        raise ValidationError(f"shape mismatch: exact {E.shape} vs approx {A.shape}")
    off = ~np.eye(E.shape[0], dtype=bool)
    err = np.abs((E[off] - A[off]) / E[off])
    return float(err.mean()), float(err.max())


def strict_inversions(reference: np.ndarray, candidate: np.ndarray) -> int:
    """Pairs (j, k) ordered one way by ``reference`` and the other by
    ``candidate``; ties on either side count as not inverted."""
    order = np.lexsort((candidate, reference))
    y = candidate[order]
    _, ranks = np.unique(y, return_inverse=True)
    kernel = _get_inversion_kernel()
    return int(kernel(ranks.astype(np.int64), int(ranks.max()) + 1))


def inversion_stats(exact, approx) -> tuple[float, float]:
    """Mean and max over start vertices of the inverted-pair proportion."""
    E = _as_table(exact, "exact")
    A = _as_table(approx, "approx")
    if E.shape != A.shape:
        raise ValidationError(f"shape mismatch: exact {E.shape} vs approx {A.shape}")
    n = E.shape[0]
    if n < 3:
        raise ValidationError(f"inversion stats need n >= 3, got n={n}")
    pairs = math.comb(n - 1, 2)
    keep = ~np.eye(n, dtype=bool)
    fractions = np.empty(n)
    for i in range(n):
        fractions[i] = strict_inversions(E[i][keep[i]], A[i][keep[i]]) / pairs
    return float(fractions.mean()), float(fractions.max())


@dataclass(frozen=True)
class AccuracyStats:
    avg_err: float
    max_err: float
    avg_inv: float
    max_inv: float


@dataclass(frozen=True)
class EvalConfig:
    models: tuple[str, ...]
    sizes: tuple[int, ...]
    edges: tuple[int, ...]
    instances: int = 30
    horizon: int = 10
    order: int = 0
    seed: int = 0
    threads: int = 1
    oracle_cap: int = DENSE_ORACLE_CAP

    def to_dict(self) -> dict:
        return {
            "models": list(self.models),
            "sizes": list(self.sizes),
            "edges": list(self.edges),
            "instances": self.instances,
            "T": self.horizon,
            "order": self.order,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class CellStats:
    model: str
    n: int
    m: int
    stats: AccuracyStats
    instances: int

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "n": self.n,
            "m": self.m,
            "avg_err": self.stats.avg_err,
            "max_err": self.stats.max_err,
            "avg_inv": self.stats.avg_inv,
            "max_inv": self.stats.max_inv,
            "instances": self.instances,
        }


@dataclass
class EvalReport:
    config: EvalConfig
    cells: list[CellStats] = field(default_factory=list)

    def cell(self, model: str, n: int) -> CellStats:
        for c in self.cells:
            if c.model == model and c.n == n:
                return c
        raise KeyError(f"no cell for model={model}, n={n}")

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "cells": [c.to_dict() for c in self.cells],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_table(self) -> str:
        """Fixed-width grid: one column block per model, sizes across."""
        models = list(self.config.models)
        sizes = list(self.config.sizes)
        width = 10
        head1 = "".ljust(9)
        head2 = "".ljust(9)
        for model in models:
            head1 += model.ljust(width * len(sizes))
            for n in sizes:
                head2 += str(n).ljust(width)
        lines = [head1.rstrip(), head2.rstrip()]
        for label, attr in (
            ("avg err", "avg_err"),
            ("max err", "max_err"),
            ("avg inv", "avg_inv"),
            ("max inv", "max_inv"),
        ):
            row = label.ljust(9)
            for model in models:
                for n in sizes:
                    row += f"{getattr(self.cell(model, n).stats, attr):.4f}".ljust(width)
            lines.append(row.rstrip())
        return "\n".join(lines) + "\n"


def instance_seed(base_seed: int, model: str, n: int, index: int) -> int:
    """Stable per-instance seed derived from the cell coordinates."""
    ss = np.random.SeedSequence(entropy=[base_seed, MODELS.index(model), n, index])
    return int(ss.generate_state(1, np.uint64)[0])


def cell_edge_count(model: str, n: int, m: int | None) -> int:
    if model == "den":
        return n * (n - 1)
    if m is None:
        raise ValidationError(f"model {model} needs an edge count for n={n}")
    return m


def evaluate_instance(P, horizon: int, order: int, oracle_cap: int = DENSE_ORACLE_CAP) -> AccuracyStats:
    """Score one graph: approximation vs the exact table, all start vertices."""
    exact = exact_hitting_matrix(P, horizon, cap=oracle_cap)
    approx = approximate_hitting_matrix(P, horizon, order=order)
    avg_err, max_err = relative_error_stats(exact.values, approx)
    avg_inv, max_inv = inversion_stats(exact.values, approx)
    return AccuracyStats(avg_err, max_err, avg_inv, max_inv)


def _evaluate_cell_instance(config: EvalConfig, model: str, n: int, m: int, k: int) -> AccuracyStats:
    spec = GenSpec(model=model, n=n, m=m, seed=instance_seed(config.seed, model, n, k))
    g = generate(spec)
    P = build_transition(g, dangling="reject")
    return evaluate_instance(P, config.horizon, config.order, config.oracle_cap)


def run_benchmark(config: EvalConfig) -> EvalReport:
    """Generate, score and aggregate every requested (model, size) cell."""
    if config.instances < 1:
        raise ValidationError(f"need at least one instance, got {config.instances}")
    if len(config.edges) != len(config.sizes):
        raise ValidationError(
            f"edges list has {len(config.edges)} entries for {len(config.sizes)} sizes"
        )
    cells: list[tuple[str, int, int]] = []
    for model in config.models:
        if model not in MODELS:
            raise ValidationError(f"unknown model {model!r}")
        for n, m in zip(config.sizes, config.edges):
            if n > config.oracle_cap:
                raise ResourceLimitError(
                    f"cell {model} n={n}: exceeds the exact-oracle cap {config.oracle_cap}"
                )
            if n < 3:
                raise ValidationError(f"cell {model} n={n}: metrics need n >= 3")
            m_cell = cell_edge_count(model, n, m)
            GenSpec(model=model, n=n, m=m_cell, seed=0).validate()
            cells.append((model, n, m_cell))

    report = EvalReport(config=config)
    for model, n, m in cells:
        if config.threads > 1:
            with ThreadPoolExecutor(max_workers=config.threads) as pool:
                futures = [
                    pool.submit(_evaluate_cell_instance, config, model, n, m, k)
                    for k in range(config.instances)
                ]
                per_instance = [f.result() for f in futures]
        else:
            per_instance = [
                _evaluate_cell_instance(config, model, n, m, k)
                for k in range(config.instances)
            ]
        stats = AccuracyStats(
            avg_err=float(np.mean([s.avg_err for s in per_instance])),
            max_err=float(np.max([s.max_err for s in per_instance])),
            avg_inv=float(np.mean([s.avg_inv for s in per_instance])),
            max_inv=float(np.max([s.max_inv for s in per_instance])),
        )
        report.cells.append(
            CellStats(model=model, n=n, m=m, stats=stats, instances=config.instances)
        )
    return report
