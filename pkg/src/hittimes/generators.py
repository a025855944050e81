"""Seeded synthetic graph generators: two sparse families and a dense one.

All three are pure functions of (model, n, m, seed); the RNG is numpy's
PCG64, whose streams are platform-independent, so identical specs yield
identical graphs everywhere.

* sp1: each vertex first receives one random in-edge and one random
  out-edge, then uniformly random extra edges top the count up to m.
* sp2: same first phase, but extra edges pick their target with
  probability proportional to its current in-degree (rich-get-richer),
  with the source uniform among the other vertices.
* den: the complete directed graph on n vertices with i.i.d. uniform
  (0, 1) edge weights.

No model emits self-loops or duplicate edges.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .graph import Graph, build_graph

MODELS = ("sp1", "sp2", "den")


@dataclass(frozen=True)
class GenSpec:
    """Parameters of one synthetic graph: model, sizes and RNG seed."""

    model: str
    n: int
    m: int | None = None
    seed: int = 0

    def validate(self) -> None:
        if self.model not in MODELS:
            raise ValidationError(f"unknown model {self.model!r}; expected one of {MODELS}")
        if self.seed < 0:
            raise ValidationError(f"seed must be nonnegative, got {self.seed}")
        if self.n < 2:
            raise ValidationError(f"n must be >= 2, got {self.n}")
        if self.model in ("sp1", "sp2"):
            if self.m is None:
                raise ValidationError(f"model {self.model} requires an edge count")
            if self.m < self.n:
                raise ValidationError(
                    f"m={self.m} < n={self.n}: every vertex needs an in- and out-edge"
                )
            if self.m > self.n * (self.n - 1):
                raise ValidationError(
                    f"m={self.m} exceeds the {self.n * (self.n - 1)} possible edges"
                )


def generate(spec: GenSpec) -> Graph:
    spec.validate()
    if spec.model == "sp1":
        return gen_sp1(spec)
    if spec.model == "sp2":
        return gen_sp2(spec)
    return gen_den(spec)


def _other_vertex(rng: np.random.Generator, n: int, avoid: int) -> int:
    # uniform over V \ {avoid}
    v = int(rng.integers(n - 1))
    return v + 1 if v >= avoid else v


def _phase1_degree_cover(rng: np.random.Generator, n: int) -> set[tuple[int, int]]:
    """One random in-edge and one random out-edge per vertex, deduplicated."""
    edges: set[tuple[int, int]] = set()
    for v in range(n):
        edges.add((_other_vertex(rng, n, v), v))
        edges.add((v, _other_vertex(rng, n, v)))
    return edges


def _check_phase1_overshoot(edges: set, m: int) -> None:
    if len(edges) > m:
        raise ValidationError(
            f"degree-cover phase produced {len(edges)} edges, more than m={m}; "
            f"choose m >= 2n to make the target reachable for any seed"
        )


def _edges_to_graph(n: int, edges: set[tuple[int, int]]) -> Graph:
    src = np.fromiter((e[0] for e in edges), dtype=np.int64, count=len(edges))
    dst = np.fromiter((e[1] for e in edges), dtype=np.int64, count=len(edges))
    return build_graph(n, src, dst)


def gen_sp1(spec: GenSpec) -> Graph:
    """Sparse graph with uniformly random extra edges."""
    spec.validate()
    rng = np.random.default_rng(np.random.PCG64(spec.seed))
    edges = _phase1_degree_cover(rng, spec.n)
    _check_phase1_overshoot(edges, spec.m)
    while len(edges) < spec.m:
        u = int(rng.integers(spec.n))
        v = int(rng.integers(spec.n))
        if u != v and (u, v) not in edges:
            edges.add((u, v))
    return _edges_to_graph(spec.n, edges)


def gen_sp2(spec: GenSpec) -> Graph:
    """Sparse graph whose extra edges attach preferentially by in-degree."""
    spec.validate()
    rng = np.random.default_rng(np.random.PCG64(spec.seed))
    edges = _phase1_degree_cover(rng, spec.n)
    _check_phase1_overshoot(edges, spec.m)

    indeg = np.zeros(spec.n, dtype=np.int64)
    for _, v in edges:
        indeg[v] += 1
    while len(edges) < spec.m:
        # integer roulette over current in-degrees: exact proportionality
        r = int(rng.integers(int(indeg.sum())))
        target = int(np.searchsorted(np.cumsum(indeg), r, side="right"))
        source = _other_vertex(rng, spec.n, target)
        if (source, target) in edges:
            continue
        edges.add((source, target))
        indeg[target] += 1
    return _edges_to_graph(spec.n, edges)


def gen_den(spec: GenSpec) -> Graph:
    """Complete directed graph with uniform (0, 1) weights."""
    spec.validate()
    rng = np.random.default_rng(np.random.PCG64(spec.seed))
    n = spec.n
    src = np.repeat(np.arange(n, dtype=np.int64), n)
    dst = np.tile(np.arange(n, dtype=np.int64), n)
    keep = src != dst
    src, dst = src[keep], dst[keep]
    weight = rng.random(src.size)
    zero = weight == 0.0
    while zero.any():
        weight[zero] = rng.random(int(zero.sum()))
        zero = weight == 0.0
    return build_graph(n, src, dst, weight)
