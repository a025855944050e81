"""File-level pipelines behind the service endpoints and the CLI.

Each function loads its inputs from paths, runs one core operation and
writes the result artifact, returning a small summary dict.  Paths are
resolved on the filesystem of the process running the computation (the
service when one is deployed remotely).
"""

from __future__ import annotations

import tempfile
from pathlib import Path

import numpy as np

from . import oracles, sampling
from .engine import (
    HittingProfile,
    approximate_hitting_times,
    start_distribution,
)
from .errors import GraphIOError, ValidationError
from .evaluation import EvalConfig, run_benchmark
from .generators import GenSpec, generate
from .graph import load_edge_list, save_edge_list
from .instrumentation import EngineStats
from .shards import load_sharded, write_shards
from .transition import build_transition

AUTO_SHARD_COUNT = 4


def _policy(dangling: str) -> str:
    return dangling.replace("-", "_")


def run_gen(model: str, n: int, edges: int | None, seed: int, out_path: str) -> dict:
    spec = GenSpec(model=model, n=n, m=edges, seed=seed)
    g = generate(spec)
    save_edge_list(g, out_path)
    return {"out_path": str(out_path), "n": g.n, "edge_count": g.m}


def run_shard(graph_path: str, shards: int, out_dir: str, dangling: str = "self-loop") -> dict:
    g = load_edge_list(graph_path)
    P = build_transition(g, dangling=_policy(dangling))
    sharded = write_shards(P, shards, out_dir)
    return {
        "out_dir": str(out_dir),
        "shards": sharded.shard_count,
        "n": sharded.n,
        "nnz": sharded.nnz,
    }


def _load_start(n: int, start, start_dist_path, uniform: bool) -> np.ndarray:
    picked = sum(x is not None and x is not False for x in (start, start_dist_path, uniform))
    if picked != 1:
        raise ValidationError(
            "exactly one of a start vertex, a start-distribution file or "
            "the uniform flag must be given"
        )
    if start is not None:
        return start_distribution(n, "delta", vertex=start)
    if uniform:
        return start_distribution(n, "uniform")
    path = Path(start_dist_path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise GraphIOError(f"cannot read start distribution {path}: {exc}") from exc
    weights = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            weights.append(float(line))
        except ValueError:
            raise ValidationError(f"{path}:{lineno}: non-numeric weight {line!r}")
    return start_distribution(n, "custom", weights=np.asarray(weights))


def run_hit(
    graph_path: str | None,
    shard_dir: str | None,
    start: int | None,
    start_dist_path: str | None,
    uniform: bool,
    horizon: int,
    order: int = 0,
    engine: str | None = None,
    out_path: str = "hit.tsv",
    fmt: str = "tsv",
    quiet: bool = False,
    threads: int = 1,
) -> dict:
    if (graph_path is None) == (shard_dir is None):
        raise ValidationError("exactly one of a graph path or a shard directory is required")
    if engine not in (None, "mem", "stream"):
        raise ValidationError(f"unknown engine {engine!r}")

    stats = EngineStats()
    tmp = None
    try:
        if shard_dir is not None:
            # streaming is implied by sharded input; --engine applies to
            # in-memory inputs only
            P = load_sharded(shard_dir)
        else:
            g = load_edge_list(graph_path)
            P = build_transition(g)
            if engine == "stream":
                tmp = tempfile.TemporaryDirectory(prefix="hittimes-shards-")
                P = write_shards(P, min(AUTO_SHARD_COUNT, P.n), tmp.name)
        lam = _load_start(P.n, start, start_dist_path, uniform)
        profile = approximate_hitting_times(
            P, lam if start is None else start,
            horizon, order=order, stats=stats, threads=threads,
        )
    finally:
        if tmp is not None:
            tmp.cleanup()

    profile.write(out_path, fmt=fmt, include_timing=not quiet)
    summary = {
        "out_path": str(out_path),
        "n": profile.n,
        "T": horizon,
        "order": order,
        "backend": profile.backend,
        "passes": profile.passes,
    }
    if not quiet:
        summary["wall_time_s"] = profile.wall_time_s
    return summary


def run_exact(
    graph_path: str,
    method: str,
    start: int | None,
    horizon: int,
    out_path: str,
    fmt: str = "tsv",
) -> dict:
    g = load_edge_list(graph_path)
    P = build_transition(g)
    if method == "recursive":
        matrix = oracles.exact_hitting_matrix(P, horizon)
        matrix.write(out_path, fmt=fmt)
        return {"out_path": str(out_path), "method": method, "n": P.n, "T": horizon}
    if start is None:
        raise ValidationError(f"method {method!r} requires a start vertex")
    if method == "first-passage":
        profile = oracles.exact_first_passage(P, start, horizon)
    elif method == "paths":
        profile = oracles.brute_force_paths(P, start, horizon)
    else:
        raise ValidationError(f"unknown exact method {method!r}")
    profile.write(out_path, fmt=fmt, include_timing=False)
    return {"out_path": str(out_path), "method": method, "n": P.n, "T": horizon}


def run_sample_diag(
    graph_path: str,
    horizon: int,
    eps: float | None,
    rho: float | None,
    walks: int | None,
    seed: int,
    out_path: str,
) -> dict:
    if (eps is None) != (rho is None):
        raise ValidationError("eps and rho must be given together")
    if (walks is None) == (eps is None):
        raise ValidationError("give either a walk count or an (eps, rho) pair")
    L = walks if walks is not None else sampling.hoeffding_walk_count(eps, rho)
    g = load_edge_list(graph_path)
    P = build_transition(g)
    estimate = sampling.sample_return_probabilities(P, horizon, L, seed)
    estimate.save(out_path)
    return {"out_path": str(out_path), "walks": L, "n": P.n, "T": horizon}


def run_eval(
    models: list[str],
    sizes: list[int],
    edges: list[int],
    instances: int,
    horizon: int,
    order: int,
    seed: int,
    out_path: str,
    threads: int = 1,
) -> dict:
    config = EvalConfig(
        models=tuple(models),
        sizes=tuple(sizes),
        edges=tuple(edges),
        instances=instances,
        horizon=horizon,
        order=order,
        seed=seed,
        threads=threads,
    )
    report = run_benchmark(config)
    path = Path(out_path)
    try:
        path.write_text(report.to_json(), encoding="utf-8")
    except OSError as exc:
        raise GraphIOError(f"cannot write report {path}: {exc}") from exc
    return {"out_path": str(out_path), "report": report.to_dict(), "table": report.to_table()}
