"""Weighted directed graphs and the tab-separated edge-list file format.

Vertices are dense integers ``0..n-1``.  The on-disk format is UTF-8 text,
one edge per line as ``src<TAB>dst[<TAB>weight]`` (weight defaults to 1.0),
with ``#``-prefixed comment lines and an optional ``# n=<count>`` header
that fixes the vertex count (needed for trailing isolated vertices).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import EdgeListParseError, GraphIOError, ValidationError

_HEADER_RE = re.compile(r"#\s*n\s*=\s*(\d+)\s*$")


@dataclass(frozen=True)
class Graph:
    """A directed graph held as parallel edge arrays sorted by (src, dst)."""

    n: int
    src: np.ndarray
    dst: np.ndarray
    weight: np.ndarray

    @property
    def m(self) -> int:
        return int(self.src.size)

    def edges(self):
        """Iterate (src, dst, weight) tuples in canonical order."""
        for u, v, w in zip(self.src, self.dst, self.weight):
            yield int(u), int(v), float(w)

    def out_weight_sums(self) -> np.ndarray:
        return np.bincount(self.src, weights=self.weight, minlength=self.n)

    def in_degrees(self) -> np.ndarray:
        return np.bincount(self.dst, minlength=self.n)

    def out_degrees(self) -> np.ndarray:
        return np.bincount(self.src, minlength=self.n)


def build_graph(
    n: int,
    src,
    dst,
    weight=None,
    *,
    merge_duplicates: bool = False,
) -> Graph:
    """Construct a validated Graph from edge arrays.

    Duplicate (src, dst) pairs are merged by weight summation when
    ``merge_duplicates`` is set and rejected otherwise.
    """
    src = np.asarray(src, dtype=np.int64)
    dst = np.asarray(dst, dtype=np.int64)
    if weight is None:
        weight = np.ones(src.size, dtype=np.float64)
    else:
        weight = np.asarray(weight, dtype=np.float64)
    if not (src.size == dst.size == weight.size):
        raise ValidationError("edge arrays have mismatched lengths")
    if n < 0:
        raise ValidationError(f"vertex count must be nonnegative, got {n}")
    if src.size:
        lo = min(src.min(), dst.min())
        hi = max(src.max(), dst.max())
        if lo < 0 or hi >= n:
            raise ValidationError(
                f"edge endpoint out of range [0, {n}): saw vertex {lo if lo < 0 else hi}"
            )
    if np.any(~np.isfinite(weight)) or np.any(weight < 0):
        bad = int(np.flatnonzero(~np.isfinite(weight) | (weight < 0))[0])
        raise ValidationError(
            f"edge ({int(src[bad])},{int(dst[bad])}) has invalid weight {weight[bad]}"
        )

    order = np.lexsort((dst, src))
    src, dst, weight = src[order], dst[order], weight[order]
    if src.size:
        dup = (src[1:] == src[:-1]) & (dst[1:] == dst[:-1])
        if dup.any():
            if not merge_duplicates:
                k = int(np.flatnonzero(dup)[0])
                raise ValidationError(
                    f"duplicate edge ({int(src[k])},{int(dst[k])}) (merging disabled)"
                )
            starts = np.flatnonzero(np.concatenate(([True], ~dup)))
            weight = np.add.reduceat(weight, starts)
            src, dst = src[starts], dst[starts]

    g = Graph(n=n, src=src, dst=dst, weight=weight)
    _check_positive_out_weights(g)
    return g


def _check_positive_out_weights(g: Graph) -> None:
    # a vertex that has out-edges but only zero total weight cannot be
    # turned into a stochastic row later
    if g.m == 0:
        return
    sums = g.out_weight_sums()
    degs = g.out_degrees()
    bad = np.flatnonzero((degs > 0) & (sums <= 0))
    if bad.size:
        raise ValidationError(
            f"vertex {int(bad[0])} has out-edges but zero total out-weight"
        )


def load_edge_list(path, merge_duplicates: bool = True) -> Graph:
    """Parse an edge-list file into a Graph.

    ``n`` is the header override when present, else 1 + the largest vertex
    id seen.  Malformed lines raise EdgeListParseError with the line number.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise GraphIOError(f"cannot read edge list {path}: {exc}") from exc

    header_n: int | None = None
    src: list[int] = []
    dst: list[int] = []
    weight: list[float] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\r\n")
        if not line.strip():
            continue
        if line.lstrip().startswith("#"):
            m = _HEADER_RE.match(line.lstrip())
            if m:
                header_n = int(m.group(1))
            continue
        fields = line.split("\t")
        if len(fields) not in (2, 3):
            raise EdgeListParseError(
                path, lineno, f"expected 2 or 3 tab-separated fields, got {len(fields)}"
            )
        try:
            u = int(fields[0])
            v = int(fields[1])
        except ValueError:
            raise EdgeListParseError(path, lineno, f"non-integer vertex id in {line!r}")
        try:
            w = float(fields[2]) if len(fields) == 3 else 1.0
        except ValueError:
            raise EdgeListParseError(path, lineno, f"non-numeric weight in {line!r}")
        if u < 0 or v < 0:
            raise EdgeListParseError(path, lineno, f"negative vertex id in {line!r}")
        if not np.isfinite(w) or w < 0:
            raise ValidationError(f"{path}:{lineno}: negative or non-finite weight {w}")
        src.append(u)
        dst.append(v)
        weight.append(w)

    max_seen = max(max(src, default=-1), max(dst, default=-1))
    n = header_n if header_n is not None else max_seen + 1
    if header_n is not None and header_n <= max_seen:
        raise ValidationError(
            f"header n={header_n} is too small for vertex id {max_seen}"
        )
    return build_graph(n, src, dst, weight, merge_duplicates=merge_duplicates)


def save_edge_list(g: Graph, path) -> None:
    """Write a Graph in the edge-list text format with an ``# n=`` header."""
    path = Path(path)
    try:
        with path.open("w", encoding="utf-8") as fh:
            fh.write(f"# n={g.n}\n")
            for u, v, w in g.edges():
                fh.write(f"{u}\t{v}\t{w:.17g}\n")
    except OSError as exc:
        raise GraphIOError(f"cannot write edge list {path}: {exc}") from exc
