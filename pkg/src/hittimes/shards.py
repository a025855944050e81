"""Disk-sharded transition matrices for out-of-core walk propagation.

Edges are partitioned into contiguous src-vertex ranges balanced by edge
count and written as flat little-endian records ``(u32 src, u32 dst,
f64 prob)``.  A plain-text ``manifest.txt`` records the matrix shape, the
per-shard ranges and a CRC32 checksum per shard; every read re-verifies
the checksum so corruption surfaces as an error instead of bad numbers.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import GraphIOError, ShardCorruptionError, ValidationError
from .instrumentation import EngineStats
from .transition import TransitionMatrix, validate_distribution

SHARD_DTYPE = np.dtype([("src", "<u4"), ("dst", "<u4"), ("prob", "<f8")])
MANIFEST_NAME = "manifest.txt"


def _shard_filename(index: int) -> str:
    return f"shard-{index:05d}.bin"


@dataclass(frozen=True)
class ShardMeta:
    index: int
    first_src: int
    last_src: int
    edge_count: int
    checksum: str


@dataclass(frozen=True)
class ShardedTransitionMatrix:
    """Handle to a shard directory; edges are read back one shard at a time."""

    directory: Path
    n: int
    nnz: int
    shards: tuple[ShardMeta, ...]

    storage = "sharded"

    @property
    def shard_count(self) -> int:
        return len(self.shards)

    def _read_shard(self, meta: ShardMeta, stats: EngineStats | None = None) -> np.ndarray:
        path = self.directory / _shard_filename(meta.index)
        try:
            raw = path.read_bytes()
        except OSError as exc:
            raise GraphIOError(f"cannot read shard {path}: {exc}") from exc
        if len(raw) != meta.edge_count * SHARD_DTYPE.itemsize:
            raise ShardCorruptionError(
                f"{path}: size {len(raw)} does not match edge_count {meta.edge_count}"
            )
        checksum = f"{zlib.crc32(raw) & 0xFFFFFFFF:08x}"
        if checksum != meta.checksum:
            raise ShardCorruptionError(
                f"{path}: checksum {checksum} != manifest {meta.checksum}"
            )
        records = np.frombuffer(raw, dtype=SHARD_DTYPE)
        if stats is not None:
            stats.shard_buffer_loaded(records.size)
        return records

    def iter_shards(self, stats: EngineStats | None = None):
        for meta in self.shards:
            yield self._read_shard(meta, stats)

    def iter_edges(self):
        """Iterate (src, dst, prob) across all shards in order."""
        for records in self.iter_shards():
            for rec in records:
                yield int(rec["src"]), int(rec["dst"]), float(rec["prob"])

    def diagonal(self) -> np.ndarray:
        d = np.zeros(self.n, dtype=np.float64)
        for records in self.iter_shards():
            loops = records["src"] == records["dst"]
            d[records["src"][loops].astype(np.int64)] = records["prob"][loops]
        return d

    def apply_transposed(
        self,
        p: np.ndarray,
        out: np.ndarray | None = None,
        stats: EngineStats | None = None,
        check: bool = True,
        threads: int = 1,
    ) -> np.ndarray:
        """Streaming scatter pass: one full sweep over all shards.

        Sequential by default, with only the preallocated output vector
        plus one shard's records resident on top of the input vector.
        With ``threads > 1`` shards are processed concurrently into
        per-shard partial vectors that are merged in shard order, so the
        result is deterministic for any thread count (at the price of one
        partial vector per shard in flight).
        """
        if check:
            validate_distribution(p, self.n)
        if out is None:
            out = np.zeros(self.n, dtype=np.float64)
        else:
            out.fill(0.0)
        if threads > 1 and self.shard_count > 1:
            from concurrent.futures import ThreadPoolExecutor

            def scatter(meta: ShardMeta) -> np.ndarray:
                records = self._read_shard(meta, stats)
                partial = np.zeros(self.n, dtype=np.float64)
                src = records["src"].astype(np.int64)
                np.add.at(
                    partial, records["dst"].astype(np.int64), p[src] * records["prob"]
                )
                return partial

            with ThreadPoolExecutor(max_workers=threads) as pool:
                for partial in pool.map(scatter, self.shards):
                    out += partial
        else:
            for records in self.iter_shards(stats):
                src = records["src"].astype(np.int64)
                np.add.at(
                    out, records["dst"].astype(np.int64), p[src] * records["prob"]
                )
        if stats is not None:
            stats.pass_completed()
        return out

    def to_in_memory(self) -> TransitionMatrix:
        """Load all shards back into an in-memory matrix (small graphs only)."""
        srcs, dsts, probs = [], [], []
        for records in self.iter_shards():
            srcs.append(records["src"].astype(np.int64))
            dsts.append(records["dst"].astype(np.int64))
            probs.append(records["prob"].astype(np.float64))
        src = np.concatenate(srcs) if srcs else np.zeros(0, dtype=np.int64)
        dst = np.concatenate(dsts) if dsts else np.zeros(0, dtype=np.int64)
        prob = np.concatenate(probs) if probs else np.zeros(0, dtype=np.float64)
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=self.n), out=indptr[1:])
        return TransitionMatrix(n=self.n, src=src, dst=dst, prob=prob, indptr=indptr)


def _balanced_boundaries(indptr: np.ndarray, n: int, shard_count: int) -> list[tuple[int, int]]:
    """Contiguous src ranges [a, b) with roughly equal edge counts."""
    total = int(indptr[-1])
    bounds = [0]
    for s in range(1, shard_count):
        target = round(total * s / shard_count)
        cut = int(np.searchsorted(indptr, target, side="left"))
        bounds.append(min(max(cut, bounds[-1]), n))
    bounds.append(n)
    return [(bounds[i], bounds[i + 1]) for i in range(shard_count)]


def write_shards(P: TransitionMatrix, shard_count: int, directory) -> ShardedTransitionMatrix:
    """Partition a transition matrix into shard files plus a manifest."""
    if shard_count < 1:
        raise ValidationError(f"shard_count must be >= 1, got {shard_count}")
    directory = Path(directory)
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise GraphIOError(f"cannot create shard directory {directory}: {exc}") from exc

    metas = []
    for index, (a, b) in enumerate(_balanced_boundaries(P.indptr, P.n, shard_count)):
        lo, hi = int(P.indptr[a]), int(P.indptr[b])
        records = np.empty(hi - lo, dtype=SHARD_DTYPE)
        records["src"] = P.src[lo:hi]
        records["dst"] = P.dst[lo:hi]
        records["prob"] = P.prob[lo:hi]
        raw = records.tobytes()
        path = directory / _shard_filename(index)
        try:
            path.write_bytes(raw)
        except OSError as exc:
            raise GraphIOError(f"cannot write shard {path}: {exc}") from exc
        metas.append(
            ShardMeta(
                index=index,
                first_src=a,
                last_src=b - 1,
                edge_count=hi - lo,
                checksum=f"{zlib.crc32(raw) & 0xFFFFFFFF:08x}",
            )
        )

    lines = [f"n={P.n}", f"nnz={P.nnz}", f"shards={shard_count}"]
    for meta in metas:
        prefix = f"shard.{meta.index}"
        lines.append(f"{prefix}.first_src={meta.first_src}")
        lines.append(f"{prefix}.last_src={meta.last_src}")
        lines.append(f"{prefix}.edge_count={meta.edge_count}")
        lines.append(f"{prefix}.checksum={meta.checksum}")
    try:
        (directory / MANIFEST_NAME).write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise GraphIOError(f"cannot write manifest in {directory}: {exc}") from exc

    return ShardedTransitionMatrix(
        directory=directory, n=P.n, nnz=P.nnz, shards=tuple(metas)
    )


def load_sharded(directory) -> ShardedTransitionMatrix:
    """Open a shard directory by parsing and validating its manifest."""
    directory = Path(directory)
    path = directory / MANIFEST_NAME
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise GraphIOError(f"cannot read manifest {path}: {exc}") from exc

    kv: dict[str, str] = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ShardCorruptionError(f"{path}: malformed manifest line {line!r}")
        key, _, value = line.partition("=")
        kv[key.strip()] = value.strip()

    try:
        n = int(kv["n"])
        nnz = int(kv["nnz"])
        shard_count = int(kv["shards"])
        metas = []
        for index in range(shard_count):
            prefix = f"shard.{index}"
            metas.append(
                ShardMeta(
                    index=index,
                    first_src=int(kv[f"{prefix}.first_src"]),
                    last_src=int(kv[f"{prefix}.last_src"]),
                    edge_count=int(kv[f"{prefix}.edge_count"]),
                    checksum=kv[f"{prefix}.checksum"],
                )
            )
    except KeyError as exc:
        raise ShardCorruptionError(f"{path}: missing manifest key {exc}") from exc
    except ValueError as exc:
        raise ShardCorruptionError(f"{path}: bad manifest value ({exc})") from exc

    if sum(m.edge_count for m in metas) != nnz:
        raise ShardCorruptionError(f"{path}: shard edge counts do not sum to nnz={nnz}")
    return ShardedTransitionMatrix(directory=directory, n=n, nnz=nnz, shards=tuple(metas))
