"""Counters that track what the hitting-time engines actually allocate.

The streaming engine's memory contract is: three persistent length-n
state vectors per run, one reusable length-n scratch buffer for the
matrix-vector product, and edge records from at most one shard resident
at a time.  These counters are incremented at the real allocation and
read sites so tests can assert the contract instead of trusting it.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class EngineStats:
    """Allocation and pass counters for one hitting-time computation."""

    backend: str = "mem"
    edge_passes: int = 0
    state_vectors_live: int = 0
    state_vectors_peak: int = 0
    scratch_vectors_live: int = 0
    scratch_vectors_peak: int = 0
    shard_buffer_peak_records: int = 0
    shards_read: int = 0
    wall_time_s: float = 0.0
    notes: dict = field(default_factory=dict)

    def state_allocated(self, count: int = 1) -> None:
        self.state_vectors_live += count
        self.state_vectors_peak = max(self.state_vectors_peak, self.state_vectors_live)

    def state_released(self, count: int = 1) -> None:
        self.state_vectors_live -= count

    def scratch_allocated(self, count: int = 1) -> None:
        self.scratch_vectors_live += count
        self.scratch_vectors_peak = max(
            self.scratch_vectors_peak, self.scratch_vectors_live
        )

    def scratch_released(self, count: int = 1) -> None:
        self.scratch_vectors_live -= count

    def shard_buffer_loaded(self, records: int) -> None:
        self.shards_read += 1
        self.shard_buffer_peak_records = max(
            self.shard_buffer_peak_records, records
        )

    def pass_completed(self) -> None:
        self.edge_passes += 1
