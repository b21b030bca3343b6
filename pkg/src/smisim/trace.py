"""Uniformly sampled signal traces, the carrier type for every pipeline stage."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np


class Unit(Enum):
    """Physical unit tag carried by a trace; transformations must be explicit."""

    METERS = "meters"
    AMPS = "amps"
    VOLTS = "volts"
    DIMENSIONLESS = "dimensionless"
    PRESSURE = "pressure"


@dataclass
class SampleTrace:
    """A uniformly sampled waveform with its sample rate and unit.

    ``samples`` is stored as a 1-D float64 array; every sample must be finite.
    ``meta`` carries free-form provenance (channel name, seed, clip counts).
    """

    samples: np.ndarray
    sample_rate_hz: float
    unit: Unit = Unit.DIMENSIONLESS
    meta: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.samples = np.asarray(self.samples, dtype=float).reshape(-1)
        if self.sample_rate_hz <= 0:
            raise ValueError(f"sample_rate_hz must be > 0, got {self.sample_rate_hz}")
        if self.samples.size and not np.all(np.isfinite(self.samples)):
            bad = int(np.flatnonzero(~np.isfinite(self.samples))[0])
            raise ValueError(f"non-finite sample at index {bad}")

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration_s(self) -> float:
        return self.samples.size / self.sample_rate_hz

    def times(self) -> np.ndarray:
        """Sample instants in seconds, starting at t = 0."""
        return np.arange(self.samples.size) / self.sample_rate_hz

    def index_at(self, t_s: float) -> int:
        """Nearest sample index for a time offset; clipped to valid range."""
        i = int(round(t_s * self.sample_rate_hz))
        return min(max(i, 0), max(self.samples.size - 1, 0))

    def with_samples(
        self, samples: np.ndarray, unit: Unit | None = None, **meta: Any
    ) -> "SampleTrace":
        """Derived trace at the same rate; meta is copied then updated."""
        merged = dict(self.meta)
        merged.update(meta)
        return SampleTrace(samples, self.sample_rate_hz, unit or self.unit, merged)


def check_window(window: tuple[int, int], n: int, min_len: int = 1) -> tuple[int, int]:
    """Validate a half-open [start, stop) index window against a signal length."""
    start, stop = int(window[0]), int(window[1])
    if not (0 <= start < stop <= n):
        raise ValueError(f"window [{start}, {stop}) out of bounds for length {n}")
    if stop - start < min_len:
        raise ValueError(f"window [{start}, {stop}) shorter than {min_len} samples")
    return start, stop
