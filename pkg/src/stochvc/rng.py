"""Deterministic counter-based random streams.

Every draw is a pure function of (master_seed, stream_id, trial, index), so
trials can be sharded across workers in any order and still reproduce the
serial results bit for bit.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence, TypeVar

import numpy as np

_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_MASK64 = (1 << 64) - 1

T = TypeVar("T")


def _mix(z: int) -> int:
    """SplitMix64 finalizer on a 64-bit word."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
    return z ^ (z >> 31)


@dataclass(frozen=True)
class SeedSpec:
    """Root of a family of independent, reproducible random streams."""

    master_seed: int
    stream_id: int = 0

    def child(self, tag: int) -> "SeedSpec":
        """Derive an independent substream, deterministic in `tag`."""
        return SeedSpec(self.master_seed, _mix(self.stream_id ^ _mix(tag + _GOLDEN)))

    def _state(self, trial: int) -> int:
        key = _mix(self.master_seed + _GOLDEN) ^ _mix(self.stream_id + 3 * _GOLDEN)
        return _mix(key ^ _mix(trial + 5 * _GOLDEN))

    def uniforms(self, trial: int, count: int) -> np.ndarray:
        """Vector of `count` uniforms in [0, 1) for this (stream, trial)."""
        state = self._state(trial)
        idx = np.arange(1, count + 1, dtype=np.uint64)
        with np.errstate(over="ignore"):
            z = np.uint64(state) + idx * np.uint64(_GOLDEN)
            z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
            z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
            z ^= z >> np.uint64(31)
        return (z >> np.uint64(11)).astype(np.float64) * 2.0**-53

    def stream(self, trial: int) -> "UniformStream":
        """Sequential scalar view of one (stream, trial) counter stream."""
        return UniformStream(self._state(trial))


class UniformStream:
    """Single-owner sequential uniform source backed by a fixed counter state."""

    __slots__ = ("_state", "_counter")

    def __init__(self, state: int):
        self._state = state
        self._counter = 0

    def next_uniform(self) -> float:
        self._counter += 1
        z = _mix(self._state + self._counter * _GOLDEN)
        return (z >> 11) * 2.0**-53

    def next_below(self, bound: int) -> int:
        """Uniform integer in [0, bound); requires bound >= 1."""
        return min(int(self.next_uniform() * bound), bound - 1)


def map_trials(fn: Callable[[int], T], trials: int, threads: int = 1) -> list[T]:
    """Apply `fn` to trial indices 0..trials-1 with an ordered reduction.

    `fn` must be pure given its trial index; the result list is identical for
    any thread count.
    """
    if threads <= 1 or trials <= 1:
        return [fn(t) for t in range(trials)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(trials)))


def mean_and_half_width(values: Sequence[float]) -> tuple[float, float]:
    """Sample mean and 95% normal-approximation half-interval."""
    arr = np.asarray(values, dtype=np.float64)
    n = arr.size
    if n == 0:
        return 0.0, 0.0
    mean = float(arr.mean())
    if n == 1:
        return mean, 0.0
    sd = float(arr.std(ddof=1))
    return mean, 1.96 * sd / n**0.5
