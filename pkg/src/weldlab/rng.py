"""Labeled, counter-based random streams.

Every random draw in the lab descends from one root seed. A stream is
addressed by a tuple of labels (strings or non-negative ints), so that
e.g. ``stream(seed, "instance", "weld")`` and ``stream(seed, "tester", 3)``
are independent and reproducible regardless of call order.
"""

from __future__ import annotations

import os
import zlib

import numpy as np

MASK64 = (1 << 64) - 1
DEFAULT_SEED = 20240601


def _label_key(label) -> int:
    if isinstance(label, (bool, np.bool_)):
        return int(label)
    if isinstance(label, (int, np.integer)):
        if label < 0:
            raise ValueError(f"stream labels must be non-negative, got {label}")
        return int(label)
    return zlib.crc32(str(label).encode()) | (1 << 32)


def stream(seed: int, *labels) -> np.random.Generator:
    """Return an independent Philox generator for ``(seed, *labels)``."""
    ss = np.random.SeedSequence(int(seed) & MASK64, spawn_key=tuple(_label_key(x) for x in labels))
    return np.random.Generator(np.random.Philox(ss))


def child_seed(seed: int, *labels) -> int:
    """Derive a 63-bit integer seed, for APIs that want a plain int."""
    ss = np.random.SeedSequence(int(seed) & MASK64, spawn_key=tuple(_label_key(x) for x in labels))
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


def default_seed() -> int:
    raw = os.environ.get("WELDLAB_SEED")
    return int(raw) if raw not in (None, "") else DEFAULT_SEED


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def hashed_permutation(key: int, size: int) -> list[int]:
    """Fisher-Yates permutation of ``range(size)`` driven by splitmix64(key).

    Pure function of ``(key, size)``; used for per-vertex neighbor orders
    that must stay fixed for the lifetime of an instance.
    """
    perm = list(range(size))
    state = key & MASK64
    for i in range(size - 1, 0, -1):
        state = splitmix64(state)
        j = state % (i + 1)
        perm[i], perm[j] = perm[j], perm[i]
    return perm
