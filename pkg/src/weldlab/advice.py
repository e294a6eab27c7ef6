"""Advice sources: a marking bit per public label, with billed evaluations."""

from __future__ import annotations

from typing import Protocol

import numpy as np

from .rng import MASK64, splitmix64


class AdviceSource(Protocol):
    evaluations: int

    def mark(self, label: int) -> int: ...


class TableAdvice:
    """Bits stored in an array indexed by label."""

    def __init__(self, bits):
        self.bits = np.asarray(bits, dtype=np.int8)
        self.evaluations = 0

    def mark(self, label: int) -> int:
        self.evaluations += 1
        return int(self.bits[label])

    def __len__(self) -> int:
        return len(self.bits)


class ConstantAdvice:
    def __init__(self, bit: int):
        self.bit = int(bit)
        self.evaluations = 0

    def mark(self, label: int) -> int:
        self.evaluations += 1
        return self.bit


class RandomAdvice:
    """Independent fair bits, a pure function of (seed, label)."""

    def __init__(self, seed: int):
        self.key = int(seed) & MASK64
        self.evaluations = 0

    def mark(self, label: int) -> int:
        self.evaluations += 1
        return splitmix64(self.key ^ splitmix64(int(label))) & 1


def parity_advice(instance, oracle=None) -> TableAdvice:
    """Mark a body vertex iff the loop parity of its advice partner's pair says "weld".

    This is the advice an honest prover would derive from the double edges
    alone; on G2 it is the strongest cheating witness we ship.
    """
    from .generators import weld_parity

    g = instance.graph
    layout = instance.layout()
    bits = np.zeros(g.vertex_count, np.int8)
    body = np.flatnonzero((g.roles == 0) & (g.nbr[:, 3] >= 0))
    partner_pair = layout.pair_of(g.nbr[body, 3])
    parity = instance.loops.pair_class[partner_pair] % 2
    bits[body] = parity == weld_parity(instance.spec.advice_convention)
    o = oracle or instance.oracle
    return TableAdvice(bits[o.vertex_of])
