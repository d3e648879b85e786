"""Sample-size bounds and seeded weighted sampling.

Logarithms are base 2 throughout.  All sampling is with replacement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .types import LabeledPoint, WeightedDataset


@dataclass(frozen=True)
class SampleSizeParams:
    epsilon: float
    vc_dim: int
    constant_multiplier: float = 1.0
    failure_prob: float = 0.5

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")
        if self.vc_dim < 1:
            raise ValueError("vc_dim must be at least 1")
        if not self.constant_multiplier > 0:
            raise ValueError("constant_multiplier must be positive")
        if not 0 < self.failure_prob < 1:
            raise ValueError("failure_prob must lie in (0, 1)")


def sample_size(p: SampleSizeParams) -> int:
    """``ceil(C * min(v/e * log2(v/e), v/e^2) * max(1, log2(1/delta)))``.

    The default ``failure_prob`` of 1/2 makes the amplification factor 1.
    """
    ratio = p.vc_dim / p.epsilon
    base = min(ratio * math.log2(ratio), p.vc_dim / p.epsilon**2)
    amplify = max(1.0, math.log2(1.0 / p.failure_prob))
    return math.ceil(p.constant_multiplier * base * amplify)


def guarantee_sample_size(d: int, epsilon: float, constant: float = 1.0) -> int:
    """Per-round sample for the guaranteed MWU protocol: ``C * 25d * log2 log2 (1/eps)``.

    Floored at ``25d`` for epsilon close to 1, where the double log is tiny.
    """
    loglog = math.log2(math.log2(1.0 / epsilon))
    return math.ceil(constant * 25 * d * max(1.0, loglog))


def weighted_indices(weights, m: int, rng) -> np.ndarray:
    weights = np.asarray(weights, dtype=float)
    if weights.size == 0:
        raise ValueError("cannot sample from an empty dataset")
    total = weights.sum()
    if not total > 0:
        raise ValueError("cannot sample with zero total weight")
    rng = np.random.default_rng(rng)
    return rng.choice(weights.size, size=m, p=weights / total)


def weighted_sample(ds: WeightedDataset, m: int, rng_seed=None) -> list[LabeledPoint]:
    """``m`` i.i.d. draws, point ``i`` with probability ``w_i / sum(w)``."""
    return [ds[int(i)] for i in weighted_indices(ds.weights, m, rng_seed)]


def proportional_allocation(sizes, s: int, rng_seed=None) -> np.ndarray:
    """Split ``s`` draws among parties in proportion to ``sizes``.

    Realised as ``s`` independent categorical draws, so the counts always sum
    to ``s`` and party ``i`` receives ``s * size_i / sum(sizes)`` in expectation.
    """
    sizes = np.asarray(sizes, dtype=float)
    if np.any(sizes < 0):
        raise ValueError("sizes must be nonnegative")
    total = sizes.sum()
    if not total > 0:
        raise ValueError("at least one party must hold positive size")
    rng = np.random.default_rng(rng_seed)
    return rng.multinomial(s, sizes / total)
