"""
Analytic failure probabilities
Exact Poisson-binomial laws for the rotation-based Or, exact[t] and threshold[t] circuits
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence, Tuple

import numpy as np

from ..bits import ceil_log2


@dataclass(frozen=True)
class OrCircuitParams:
    """Rotation layout of the approximate Or: a repetitions of n angles, phi_k = 2 pi k / m"""
    n: int
    a: int
    m: int

    @classmethod
    def for_inputs(cls, n: int) -> "OrCircuitParams":
        if n < 1:
            raise ValueError(f"need at least one input, got n={n}")
        a = max(ceil_log2(n), 2)
        return cls(n, a, a * n)

    @property
    def angles(self) -> Tuple[float, ...]:
        return tuple(2 * math.pi * k / self.m for k in range(self.m))


class PoissonBinomial:
    """Law of a sum of independent Bernoulli(p_k) variables"""

    def __init__(self, probabilities: Sequence[float]):
        self.probabilities = np.asarray(probabilities, dtype=float)
        self.pmf = compute_pmf(self.probabilities)

    @property
    def mean(self) -> float:
        return float(self.probabilities.sum())

    def expect(self, values: np.ndarray) -> float:
        return float(np.dot(self.pmf, values))


def compute_pmf(probabilities: Sequence[float]) -> np.ndarray:
    """Coefficients of prod_k (1 - p_k + p_k s), built one factor at a time"""
    pmf = np.array([1.0])
    for p in probabilities:
        step = np.zeros(len(pmf) + 1)
        step[:-1] = pmf * (1 - p)
        step[1:] += pmf * p
        pmf = step
    return pmf


def weight_law(n: int, w: int) -> PoissonBinomial:
    """Law of |Y|: y_k is 1 with probability (1 - cos(phi_k w)) / 2"""
    params = OrCircuitParams.for_inputs(n)
    angles = np.asarray(params.angles)
    return PoissonBinomial((1 - np.cos(angles * w)) / 2)


@lru_cache(maxsize=4096)
def analytic_or_failure(n: int, w: int) -> float:
    """P[Z=0] of the approximate Or on an input of Hamming weight w (w may be a signed shift)"""
    params = OrCircuitParams.for_inputs(n)
    law = weight_law(n, w)
    j = np.arange(params.m + 1)
    return law.expect((1 + np.cos(2 * math.pi * j / params.m)) / 2)


def max_or_failure(n: int) -> float:
    return max(analytic_or_failure(n, w) for w in range(1, n + 1))


def threshold_error_bound(n: int, t: int, w: int) -> float:
    """Union bound over the exact[s] sub-circuits, s = t..n, that may fire falsely on weight w"""
    if not 0 <= t <= n:
        raise ValueError(f"threshold t={t} outside 0..{n}")
    return sum(analytic_or_failure(n, w - s) for s in range(t, n + 1) if s != w)
