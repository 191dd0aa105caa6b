"""Zipf request model and generalized harmonic sums with integral bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError


def harmonic_sum(gamma: float, x: int, y: int) -> float:
    """Sum of 1/i^gamma for i = x..y, accumulated in ascending order."""
    if x < 1:
        raise DomainError(f"x must be a positive integer, got {x}")
    if y < x:
        raise DomainError(f"need x <= y, got x={x}, y={y}")
    i = np.arange(x, y + 1, dtype=np.float64)
    return float(np.sum(i ** (-float(gamma))))


def harmonic_bounds(gamma: float, x: int, y: int) -> tuple[float, float]:
    """Integral-comparison lower/upper bounds bracketing harmonic_sum(gamma, x, y).

    Uses the power form for gamma != 1 and the log form for gamma == 1.
    """
    if x < 1:
        raise DomainError(f"x must be a positive integer, got {x}")
    if y < x:
        raise DomainError(f"need x <= y, got x={x}, y={y}")
    if gamma == 1.0:
        lower = math.log(y + 1) - math.log(x)
        upper = math.log(y) - math.log(x) + 1.0 / x
    else:
        c = 1.0 / (1.0 - gamma)
        lower = c * (y + 1) ** (1.0 - gamma) - c * x ** (1.0 - gamma)
        upper = c * y ** (1.0 - gamma) - c * x ** (1.0 - gamma) + x ** (-gamma)
    return lower, upper


@dataclass(frozen=True)
class ZipfDemand:
    """Zipf request distribution over files 1..m with exponent gamma in (0, 1).

    probs[f-1] = f^(-gamma) / norm, norm = harmonic_sum(gamma, 1, m).
    """

    gamma: float
    m: int
    norm: float
    probs: np.ndarray = field(repr=False)
    _cdf: np.ndarray = field(repr=False)

    def pmf(self, f: int) -> float:
        return float(self.probs[f - 1])


def zipf_pmf(gamma: float, m: int) -> ZipfDemand:
    if not 0.0 < gamma < 1.0:
        raise DomainError(f"gamma must lie in (0, 1), got {gamma}")
    if m < 1:
        raise DomainError(f"m must be a positive integer, got {m}")
    norm = harmonic_sum(gamma, 1, m)
    f = np.arange(1, m + 1, dtype=np.float64)
    probs = f ** (-gamma) / norm
    cdf = np.cumsum(probs)
    cdf[-1] = 1.0
    return ZipfDemand(gamma=gamma, m=m, norm=norm, probs=probs, _cdf=cdf)


def sample_requests(demand: ZipfDemand, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw n i.i.d. file ids (1-based) via inverse-cdf lookup."""
    u = rng.random(n)
    return np.searchsorted(demand._cdf, u, side="right").astype(np.int64) + 1
