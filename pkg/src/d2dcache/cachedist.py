"""Optimal random caching distribution and cluster hit-probability analytics.

The caching pmf maximizes the chance that a user finds its requested file
among the caches of the other nodes in its cluster. It has water-filling
form pc(f) = [1 - nu/z_f]^+ with z_f = Pr(f)^(1/(M(g_c-1)-1)), supported on
the m_star most popular files.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .errors import PreconditionError, UnsupportedConfigurationError
from .harmonic import ZipfDemand, harmonic_sum


@dataclass(frozen=True)
class CacheDistribution:
    pc: np.ndarray = field(repr=False)
    nu: float
    m_star: int
    M: int
    g_c: int

    @property
    def m(self) -> int:
        return int(self.pc.shape[0])


@dataclass(frozen=True)
class CachePlacement:
    """Per-node cached file ids (1-based), shape (n, M); duplicates allowed."""

    files: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return int(self.files.shape[0])

    @property
    def M(self) -> int:
        return int(self.files.shape[1])


def _check_exponent(M: int, g_c: int) -> int:
    """Return the exponent denominator M(g_c-1)-1, rejecting degenerate setups."""
    denom = M * (g_c - 1) - 1
    if denom < 1:
        raise UnsupportedConfigurationError(
            f"need M*(g_c-1) >= 2 for the caching optimization, got M={M}, g_c={g_c}"
        )
    return denom


def optimal_cache_distribution(demand: ZipfDemand, M: int, g_c: int) -> CacheDistribution:
    """Water-filling caching pmf via exact integer search for the support size.

    m_star is the unique integer in {1..m} with
      m_star >= 1 + z_{m_star+1} * sum_{f<=m_star} 1/z_f   and
      m_star <= 1 + z_{m_star}   * sum_{f<=m_star} 1/z_f,
    with z_{m+1} taken as 0, and nu = (m_star-1) / sum_{f<=m_star} 1/z_f.
    """
    denom = _check_exponent(M, g_c)
    m = demand.m
    z = demand.probs ** (1.0 / denom)
    inv_cum = np.cumsum(1.0 / z)
    z_next = np.append(z[1:], 0.0)
    k = np.arange(1, m + 1, dtype=np.float64)
    ok = (k >= 1.0 + z_next * inv_cum) & (k <= 1.0 + z * inv_cum)
    idx = np.flatnonzero(ok)
    if idx.size == 0:
        # float ties at the boundary; relax by machine-level slack
        eps = 1e-12 * k
        ok = (k >= 1.0 + z_next * inv_cum - eps) & (k <= 1.0 + z * inv_cum + eps)
        idx = np.flatnonzero(ok)
    m_star = int(idx[0]) + 1
    nu = (m_star - 1) / inv_cum[m_star - 1]
    pc = np.zeros(m)
    pc[:m_star] = np.maximum(0.0, 1.0 - nu / z[:m_star])
    return CacheDistribution(pc=pc, nu=float(nu), m_star=m_star, M=M, g_c=g_c)


def _pow_one_minus(p: np.ndarray, exponent: float) -> np.ndarray:
    """(1-p)^exponent computed in the log domain, safe for p -> 1."""
    out = np.zeros_like(p)
    hit_one = p >= 1.0
    out[hit_one] = 0.0
    safe = ~hit_one
    out[safe] = np.exp(exponent * np.log1p(-p[safe]))
    return out


def hit_probability(dist: CacheDistribution, demand: ZipfDemand, exclude_self: bool = True) -> float:
    """Probability a user's request is cached within reach in its cluster.

    With exclude_self the user's own cache does not count (exponent M(g_c-1));
    otherwise all g_c caches count (exponent M*g_c).
    """
    if dist.m != demand.m:
        raise PreconditionError("distribution and demand must share the library size m")
    exponent = dist.M * (dist.g_c - 1) if exclude_self else dist.M * dist.g_c
    if exponent <= 0:
        return 0.0
    miss = _pow_one_minus(dist.pc, float(exponent))
    return float(np.sum(demand.probs * (1.0 - miss)))


def hit_probability_full_support(demand: ZipfDemand, M: int, g_c: int) -> float:
    """Closed-form hit probability when the optimal pmf covers all m files.

    p = 1 - (m-1)^E / (H(gamma,1,m) * (sum_f f^(gamma/(E-1)))^(E-1)), E = M(g_c-1),
    evaluated entirely in the log domain.
    """
    denom = _check_exponent(M, g_c)
    dist = optimal_cache_distribution(demand, M, g_c)
    if dist.m_star < demand.m:
        raise PreconditionError(
            f"closed form requires full support; m_star={dist.m_star} < m={demand.m}"
        )
    m = demand.m
    if m == 1:
        return 1.0
    E = M * (g_c - 1)
    e = demand.gamma / denom
    log_f = np.log(np.arange(1, m + 1, dtype=np.float64))
    log_sum = logsumexp(e * log_f)
    log_miss = E * np.log(m - 1.0) - np.log(harmonic_sum(demand.gamma, 1, m)) - denom * log_sum
    return float(-np.expm1(log_miss))


def pairwise_hit_upper_bound(dist: CacheDistribution, demand: ZipfDemand) -> float:
    """Upper bound on the probability that two distinct cluster users both hit.

    (p_u)^2 plus the same-file correction term over the cached support,
    clipped at 1.
    """
    p = hit_probability(dist, demand, exclude_self=True)
    E = float(dist.M * (dist.g_c - 1))
    pc = dist.pc[: dist.m_star]
    pr = demand.probs[: dist.m_star]
    corr = float(np.sum(pr * pr * (1.0 - _pow_one_minus(pc, E))))
    return min(1.0, p * p + corr)


def paley_zygmund_lower_bound(dist: CacheDistribution, demand: ZipfDemand, g_c: int) -> float:
    """Second-moment lower bound on P(at least one potential link in a cluster).

    E[W] = g_c * p_u and E[W^2] <= g_c*p_u + g_c*(g_c-1)*p_pair_ub, so
    P(W > 0) >= E[W]^2 / (g_c*p_u + g_c*(g_c-1)*p_pair_ub).
    """
    p = hit_probability(dist, demand, exclude_self=True)
    if p <= 0.0:
        return 0.0
    puu = pairwise_hit_upper_bound(dist, demand)
    ew = g_c * p
    ew2_ub = g_c * p + g_c * (g_c - 1) * puu
    return float(ew * ew / ew2_ub)


def sample_cache_placement(
    dist: CacheDistribution, n: int, M: int, rng: np.random.Generator
) -> CachePlacement:
    """n*M i.i.d. draws from the caching pmf, with replacement within a node."""
    cdf = np.cumsum(dist.pc)
    cdf[-1] = 1.0
    u = rng.random((n, M))
    files = np.searchsorted(cdf, u, side="right").astype(np.int64) + 1
    return CachePlacement(files=files)
