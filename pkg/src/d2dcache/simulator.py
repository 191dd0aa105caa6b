"""Monte Carlo engine for the clustering + random caching scheme.

Each realization samples one cache placement and one request vector, counts
potential links per cluster and credits every served user 1/(K*W) of the link
rate (the exact time average of round-robin scheduling with duty cycle 1/K).
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .cachedist import CacheDistribution, CachePlacement, optimal_cache_distribution, sample_cache_placement
from .errors import ConfigurationError, UnsupportedConfigurationError
from .geometry import ClusterLayout, NetworkConfig, build_clusters
from .harmonic import ZipfDemand, sample_requests

logger = logging.getLogger(__name__)

WORKERS_ENV = "D2DCACHE_WORKERS"


@dataclass(frozen=True)
class RealizationOutcome:
    served: np.ndarray = field(repr=False)  # bool per user
    rate_share: np.ndarray = field(repr=False)  # fraction of C per user
    w_per_cluster: np.ndarray = field(repr=False)  # potential-link counts


@dataclass(frozen=True)
class TradeoffPoint:
    g_c: int
    p_out: float
    t_min_norm: float
    t_mean_norm: float
    realizations: int
    std_err_p: float
    std_err_t: float
    seed: int


def potential_links(
    placement: CachePlacement,
    requests: np.ndarray,
    layout: ClusterLayout,
    exclude_self: bool = True,
) -> list[np.ndarray]:
    """Per-user sets of same-cluster candidate transmitters caching the request."""
    n = placement.n
    sets: list[np.ndarray] = [np.empty(0, dtype=np.int64)] * n
    order = np.argsort(layout.cluster_of, kind="stable")
    bounds = np.searchsorted(layout.cluster_of[order], np.arange(layout.n_clusters + 1))
    for c in range(layout.n_clusters):
        members = order[bounds[c] : bounds[c + 1]]
        caches = placement.files[members]  # (g_c, M)
        for u in members:
            holds = np.any(caches == requests[u], axis=1)
            cand = members[holds]
            if exclude_self:
                cand = cand[cand != u]
            sets[u] = cand
    return sets


def _served_flags(
    placement_files: np.ndarray,
    requests: np.ndarray,
    cluster_of: np.ndarray,
    n_clusters: int,
    m: int,
    exclude_self: bool,
) -> np.ndarray:
    M = placement_files.shape[1]
    flat = cluster_of.repeat(M) * (m + 1) + placement_files.ravel()
    counts = np.bincount(flat, minlength=n_clusters * (m + 1)).reshape(n_clusters, m + 1)
    total = counts[cluster_of, requests]
    if exclude_self:
        own = np.sum(placement_files == requests[:, None], axis=1)
        return (total - own) > 0
    return total > 0


def run_realization(
    config: NetworkConfig,
    layout: ClusterLayout,
    dist: CacheDistribution,
    demand: ZipfDemand,
    rng: np.random.Generator,
    exclude_self: bool = True,
) -> RealizationOutcome:
    placement = sample_cache_placement(dist, config.n, config.M, rng)
    requests = sample_requests(demand, config.n, rng)
    served = _served_flags(
        placement.files, requests, layout.cluster_of, layout.n_clusters, demand.m, exclude_self
    )
    w = np.bincount(layout.cluster_of[served], minlength=layout.n_clusters)
    rate_share = np.zeros(config.n)
    if served.any():
        rate_share[served] = 1.0 / (layout.K * w[layout.cluster_of[served]])
    return RealizationOutcome(served=served, rate_share=rate_share, w_per_cluster=w)


def realization_rng(seed: int, k: int) -> np.random.Generator:
    """Counter-based per-realization stream: independent of execution order."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(k,)))


def _batch_bounds(realizations: int, n_batches: int) -> np.ndarray:
    return np.linspace(0, realizations, n_batches + 1).astype(int)


def _run_batch(args) -> tuple[np.ndarray, np.ndarray, float, float]:
    config, layout, dist, demand, seed, k_lo, k_hi, exclude_self = args
    sum_rate = np.zeros(config.n)
    sum_served = np.zeros(config.n)
    for k in range(k_lo, k_hi):
        out = run_realization(config, layout, dist, demand, realization_rng(seed, k), exclude_self)
        sum_rate += out.rate_share
        sum_served += out.served
    count = k_hi - k_lo
    return sum_rate, sum_served, float(np.mean(sum_served) / count), float(np.mean(sum_rate) / count)


def estimate_tradeoff_point(
    config: NetworkConfig,
    layout: ClusterLayout,
    dist: CacheDistribution,
    demand: ZipfDemand,
    realizations: int,
    seed: int,
    exclude_self: bool = True,
    workers: int | None = None,
) -> TradeoffPoint:
    """Monte Carlo estimate of (outage, normalized throughput) for one configuration.

    Deterministic for a fixed seed regardless of worker count: realization k
    always uses the stream derived from (seed, k), batches have fixed
    boundaries and are reduced in batch order.
    """
    if realizations < 1:
        raise ConfigurationError("realizations must be >= 1")
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, "1"))
    n_batches = min(realizations, 16)
    bounds = _batch_bounds(realizations, n_batches)
    jobs = [
        (config, layout, dist, demand, seed, int(bounds[b]), int(bounds[b + 1]), exclude_self)
        for b in range(n_batches)
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_batch, jobs))
    else:
        results = [_run_batch(j) for j in jobs]

    sum_rate = np.zeros(config.n)
    sum_served = np.zeros(config.n)
    batch_p = np.empty(n_batches)
    batch_t = np.empty(n_batches)
    for b, (r, s, srv_mean, t_mean) in enumerate(results):
        sum_rate += r
        sum_served += s
        batch_p[b] = 1.0 - srv_mean
        batch_t[b] = t_mean
    per_user_t = sum_rate / realizations
    p_out = 1.0 - float(np.mean(sum_served)) / realizations
    if n_batches > 1:
        std_err_p = float(np.std(batch_p, ddof=1) / np.sqrt(n_batches))
        std_err_t = float(np.std(batch_t, ddof=1) / np.sqrt(n_batches))
    else:
        std_err_p = 0.0
        std_err_t = 0.0
    return TradeoffPoint(
        g_c=layout.g_c,
        p_out=p_out,
        t_min_norm=float(np.min(per_user_t)),
        t_mean_norm=float(np.mean(per_user_t)),
        realizations=realizations,
        std_err_p=std_err_p,
        std_err_t=std_err_t,
        seed=seed,
    )


def sweep_cluster_sizes(
    config: NetworkConfig,
    demand: ZipfDemand,
    g_c_list: list[int],
    realizations: int,
    seed: int,
    K: int = 4,
    exclude_self: bool = True,
    workers: int | None = None,
) -> list[TradeoffPoint]:
    """One tradeoff point per cluster size, each with the caching pmf
    re-optimized for that size. Infeasible sizes are skipped with a warning."""
    points: list[TradeoffPoint] = []
    for g_c in g_c_list:
        try:
            layout = build_clusters(config.n, g_c, K=K)
        except ConfigurationError as exc:
            logger.warning("skipping g_c=%d: %s", g_c, exc)
            continue
        if g_c == 1:
            # no neighbors: every user is in outage by construction
            points.append(
                TradeoffPoint(
                    g_c=1, p_out=1.0, t_min_norm=0.0, t_mean_norm=0.0,
                    realizations=realizations, std_err_p=0.0, std_err_t=0.0, seed=seed,
                )
            )
            continue
        try:
            dist = optimal_cache_distribution(demand, config.M, g_c)
        except UnsupportedConfigurationError as exc:
            logger.warning("skipping g_c=%d: %s", g_c, exc)
            continue
        points.append(
            estimate_tradeoff_point(
                config, layout, dist, demand, realizations, seed,
                exclude_self=exclude_self, workers=workers,
            )
        )
    return points


def sample_schedule_slot(
    placement: CachePlacement,
    requests: np.ndarray,
    layout: ClusterLayout,
    color: int,
    rng: np.random.Generator,
    exclude_self: bool = True,
) -> list[tuple[int, int]]:
    """One TDMA slot: in each active (same-color) cluster with a potential link,
    pick a served receiver uniformly and its nearest caching node as transmitter
    (ties broken by lowest node id). Returns (tx, rx) pairs."""
    links: list[tuple[int, int]] = []
    active = np.flatnonzero(layout.color_of == color)
    sets = potential_links(placement, requests, layout, exclude_self)
    for c in active:
        members = np.flatnonzero(layout.cluster_of == c)
        served = [u for u in members if sets[u].size > 0]
        if not served:
            continue
        rx = int(served[rng.integers(len(served))])
        cand = sets[rx]
        d = np.linalg.norm(layout.coords[cand] - layout.coords[rx], axis=1)
        tx = int(cand[np.argmin(d)])  # argmin keeps the lowest id on ties
        links.append((tx, rx))
    return links
