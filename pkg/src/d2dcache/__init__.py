"""Simulator and analytical toolkit for one-hop D2D caching networks.

Estimates the throughput-outage tradeoff of a clustering + random caching
scheme by Monte Carlo and evaluates the matching closed-form bounds and
achievability curves, so simulated and theoretical curves can be overlaid.
"""

from .cachedist import (
    CacheDistribution,
    CachePlacement,
    hit_probability,
    hit_probability_full_support,
    optimal_cache_distribution,
    paley_zygmund_lower_bound,
    pairwise_hit_upper_bound,
    sample_cache_placement,
)
from .errors import (
    ConfigurationError,
    DomainError,
    NumericalError,
    PreconditionError,
    UnsupportedConfigurationError,
)
from .geometry import (
    ClusterLayout,
    NetworkConfig,
    active_cluster_sets,
    build_clusters,
    build_grid,
    feasible_cluster_sizes,
    reuse_factor,
    verify_protocol_model,
)
from .harmonic import ZipfDemand, harmonic_bounds, harmonic_sum, sample_requests, zipf_pmf
from .simulator import (
    RealizationOutcome,
    TradeoffPoint,
    estimate_tradeoff_point,
    potential_links,
    run_realization,
    sweep_cluster_sizes,
)
from .theory import (
    TheoryParams,
    achievable_curve,
    f_ub,
    make_params,
    outage_lower_bound_finite,
    outer_bound_curve,
    rho_star,
    solve_fixed_point,
    sum_throughput_upper_finite,
    achievability_constants,
    zeta,
)

__all__ = [name for name in dir() if not name.startswith("_")]
