"""Closed-form tradeoff bounds and achievability curves.

Evaluates the scaling exponent alpha, the auxiliary function zeta, the
fixed point x* = log(1+(2-gamma)x*), the sum-throughput upper bound and
outage lower bound at finite network size, the piecewise outer-bound
curve, and the four-regime achievable curve with its constants a, b, A,
B, D. Asymptotic o(.) remainders are dropped: curves report leading
terms, with exact finite-size companions where a formula exists.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, NumericalError

_MAX_ITER = 200


def solve_fixed_point(gamma: float) -> float:
    """Solve x = log(1 + (2-gamma)x) for the positive root x > alpha.

    Contraction iteration on x <- log(1+(2-gamma)x) starting above the
    root; falls back to bracketed root finding if the iteration stalls.
    """
    if not 0.0 < gamma < 1.0:
        raise DomainError(f"gamma must lie in (0, 1), got {gamma}")
    c = 2.0 - gamma
    x = 2.0
    for _ in range(_MAX_ITER):
        x_next = math.log1p(c * x)
        if abs(x_next - x) < 1e-15:
            x = x_next
            break
        x = x_next
    if abs(x - math.log1p(c * x)) >= 1e-12:
        # g(x) = x - log(1+cx) is negative just above 0 and positive for large x
        try:
            x = brentq(lambda t: t - math.log1p(c * t), 1e-8, 10.0, xtol=1e-15)
        except ValueError as exc:
            raise NumericalError(f"fixed-point solve failed for gamma={gamma}") from exc
    if abs(x - math.log1p(c * x)) >= 1e-12:
        raise NumericalError(f"fixed-point residual too large for gamma={gamma}")
    return float(x)


@dataclass(frozen=True)
class TheoryParams:
    gamma: float
    M: int
    delta: float
    alpha: float
    a: float
    b: float
    A: float
    x_star: float
    rho_star: float
    delta_limit: bool = False  # treat delta as an exact 0+ limit (drop 16/delta^2 prefactors)


def make_params(gamma: float, M: int, delta: float, delta_limit: bool = False) -> TheoryParams:
    if not 0.0 < gamma < 1.0:
        raise DomainError(f"gamma must lie in (0, 1), got {gamma}")
    if M < 1:
        raise DomainError(f"M must be a positive integer, got {M}")
    if delta < 0 or (delta == 0 and not delta_limit):
        raise DomainError("delta must be > 0 (delta=0 only via the limit flag)")
    alpha = (1.0 - gamma) / (2.0 - gamma)
    a = gamma**gamma * M ** (1.0 - gamma)
    b = ((1.0 - gamma) / a) ** (1.0 / (2.0 - gamma))
    A = gamma ** (gamma / (1.0 - gamma))
    x_star = solve_fixed_point(gamma)
    rho = (x_star / M ** (1.0 - gamma)) ** (1.0 / (2.0 - gamma))
    rho /= (1.0 + 1.5 * delta) ** (2.0 / (2.0 - gamma))
    return TheoryParams(
        gamma=gamma, M=M, delta=delta, alpha=alpha, a=a, b=b, A=A,
        x_star=x_star, rho_star=float(rho), delta_limit=delta_limit,
    )


def zeta(rho: float, params: TheoryParams) -> float:
    """((1+3*delta/2)^(2/(2-gamma)) * rho)^(2-gamma) * M^(1-gamma)."""
    if rho <= 0:
        raise DomainError(f"rho must be > 0, got {rho}")
    g = params.gamma
    base = (1.0 + 1.5 * params.delta) ** (2.0 / (2.0 - g)) * rho
    return base ** (2.0 - g) * params.M ** (1.0 - g)


def rho_star(params: TheoryParams) -> float:
    return params.rho_star


def f_ub(rho: float, params: TheoryParams, C: float) -> float:
    """Sum-throughput density bound 16C/(delta^2 rho) * (1 - e^(-zeta(rho))).

    With the delta-limit flag the singular 16/delta^2 prefactor is dropped
    and only the bracket divided by rho is returned.
    """
    if rho <= 0:
        raise DomainError(f"rho must be > 0, got {rho}")
    bracket = -math.expm1(-zeta(rho, params))
    if params.delta_limit:
        return C / rho * bracket
    if params.delta <= 0:
        raise DomainError("f_ub is singular at delta=0; use the limit flag")
    return 16.0 * C / (params.delta**2 * rho) * bracket


def outage_lower_bound_finite(g: int, m: int, M: int, gamma: float) -> float:
    """Outage floor when every node caches the Mg most popular files."""
    if g < 1:
        raise DomainError(f"g must be >= 1, got {g}")
    if g >= m / M:
        return 0.0
    c = 1.0 / (1.0 - gamma)
    num = c * (M * g) ** (1.0 - gamma) - c + 1.0
    den = c * m ** (1.0 - gamma) - c
    return float(min(1.0, max(0.0, 1.0 - num / den)))


def sum_throughput_upper_finite(
    g: int, m: int, n: int, M: int, gamma: float, delta: float, C: float
) -> float:
    """(16C/delta^2) * (1 - p_lb(g)^((1+3*delta/2)^2 * g)) * (n/g)."""
    if g < 1:
        raise DomainError(f"g must be >= 1, got {g}")
    if delta <= 0:
        raise DomainError(f"delta must be > 0, got {delta}")
    p_lb = outage_lower_bound_finite(g, m, M, gamma)
    exponent = (1.0 + 1.5 * delta) ** 2 * g
    if p_lb <= 0.0:
        bracket = 1.0
    else:
        bracket = -math.expm1(exponent * math.log(p_lb))
    return 16.0 * C / delta**2 * bracket * n / g


@dataclass(frozen=True)
class CurvePoint:
    p: float
    t: float  # per-user throughput (absolute units of C)
    regime: str
    feasible: bool
    t_finite: float | None = None  # finite-size companion bound where defined


def _solve_g_for_outage(p: float, m: int, M: int, gamma: float) -> int:
    """Smallest g with outage_lower_bound_finite(g) <= p (monotone in g)."""
    lo, hi = 1, int(math.ceil(m / M))
    if outage_lower_bound_finite(lo, m, M, gamma) <= p:
        return lo
    while outage_lower_bound_finite(hi, m, M, gamma) > p:
        hi *= 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if outage_lower_bound_finite(mid, m, M, gamma) <= p:
            hi = mid
        else:
            lo = mid
    return hi


def outer_bound_curve(
    params: TheoryParams,
    C: float,
    m: int,
    n: int,
    p_grid: np.ndarray,
    rho_prime: float | None = None,
) -> list[CurvePoint]:
    """Piecewise leading-term upper bound on per-user throughput vs outage.

    The regime is picked from the finite-size ratio m^alpha / n: above
    16/(delta^2 rho_star) the whole-network bound C(Mn/m)^(1-gamma)
    applies; otherwise the three-branch curve with knees at the rho_prime
    and rho_star outage levels. rho_prime defaults to rho_star, which
    collapses the min-branch window. Each feasible point in the cluster
    regime also carries the exact finite-size companion bound.
    """
    g = params.gamma
    M = params.M
    alpha = params.alpha
    rs = params.rho_star
    if rho_prime is None:
        rho_prime = rs
    if rho_prime < rs:
        raise DomainError(f"rho_prime must be >= rho_star={rs}, got {rho_prime}")
    if params.delta_limit:
        raise DomainError("outer_bound_curve needs delta > 0 (16/delta^2 prefactors)")
    points: list[CurvePoint] = []
    ratio = m**alpha / n
    if ratio > 16.0 / (params.delta**2 * rs):
        # whole library reachable only by caching everywhere: flat bound
        t_flat = C * (M * n / m) ** (1.0 - g)
        p_min = 1.0 - (M * n / m) ** (1.0 - g)
        for p in p_grid:
            feas = p >= p_min
            points.append(CurvePoint(float(p), t_flat if feas else math.nan, "whole-network", feas))
        return points
    knee_prime = 1.0 - (M * rho_prime) ** (1.0 - g) * m ** (-alpha)
    knee_star = 1.0 - (M * rs) ** (1.0 - g) * m ** (-alpha)
    t_cap = f_ub(rs, params, C) * m ** (-alpha)
    t_cap_prime = f_ub(rho_prime, params, C) * m ** (-alpha)
    for p in p_grid:
        p = float(p)
        if p >= knee_star:
            t, regime = t_cap, "saturated"
        else:
            # the optimal tradeoff is nondecreasing in p, so a bound valid at
            # larger outage also bounds smaller outage; taking the min keeps
            # the finite-m curve monotone where the asymptotic branch
            # constants cross
            t_line = 16.0 * C * M / (params.delta**2 * m * (1.0 - p) ** (1.0 / (1.0 - g)))
            regime = "min-window" if p >= knee_prime else "low-outage"
            t = min(t_line, t_cap_prime)
        g_at_p = _solve_g_for_outage(p, m, M, g)
        t_fin = sum_throughput_upper_finite(g_at_p, m, n, M, g, params.delta, C) / n
        points.append(CurvePoint(p, t, regime, True, t_finite=t_fin))
    return points


def achievability_constants(gamma: float, M: int):
    """Achievability constants (a, b, A, B(rho2), D); b maximizes B."""
    if not 0.0 < gamma < 1.0:
        raise DomainError(f"gamma must lie in (0, 1), got {gamma}")
    if M < 1:
        raise DomainError(f"M must be a positive integer, got {M}")
    a = gamma**gamma * M ** (1.0 - gamma)
    b = ((1.0 - gamma) / a) ** (1.0 / (2.0 - gamma))
    A = gamma ** (gamma / (1.0 - gamma))

    def B(rho2: float) -> float:
        if rho2 <= 0:
            raise DomainError(f"rho2 must be > 0, got {rho2}")
        return a * rho2 ** (1.0 - gamma) / (1.0 + a * rho2 ** (2.0 - gamma))

    D = B(b)
    return a, b, A, B, D


def achievable_curve(
    params: TheoryParams,
    C: float,
    K: int,
    m: int,
    n: int,
    p_grid: np.ndarray,
    rho_2: float | None = None,
) -> list[CurvePoint]:
    """Leading-term achievable per-user throughput vs outage (four regimes).

    Low outage p <= 1-gamma maps to the exponential branch via
    rho_1 = gamma - log(p/(1-gamma)); the power-law middle branch covers
    1-gamma < p up to the rho_2 knee; beyond it the throughput saturates
    at the m^(-alpha) plateaus with constants B and D. rho_2 defaults to
    b, which merges the two plateaus (B = D).
    """
    g = params.gamma
    M = params.M
    alpha = params.alpha
    a, b, A, Bfun, D = achievability_constants(g, M)
    if rho_2 is None:
        rho_2 = b
    if rho_2 < b:
        raise DomainError(f"rho_2 must be >= b={b}, got {rho_2}")
    B = Bfun(rho_2)
    knee_2 = 1.0 - a * rho_2 ** (1.0 - g) * m ** (-alpha)
    knee_b = 1.0 - a * b ** (1.0 - g) * m ** (-alpha)
    points: list[CurvePoint] = []
    for p in p_grid:
        p = float(p)
        if p <= 0.0:
            points.append(CurvePoint(p, math.nan, "infeasible", False))
            continue
        if p <= 1.0 - g:
            rho_1 = g - math.log(p / (1.0 - g))
            t, regime = C / K * M / (rho_1 * m), "exponential"
        elif p < knee_2:
            t = C * A / K * M / (m * (1.0 - p) ** (1.0 / (1.0 - g)))
            regime = "power-law"
        elif p < knee_b:
            t, regime = C * B / K * m ** (-alpha), "plateau"
        else:
            t, regime = C * D / K * m ** (-alpha), "saturated"
        points.append(CurvePoint(p, t, regime, True))
    return points
