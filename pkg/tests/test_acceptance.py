"""End-to-end acceptance suite.

Each test covers one headline criterion and prints a single PASS/FAIL
line (visible with pytest -s or in captured output on failure). The
Monte Carlo sweep at the reference figure parameters (m=1000, n=10000,
M=1, K=4) is computed once and shared between the curve-shape and
domination checks.
"""

import itertools
import math

import numpy as np
import pytest

from d2dcache import (
    NetworkConfig,
    build_clusters,
    harmonic_bounds,
    harmonic_sum,
    hit_probability,
    optimal_cache_distribution,
    paley_zygmund_lower_bound,
    reuse_factor,
    sample_cache_placement,
    sample_requests,
    solve_fixed_point,
    sum_throughput_upper_finite,
    sweep_cluster_sizes,
    achievability_constants,
    verify_protocol_model,
    zipf_pmf,
)
from d2dcache.simulator import realization_rng, sample_schedule_slot
from d2dcache.theory import _solve_g_for_outage

GAMMAS = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6]
SWEEP_GC = [4, 16, 25, 100, 400, 625, 2500]
M_FIG, N_FIG, CACHE_FIG, K_FIG, DELTA_FIG = 1000, 10000, 1, 4, 0.5


def report(name: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    line = f"[{status}] {name}"
    if detail:
        line += f" — {detail}"
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def figure_sweep():
    config = NetworkConfig(n=N_FIG, delta=DELTA_FIG, link_rate=1.0, M=CACHE_FIG)
    sweeps = {}
    for gamma in GAMMAS:
        demand = zipf_pmf(gamma, M_FIG)
        sweeps[gamma] = sweep_cluster_sizes(
            config, demand, SWEEP_GC, realizations=200, seed=20260823, K=K_FIG
        )
    return sweeps


def test_figure_shape_reproduction(figure_sweep):
    # The tradeoff value at outage level p is the best throughput among
    # configurations whose outage is <= p, so the simulated curve is the
    # running-max envelope of the swept points sorted by outage. Raw swept
    # points past the throughput-optimal cluster size are dominated (both
    # higher outage and lower throughput) and sit inside the region, not on
    # the frontier; they are counted and reported but do not define the curve.
    bad_pairs = []
    dominated = 0
    band_total = band_ok = 0
    per_gamma_band = {}
    for gamma, points in figure_sweep.items():
        pts = sorted(points, key=lambda p: p.p_out)
        best = -math.inf
        envelope = []
        for p in pts:
            if p.t_mean_norm < best:
                dominated += 1
            best = max(best, p.t_mean_norm)
            envelope.append((p, best))
        for (a, ta), (b, tb) in zip(envelope, envelope[1:]):
            sigma = 3 * math.hypot(a.std_err_t, b.std_err_t)
            if tb < ta - sigma:
                bad_pairs.append((gamma, a.g_c, b.g_c))
        # middle-branch agreement with the power-law achievability formula
        A = gamma ** (gamma / (1 - gamma))
        n_ok = n_tot = 0
        for p in points:
            if not 0.2 <= p.p_out <= 0.8:
                continue
            theory = (A / K_FIG) * CACHE_FIG / (M_FIG * (1 - p.p_out) ** (1 / (1 - gamma)))
            ratio = p.t_mean_norm / theory
            n_tot += 1
            n_ok += 0.5 <= ratio <= 2.0
        per_gamma_band[gamma] = (n_ok, n_tot)
        band_total += n_tot
        band_ok += n_ok
    shape_ok = not bad_pairs
    band_passes = all(tot == 0 or ok_ / tot >= 0.8 for ok_, tot in per_gamma_band.values())
    report(
        "figure-shape reproduction",
        shape_ok and band_passes,
        f"envelope monotone={shape_ok} ({dominated} dominated raw points), "
        f"band hits {band_ok}/{band_total}",
    )


def test_outage_analytics_agreement():
    rng = np.random.default_rng(99)
    failures = []
    for i in range(20):
        gamma = float(rng.uniform(0.1, 0.9))
        m = int(rng.integers(20, 501))
        M = int(rng.integers(1, 4))
        g_side = int(rng.integers(2, 11))
        g_c = g_side**2
        n = 4 * g_c
        demand = zipf_pmf(gamma, m)
        dist = optimal_cache_distribution(demand, M, g_c)
        config = NetworkConfig(n=n, delta=0.5, link_rate=1.0, M=M)
        layout = build_clusters(n, g_c, K=4)
        realizations = max(1, math.ceil(10**5 / n))
        from d2dcache import estimate_tradeoff_point

        pt = estimate_tradeoff_point(config, layout, dist, demand, realizations, 1000 + i)
        analytic = 1 - hit_probability(dist, demand)
        tol = 3 * max(pt.std_err_p, 1e-4)
        if abs(pt.p_out - analytic) > tol:
            failures.append((gamma, m, M, g_c, pt.p_out, analytic))
    report("outage analytics agreement", not failures, f"{20 - len(failures)}/20 configs within 3 sigma")


def _greedy_grid_optimum(probs: np.ndarray, E: int, step: float = 0.02) -> float:
    """Exact maximizer of sum_f Pr(f)(1-(1-q_f)^E) over the step-grid simplex.

    The objective is concave and separable, so repeatedly assigning one
    grid unit to the file with the largest marginal gain is optimal.
    """
    units = round(1 / step)
    q = np.zeros(len(probs))
    for _ in range(units):
        gain = probs * ((1 - q) ** E - (1 - q - step) ** E)
        q[np.argmax(gain)] += step
    return float(np.sum(probs * (1 - (1 - q) ** E)))


def _brute_grid_optimum(probs: np.ndarray, E: int, step: float = 0.02) -> float:
    units = round(1 / step)
    m = len(probs)
    best = -1.0
    for combo in itertools.combinations(range(units + m - 1), m - 1):
        alloc = np.diff([-1, *combo, units + m - 1]) - 1
        q = alloc * step
        best = max(best, float(np.sum(probs * (1 - (1 - q) ** E))))
    return best


def test_caching_distribution_optimality():
    failures = []
    for gamma, m, g_c in itertools.product([0.3, 0.5, 0.8], range(2, 9), range(3, 7)):
        demand = zipf_pmf(gamma, m)
        dist = optimal_cache_distribution(demand, 1, g_c)
        E = g_c - 1
        p_star = hit_probability(dist, demand)
        grid_best = _greedy_grid_optimum(demand.probs, E)
        if m <= 3:  # cross-validate the greedy oracle by full enumeration
            assert abs(grid_best - _brute_grid_optimum(demand.probs, E)) < 1e-12
        if p_star < grid_best - 1e-9:
            failures.append(("grid", gamma, m, g_c, p_star, grid_best))
        grad = demand.probs * E * (1 - dist.pc) ** (E - 1)
        active = grad[: dist.m_star]
        if np.ptp(active) / active[0] > 1e-8:
            failures.append(("stationarity", gamma, m, g_c))
    report("caching distribution optimality (grid oracle + stationarity)", not failures, f"{len(failures)} failures")


def test_fixed_point():
    failures = 0
    for gamma in np.linspace(0.02, 0.98, 50):
        gamma = float(gamma)
        x = solve_fixed_point(gamma)
        c = 2 - gamma
        alpha = (1 - gamma) / c
        residual = abs(x - math.log1p(c * x))
        lo, hi = 1e-9, 10.0
        for _ in range(80):
            mid = (lo + hi) / 2
            if mid - math.log1p(c * mid) < 0:
                lo = mid
            else:
                hi = mid
        oracle = (lo + hi) / 2
        if residual >= 1e-12 or x <= alpha or abs(x - oracle) > 1e-10:
            failures += 1
    report("fixed point solver", failures == 0, f"{50 - failures}/50 gamma points")


def test_harmonic_sum_bounds():
    rng = np.random.default_rng(7)
    violations = 0
    for _ in range(10**4):
        gamma = float(rng.uniform(0, 2))
        if abs(gamma - 1) < 1e-12:
            continue
        x = int(rng.integers(1, 10**4 + 1))
        y = int(rng.integers(x, 10**4 + 1))
        h = harmonic_sum(gamma, x, y)
        lower, upper = harmonic_bounds(gamma, x, y)
        violations += not (lower <= h <= upper)
    report("harmonic sum integral bounds", violations == 0, f"{violations} violations in 10^4 cases")


def _count_violations(delta: float, K: int, slots: int, seed: int) -> int:
    n, g_c, m, M = 2500, 25, 100, 1
    layout = build_clusters(n, g_c, K=K)
    demand = zipf_pmf(0.5, m)
    dist = optimal_cache_distribution(demand, M, g_c)
    total = 0
    for slot in range(slots):
        rng = realization_rng(seed, slot)
        placement = sample_cache_placement(dist, n, M, rng)
        requests = sample_requests(demand, n, rng)
        links = sample_schedule_slot(placement, requests, layout, slot % K, rng)
        total += len(verify_protocol_model(layout, links, delta))
    return total


def test_protocol_model_guarantee():
    counts = {}
    for delta in (0.25, 0.5, 1.0):
        K = reuse_factor(delta)
        counts[delta] = _count_violations(delta, K, slots=1000, seed=5)
    clean = all(v == 0 for v in counts.values())
    # the aggressive reuse configuration must produce a report without crashing
    aggressive = _count_violations(0.5, 4, slots=50, seed=5)
    report(
        "protocol model guarantee",
        clean,
        f"violations per delta {counts}; K=4 reported {aggressive} without crash",
    )


def test_domination_by_finite_upper_bound(figure_sweep):
    failures = []
    for gamma, points in figure_sweep.items():
        for pt in points:
            g = _solve_g_for_outage(pt.p_out, M_FIG, CACHE_FIG, gamma)
            bound = (
                sum_throughput_upper_finite(g, M_FIG, N_FIG, CACHE_FIG, gamma, DELTA_FIG, 1.0)
                / N_FIG
            )
            if pt.t_mean_norm > bound + 3 * pt.std_err_t:
                failures.append((gamma, pt.g_c))
    report("simulated points dominated by the finite-size upper bound", not failures, f"{len(failures)} violations")


def test_paley_zygmund_bound():
    rng = np.random.default_rng(123)
    failures = []
    for i in range(20):
        gamma = float(rng.uniform(0.1, 0.9))
        m = int(rng.integers(10, 301))
        g_c = int(rng.integers(3, 21))
        demand = zipf_pmf(gamma, m)
        dist = optimal_cache_distribution(demand, 1, g_c)
        bound = paley_zygmund_lower_bound(dist, demand, g_c)
        trials = 10**4
        sub = np.random.default_rng(500 + i)
        caches = np.searchsorted(np.cumsum(dist.pc), sub.random((trials, g_c)), side="right") + 1
        reqs = np.searchsorted(demand._cdf, sub.random((trials, g_c)), side="right") + 1
        any_hit = np.zeros(trials, dtype=bool)
        for u in range(g_c):
            others = np.delete(caches, u, axis=1)
            any_hit |= np.any(others == reqs[:, u : u + 1], axis=1)
        est = float(any_hit.mean())
        sigma = math.sqrt(max(est * (1 - est), 1e-9) / trials)
        if est < bound - 3 * sigma:
            failures.append((gamma, m, g_c, est, bound))
    report("good-cluster probability lower bound", not failures, f"{20 - len(failures)}/20 configs")


def test_achievability_constants():
    a, b, A, B, D = achievability_constants(0.5, 1)
    ok = (
        abs(a - 0.70711) < 1e-4
        and abs(b - 0.79370) < 1e-4
        and abs(A - 0.5) < 1e-4
        and abs(D - 0.41997) < 1e-4
    )
    grid = np.arange(1e-3, 10, 1e-3)
    vals = np.array([B(float(c)) for c in grid])
    ok = ok and abs(grid[int(np.argmax(vals))] - b) <= 1.5e-3
    report("achievability constants (gamma=0.5, M=1)", ok, f"a={a:.5f} b={b:.5f} A={A:.5f} D={D:.5f}")
