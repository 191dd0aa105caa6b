"""Grid placement, square clustering, TDMA reuse coloring and a protocol-model checker."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError


@dataclass(frozen=True)
class NetworkConfig:
    n: int
    delta: float
    link_rate: float
    M: int

    def __post_init__(self):
        if _isqrt_exact(self.n) is None:
            raise ConfigurationError(f"n must be a perfect square, got {self.n}")
        if self.delta <= 0:
            raise ConfigurationError(f"delta must be > 0, got {self.delta}")
        if self.link_rate <= 0:
            raise ConfigurationError(f"link_rate must be > 0, got {self.link_rate}")
        if self.M < 1:
            raise ConfigurationError(f"M must be a positive integer, got {self.M}")


def _isqrt_exact(v: int) -> int | None:
    if v < 1:
        return None
    r = math.isqrt(v)
    return r if r * r == v else None


def build_grid(n: int) -> np.ndarray:
    """Node coordinates on a sqrt(n) x sqrt(n) lattice inside the unit square.

    Node id = row*side + col, at ((col+0.5)/side, (row+0.5)/side).
    """
    side = _isqrt_exact(n)
    if side is None:
        raise ConfigurationError(f"n must be a perfect square, got {n}")
    idx = np.arange(n)
    col = idx % side
    row = idx // side
    return np.column_stack(((col + 0.5) / side, (row + 0.5) / side))


@dataclass(frozen=True)
class ClusterLayout:
    n: int
    g_c: int
    clusters_per_side: int
    side_len: float
    tx_range: float
    K: int
    cluster_of: np.ndarray = field(repr=False)
    color_of: np.ndarray = field(repr=False)
    coords: np.ndarray = field(repr=False)

    @property
    def n_clusters(self) -> int:
        return int(self.color_of.shape[0])


def feasible_cluster_sizes(n: int) -> list[int]:
    """Perfect-square cluster sizes whose side divides the grid side."""
    side = _isqrt_exact(n)
    if side is None:
        raise ConfigurationError(f"n must be a perfect square, got {n}")
    return [d * d for d in range(1, side + 1) if side % d == 0]


def build_clusters(n: int, g_c: int, K: int = 4) -> ClusterLayout:
    """Partition the grid into axis-aligned square clusters of g_c nodes.

    The transmission range is the cluster diagonal, so any intra-cluster
    pair is connectable. Cluster ids are row-major; colors tile with
    period sqrt(K) in both axes.
    """
    side = _isqrt_exact(n)
    if side is None:
        raise ConfigurationError(f"n must be a perfect square, got {n}")
    c_side = _isqrt_exact(g_c)
    if c_side is None or side % c_side != 0:
        raise ConfigurationError(
            f"g_c={g_c} infeasible for n={n}: need a perfect square whose side divides "
            f"sqrt(n)={side}; nearest feasible values: {feasible_cluster_sizes(n)}"
        )
    k_side = _isqrt_exact(K)
    if k_side is None:
        raise ConfigurationError(f"reuse factor K must be a perfect square, got {K}")
    clusters_per_side = side // c_side
    side_len = c_side / side
    coords = build_grid(n)
    idx = np.arange(n)
    col = idx % side
    row = idx // side
    cluster_of = (row // c_side) * clusters_per_side + (col // c_side)
    c_idx = np.arange(clusters_per_side * clusters_per_side)
    c_col = c_idx % clusters_per_side
    c_row = c_idx // clusters_per_side
    color_of = (c_row % k_side) * k_side + (c_col % k_side)
    return ClusterLayout(
        n=n,
        g_c=g_c,
        clusters_per_side=clusters_per_side,
        side_len=side_len,
        tx_range=math.sqrt(2.0) * side_len,
        K=K,
        cluster_of=cluster_of,
        color_of=color_of,
        coords=coords,
    )


def reuse_factor(delta: float) -> int:
    """TDMA colors guaranteeing concurrently active clusters cannot interfere."""
    if delta <= 0:
        raise ConfigurationError(f"delta must be > 0, got {delta}")
    return (math.ceil(math.sqrt(2.0) * (1.0 + delta)) + 1) ** 2


def active_cluster_sets(layout: ClusterLayout) -> list[np.ndarray]:
    """The K color classes of cluster ids; a partition of all clusters."""
    return [np.flatnonzero(layout.color_of == c) for c in range(layout.K)]


@dataclass(frozen=True)
class ProtocolViolation:
    kind: str  # "range" or "interference"
    tx: int
    rx: int
    offender: int | None
    distance: float
    limit: float


def verify_protocol_model(
    layout: ClusterLayout, links: list[tuple[int, int]], delta: float
) -> list[ProtocolViolation]:
    """Check one slot's links: every rx within range of its tx, and no foreign
    concurrent transmitter strictly inside the (1+delta)*R guard disk of any rx."""
    if not links:
        return []
    R = layout.tx_range
    guard = (1.0 + delta) * R
    coords = layout.coords
    tx = np.array([l[0] for l in links])
    rx = np.array([l[1] for l in links])
    violations: list[ProtocolViolation] = []
    d_link = np.linalg.norm(coords[tx] - coords[rx], axis=1)
    for i in np.flatnonzero(d_link > R + 1e-12):
        violations.append(
            ProtocolViolation("range", int(tx[i]), int(rx[i]), None, float(d_link[i]), R)
        )
    # rx-to-foreign-tx distances
    d = np.linalg.norm(coords[rx][:, None, :] - coords[tx][None, :, :], axis=2)
    for i in range(len(links)):
        for j in range(len(links)):
            if i == j:
                continue
            if d[i, j] < guard - 1e-12:
                violations.append(
                    ProtocolViolation(
                        "interference", int(tx[i]), int(rx[i]), int(tx[j]), float(d[i, j]), guard
                    )
                )
    return violations
