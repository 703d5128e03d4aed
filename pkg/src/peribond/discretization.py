"""Uniform lattice discretization and horizon bond networks.

A body is sampled at the cell centers of a uniform grid with spacing h; each
point carries the full cell volume h**dim (midpoint quadrature). Bonds connect
every ordered pair of points whose reference separation satisfies
0 < |xi| <= delta, with an optional linear partial-volume taper for cells that
straddle the horizon boundary. Periodic axes use minimum-image separations.
"""

from dataclasses import dataclass, field
import warnings

import numpy as np
from scipy.spatial import cKDTree

from .errors import ConfigError

PARTIAL_VOLUME_MODES = ("linear", "none")


@dataclass(frozen=True)
class PointCloud:
    """Reference configuration: positions, per-point volumes, mass density."""

    positions: np.ndarray  # (N, dim) cell centers
    volumes: np.ndarray    # (N,) cell volumes
    density: float         # mass density rho > 0
    spacing: float         # grid spacing h
    box: np.ndarray        # (dim,) box edge lengths
    periodic: np.ndarray   # (dim,) bool, per-axis wrap flags

    @property
    def n_points(self) -> int:
        return self.positions.shape[0]

    @property
    def dim(self) -> int:
        return self.positions.shape[1]


@dataclass(frozen=True)
class HorizonConfig:
    """Horizon radius and quadrature options for bond construction."""

    delta: float
    partial_volume: str = "linear"

    def __post_init__(self):
        if not self.delta > 0.0:
            raise ConfigError(f"horizon delta must be positive, got {self.delta}")
        if self.partial_volume not in PARTIAL_VOLUME_MODES:
            raise ConfigError(
                f"partial_volume must be one of {PARTIAL_VOLUME_MODES}, "
                f"got {self.partial_volume!r}"
            )


@dataclass
class BondNetwork:
    """Directed bond lists in CSR-like layout, sorted by (source, neighbor).

    Every unordered pair within the horizon is stored twice, once per
    direction, so xi[k] for bond (i -> j) is exactly the negation of the
    reverse bond's xi. The mu and accum arrays hold mutable per-bond damage
    state (intactness factor in [0, 1] and the graded-breakage accumulator).
    """

    offsets: np.ndarray    # (N+1,) slice bounds per source point
    source: np.ndarray     # (M,) source point index per bond
    neighbors: np.ndarray  # (M,) neighbor point index per bond
    xi: np.ndarray         # (M, dim) reference separations (minimum image)
    xi_norm: np.ndarray    # (M,) |xi|
    weights: np.ndarray    # (M,) quadrature weight = V_j * partial volume factor
    mu: np.ndarray         # (M,) bond intactness, starts at 1
    accum: np.ndarray      # (M,) graded-breakage accumulator, starts at 0
    delta: float
    spacing: float

    @property
    def n_bonds(self) -> int:
        return self.source.shape[0]

    def degrees(self) -> np.ndarray:
        return np.diff(self.offsets)

    def damage(self) -> np.ndarray:
        """Per-point damage 1 - sum(mu w)/sum(w); zero for empty horizons."""
        n = self.offsets.shape[0] - 1
        wsum = np.bincount(self.source, weights=self.weights, minlength=n)
        intact = np.bincount(self.source, weights=self.mu * self.weights, minlength=n)
        with np.errstate(invalid="ignore", divide="ignore"):
            phi = 1.0 - intact / wsum
        return np.where(wsum > 0.0, phi, 0.0)


def build_grid(box, spacing, density, periodic=None) -> PointCloud:
    """Sample a box with a uniform cell-center lattice.

    box: per-axis edge lengths (determines the dimension, 1-3).
    Every edge length must be an integer multiple of the spacing (relative
    tolerance 1e-9); otherwise the box cannot be tiled and a ConfigError is
    raised naming the axis. Points are ordered lexicographically by grid
    index with the last axis fastest.
    """
    box = np.atleast_1d(np.asarray(box, dtype=float))
    dim = box.shape[0]
    if dim not in (1, 2, 3):
        raise ConfigError(f"dimension must be 1, 2, or 3, got {dim}")
    if not spacing > 0.0:
        raise ConfigError(f"grid spacing must be positive, got {spacing}")
    if not density > 0.0:
        raise ConfigError(f"density must be positive, got {density}")
    if np.any(box <= 0.0):
        raise ConfigError(f"box edge lengths must be positive, got {box.tolist()}")
    if periodic is None:
        periodic = np.ones(dim, dtype=bool)
    periodic = np.atleast_1d(np.asarray(periodic, dtype=bool))
    if periodic.shape != (dim,):
        raise ConfigError(
            f"periodic flags must have one entry per axis ({dim}), "
            f"got {periodic.shape[0]}"
        )

    counts = np.empty(dim, dtype=np.int64)
    for axis in range(dim):
        ratio = box[axis] / spacing
        n = int(round(ratio))
        if n < 1 or abs(ratio - n) > 1e-9 * max(1.0, ratio):
            raise ConfigError(
                f"box edge {box[axis]} on axis {axis} is not an integer "
                f"multiple of spacing {spacing}"
            )
        counts[axis] = n

    axes = [(np.arange(n) + 0.5) * spacing for n in counts]
    grids = np.meshgrid(*axes, indexing="ij")
    positions = np.stack([g.reshape(-1) for g in grids], axis=1)
    volumes = np.full(positions.shape[0], spacing**dim)
    return PointCloud(
        positions=positions,
        volumes=volumes,
        density=float(density),
        spacing=float(spacing),
        box=box,
        periodic=periodic,
    )


def partial_volume_factor(r, spacing, delta):
    """Linear coverage fraction of a neighbor cell at reference distance r.

    Full weight inside delta - h/2, tapering linearly to zero at delta + h/2
    (a bond at exactly delta + h/2 is dropped entirely). Vectorized in r.
    """
    r = np.asarray(r, dtype=float)
    if not spacing > 0.0:
        raise ConfigError(f"spacing must be positive, got {spacing}")
    if not delta > 0.0:
        raise ConfigError(f"delta must be positive, got {delta}")
    if np.any(r <= 0.0):
        raise ConfigError("partial volume factor requires positive distances")
    taper = (delta + 0.5 * spacing - r) / spacing
    factor = np.clip(taper, 0.0, 1.0)
    return factor if factor.ndim else float(factor)


def minimum_image(diff, box, periodic):
    """Wrap separation vectors into the closest periodic image, in place-safe."""
    diff = np.array(diff, dtype=float, copy=True)
    flat = diff.ndim == 1
    if flat:
        diff = diff[None, :]
    for axis in range(diff.shape[1]):
        if periodic[axis]:
            length = box[axis]
            diff[:, axis] -= length * np.round(diff[:, axis] / length)
    return diff[0] if flat else diff


def neighbor_pairs(positions, delta, box, periodic):
    """All unordered pairs with minimum-image distance 0 < d <= delta.

    Returns (pairs, diff, dist): pairs is (P, 2) int with i < j, diff is the
    minimum-image separation positions[j] - positions[i]. Backed by a k-d tree
    with toroidal topology on the periodic axes; results are re-filtered on
    exact distances so the stored network depends only on this module's
    arithmetic, then sorted for deterministic ordering.

    The acceptance test carries a 1e-9 relative slack: on a lattice, pairs at
    exactly delta round a few ulps either way depending on where the points
    sit, and cutting some of them would break translation invariance. The
    partial-volume taper makes the marginal weight continuous there, so the
    slack perturbs weights by O(1e-9) at most.
    """
    positions = np.asarray(positions, dtype=float)
    dim = positions.shape[1]
    boxsize = np.zeros(dim)
    wrapped = positions
    for axis in range(dim):
        if periodic[axis]:
            length = box[axis]
            if delta > 0.5 * length:
                raise ConfigError(
                    f"horizon delta {delta} exceeds half the periodic box "
                    f"edge {length} on axis {axis} (minimum image invalid)"
                )
            boxsize[axis] = length
            if np.any(wrapped[:, axis] < 0) or np.any(wrapped[:, axis] >= length):
                wrapped = np.array(wrapped, copy=True)
                wrapped[:, axis] = np.mod(wrapped[:, axis], length)
    tree = cKDTree(wrapped, boxsize=boxsize if boxsize.any() else None)
    raw = tree.query_pairs(delta * (1.0 + 1e-9) + 1e-300, output_type="ndarray")
    if raw.size == 0:
        empty = np.empty((0, 2), dtype=np.int64)
        return empty, np.empty((0, dim)), np.empty(0)
    order = np.lexsort((raw[:, 1], raw[:, 0]))
    pairs = raw[order].astype(np.int64)
    diff = minimum_image(positions[pairs[:, 1]] - positions[pairs[:, 0]], box, periodic)
    dist = np.linalg.norm(diff, axis=1)
    keep = dist <= delta * (1.0 + 1e-9)
    return pairs[keep], diff[keep], dist[keep]


def directed_pairs(positions, delta, box, periodic):
    """Both directions of every in-horizon pair, sorted by (source, neighbor).

    Returns (source, neighbors, xi, dist) for bonds with 0 <= d <= delta,
    coincident pairs included — callers decide whether coincidence is an
    error. The ordering and arithmetic here are the single authority for
    bond traversal, shared by the reference bond network and the geometric
    (current-configuration) neighbor searches.
    """
    pairs, diff, dist = neighbor_pairs(positions, delta, box, periodic)
    source = np.concatenate([pairs[:, 0], pairs[:, 1]])
    neighbors = np.concatenate([pairs[:, 1], pairs[:, 0]])
    xi = np.concatenate([diff, -diff], axis=0)
    dist = np.concatenate([dist, dist])
    order = np.lexsort((neighbors, source))
    return source[order], neighbors[order], xi[order], dist[order]


def build_bonds(cloud: PointCloud, horizon: HorizonConfig) -> BondNetwork:
    """Construct the directed bond network for a point cloud.

    Bonds satisfy 0 < |xi| <= delta with minimum-image separations on
    periodic axes. Weights are neighbor volume times the partial-volume
    factor (when enabled). Horizons that fail to reach the nearest neighbor
    produce a warning, not an error.
    """
    delta = horizon.delta
    if delta < cloud.spacing:
        warnings.warn(
            f"horizon delta {delta} is below the grid spacing {cloud.spacing}; "
            "neighbor lists may be empty",
            stacklevel=2,
        )

    source, neighbors, xi, xi_norm = directed_pairs(
        cloud.positions, delta, cloud.box, cloud.periodic
    )
    if np.any(xi_norm == 0.0):
        k = int(np.flatnonzero(xi_norm == 0.0)[0])
        raise ConfigError(
            f"coincident reference points {int(source[k])} and {int(neighbors[k])}"
        )

    weights = cloud.volumes[neighbors].copy()
    if horizon.partial_volume == "linear" and xi_norm.size:
        weights *= partial_volume_factor(xi_norm, cloud.spacing, delta)

    counts = np.bincount(source, minlength=cloud.n_points)
    offsets = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
    if np.any(counts == 0):
        warnings.warn(
            f"{int(np.sum(counts == 0))} point(s) have empty horizons "
            f"(delta = {delta}, spacing = {cloud.spacing})",
            stacklevel=2,
        )

    return BondNetwork(
        offsets=offsets,
        source=source,
        neighbors=neighbors,
        xi=xi,
        xi_norm=xi_norm,
        weights=weights,
        mu=np.ones(source.shape[0]),
        accum=np.zeros(source.shape[0]),
        delta=float(delta),
        spacing=cloud.spacing,
    )
