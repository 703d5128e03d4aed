"""Explicit time integration of the peridynamic equation of motion.

rho u_tt(x, t) = sum over the horizon of f(xi, eta) weights + b(x, t),
advanced with velocity Verlet. Forces are assembled over the directed bond
lists in a fixed order (ascending source, then neighbor index), so repeated
runs of the same configuration are bitwise reproducible.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .discretization import BondNetwork, PointCloud
from .errors import ConfigError, SimulationError, SingularConfigurationError
from .kernels import update_breaker

LOAD_PRESETS = ("none", "constant", "sinusoidal-in-x", "opposing-last-axis")


@dataclass
class SimState:
    """Displacements and velocities of every point at one instant."""

    u: np.ndarray  # (N, dim)
    v: np.ndarray  # (N, dim)
    t: float = 0.0
    step: int = 0

    def copy(self) -> "SimState":
        return SimState(self.u.copy(), self.v.copy(), self.t, self.step)


def zero_state(cloud: PointCloud) -> SimState:
    shape = (cloud.n_points, cloud.dim)
    return SimState(np.zeros(shape), np.zeros(shape))


@dataclass(frozen=True)
class ExternalLoad:
    """Body force density b(x, t) evaluated at reference positions.

    Presets: none, constant (uniform amplitude vector), sinusoidal-in-x
    (amplitude vector modulated by sin(2 pi x_0 / wavelength)), and
    opposing-last-axis (amplitude vector signed by which side of `center`
    the last coordinate falls on; points exactly on the line get zero).
    A callable fn(positions, t) -> (N, dim) overrides the preset entirely.
    """

    preset: str = "none"
    amplitude: tuple = ()
    wavelength: float = 1.0
    center: float = 0.5
    fn: object = None

    def __post_init__(self):
        if self.preset not in LOAD_PRESETS:
            raise ConfigError(f"load preset must be one of {LOAD_PRESETS}, got {self.preset!r}")
        if self.preset != "none" and self.fn is None and len(self.amplitude) == 0:
            raise ConfigError(f"load preset {self.preset!r} requires an amplitude vector")
        if self.preset == "sinusoidal-in-x" and not self.wavelength > 0.0:
            raise ConfigError(f"load wavelength must be positive, got {self.wavelength}")

    def body_force(self, positions, t):
        if self.fn is not None:
            return np.asarray(self.fn(positions, t), dtype=float)
        n, dim = positions.shape
        if self.preset == "none":
            return np.zeros((n, dim))
        amp = np.asarray(self.amplitude, dtype=float)
        if amp.shape != (dim,):
            raise ConfigError(
                f"load amplitude needs {dim} component(s), got {amp.shape}"
            )
        if self.preset == "constant":
            return np.tile(amp, (n, 1))
        if self.preset == "opposing-last-axis":
            sign = np.sign(positions[:, -1] - self.center)
            return sign[:, None] * amp[None, :]
        phase = np.sin(2.0 * math.pi * positions[:, 0] / self.wavelength)
        return phase[:, None] * amp[None, :]


def bond_stretches(bonds: BondNetwork, u: np.ndarray) -> np.ndarray:
    """Current stretch of every directed bond for displacement field u."""
    eta = u[bonds.neighbors] - u[bonds.source]
    q = np.linalg.norm(bonds.xi + eta, axis=1)
    return (q - bonds.xi_norm) / bonds.xi_norm


def _accumulate(source, values, n_points):
    """Deterministic per-point segment sum of per-bond vector values."""
    out = np.empty((n_points, values.shape[1]))
    for k in range(values.shape[1]):
        out[:, k] = np.bincount(source, weights=values[:, k], minlength=n_points)
    return out


def internal_force(cloud: PointCloud, bonds: BondNetwork, model, u: np.ndarray) -> np.ndarray:
    """Internal force density (force per unit volume) at every point."""
    model.validate_dim(cloud.dim)
    eta = u[bonds.neighbors] - u[bonds.source]
    try:
        f = model.force(bonds.xi, eta, bonds.mu)
    except SingularConfigurationError:
        q = np.linalg.norm(bonds.xi + eta, axis=1)
        rows = np.flatnonzero(q == 0.0)[:8]
        pairs = [(int(bonds.source[k]), int(bonds.neighbors[k])) for k in rows]
        raise SingularConfigurationError(
            f"{model.family}: coincident deformed points on bond(s) {pairs}"
        ) from None
    return _accumulate(bonds.source, f * bonds.weights[:, None], cloud.n_points)


def stable_dt(cloud: PointCloud, bonds: BondNetwork, model, safety: float = 0.5) -> float:
    """Conservative stable step from the linearized bond stiffnesses.

    dt = safety * sqrt(2 rho / max_i sum_j weight_ij C_ij) with C_ij the
    undeformed bond stiffness magnitude of the kernel.
    """
    c = model.stiffness0(bonds.xi_norm)
    s = np.bincount(bonds.source, weights=bonds.weights * c, minlength=cloud.n_points)
    smax = float(np.max(s)) if s.size else 0.0
    if not smax > 0.0:
        raise ConfigError("bond stiffness sums to zero; stable step undefined")
    return safety * math.sqrt(2.0 * cloud.density / smax)


def step_verlet(cloud, bonds, model, state: SimState, dt: float, load=None, force=None):
    """Advance one velocity-Verlet step in place.

    force is the internal force at the incoming state (recomputed when None).
    Damage states update once per step, after the second force evaluation,
    from the post-step stretches. Returns the internal force consistent with
    the outgoing state, for reuse as the next step's incoming force.
    """
    if force is None:
        force = internal_force(cloud, bonds, model, state.u)
    inv_rho = 1.0 / cloud.density
    b = load.body_force(cloud.positions, state.t) if load is not None else 0.0
    v_half = state.v + (0.5 * dt * inv_rho) * (force + b)
    state.u += dt * v_half
    t_new = state.t + dt
    force_new = internal_force(cloud, bonds, model, state.u)
    b_new = load.body_force(cloud.positions, t_new) if load is not None else 0.0
    state.v = v_half + (0.5 * dt * inv_rho) * (force_new + b_new)
    state.t = t_new
    state.step += 1

    breaker = model.breaker
    if breaker is not None and breaker.active:
        mu_sum = float(bonds.mu.sum())
        s = bond_stretches(bonds, state.u)
        update_breaker(
            breaker, s, dt, bonds.mu, bonds.accum, model.breaker_thresholds(bonds.xi_norm)
        )
        if float(bonds.mu.sum()) != mu_sum:
            # Bonds broke this step: refresh the cached force so the next
            # step starts from the damaged network.
            force_new = internal_force(cloud, bonds, model, state.u)

    if not (np.all(np.isfinite(state.u)) and np.all(np.isfinite(state.v))):
        raise SimulationError(f"non-finite state detected at step {state.step}")
    return force_new


def kinetic_energy(cloud: PointCloud, v: np.ndarray) -> float:
    return 0.5 * cloud.density * float(np.sum(cloud.volumes * np.sum(v * v, axis=1)))


def potential_energy(cloud: PointCloud, bonds: BondNetwork, model, u: np.ndarray) -> float:
    """Total bond potential, each unordered pair counted once."""
    eta = u[bonds.neighbors] - u[bonds.source]
    phi = model.potential(bonds.xi, eta, bonds.mu)
    return 0.5 * float(np.sum(phi * bonds.weights * cloud.volumes[bonds.source]))


def momentum(cloud: PointCloud, v: np.ndarray) -> np.ndarray:
    return cloud.density * (cloud.volumes[:, None] * v).sum(axis=0)


def series_columns(dim: int):
    cols = ["t", "kinetic", "potential", "total"]
    cols += ["px", "py", "pz"][:dim]
    cols.append("damage_mean")
    return cols


@dataclass
class RunResult:
    """Recorded diagnostics series plus the final state."""

    columns: list
    series: dict            # column name -> np.ndarray, aligned rows
    state: SimState
    snapshots: list = field(default_factory=list)  # (step, SimState, damage)


def _series_row(cloud, bonds, model, state):
    kin = kinetic_energy(cloud, state.v)
    pot = potential_energy(cloud, bonds, model, state.u)
    p = momentum(cloud, state.v)
    row = [state.t, kin, pot, kin + pot]
    row.extend(p.tolist())
    row.append(float(np.mean(bonds.damage())))
    return row


def run(
    cloud,
    bonds,
    model,
    state: SimState,
    dt: float,
    n_steps: int,
    load=None,
    record_every: int = 1,
    snapshot_every: int = 0,
    on_snapshot=None,
    keep_snapshots: bool = False,
) -> RunResult:
    """Run n_steps of velocity Verlet, recording diagnostics at a cadence.

    The series always contains the initial and final instants. Snapshots are
    emitted at step 0 and every snapshot_every steps when snapshot_every > 0,
    through on_snapshot(step, state, damage) and/or the result's snapshot
    list (keep_snapshots). The state object is advanced in place and also
    returned inside the result.
    """
    if n_steps < 0:
        raise ConfigError(f"step count must be non-negative, got {n_steps}")
    if record_every < 1:
        raise ConfigError(f"record cadence must be >= 1, got {record_every}")
    model.validate_dim(cloud.dim)

    cols = series_columns(cloud.dim)
    rows = [_series_row(cloud, bonds, model, state)]
    result = RunResult(columns=cols, series={}, state=state)

    def emit_snapshot(step):
        damage = bonds.damage()
        if on_snapshot is not None:
            on_snapshot(step, state, damage)
        if keep_snapshots:
            result.snapshots.append((step, state.copy(), damage))

    if snapshot_every > 0 or n_steps == 0:
        emit_snapshot(state.step)

    force = None
    for k in range(1, n_steps + 1):
        force = step_verlet(cloud, bonds, model, state, dt, load=load, force=force)
        if k % record_every == 0 or k == n_steps:
            rows.append(_series_row(cloud, bonds, model, state))
        if snapshot_every > 0 and (k % snapshot_every == 0 or k == n_steps):
            emit_snapshot(state.step)

    table = np.asarray(rows)
    result.series = {name: table[:, j] for j, name in enumerate(cols)}
    return result
