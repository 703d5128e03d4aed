"""Pairwise bond force kernels.

Every family maps a reference separation xi and relative displacement eta to a
force density f(xi, eta) that is antisymmetric under (xi, eta) -> (-xi, -eta)
and collinear with the deformed bond xi + eta, and carries a scalar potential
whose eta-gradient reproduces the force wherever the force is smooth. Models
are vectorized over bond arrays: xi and eta have shape (M, dim).

Conventions: r = |xi| (reference length), q = |xi + eta| (deformed length),
stretch s = (q - r)/r, unit vector n = (xi + eta)/q.
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import ConfigError, SingularConfigurationError

MICRO_FAMILIES = ("cylindrical", "triangular", "normal", "quartic")
BREAKER_MODES = ("none", "critical-stretch", "theta-eps")

# Horizon-ball membership carries the same 1e-9 relative slack as bond
# construction: lattice bonds at exactly delta land a few ulps either side
# depending on where their endpoints sit, and an exact test would switch
# them off point by point, breaking translation invariance.
SUPPORT_SLACK = 1.0 + 1e-9


def in_support(r, delta):
    return np.asarray(r) <= delta * SUPPORT_SLACK


def _as_bond_arrays(xi, eta):
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    single = xi.ndim == 1
    if single:
        xi = xi[None, :]
        eta = np.atleast_2d(eta)
    if eta.shape != xi.shape:
        eta = np.broadcast_to(eta, xi.shape)
    return xi, eta, single


def bond_stretch(xi, eta):
    """Relative elongation s = (|xi + eta| - |xi|)/|xi| of one or many bonds."""
    xi2, eta2, single = _as_bond_arrays(xi, eta)
    r = np.linalg.norm(xi2, axis=1)
    if np.any(r == 0.0):
        raise ValueError("bond stretch undefined for zero reference separation")
    q = np.linalg.norm(xi2 + eta2, axis=1)
    s = (q - r) / r
    return float(s[0]) if single else s


def calibrate_pmb_c(bulk_modulus, delta):
    """3D bond constant c0 = 18 k / (pi delta^4) from bulk modulus k.

    Valid for three-dimensional bodies only; lower-dimensional runs must
    supply c0 directly.
    """
    if not bulk_modulus > 0.0:
        raise ConfigError(f"bulk modulus must be positive, got {bulk_modulus}")
    if not delta > 0.0:
        raise ConfigError(f"horizon delta must be positive, got {delta}")
    return 18.0 * bulk_modulus / (math.pi * delta**4)


@dataclass(frozen=True)
class MicroModulus:
    """Radial bond-constant profile c(r) = c0 * k(r/delta), zero outside delta.

    Shapes: cylindrical k = 1, triangular k = 1 - r/delta,
    normal k = exp(-(r/delta)^2), quartic k = (1 - (r/delta)^2)^2.
    All attain their maximum k = 1 as r -> 0.
    """

    family: str = "cylindrical"
    c0: float = 1.0
    delta: float = math.inf

    def __post_init__(self):
        if self.family not in MICRO_FAMILIES:
            raise ConfigError(
                f"micro-modulus family must be one of {MICRO_FAMILIES}, "
                f"got {self.family!r}"
            )
        if not self.c0 > 0.0:
            raise ConfigError(f"micro-modulus c0 must be positive, got {self.c0}")
        if not self.delta > 0.0:
            raise ConfigError(f"micro-modulus delta must be positive, got {self.delta}")

    def profile(self, r):
        """Dimensionless shape k(r) in [0, 1], including the horizon indicator."""
        r = np.asarray(r, dtype=float)
        x = r / self.delta
        if self.family == "cylindrical":
            k = np.ones_like(x)
        elif self.family == "triangular":
            k = 1.0 - x
        elif self.family == "normal":
            k = np.exp(-(x**2))
        else:  # quartic
            k = (1.0 - x**2) ** 2
        return np.where(in_support(r, self.delta), k, 0.0)

    def __call__(self, r):
        return self.c0 * self.profile(r)


@dataclass(frozen=True)
class BondBreaker:
    """Irreversible bond-breakage law.

    critical-stretch: mu drops 1 -> 0 the first time s >= s0 and stays 0.
    theta-eps: mu = ramp(accum) with accum(t) accumulating max(0, s - s0) dt,
    so mu fades linearly from 1 to 0 as the accumulator crosses [0, eps].
    """

    mode: str = "none"
    s0: float = math.inf
    eps: float = 0.0

    def __post_init__(self):
        if self.mode not in BREAKER_MODES:
            raise ConfigError(
                f"breaker mode must be one of {BREAKER_MODES}, got {self.mode!r}"
            )
        if self.mode != "none" and not self.s0 > 0.0:
            raise ConfigError(f"critical stretch s0 must be positive, got {self.s0}")
        if self.mode == "theta-eps" and not self.eps > 0.0:
            raise ConfigError(f"theta-eps ramp width must be positive, got {self.eps}")

    @property
    def active(self) -> bool:
        return self.mode != "none"


def theta_ramp(accum, eps):
    """Graded breakage profile: 1 for accum <= 0, 1 - accum/eps on (0, eps), 0 beyond."""
    return np.clip(1.0 - np.asarray(accum, dtype=float) / eps, 0.0, 1.0)


def update_breaker(breaker, stretch, dt, mu, accum, thresholds=None):
    """Advance per-bond damage state one step, in place; returns mu.

    stretch holds the post-step bond stretches. thresholds optionally
    overrides breaker.s0 per bond (used by the displacement-threshold family
    whose critical stretch varies with bond length). mu only ever decreases.
    """
    if breaker is None or not breaker.active:
        return mu
    s0 = breaker.s0 if thresholds is None else thresholds
    if breaker.mode == "critical-stretch":
        mu[stretch >= s0] = 0.0
    else:  # theta-eps
        accum += np.maximum(0.0, stretch - s0) * dt
        np.minimum(mu, theta_ramp(accum, breaker.eps), out=mu)
    return mu


def _eval_coeff(coeff, r):
    """A radial coefficient given as a constant or a callable of r."""
    if callable(coeff):
        return np.asarray(coeff(r), dtype=float)
    return float(coeff)


class KernelModel:
    """Common interface for the bond force families."""

    family = "base"
    needs_direction = False  # True when the force divides by the deformed length
    breaker = None

    def force(self, xi, eta, mu=None):
        raise NotImplementedError

    def potential(self, xi, eta, mu=None):
        raise NotImplementedError

    def stiffness0(self, xi_norm):
        """Magnitude of the bond stiffness d|f|/dq at the undeformed state."""
        raise NotImplementedError

    @property
    def support_radius(self) -> float:
        return math.inf

    def validate_dim(self, dim):
        return None

    def breaker_thresholds(self, xi_norm):
        """Per-bond critical stretch, or None to use the breaker's own s0."""
        return None

    def gradient_exclusion_mask(self, xi, eta, step):
        """Samples to skip in FD gradient checks (force discontinuities)."""
        return None

    def _geometry(self, xi, eta):
        z = xi + eta
        q = np.linalg.norm(z, axis=1)
        r = np.linalg.norm(xi, axis=1)
        if np.any(r == 0.0):
            raise ValueError(f"{self.family}: zero reference separation in bond array")
        if self.needs_direction and np.any(q == 0.0):
            rows = np.flatnonzero(q == 0.0)[:8].tolist()
            raise SingularConfigurationError(
                f"{self.family}: deformed bond length reached zero "
                f"(bond row(s) {rows})"
            )
        return z, q, r

    def _mu(self, mu, r):
        if mu is None:
            return 1.0
        return np.asarray(mu, dtype=float)


@dataclass(frozen=True)
class AntiPlaneShear(KernelModel):
    """Elongation-proportional force with an absolute displacement cutoff.

    f = c (q - r) n while the elongation q - r stays at or below u_star and
    r <= delta; zero otherwise. The cutoff doubles as a per-bond breakage
    threshold s0 = u_star/r handled through the shared breaker machinery.
    """

    c: float = 1.0
    u_star: float = math.inf
    delta: float = math.inf

    family = "anti-plane-shear"
    needs_direction = True

    def __post_init__(self):
        if not self.c > 0.0:
            raise ConfigError(f"anti-plane-shear c must be positive, got {self.c}")
        if not self.u_star > 0.0:
            raise ConfigError(f"u_star must be positive, got {self.u_star}")

    @property
    def breaker(self):
        if math.isfinite(self.u_star):
            return BondBreaker("critical-stretch", s0=1.0)  # s0 comes per bond
        return None

    def breaker_thresholds(self, xi_norm):
        if math.isfinite(self.u_star):
            return self.u_star / np.asarray(xi_norm, dtype=float)
        return None

    @property
    def support_radius(self):
        return self.delta

    def _active(self, q, r):
        return ((q - r) <= self.u_star) & in_support(r, self.delta)

    def force(self, xi, eta, mu=None):
        xi, eta, single = _as_bond_arrays(xi, eta)
        z, q, r = self._geometry(xi, eta)
        mag = self.c * (q - r) * self._active(q, r) * self._mu(mu, r)
        f = (mag / q)[:, None] * z
        return f[0] if single else f

    def potential(self, xi, eta, mu=None):
        xi, eta, single = _as_bond_arrays(xi, eta)
        z, q, r = self._geometry(xi, eta)
        phi = 0.5 * self.c * (q - r) ** 2 * self._active(q, r) * self._mu(mu, r)
        return float(phi[0]) if single else phi

    def stiffness0(self, xi_norm):
        r = np.asarray(xi_norm, dtype=float)
        return self.c * in_support(r, self.delta).astype(float)

    def gradient_exclusion_mask(self, xi, eta, step):
        if not math.isfinite(self.u_star):
            return None
        z = xi + eta
        elong = np.linalg.norm(z, axis=1) - np.linalg.norm(xi, axis=1)
        return np.abs(elong - self.u_star) <= 8.0 * step


@dataclass(frozen=True)
class QuadraticPotential(KernelModel):
    """Quartic double-well potential alpha(r) (q^2 - r^2)^2.

    The force 4 alpha(r) (q^2 - r^2)(xi + eta) is its exact eta-gradient.
    alpha may be a positive constant or a callable of the reference length.
    """

    alpha: object = 1.0
    delta: float = math.inf

    family = "quadratic"
    needs_direction = False

    def __post_init__(self):
        if not callable(self.alpha) and not self.alpha > 0.0:
            raise ConfigError(f"quadratic alpha must be positive, got {self.alpha}")

    @property
    def support_radius(self):
        return self.delta

    def _coeff(self, r):
        a = _eval_coeff(self.alpha, r)
        if np.ndim(a) or math.isfinite(self.delta):
            return np.where(in_support(r, self.delta), a, 0.0)
        return a

    def force(self, xi, eta, mu=None):
        xi, eta, single = _as_bond_arrays(xi, eta)
        z, q, r = self._geometry(xi, eta)
        gap = q**2 - r**2
        f = (4.0 * self._coeff(r) * gap)[..., None] * z
        return f[0] if single else f

    def potential(self, xi, eta, mu=None):
        xi, eta, single = _as_bond_arrays(xi, eta)
        z, q, r = self._geometry(xi, eta)
        phi = self._coeff(r) * (q**2 - r**2) ** 2
        phi = np.broadcast_to(phi, r.shape)
        return float(phi[0]) if single else np.array(phi)

    def stiffness0(self, xi_norm):
        r = np.asarray(xi_norm, dtype=float)
        return np.broadcast_to(8.0 * self._coeff(r) * r**2, r.shape)


@dataclass(frozen=True)
class PMB(KernelModel):
    """Prototype microelastic brittle family: f = c(r) s mu n.

    The bond constant follows the micro-modulus profile; the optional breaker
    makes the response brittle at a critical stretch (or graded via theta-eps).
    """

    micro: MicroModulus = MicroModulus()
    breaker: BondBreaker = BondBreaker()

    family = "pmb"
    needs_direction = True

    @property
    def support_radius(self):
        return self.micro.delta

    def force(self, xi, eta, mu=None):
        xi, eta, single = _as_bond_arrays(xi, eta)
        z, q, r = self._geometry(xi, eta)
        s = (q - r) / r
        mag = self.micro(r) * s * self._mu(mu, r)
        f = (mag / q)[:, None] * z
        return f[0] if single else f

    def potential(self, xi, eta, mu=None):
        xi, eta, single = _as_bond_arrays(xi, eta)
        z, q, r = self._geometry(xi, eta)
        phi = self.micro(r) * (q - r) ** 2 / (2.0 * r) * self._mu(mu, r)
        return float(phi[0]) if single else phi

    def stiffness0(self, xi_norm):
        r = np.asarray(xi_norm, dtype=float)
        return self.micro(r) / r


@dataclass(frozen=True)
class ConstructiveRod(KernelModel):
    """Rod-type family f = c(r) (q - r)/r^2 n with micro-modulus bond constant."""

    micro: MicroModulus = MicroModulus()

    family = "rod"
    needs_direction = True

    @property
    def support_radius(self):
        return self.micro.delta

    def force(self, xi, eta, mu=None):
        xi, eta, single = _as_bond_arrays(xi, eta)
        z, q, r = self._geometry(xi, eta)
        mag = self.micro(r) * (q - r) / r**2
        f = (mag / q)[:, None] * z
        return f[0] if single else f

    def potential(self, xi, eta, mu=None):
        xi, eta, single = _as_bond_arrays(xi, eta)
        z, q, r = self._geometry(xi, eta)
        phi = self.micro(r) * (q - r) ** 2 / (2.0 * r**2)
        return float(phi[0]) if single else phi

    def stiffness0(self, xi_norm):
        r = np.asarray(xi_norm, dtype=float)
        return self.micro(r) / r**2


@dataclass(frozen=True)
class Convolution(KernelModel):
    """Odd power-law force f = C(xi) |q_vec|^(r-1) q_vec with q_vec = xi + eta.

    The radial coefficient C must be even in xi (a constant always is); the
    exponent must be an odd integer above 1. In one dimension this reduces to
    the scalar form C (xi + eta)^r.
    """

    c_fn: object = 1.0
    exponent: int = 3
    delta: float = math.inf

    family = "convolution"
    needs_direction = False

    def __post_init__(self):
        if int(self.exponent) != self.exponent or self.exponent <= 1 or self.exponent % 2 == 0:
            raise ConfigError(
                f"convolution exponent must be an odd integer > 1, got {self.exponent}"
            )
        if not callable(self.c_fn) and not self.c_fn > 0.0:
            raise ConfigError(f"convolution coefficient must be positive, got {self.c_fn}")

    @property
    def support_radius(self):
        return self.delta

    def _coeff(self, xi, r):
        if callable(self.c_fn):
            c = np.asarray(self.c_fn(xi), dtype=float)
        else:
            c = float(self.c_fn)
        return np.where(in_support(r, self.delta), c, 0.0) if math.isfinite(self.delta) else c

    def force(self, xi, eta, mu=None):
        xi, eta, single = _as_bond_arrays(xi, eta)
        z, q, r = self._geometry(xi, eta)
        f = (self._coeff(xi, r) * q ** (self.exponent - 1))[..., None] * z
        return f[0] if single else f

    def potential(self, xi, eta, mu=None):
        xi, eta, single = _as_bond_arrays(xi, eta)
        z, q, r = self._geometry(xi, eta)
        phi = self._coeff(xi, r) * q ** (self.exponent + 1) / (self.exponent + 1)
        phi = np.broadcast_to(phi, r.shape)
        return float(phi[0]) if single else np.array(phi)

    def stiffness0(self, xi_norm):
        r = np.asarray(xi_norm, dtype=float)
        # Constant coefficient assumed for the stability bound; callables get
        # evaluated on a zero offset of the same length, which matches any
        # radially symmetric C.
        if callable(self.c_fn):
            xi_stub = np.zeros((r.shape[0], 1))
            xi_stub[:, 0] = r
            c = np.asarray(self.c_fn(xi_stub), dtype=float)
        else:
            c = float(self.c_fn)
        return np.broadcast_to(c * self.exponent * r ** (self.exponent - 1), r.shape)


@dataclass(frozen=True)
class NonlinearP(KernelModel):
    """Power-law family with singular reference-length denominator.

    phi = kappa q^p / r^(dim + alpha p) (+ psi), f = kappa p q^(p-2) q_vec /
    r^(dim + alpha p) (+ psi_force). Requires p >= 2 and alpha in (0, 1); the
    stored dim must match the cloud the model is used with. psi and psi_force
    are optional smooth perturbation hooks (caller keeps them consistent).
    """

    kappa: float = 1.0
    p: float = 2.0
    alpha: float = 0.5
    dim: int = 1
    delta: float = math.inf
    psi: object = None
    psi_force: object = None

    family = "nonlinear-p"
    needs_direction = False

    def __post_init__(self):
        if not self.kappa > 0.0:
            raise ConfigError(f"kappa must be positive, got {self.kappa}")
        if not self.p >= 2.0:
            raise ConfigError(f"exponent p must satisfy p >= 2, got {self.p}")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError(
                f"alpha must lie in the open interval (0, 1), got {self.alpha}"
            )
        if self.dim not in (1, 2, 3):
            raise ConfigError(f"dim must be 1, 2, or 3, got {self.dim}")

    @property
    def support_radius(self):
        return self.delta

    def validate_dim(self, dim):
        if dim != self.dim:
            raise ConfigError(
                f"nonlinear-p model built for dim {self.dim} used with dim {dim}"
            )

    def _denom(self, r):
        d = r ** (self.dim + self.alpha * self.p)
        return np.where(in_support(r, self.delta), d, np.inf) if math.isfinite(self.delta) else d

    def force(self, xi, eta, mu=None):
        xi, eta, single = _as_bond_arrays(xi, eta)
        z, q, r = self._geometry(xi, eta)
        pref = self.kappa * self.p * q ** (self.p - 2.0) / self._denom(r)
        f = pref[:, None] * z
        if self.psi_force is not None:
            f = f + np.asarray(self.psi_force(xi, eta), dtype=float)
        return f[0] if single else f

    def potential(self, xi, eta, mu=None):
        xi, eta, single = _as_bond_arrays(xi, eta)
        z, q, r = self._geometry(xi, eta)
        phi = self.kappa * q**self.p / self._denom(r)
        if self.psi is not None:
            phi = phi + np.asarray(self.psi(xi, eta), dtype=float)
        return float(phi[0]) if single else phi

    def stiffness0(self, xi_norm):
        r = np.asarray(xi_norm, dtype=float)
        return self.kappa * self.p * (self.p - 1.0) * r ** (self.p - 2.0) / self._denom(r)


def _nano_elastic_scalar(c, q, r, g):
    ratio = q / r
    return (2.0 * c / r) * (ratio - ratio**-3) * g


def _nano_elastic_potential(c, q, r, g):
    # Antiderivative of the scalar force in q, shifted to vanish at q = r.
    return (c * g / r) * (q**2 / r + r**3 / q**2 - 2.0 * r)


@dataclass(frozen=True)
class NanoMembrane(KernelModel):
    """Thin-membrane family with a hard repulsive core.

    f = (2c/r)(q/r - (q/r)^-3) g(r) mu n. The inverse-cube term diverges as
    the deformed length collapses, so coincidence is energetically barred.
    g is a radial profile (constant or callable), default 1 inside delta.
    """

    c: float = 1.0
    g_fn: object = 1.0
    delta: float = math.inf
    breaker: BondBreaker = BondBreaker()

    family = "nano-membrane"
    needs_direction = True

    def __post_init__(self):
        if not self.c > 0.0:
            raise ConfigError(f"nano-membrane c must be positive, got {self.c}")

    @property
    def support_radius(self):
        return self.delta

    def _g(self, r):
        g = _eval_coeff(self.g_fn, r)
        if math.isfinite(self.delta):
            return np.where(in_support(r, self.delta), g, 0.0)
        return g

    def force(self, xi, eta, mu=None):
        xi, eta, single = _as_bond_arrays(xi, eta)
        z, q, r = self._geometry(xi, eta)
        mag = _nano_elastic_scalar(self.c, q, r, self._g(r)) * self._mu(mu, r)
        f = (mag / q)[:, None] * z
        return f[0] if single else f

    def potential(self, xi, eta, mu=None):
        xi, eta, single = _as_bond_arrays(xi, eta)
        z, q, r = self._geometry(xi, eta)
        phi = _nano_elastic_potential(self.c, q, r, self._g(r)) * self._mu(mu, r)
        return float(phi[0]) if single else phi

    def stiffness0(self, xi_norm):
        r = np.asarray(xi_norm, dtype=float)
        return np.broadcast_to(8.0 * self.c * self._g(r) / r**2, r.shape)


@dataclass(frozen=True)
class NanoFiber(KernelModel):
    """Fiber family: membrane elasticity plus 12-6 van der Waals terms.

    Only the elastic bracket is scaled by g and the breaker factor mu; the
    van der Waals pair -(12 a/delta)(delta/q)^13 + (6 b/delta)(delta/q)^7
    acts along n unconditionally. Requires a finite delta (it sets the van
    der Waals length scale).
    """

    c: float = 1.0
    vdw_a: float = 0.0
    vdw_b: float = 0.0
    delta: float = 1.0
    g_fn: object = 1.0
    breaker: BondBreaker = BondBreaker()

    family = "nano-fiber"
    needs_direction = True

    def __post_init__(self):
        if not self.c > 0.0:
            raise ConfigError(f"nano-fiber c must be positive, got {self.c}")
        if not (math.isfinite(self.delta) and self.delta > 0.0):
            raise ConfigError(f"nano-fiber delta must be finite positive, got {self.delta}")
        if self.vdw_a < 0.0 or self.vdw_b < 0.0:
            raise ConfigError("van der Waals coefficients must be non-negative")

    @property
    def support_radius(self):
        return self.delta

    def _g(self, r):
        g = _eval_coeff(self.g_fn, r)
        return np.where(in_support(r, self.delta), g, 0.0)

    def _vdw_scalar(self, q):
        d = self.delta
        return -(12.0 * self.vdw_a / d) * (d / q) ** 13 + (6.0 * self.vdw_b / d) * (d / q) ** 7

    def _vdw_potential(self, q):
        d = self.delta
        return self.vdw_a * (d / q) ** 12 - self.vdw_b * (d / q) ** 6

    def force(self, xi, eta, mu=None):
        xi, eta, single = _as_bond_arrays(xi, eta)
        z, q, r = self._geometry(xi, eta)
        inside = in_support(r, self.delta).astype(float)
        elastic = _nano_elastic_scalar(self.c, q, r, self._g(r)) * self._mu(mu, r)
        mag = elastic + self._vdw_scalar(q) * inside
        f = (mag / q)[:, None] * z
        return f[0] if single else f

    def potential(self, xi, eta, mu=None):
        xi, eta, single = _as_bond_arrays(xi, eta)
        z, q, r = self._geometry(xi, eta)
        inside = in_support(r, self.delta).astype(float)
        phi = _nano_elastic_potential(self.c, q, r, self._g(r)) * self._mu(mu, r)
        phi = phi + (self._vdw_potential(q) - self._vdw_potential(r)) * inside
        return float(phi[0]) if single else phi

    def stiffness0(self, xi_norm):
        r = np.asarray(xi_norm, dtype=float)
        d = self.delta
        elastic = 8.0 * self.c * self._g(r) / r**2
        vdw = 156.0 * self.vdw_a * d**12 / r**14 + 42.0 * self.vdw_b * d**6 / r**8
        return elastic + vdw * in_support(r, d)


KERNEL_FAMILIES = {
    cls.family: cls
    for cls in (
        AntiPlaneShear,
        QuadraticPotential,
        PMB,
        ConstructiveRod,
        Convolution,
        NonlinearP,
        NanoMembrane,
        NanoFiber,
    )
}


def default_models(delta: float = 1.0, dim: int = 3) -> dict:
    """One representative, axiom-checkable instance per family.

    The same table backs the command-line kernel check and the verification
    suite, so both always exercise identical parameter points.
    """
    return {
        "anti-plane-shear": AntiPlaneShear(c=1.0, u_star=math.inf, delta=delta),
        "quadratic": QuadraticPotential(alpha=1.0, delta=delta),
        "pmb": PMB(micro=MicroModulus("cylindrical", 1.0, delta)),
        "rod": ConstructiveRod(micro=MicroModulus("triangular", 1.0, delta)),
        "convolution": Convolution(c_fn=1.0, exponent=3, delta=delta),
        "nonlinear-p": NonlinearP(kappa=1.0, p=2.5, alpha=0.5, dim=dim, delta=delta),
        "nano-membrane": NanoMembrane(c=1.0, g_fn=1.0, delta=delta),
        "nano-fiber": NanoFiber(c=1.0, vdw_a=0.5, vdw_b=1.0, delta=delta, g_fn=1.0),
    }


@dataclass(frozen=True)
class AxiomReport:
    """Result of the kernel axiom sweep for one family."""

    family: str
    n_samples: int
    antisymmetry_max: float
    collinearity_max: float
    gradient_max: float
    n_excluded: int
    antisymmetry_tol: float = 1e-10
    collinearity_tol: float = 1e-12
    gradient_tol: float = 1e-6

    @property
    def passed(self) -> bool:
        return (
            self.antisymmetry_max < self.antisymmetry_tol
            and self.collinearity_max < self.collinearity_tol
            and self.gradient_max < self.gradient_tol
        )

    def summary(self) -> str:
        status = "ok" if self.passed else "FAIL"
        return (
            f"{self.family:>16s}  antisym {self.antisymmetry_max:8.1e}  "
            f"collin {self.collinearity_max:8.1e}  grad {self.gradient_max:8.1e}  "
            f"excluded {self.n_excluded:3d}  [{status}]"
        )


def _unit_vectors(rng, n, dim):
    if dim == 1:
        return rng.choice([-1.0, 1.0], size=(n, 1))
    v = rng.standard_normal((n, dim))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def _cross_residual(z, f):
    """Relative collinearity residual |z x f| / (|z| |f|) per sample."""
    dim = z.shape[1]
    if dim == 1:
        num = np.zeros(z.shape[0])
    elif dim == 2:
        num = np.abs(z[:, 0] * f[:, 1] - z[:, 1] * f[:, 0])
    else:
        num = np.linalg.norm(np.cross(z, f), axis=1)
    denom = np.maximum(np.linalg.norm(z, axis=1) * np.linalg.norm(f, axis=1), 1e-300)
    return num / denom


def check_kernel_axioms(model, dim, n_samples=1000, seed=0, xi_scale=None):
    """Randomized verification of the structural bond-force axioms.

    Samples reference separations with |xi| in (0.1 L, L) and displacements
    with |eta| <= 0.5 |xi| (L = xi_scale, defaulting to the model's support
    radius or 1). Checks antisymmetry f(-xi, -eta) = -f(xi, eta), collinearity
    of f with xi + eta, and the match between f and the central-difference
    eta-gradient of the potential (step 1e-6 max(1, |eta|)). Samples whose FD
    stencil straddles a force discontinuity are excluded from the gradient
    check and counted in the report.
    """
    rng = np.random.default_rng(seed)
    if xi_scale is None:
        xi_scale = model.support_radius if math.isfinite(model.support_radius) else 1.0
    r = rng.uniform(0.1 * xi_scale, xi_scale, n_samples)
    xi = r[:, None] * _unit_vectors(rng, n_samples, dim)
    eta_mag = rng.uniform(0.0, 0.5, n_samples) * r
    eta = eta_mag[:, None] * _unit_vectors(rng, n_samples, dim)

    f = model.force(xi, eta)
    f_neg = model.force(-xi, -eta)
    antisymmetry_max = float(np.max(np.abs(f_neg + f)))

    collinearity_max = float(np.max(_cross_residual(xi + eta, f)))

    step = 1e-6 * np.maximum(1.0, np.linalg.norm(eta, axis=1))
    grad = np.empty_like(f)
    for k in range(dim):
        bump = np.zeros_like(eta)
        bump[:, k] = step
        grad[:, k] = (model.potential(xi, eta + bump) - model.potential(xi, eta - bump)) / (
            2.0 * step
        )
    exclude = model.gradient_exclusion_mask(xi, eta, step)
    if exclude is None:
        exclude = np.zeros(n_samples, dtype=bool)
    err = np.linalg.norm(f - grad, axis=1)
    force_scale = max(float(np.max(np.linalg.norm(f, axis=1))), 1e-300)
    kept = ~exclude
    gradient_max = float(np.max(err[kept]) / force_scale) if np.any(kept) else 0.0

    return AxiomReport(
        family=model.family,
        n_samples=n_samples,
        antisymmetry_max=antisymmetry_max,
        collinearity_max=collinearity_max,
        gradient_max=gradient_max,
        n_excluded=int(np.sum(exclude)),
    )
