"""Warped convolutions on the truncated Fock space.

Every operator here is number- and momentum-sector-aware: because the
total energy-momentum has pure point spectrum on the lattice Fock space,
warping acts entrywise in the enumerated basis through a matrix of twist
phases built from the sector table.  That makes the deformation exact —
no oscillatory integrals are involved (a quadrature cross-check of this
collapse lives in the quadrature module).
"""

from dataclasses import dataclass, field

import numpy as np

from .operators import as_matrix

__all__ = [
    "ThetaMatrix",
    "eta",
    "validate_theta",
    "twist_phases",
    "warp",
    "rieffel_product",
    "deformed_commutator",
    "unwarp_roundtrip",
]


def eta(d):
    """Minkowski metric diag(+1, -1, ..., -1) in d = n+1 dimensions."""
    return np.diag([1.0] + [-1.0] * (d - 1))


def validate_theta(theta):
    """Check the deformation-matrix invariants, raising on violation.

    theta must be square with contravariant antisymmetric entries
    (theta[a, b] == -theta[b, a] exactly) and Minkowski-skew: the
    index-lowered form eta theta eta is antisymmetric to 1e-14.
    """
    t = np.asarray(theta, dtype=float)
    if t.ndim != 2 or t.shape[0] != t.shape[1]:
        raise ValueError(f"theta must be square, got shape {t.shape}")
    if not np.array_equal(t, -t.T):
        bad = np.argwhere(t != -t.T)[0]
        raise ValueError(
            f"theta antisymmetry violated: theta[{bad[0]},{bad[1]}] != "
            f"-theta[{bad[1]},{bad[0]}]"
        )
    e = eta(t.shape[0])
    low = e @ t @ e
    dev = np.abs(low + low.T).max()
    if dev > 1e-14:
        raise ValueError(f"theta violates Minkowski skewness by {dev:.3e}")
    return t


@dataclass(frozen=True)
class ThetaMatrix:
    """Validated contravariant deformation matrix theta^{mu nu}."""

    mat: np.ndarray = field(repr=False)

    def __post_init__(self):
        validate_theta(self.mat)

    @property
    def dim(self):
        return self.mat.shape[0]


def _theta_mat(theta):
    if isinstance(theta, ThetaMatrix):
        return theta.mat
    return validate_theta(theta)


def twist_phases(theta, sectors):
    """Matrix of twist phases G with G[u, v] = exp(i g(q_u, q_v)).

    g is the theta-contraction of the two sector momenta with indices
    lowered by the Minkowski metric; its diagonal vanishes identically
    by skewness.  Warping an operator A multiplies A[u, v] by G[v, u].
    """
    t = _theta_mat(theta)
    d = t.shape[0]
    if sectors.shape[1] != d:
        raise ValueError(
            f"sector table has {sectors.shape[1]} components, theta is {d}x{d}"
        )
    e = eta(d)
    tq = sectors @ (t @ e).T
    return np.exp(1j * (tq @ e @ sectors.T))


def warp(op, theta, sectors, phases=None):
    """Warped convolution of one operator, exact on the point spectrum.

    Entrywise: warp(A)[u, v] = A[u, v] * G[v, u] with G = twist_phases.
    Operators diagonal in the sector table are exact fixed points.
    """
    g = twist_phases(theta, sectors) if phases is None else phases
    return as_matrix(op) * g.T


def rieffel_product(a, b, theta, sectors, phases=None):
    """Deformed product: warp both factors, multiply, untwist entrywise.

    Satisfies warp(A) warp(B) = warp(rieffel_product(A, B)) by
    construction, and reduces to the plain matrix product at theta = 0.
    """
    g = twist_phases(theta, sectors) if phases is None else phases
    gt = g.T
    ap = as_matrix(a) * gt
    bp = as_matrix(b) * gt
    return (ap @ bp) * gt.conj()


def deformed_commutator(a, b, theta, sectors, phases=None):
    """Commutator in the deformed product algebra."""
    g = twist_phases(theta, sectors) if phases is None else phases
    return (rieffel_product(a, b, theta, sectors, phases=g)
            - rieffel_product(b, a, theta, sectors, phases=g))


def unwarp_roundtrip(op, theta, sectors):
    """warp with -theta after warp with +theta; the identity map, exactly."""
    t = _theta_mat(theta)
    return warp(warp(op, t, sectors), -t, sectors)
