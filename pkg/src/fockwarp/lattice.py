"""Momentum lattice, dual position grid, and one-particle kernels.

The discretization lives on a periodic momentum lattice with half-integer
offset, so that no grid point sits at p = 0 and the grid is exactly closed
under p -> -p.  Position space is the DFT-dual grid with the same offset.
"""

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "LatticeSpec",
    "MomentumGrid",
    "OneParticleMatrix",
    "build_grid",
    "dft_one_particle",
    "negation_index",
    "position_multiplier",
]


@dataclass(frozen=True)
class LatticeSpec:
    """Parameters of one lattice instance.

    n : spatial dimension (>= 1)
    M : sites per axis (even, >= 4)
    L : box length (> 0)
    m : mass (>= 0)
    """

    n: int
    M: int
    L: float
    m: float = 0.0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"spatial dimension must be >= 1, got n={self.n}")
        if self.M < 4 or self.M % 2 != 0:
            raise ValueError(f"sites per axis must be even and >= 4, got M={self.M}")
        if not self.L > 0:
            raise ValueError(f"box length must be positive, got L={self.L}")
        if self.m < 0:
            raise ValueError(f"mass must be nonnegative, got m={self.m}")


@dataclass(frozen=True)
class MomentumGrid:
    """A realized lattice: momentum points, dual points, and energies.

    Flattened site order is row-major in the per-axis indices (last axis
    fastest).  `points[k]` is the momentum n-vector of site k, `dual[k]`
    the position n-vector of site k on the dual grid, `energy[k]` the
    relativistic energy sqrt(|p|^2 + m^2).
    """

    spec: LatticeSpec
    points: np.ndarray = field(repr=False)
    dual: np.ndarray = field(repr=False)
    energy: np.ndarray = field(repr=False)
    index: np.ndarray = field(repr=False)

    @property
    def n(self):
        return self.spec.n

    @property
    def M(self):
        return self.spec.M

    @property
    def L(self):
        return self.spec.L

    @property
    def m(self):
        return self.spec.m

    @property
    def size(self):
        """Number of lattice sites M^n."""
        return self.points.shape[0]

    @property
    def dp(self):
        """Momentum spacing 2*pi/L."""
        return 2 * np.pi / self.L

    @property
    def dx(self):
        """Position spacing L/M."""
        return self.L / self.M


def build_grid(spec):
    """Construct the momentum grid and its dual for a LatticeSpec.

    Per axis the momenta are p_a(k) = (2*pi/L) * (k - M/2 + 1/2) for
    k = 0..M-1 and the dual positions x_a(m) = (L/M) * (m - M/2 + 1/2).
    Both grids are symmetric about zero without containing it.
    """
    n, M, L, m = spec.n, spec.M, spec.L, spec.m
    half = 0.5 * M - 0.5
    p_axis = (2 * np.pi / L) * (np.arange(M) - half)
    x_axis = (L / M) * (np.arange(M) - half)
    idx = np.stack(np.meshgrid(*([np.arange(M)] * n), indexing="ij"), axis=-1)
    idx = idx.reshape(-1, n)
    points = p_axis[idx]
    dual = x_axis[idx]
    energy = np.sqrt((points**2).sum(axis=1) + m**2)
    return MomentumGrid(spec=spec, points=points, dual=dual, energy=energy, index=idx)


def negation_index(grid):
    """Permutation j with points[j[k]] = -points[k], exact on this grid."""
    rev = grid.M - 1 - grid.index
    flat = np.zeros(len(rev), dtype=int)
    for a in range(grid.n):
        flat = flat * grid.M + rev[:, a]
    return flat


def dft_one_particle(grid):
    """Unitary map from momentum amplitudes to dual-grid amplitudes.

    W[m, k] = M^(-n/2) * exp(+i p(k) . x(m)).  W is symmetric, and W @ W
    equals the index-reversal permutation (grid negation).
    """
    phase = grid.dual @ grid.points.T
    return np.exp(1j * phase) / grid.M ** (grid.n / 2.0)


@dataclass(frozen=True)
class OneParticleMatrix:
    """A one-particle kernel with a declared hermiticity flag.

    When `hermitian` is set the constructor enforces it to 1e-12.
    """

    mat: np.ndarray = field(repr=False)
    hermitian: bool = False

    def __post_init__(self):
        a = np.asarray(self.mat)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"kernel must be square, got shape {a.shape}")
        if self.hermitian:
            dev = np.abs(a - a.conj().T).max()
            if dev > 1e-12:
                raise ValueError(f"kernel declared hermitian deviates by {dev:.3e}")


def position_multiplier(grid, f):
    """Multiplication by f(x) on the dual grid, pulled back to momentum space.

    Returns the OneParticleMatrix W^dag diag(f(x_m)) W.  The result is
    hermitian exactly when f takes real values, and its spectrum is
    {f(x_m)} by unitary conjugation.

    Parameters
    ----------
    grid : MomentumGrid
    f : callable
        Maps an (K, n) array of dual points to K values.
    """
    vals = np.asarray(f(grid.dual), dtype=complex)
    if vals.shape != (grid.size,):
        raise ValueError(
            f"multiplier must return one value per site, got shape {vals.shape}"
        )
    if not np.all(np.isfinite(vals)):
        raise ValueError("multiplier returned non-finite values")
    w = dft_one_particle(grid)
    mat = w.conj().T @ (vals[:, None] * w)
    herm = bool(np.allclose(vals.imag, 0.0, atol=0.0))
    if herm:
        mat = 0.5 * (mat + mat.conj().T)
    return OneParticleMatrix(mat=mat, hermitian=herm)
