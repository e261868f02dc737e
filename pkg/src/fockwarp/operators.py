"""Second-quantized operators on the truncated Fock space.

All operators are dense complex matrices in the enumerated Fock basis,
wrapped with flags for hermiticity and particle-number conservation.
Additive lifts dGamma(h) of one-particle kernels h are built by
`second_quantize`; the named physical operators below are thin wrappers
around specific kernels.
"""

from bisect import insort
from dataclasses import dataclass, field
from itertools import permutations
from math import factorial, sqrt

import numpy as np

from .lattice import OneParticleMatrix, dft_one_particle, position_multiplier
from .fock import sector_table

__all__ = [
    "FockOperator",
    "ladder_op",
    "second_quantize",
    "multiplicative_lift",
    "number_op",
    "momentum_op",
    "velocity_op",
    "coordinate_op_spectral",
    "coordinate_op_stencil",
    "time_op",
    "nwp_op",
    "tilde_velocity_op",
    "tilde_velocity_commutator",
    "translate",
    "axis_shift",
    "weyl_pair",
    "kernel_coordinate_spectral",
    "kernel_coordinate_stencil",
    "kernel_nwp",
    "kernel_time",
    "kernel_tilde_velocity",
    "kernel_velocity",
    "dump_triplets",
]


@dataclass(frozen=True)
class FockOperator:
    """Dense operator on the truncated Fock space with declared flags."""

    mat: np.ndarray = field(repr=False)
    label: str = ""
    hermitian: bool = False
    number_conserving: bool = True

    def __post_init__(self):
        a = np.asarray(self.mat)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"operator must be square, got {a.shape}")
        if self.hermitian:
            dev = np.abs(a - a.conj().T).max()
            if dev > 1e-12:
                raise ValueError(
                    f"operator {self.label!r} declared hermitian deviates by {dev:.3e}"
                )


def as_matrix(op):
    """Dense matrix of a FockOperator, OneParticleMatrix, or ndarray."""
    if isinstance(op, (FockOperator, OneParticleMatrix)):
        return op.mat
    return np.asarray(op)


def _kernel_mat(kernel, num_modes):
    h = as_matrix(kernel)
    if h.shape != (num_modes, num_modes):
        raise ValueError(f"kernel shape {h.shape} does not match {num_modes} modes")
    return h


def ladder_op(basis, k, kind):
    """Creation or annihilation operator for mode k.

    Amplitudes are sqrt(n_k + 1) on the way up; transitions that leave
    the truncation are dropped.
    """
    if not 0 <= k < basis.num_modes:
        raise ValueError(f"mode {k} out of range")
    if kind not in ("create", "annihilate"):
        raise ValueError(f"kind must be 'create' or 'annihilate', got {kind!r}")
    mat = np.zeros((basis.dim, basis.dim), dtype=complex)
    for i, s in enumerate(basis.states):
        if len(s) == basis.n_max:
            continue
        up = list(s)
        insort(up, k)
        j = basis.index[tuple(up)]
        mat[j, i] = sqrt(s.count(k) + 1)
    if kind == "annihilate":
        mat = mat.conj().T
    return FockOperator(mat=mat, label=f"a{'dag' if kind == 'create' else ''}_{k}",
                        hermitian=False, number_conserving=False)


def second_quantize(basis, kernel, label=""):
    """Additive lift dGamma(h) = sum_{k'k} h_{k'k} adag_{k'} a_k.

    The one-particle block of the result is exactly h, and the lift is a
    Lie-algebra homomorphism: [dGamma(a), dGamma(b)] = dGamma([a, b]).
    """
    h = _kernel_mat(kernel, basis.num_modes)
    herm = isinstance(kernel, (OneParticleMatrix, FockOperator)) and kernel.hermitian
    mat = np.zeros((basis.dim, basis.dim), dtype=complex)
    if basis.n_max == 1:
        mat[1:, 1:] = h
    else:
        for i, s in enumerate(basis.states):
            prev = None
            for pos, k in enumerate(s):
                if k == prev:
                    continue
                prev = k
                amp = sqrt(s.count(k))
                rem = list(s[:pos] + s[pos + 1:])
                for kp in range(basis.num_modes):
                    if h[kp, k] == 0:
                        continue
                    tgt = list(rem)
                    insort(tgt, kp)
                    j = basis.index[tuple(tgt)]
                    mat[j, i] += h[kp, k] * amp * sqrt(rem.count(kp) + 1)
    return FockOperator(mat=mat, label=label or "dGamma", hermitian=herm)


def multiplicative_lift(basis, u):
    """Multiplicative lift of a one-particle map: u acting on every factor.

    Matrix elements are permanents of sub-blocks of u with bosonic
    normalization; for unitary u the lift is unitary.  Used by
    cross-checks on small bases.
    """
    u = _kernel_mat(u, basis.num_modes)
    out = np.zeros((basis.dim, basis.dim), dtype=complex)
    strata = {}
    for i, s in enumerate(basis.states):
        strata.setdefault(len(s), []).append(i)
    for npart, idxs in strata.items():
        for i in idxs:
            s = basis.states[i]
            for ti in idxs:
                t = basis.states[ti]
                acc = 0.0 + 0.0j
                for perm in permutations(range(npart)):
                    term = 1.0 + 0.0j
                    for a in range(npart):
                        term *= u[t[a], s[perm[a]]]
                    acc += term
                norm = sqrt(_occ_factorial(s) * _occ_factorial(t))
                out[ti, i] = acc / norm
    return FockOperator(mat=out, label="Gamma", hermitian=False)


def _occ_factorial(s):
    prod = 1
    for k in set(s):
        prod *= factorial(s.count(k))
    return prod


def number_op(basis):
    """Particle number operator (diagonal in the enumerated basis)."""
    return FockOperator(mat=np.diag(basis.occupancy.astype(complex)), label="N",
                        hermitian=True)


def momentum_op(basis, grid, mu):
    """Total energy-momentum component P^mu, diagonal in the sector table."""
    if not 0 <= mu <= grid.n:
        raise ValueError(f"component {mu} out of range for n={grid.n}")
    q = sector_table(basis, grid)
    return FockOperator(mat=np.diag(q[:, mu].astype(complex)), label=f"P{mu}",
                        hermitian=True)


def kernel_velocity(grid, j):
    """One-particle velocity multiplier p_j / omega."""
    _check_axis(grid, j)
    return np.diag((grid.points[:, j - 1] / grid.energy).astype(complex))


def velocity_op(basis, grid, j):
    return second_quantize(basis, OneParticleMatrix(kernel_velocity(grid, j), hermitian=True),
                           label=f"V{j}")


def kernel_coordinate_spectral(grid, j):
    """Coordinate kernel by spectral conjugation: W^dag diag(x_j) W."""
    _check_axis(grid, j)
    return position_multiplier(grid, lambda x: x[:, j - 1]).mat


def coordinate_op_spectral(basis, grid, j):
    return second_quantize(
        basis,
        OneParticleMatrix(kernel_coordinate_spectral(grid, j), hermitian=True),
        label=f"X{j}",
    )


def axis_shift(grid, axis):
    """Cyclic increment shift along one momentum axis: (S psi)(k) = psi(k + e_axis)."""
    _check_axis(grid, axis)
    a = axis - 1
    nbr = grid.index.copy()
    nbr[:, a] = (nbr[:, a] + 1) % grid.M
    flat = np.zeros(grid.size, dtype=int)
    for b in range(grid.n):
        flat = flat * grid.M + nbr[:, b]
    s = np.zeros((grid.size, grid.size))
    s[np.arange(grid.size), flat] = 1.0
    return s


def kernel_coordinate_stencil(grid, j):
    """Coordinate kernel from the centered first-difference stencil."""
    s = axis_shift(grid, j)
    return 1j * (s - s.T) / (2 * grid.dp)


def coordinate_op_stencil(basis, grid, j):
    return second_quantize(
        basis,
        OneParticleMatrix(kernel_coordinate_stencil(grid, j), hermitian=True),
        label=f"X{j}st",
    )


def kernel_time(grid):
    """Zero-component coordinate kernel: multiplication by sqrt(|x|^2 + m^2)."""
    m = grid.m
    return position_multiplier(grid, lambda x: np.sqrt((x**2).sum(axis=1) + m**2)).mat


def time_op(basis, grid):
    return second_quantize(basis, OneParticleMatrix(kernel_time(grid), hermitian=True),
                           label="X0")


def kernel_nwp(grid, j):
    """Newton-Wigner-Pryce kernel, realized by conjugating the covariant
    form -i (p_j/(2 omega^2) + d/dp_j) with diag(sqrt(2 omega)).

    Not exactly hermitian at finite spacing; the deviation is reported by
    the verification suite rather than asserted.
    """
    _check_axis(grid, j)
    w = grid.energy
    pj = grid.points[:, j - 1]
    d = np.sqrt(2.0 * w)
    deriv = 1j * kernel_coordinate_spectral(grid, j)  # spectral d/dp_j
    core = -1j * (np.diag((pj / (2.0 * w**2)).astype(complex)) + deriv)
    return (core * d[None, :]) / d[:, None]


def nwp_op(basis, grid, j):
    return second_quantize(basis, kernel_nwp(grid, j), label=f"NWP{j}")


def kernel_tilde_velocity(grid, mu, form="commutator"):
    """Tilde-velocity kernel for component mu.

    form="commutator": -i [diag(q^mu), X0-kernel] (default; all mu).
    form="multiplier": -(x_j/|x|) as a position multiplier (spatial mu
    only) — agrees with the commutator form only in the refinement
    limit; the measured gap is reported by the suite.
    """
    if not 0 <= mu <= grid.n:
        raise ValueError(f"component {mu} out of range for n={grid.n}")
    if form == "commutator":
        qmu = grid.energy if mu == 0 else grid.points[:, mu - 1]
        f0 = kernel_time(grid)
        return -1j * (qmu[:, None] * f0 - f0 * qmu[None, :])
    if form == "multiplier":
        if mu == 0:
            raise ValueError("multiplier form is defined for spatial components only")
        return -position_multiplier(
            grid, lambda x: x[:, mu - 1] / np.sqrt((x**2).sum(axis=1))
        ).mat
    raise ValueError(f"unknown form {form!r}")


def tilde_velocity_op(basis, grid, mu, form="commutator"):
    kern = kernel_tilde_velocity(grid, mu, form=form)
    return second_quantize(basis, OneParticleMatrix(kern, hermitian=True),
                           label=f"VT{mu}")


def tilde_velocity_commutator(basis, grid, k, j):
    """Lift of the one-particle commutator [tilde-V^k, V_j].

    By the homomorphism property this equals the commutator of the two
    lifted operators.
    """
    a = kernel_tilde_velocity(grid, k)
    b = kernel_velocity(grid, j)
    return second_quantize(basis, a @ b - b @ a, label=f"[VT{k},V{j}]")


def translate(op, b, sectors):
    """Conjugate by the translation unitary exp(i b.P).

    `b` has n+1 contravariant components; the phase on a sector q is
    b^0 q^0 - sum_k b^k q^k.  Diagonal operators are exact fixed points.
    """
    b = np.asarray(b, dtype=float)
    if b.shape != (sectors.shape[1],):
        raise ValueError(f"translation needs {sectors.shape[1]} components, got {b.shape}")
    lower = b.copy()
    lower[1:] = -lower[1:]
    u = np.exp(1j * (sectors @ lower))
    mat = as_matrix(op) * np.outer(u, u.conj())
    if isinstance(op, FockOperator):
        return FockOperator(mat=mat, label=f"T[{op.label}]", hermitian=op.hermitian,
                            number_conserving=op.number_conserving)
    return mat


def weyl_pair(grid, axis):
    """One-particle Weyl pair (T, Phi) for one axis.

    T is the increment shift in momentum index, Phi the position-phase
    diag(exp(i dx p_axis)); they satisfy T Phi = exp(i dx dp) Phi T
    exactly on the offset grid.
    """
    t = axis_shift(grid, axis)
    phi = np.diag(np.exp(1j * grid.dx * grid.points[:, axis - 1]))
    return t, phi


def dump_triplets(mat, fh, tol=0.0):
    """Write nonzero entries as "row col re im" lines, sorted row-major."""
    a = np.asarray(mat)
    rows, cols = np.nonzero(np.abs(a) > tol)
    for i, j in zip(rows, cols):
        v = a[i, j]
        fh.write(f"{i} {j} {v.real:.17g} {v.imag:.17g}\n")


def _check_axis(grid, j):
    if not 1 <= j <= grid.n:
        raise ValueError(f"spatial axis {j} out of range for n={grid.n}")
