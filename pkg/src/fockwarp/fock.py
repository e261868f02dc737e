"""Truncated bosonic Fock space over the lattice modes.

States are multisets of mode indices, enumerated with ascending total
particle number and lexicographically within each stratum, so the vacuum
is state 0 and the one-particle states follow in mode order.
"""

from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from math import comb

import numpy as np

__all__ = [
    "FockBasis",
    "DEFAULT_MEMORY_BUDGET",
    "basis_dimension",
    "enumerate_basis",
    "sector_table",
]

DEFAULT_MEMORY_BUDGET = 2 * 1024**3  # bytes for one dense operator


def basis_dimension(num_modes, n_max):
    """Number of Fock states with at most n_max quanta in num_modes modes."""
    return sum(comb(num_modes + j - 1, j) for j in range(n_max + 1))


@dataclass(frozen=True)
class FockBasis:
    """Enumerated truncated Fock basis.

    `states[i]` is the sorted tuple of occupied mode indices of basis
    state i (the vacuum is the empty tuple).  `index` inverts it.
    """

    num_modes: int
    n_max: int
    states: tuple = field(repr=False)
    index: dict = field(repr=False)

    @property
    def dim(self):
        return len(self.states)

    @property
    def occupancy(self):
        """Particle number of each basis state."""
        return np.array([len(s) for s in self.states])

    @property
    def one_particle_slice(self):
        """Positions of the one-particle stratum (mode k at offset 1 + k)."""
        return slice(1, 1 + self.num_modes)


def enumerate_basis(num_modes, n_max, memory_budget=DEFAULT_MEMORY_BUDGET):
    """Enumerate the truncated Fock basis over `num_modes` modes.

    Rejects n_max < 1 and bases whose dense operators would exceed the
    memory budget (16 bytes per complex entry), reporting the computed
    size in the error.
    """
    if num_modes < 1:
        raise ValueError(f"need at least one mode, got {num_modes}")
    if n_max < 1:
        raise ValueError(f"truncation must keep at least one particle, got N_max={n_max}")
    dim = basis_dimension(num_modes, n_max)
    need = 16 * dim * dim
    if need > memory_budget:
        raise MemoryError(
            f"basis of dimension {dim} needs {need} bytes per dense operator, "
            f"budget is {memory_budget}"
        )
    states = []
    for j in range(n_max + 1):
        states.extend(combinations_with_replacement(range(num_modes), j))
    index = {s: i for i, s in enumerate(states)}
    return FockBasis(num_modes=num_modes, n_max=n_max, states=tuple(states), index=index)


def sector_table(basis, grid):
    """Energy-momentum of every basis state, accumulated in mode order.

    Returns a (dim, n+1) array whose row i is (sum of energies, sum of
    momenta) over the occupied modes of state i, summed left to right in
    the sorted tuple order.  Using one fixed summation order makes the
    additivity of sectors an exact floating-point identity.
    """
    if basis.num_modes != grid.size:
        raise ValueError(
            f"basis has {basis.num_modes} modes but grid has {grid.size} sites"
        )
    out = np.zeros((basis.dim, grid.n + 1))
    for i, s in enumerate(basis.states):
        e = 0.0
        p = np.zeros(grid.n)
        for k in s:
            e = e + grid.energy[k]
            p = p + grid.points[k]
        out[i, 0] = e
        out[i, 1:] = p
    return out
