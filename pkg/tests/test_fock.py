"""Tests for the truncated Fock basis enumeration."""

import math

import numpy as np
import pytest

from fockwarp.fock import basis_dimension, enumerate_basis, sector_table
from fockwarp.lattice import LatticeSpec, build_grid


def test_basis_dimension_values():
    # sum_{j<=N} C(K+j-1, j) against an independent evaluation
    for modes, n_max, want in [(4, 2, 15), (16, 2, 153), (64, 2, 2145)]:
        assert basis_dimension(modes, n_max) == want
        direct = sum(math.comb(modes + j - 1, j) for j in range(n_max + 1))
        assert basis_dimension(modes, n_max) == direct


def test_enumeration_order():
    b = enumerate_basis(3, 2)
    assert b.states[0] == ()
    assert b.states[1:4] == ((0,), (1,), (2,))
    # two-particle stratum is lexicographic over sorted pairs
    assert b.states[4:] == ((0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2))
    assert b.dim == basis_dimension(3, 2)
    assert np.array_equal(b.occupancy, [0, 1, 1, 1, 2, 2, 2, 2, 2, 2])


def test_index_inverts_states():
    b = enumerate_basis(5, 3)
    for i, s in enumerate(b.states):
        assert b.index[s] == i
    assert b.one_particle_slice == slice(1, 6)


def test_rejects_empty_truncation():
    with pytest.raises(ValueError, match="at least one particle"):
        enumerate_basis(4, 0)
    with pytest.raises(ValueError, match="at least one mode"):
        enumerate_basis(0, 2)


def test_memory_budget_failure_reports_size():
    dim = basis_dimension(64, 2)
    with pytest.raises(MemoryError) as exc:
        enumerate_basis(64, 2, memory_budget=1000)
    msg = str(exc.value)
    assert str(dim) in msg
    assert str(16 * dim * dim) in msg


def test_sector_additivity_is_exact():
    """Sector of a multi-particle state equals the left-to-right sum of
    its mode sectors, as a bitwise floating-point identity."""
    g = build_grid(LatticeSpec(n=2, M=4, L=6.0, m=0.3))
    b = enumerate_basis(g.size, 2)
    q = sector_table(b, g)
    assert q.shape == (b.dim, 3)
    assert np.all(q[0] == 0.0)
    for i, s in enumerate(b.states):
        e = 0.0
        p = np.zeros(2)
        for k in s:
            e = e + g.energy[k]
            p = p + g.points[k]
        assert q[i, 0] == e
        assert np.array_equal(q[i, 1:], p)


def test_sector_table_checks_mode_count():
    g = build_grid(LatticeSpec(n=1, M=4, L=4.0))
    b = enumerate_basis(8, 1)
    with pytest.raises(ValueError, match="modes"):
        sector_table(b, g)
