"""Tests for second-quantized operators on the truncated Fock space."""

import io
import math

import numpy as np
import pytest

from fockwarp.fock import enumerate_basis, sector_table
from fockwarp.lattice import LatticeSpec, OneParticleMatrix, build_grid, dft_one_particle
from fockwarp.operators import (
    as_matrix,
    axis_shift,
    dump_triplets,
    kernel_tilde_velocity,
    kernel_time,
    ladder_op,
    momentum_op,
    multiplicative_lift,
    number_op,
    nwp_op,
    second_quantize,
    tilde_velocity_commutator,
    time_op,
    translate,
    velocity_op,
    weyl_pair,
)


def small_instance(n=1, M=4, L=2 * math.pi, m=0.0, n_max=2):
    g = build_grid(LatticeSpec(n=n, M=M, L=L, m=m))
    b = enumerate_basis(g.size, n_max)
    return b, g


def test_ladder_matrix_elements():
    b, g = small_instance()
    k = 1
    ad = as_matrix(ladder_op(b, k, "create"))
    a = as_matrix(ladder_op(b, k, "annihilate"))
    assert np.abs(ad - a.conj().T).max() == 0.0
    # <2_k| (a_k^dag)^2 |vac> = sqrt(2)
    two = b.index[(k, k)]
    v = (ad @ ad)[:, 0]
    assert v[two] == pytest.approx(math.sqrt(2), abs=1e-15)
    assert np.abs(np.delete(v, two)).max() == 0.0
    # annihilator kills the vacuum
    assert np.abs(a[:, 0]).max() == 0.0


def test_ladder_ccr_below_top_stratum():
    """[a_k, a_l^dag] = delta_kl on states that cannot leave the truncation."""
    b, g = small_instance()
    keep = np.flatnonzero(b.occupancy <= b.n_max - 1)
    rng = np.random.default_rng(7)
    for _ in range(6):
        k, l = rng.integers(0, b.num_modes, size=2)
        a = as_matrix(ladder_op(b, int(k), "annihilate"))
        cd = as_matrix(ladder_op(b, int(l), "create"))
        comm = a @ cd - cd @ a
        want = (1.0 if k == l else 0.0) * np.eye(b.dim)
        assert np.abs((comm - want)[np.ix_(keep, keep)]).max() < 1e-13


def test_second_quantize_matches_ladder_sum():
    """dGamma(h) agrees with sum_kl h_kl a_k^dag a_l assembled by hand."""
    b, g = small_instance()
    rng = np.random.default_rng(3)
    h = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    h = h + h.conj().T
    direct = np.zeros((b.dim, b.dim), dtype=complex)
    for k in range(4):
        ck = as_matrix(ladder_op(b, k, "create"))
        for l in range(4):
            al = as_matrix(ladder_op(b, l, "annihilate"))
            direct += h[k, l] * (ck @ al)
    lifted = as_matrix(second_quantize(b, OneParticleMatrix(h, hermitian=True)))
    assert np.abs(lifted - direct).max() < 1e-12


def test_second_quantize_one_particle_block():
    b, g = small_instance(n=2, M=4, n_max=2)
    rng = np.random.default_rng(11)
    h = rng.normal(size=(16, 16)) + 1j * rng.normal(size=(16, 16))
    h = h + h.conj().T
    mat = as_matrix(second_quantize(b, OneParticleMatrix(h, hermitian=True)))
    sl = b.one_particle_slice
    assert np.abs(mat[sl, sl] - h).max() < 1e-14
    # vacuum is annihilated by any dGamma
    assert np.abs(mat[:, 0]).max() == 0.0


def test_number_and_momentum_are_diagonal():
    b, g = small_instance(n=2, M=4, n_max=2)
    q = sector_table(b, g)
    nmat = as_matrix(number_op(b))
    assert np.array_equal(nmat, np.diag(b.occupancy.astype(complex)))
    for mu in range(3):
        pmat = as_matrix(momentum_op(b, g, mu))
        assert np.abs(pmat - np.diag(q[:, mu])).max() < 1e-15


def test_velocity_value():
    # v = p/omega: at m=2 the mode with p=-1.5 has omega=2.5, so v=-0.6
    b, g = small_instance(m=2.0, n_max=1)
    v = as_matrix(velocity_op(b, g, 1))
    assert v[1, 1] == pytest.approx(-0.6, abs=1e-15)


def test_time_op_spectrum():
    """The zero-component coordinate is multiplication by sqrt(x^2+m^2)
    in position space, so its one-particle spectrum is exactly those values."""
    b, g = small_instance(m=0.7, n_max=1)
    f0 = kernel_time(g)
    assert np.abs(f0 - f0.conj().T).max() < 1e-13
    ev = np.linalg.eigvalsh(f0)
    want = np.sort(np.sqrt(g.dual[:, 0] ** 2 + 0.7**2))
    assert np.allclose(np.sort(ev), want, atol=1e-12)


def test_weyl_pair_exact_phase():
    g = build_grid(LatticeSpec(n=1, M=8, L=8.0))
    t, phi = weyl_pair(g, 1)
    assert np.abs(t @ t.T - np.eye(8)).max() == 0.0  # permutation
    comm = t @ phi @ t.conj().T @ phi.conj().T
    assert np.abs(comm - np.exp(1j * g.dp * g.dx) * np.eye(8)).max() < 1e-13
    # M-fold shift closes the cycle
    acc = np.eye(8)
    for _ in range(8):
        acc = t @ acc
    assert np.array_equal(acc, np.eye(8))


def test_axis_shift_moves_one_step():
    g = build_grid(LatticeSpec(n=2, M=4, L=4.0))
    s = axis_shift(g, 2)
    # (S psi)(k) = psi(k + e_axis): row k picks up column k+e
    rows, cols = np.nonzero(s)
    assert np.array_equal((g.index[rows, 1] + 1) % 4, g.index[cols, 1])
    assert np.array_equal(g.index[rows, 0], g.index[cols, 0])
    with pytest.raises(ValueError, match="axis"):
        axis_shift(g, 3)


def test_translate_diagonal_fixed_points_and_phase():
    b, g = small_instance(M=8, L=8.0, n_max=2)
    q = sector_table(b, g)
    bvec = np.array([0.3, -0.2])
    nmat = number_op(b)
    assert np.abs(as_matrix(translate(nmat, bvec, q)) - as_matrix(nmat)).max() < 1e-14
    # off-diagonal entry picks up exp(i[(b0 w - b.p)_row - (b0 w - b.p)_col])
    a = np.zeros((b.dim, b.dim), dtype=complex)
    a[3, 5] = 1.0  # |k=2><k=4| in the one-particle stratum
    out = translate(a, bvec, q)
    k, kp = 2, 4
    phase = np.exp(
        1j
        * (
            (bvec[0] * g.energy[k] - bvec[1] * g.points[k, 0])
            - (bvec[0] * g.energy[kp] - bvec[1] * g.points[kp, 0])
        )
    )
    assert abs(out[3, 5] - phase) < 1e-15
    with pytest.raises(ValueError, match="components"):
        translate(a, np.zeros(3), q)


def test_tilde_velocity_commutator_regression():
    """Frozen one-particle entries of [tilde-V^1, V_1] at n=1, M=4, L=2*pi, m=0.

    The kernel is -i[q^1, F0] circ V with F0 the position-space
    sqrt(x^2) multiplier; entries checked against an independent
    evaluation of F0 and frozen numerical values.
    """
    b, g = small_instance(n_max=1)
    c = as_matrix(tilde_velocity_commutator(b, g, 1, 1))[1:, 1:]
    assert c[0, 3].imag == pytest.approx(3.33216220361878, rel=1e-12)
    assert c[3, 0].imag == pytest.approx(3.33216220361878, rel=1e-12)
    assert c[1, 2].imag == pytest.approx(-1.11072073453959, rel=1e-12)
    assert c[2, 1].imag == pytest.approx(-1.11072073453959, rel=1e-12)
    assert np.abs(c.real).max() < 4e-16
    # independent F0 entry: (1/M) sum_m |x_m| e^{-i dp x_m} at dp=1
    f0 = kernel_time(g)
    x = g.dual[:, 0]
    want = np.mean(np.abs(x) * np.exp(-1j * x))
    assert abs(f0[0, 1] - want) < 1e-14


def test_tilde_velocity_kernel_forms():
    b, g = small_instance(M=8, L=8.0)
    with pytest.raises(ValueError, match="component"):
        kernel_tilde_velocity(g, 2)
    with pytest.raises(ValueError, match="spatial"):
        kernel_tilde_velocity(g, 0, form="multiplier")
    with pytest.raises(ValueError, match="form"):
        kernel_tilde_velocity(g, 1, form="banana")
    # multiplier form has spectrum in {-x/|x|} = {-1, +1}
    mult = kernel_tilde_velocity(g, 1, form="multiplier")
    ev = np.linalg.eigvalsh(mult)
    assert np.allclose(np.sort(ev), np.sort(-np.sign(g.dual[:, 0])), atol=1e-10)


def test_nwp_is_not_hermitian_at_finite_spacing():
    b, g = small_instance(M=8, L=8.0, n_max=1)
    mat = as_matrix(nwp_op(b, g, 1))
    dev = np.abs(mat - mat.conj().T).max()
    assert dev > 0.1  # genuinely non-hermitian; the suite reports the value


def test_multiplicative_lift_properties():
    b, g = small_instance(M=4, n_max=2)
    assert np.abs(as_matrix(multiplicative_lift(b, np.eye(4))) - np.eye(b.dim)).max() == 0.0
    u = dft_one_particle(g)
    lift = as_matrix(multiplicative_lift(b, u))
    sl = b.one_particle_slice
    assert np.abs(lift[sl, sl] - u).max() < 1e-14
    # unitary input lifts to a unitary
    assert np.abs(lift @ lift.conj().T - np.eye(b.dim)).max() < 1e-12


def test_multiplicative_lift_permanent_by_hand():
    """Two modes, doubly occupied source: <01|Gamma(u)|00> is the 2x2
    permanent with the bosonic sqrt(2!) normalization."""
    b = enumerate_basis(2, 2)
    rng = np.random.default_rng(5)
    u = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    lift = as_matrix(multiplicative_lift(b, u))
    i00 = b.index[(0, 0)]
    i01 = b.index[(0, 1)]
    i11 = b.index[(1, 1)]
    assert abs(lift[i01, i00] - math.sqrt(2) * u[0, 0] * u[1, 0]) < 1e-14
    assert abs(lift[i00, i00] - u[0, 0] ** 2) < 1e-14
    assert abs(lift[i11, i00] - u[1, 0] ** 2) < 1e-14
    assert abs(lift[i01, i01] - (u[0, 0] * u[1, 1] + u[0, 1] * u[1, 0])) < 1e-14


def test_dump_triplets_format():
    mat = np.array([[0.0, 1.5 - 2.0j], [1e-14, 0.0]])
    buf = io.StringIO()
    dump_triplets(mat, buf, tol=1e-12)
    assert buf.getvalue() == "0 1 1.5 -2\n"
    buf2 = io.StringIO()
    dump_triplets(mat, buf2)  # tol=0 keeps the tiny entry
    lines = buf2.getvalue().splitlines()
    assert len(lines) == 2 and lines[1].startswith("1 0 ")
