"""Tests for the oscillatory-integral cross-check of the twisted product."""

import math

import numpy as np
import pytest

from fockwarp.quadrature import collapse_guard, j_factor_closed, j_factor_trapezoid


def test_closed_form_small_damping_limit():
    # as the damping vanishes the factor tends to exp(-i sigma alpha beta)
    alpha, beta, sigma = 0.7, -0.3, 1.0
    val = j_factor_closed(alpha, beta, 1e-12, sigma)
    assert abs(val - np.exp(-1j * sigma * alpha * beta)) < 1e-9


def test_closed_form_known_value():
    # alpha = beta = 0: (1 + a^2)^{-1/2} exactly
    for a in (0.1, 0.5, 2.0):
        assert j_factor_closed(0.0, 0.0, a, 1.0) == pytest.approx((1 + a * a) ** -0.5)
    # sign of sigma conjugates the phase factor
    v1 = j_factor_closed(0.4, 0.9, 0.2, 1.0)
    v2 = j_factor_closed(0.4, 0.9, 0.2, -1.0)
    assert v1 == pytest.approx(np.conj(v2))


def test_trapezoid_matches_closed_form():
    """Oscillatory double integral against the analytic evaluation, at the
    damping pair used by the guard (Richardson base points)."""
    eps = 0.14
    hw = 7.0 / eps
    step = math.pi / (3 * (hw + 1.5))
    for alpha, beta, sigma in [(0.5, -1.2, -1.0), (-0.8, 0.3, 1.0), (2.356, 0.785, -1.0)]:
        got = j_factor_trapezoid(alpha, beta, [eps, eps / 2], sigma, hw, step)
        for a, g in zip([eps, eps / 2], got):
            want = j_factor_closed(alpha, beta, a, sigma)
            assert abs(g - want) < 1e-10


def test_collapse_guard_smoke():
    """Cheap-damping run of the quadrature guard (the acceptance suite runs
    the production damping, which is slower)."""
    out = collapse_guard(eps=0.3, tol=2e-2)
    assert out["max_error"] < 2e-2
    assert out["max_error"] == pytest.approx(3.9987e-3, rel=1e-2)
    for key in ("max_error", "tol", "epsilon", "grid_points", "distinct_factors"):
        assert key in out
    assert out["epsilon"] == 0.3
    assert out["grid_points"] > 100
