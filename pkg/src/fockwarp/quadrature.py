"""One-time quadrature guard for the twisted-sum collapse.

The deformed product is implemented as a twisted sum over intermediate
states: each (u, w, v) term carries the phase exp(i(g_wu + g_vw - g_vu)).
That collapse is what an oscillatory double integral with a Gaussian
regulator converges to as the regulator is removed.  This module
evaluates the integrals by honest 2-d trapezoid quadrature on a tiny
standalone instance (two momentum modes, one particle at most) and
compares the assembled product against the twisted sum, guarding the
normalization (2*pi)^{-1} per integral pair.

The factor integrals are

    J_sigma(alpha, beta; a) =
        (1/2pi) * int int exp(-a(s^2+t^2)/2)
                          * exp(i(sigma*s*t + alpha*s + beta*t)) ds dt

with sigma = -1 for the t-pair and sigma = +1 for the s-pair; a = eps^2.
Their closed forms (used only by the unit tests, never by the guard) are

    J_sigma = (1+a^2)^{-1/2} * exp(-a(alpha^2+beta^2)/(2(1+a^2)))
                             * exp(-i*sigma*alpha*beta/(1+a^2)).
"""

import math

import numpy as np

from .deform import twist_phases


def j_factor_closed(alpha, beta, a, sigma):
    """Closed form of the regulated factor integral (test oracle)."""
    den = 1.0 + a * a
    amp = math.exp(-a * (alpha ** 2 + beta ** 2) / (2 * den)) / math.sqrt(den)
    return amp * np.exp(-1j * sigma * alpha * beta / den)


def j_factor_trapezoid(alpha, beta, a_values, sigma, half_width, step, chunk=256):
    """Trapezoid evaluation of J_sigma for several regulator strengths.

    One pass over the (s, t) grid serves every `a` in `a_values`: the
    oscillatory part is shared and only the Gaussian weights differ.
    Returns one complex value per entry of `a_values`.
    """
    s = np.arange(-half_width, half_width + step / 2, step)
    t = s
    gt = [np.exp(-a * t ** 2 / 2) * np.exp(1j * beta * t) for a in a_values]
    acc = [0.0 + 0.0j for _ in a_values]
    for lo in range(0, len(s), chunk):
        sc = s[lo:lo + chunk]
        osc = np.exp(1j * (sigma * np.outer(sc, t) + alpha * sc[:, None]))
        for i, a in enumerate(a_values):
            row = osc @ gt[i]
            acc[i] += np.exp(-a * sc ** 2 / 2) @ row
    w = step * step / (2 * math.pi)
    return [w * v for v in acc]


def collapse_guard(seed=42, eps=0.14, tol=1e-3):
    """Quadrature vs twisted sum on the standalone two-mode instance.

    Builds the 3-state space (vacuum and two one-particle modes at
    p = +-1/2, massless), seeds two hermitian operators, and assembles
    the deformed product both ways: via the exact twisted sum and via
    Richardson-extrapolated trapezoid quadrature of the factor
    integrals.  Returns the worst entry error and the settings used.
    """
    theta = np.array([[0.0, 0.1], [-0.1, 0.0]])
    vartheta = theta[0, 1]
    # sectors: rows (energy, momentum) for vacuum, mode-, mode+
    q = np.array([[0.0, 0.0], [0.5, -0.5], [0.5, 0.5]])

    rng = np.random.default_rng(seed)
    def herm():
        x = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        x = (x + x.conj().T) / 2
        return x / np.abs(x).max()
    A, B = herm(), herm()

    # exact twisted sum
    g = twist_phases(theta, q)
    gt = g.T
    exact = (A * gt) @ (B * gt) * gt.conj()

    # quadrature assembly
    a0 = eps * eps
    a_values = (a0, a0 / 2)
    half_width = 7.0 / eps
    step = math.pi / (3.0 * (half_width + 1.5))
    cache = {}

    def factor(alpha, beta, sigma):
        key = (round(float(alpha), 12), round(float(beta), 12), sigma)
        if key not in cache:
            j_a, j_half = j_factor_trapezoid(alpha, beta, a_values, sigma,
                                             half_width, step)
            cache[key] = (j_a, j_half)
        return cache[key]

    dim = 3
    prod = np.zeros((dim, dim), dtype=complex)
    for u in range(dim):
        for v in range(dim):
            acc = 0.0 + 0.0j
            for w in range(dim):
                term = A[u, w] * B[w, v]
                if term == 0:
                    continue
                d1 = q[u] - q[w]
                d2 = q[w] - q[v]
                jm_a, jm_h = factor(vartheta * d1[1], d2[0], -1)
                jp_a, jp_h = factor(-vartheta * d1[0], -d2[1], +1)
                f_a = jm_a * jp_a
                f_h = jm_h * jp_h
                acc += term * (2.0 * f_h - f_a)   # Richardson in a
            prod[u, v] = acc

    err = float(np.abs(prod - exact).max() / np.abs(exact).max())
    return {
        "max_error": err,
        "tol": tol,
        "epsilon": eps,
        "grid_points": int(2 * half_width / step) + 1,
        "distinct_factors": len(cache),
    }
