"""Structure constants: DOZZ, reflection, FZZ, bulk-boundary, derivative."""

import math

import numpy as np
import pytest

from liouville import (BranchError, DomainError, LiouvilleParams, PoleError,
                       QuadratureSpec, bulk_boundary, bulk_boundary_mu0, dozz,
                       fzz_mu0_one_point, fzz_mub_derivative, fzz_one_point,
                       g_gamma_derivative, reflection)
from liouville.structure_constants import (BoundaryWeight,
                                           BulkBoundarySpectrum,
                                           SpectrumPoint, fzz_regular,
                                           gamma_spectral_product,
                                           inv_gamma_pair)

SPEC = QuadratureSpec(rel_tol=1e-11, abs_tol=1e-16)


def _p(gamma, mub=1.0, mu=1.0):
    return LiouvilleParams(gamma=gamma, mu=mu, mu_boundary=mub)


# ---------------------------------------------------------------------------
# DOZZ
# ---------------------------------------------------------------------------

def test_dozz_reflection_identity_example():
    p = _p(1.0)
    q = p.q_charge
    a1, a2, a3 = q + 0.5j, 0.9 * q, 0.9 * q
    lhs = dozz(a1, a2, a3, p)
    rhs = reflection(a1, p) * dozz(2 * q - a1, a2, a3, p)
    assert abs(lhs - rhs) < 1e-8 * abs(lhs)


def test_dozz_permutation_symmetry():
    p = _p(1.0)
    q = p.q_charge
    a1, a2, a3 = q + 0.5j, 0.85 * q, 0.7 * q
    c1 = dozz(a1, a2, a3, p)
    for perm in ((a3, a1, a2), (a2, a3, a1), (a2, a1, a3)):
        assert abs(dozz(*perm, p) - c1) < 1e-12 * abs(c1)


def test_dozz_reflection_identity_grid(rng):
    """20 random points: C(a1,a2,a3) = R(a1) C(2Q-a1,a2,a3) to 1e-8."""
    for _ in range(20):
        gamma = rng.uniform(0.7, 1.8)
        p = _p(gamma)
        q = p.q_charge
        a1 = complex(q, rng.uniform(0.2, 2.0))
        a2 = complex(rng.uniform(0.3, 0.95) * q, rng.uniform(-0.3, 0.3))
        a3 = complex(rng.uniform(0.3, 0.95) * q, rng.uniform(-0.3, 0.3))
        lhs = dozz(a1, a2, a3, p)
        rhs = reflection(a1, p) * dozz(2 * q - a1, a2, a3, p)
        assert abs(lhs - rhs) <= 1e-8 * abs(lhs)


def test_dozz_small_p_asymptotic():
    """C(Q+iP, a, Q-iP) a (a^2 + 4P^2) / P^2 constant under dyadic shrink."""
    p = _p(1.0)
    q = p.q_charge
    vals = []
    x = 1e-2
    for _ in range(3):
        P = a = x
        c = dozz(complex(q, P), a, complex(q, -P), p)
        vals.append(c * a * (a * a + 4 * P * P) / (P * P))
        x /= 2
    for v1, v2 in zip(vals[:-1], vals[1:]):
        assert abs(v2 / v1 - 1.0) < 0.05


def test_dozz_pole_detection():
    p = _p(1.0)
    q = p.q_charge
    # abar/2 - Q at the Upsilon zero 0: a1+a2+a3 = 2Q
    with pytest.raises(PoleError):
        dozz(q, 0.6 * q, 0.4 * q, p)


# ---------------------------------------------------------------------------
# reflection
# ---------------------------------------------------------------------------

def test_reflection_unitarity():
    p = _p(1.2)
    for P in (0.3, 1.0, 5.0):
        assert abs(abs(reflection(complex(p.q_charge, P), p)) - 1.0) < 1e-10


def test_reflection_involution():
    p = _p(1.0)
    q = p.q_charge
    alpha = q - 0.3
    assert abs(reflection(alpha, p) * reflection(2 * q - alpha, p) - 1.0) < 1e-12


def test_reflection_modulus_scaling():
    """|R(Q - x' + iy)| scales like |y|^{-2Qx'} between y=100 and y=200."""
    p = _p(1.0)
    q = p.q_charge
    xp = 0.1
    r1 = abs(reflection(complex(q - xp, 100.0), p))
    r2 = abs(reflection(complex(q - xp, 200.0), p))
    assert abs(r2 / r1 / 2.0 ** (-2 * q * xp) - 1.0) < 0.02


# ---------------------------------------------------------------------------
# FZZ
# ---------------------------------------------------------------------------

def test_fzz_simple_pole_at_origin():
    p = _p(1.0)
    q = p.q_charge
    v1 = 1e-2 * fzz_one_point(complex(q, 1e-2), p)
    v2 = 1e-3 * fzz_one_point(complex(q, 1e-3), p)
    assert abs(abs(v2) / abs(v1) - 1.0) < 0.01
    assert abs(v2) > 1e-8  # nonzero limit


def test_fzz_conjugation():
    p = _p(1.0)
    q = p.q_charge
    up = fzz_one_point(complex(q, 0.8), p)
    um = fzz_one_point(complex(q, -0.8), p)
    assert abs(um - np.conj(up)) < 1e-12 * abs(up)


def test_fzz_branch_error_at_junction():
    # gamma = sqrt2 makes sin(pi gamma^2/4) = 1; mu_B = mu = 1 sits at r2 = 1
    p = LiouvilleParams(gamma=math.sqrt(2.0), mu=1.0, mu_boundary=1.0)
    with pytest.raises(BranchError):
        fzz_one_point(complex(p.q_charge, 0.5), p)


def test_fzz_requires_positive_mu():
    p = LiouvilleParams(gamma=1.0, mu=0.0, mu_boundary=1.0)
    with pytest.raises(DomainError):
        fzz_one_point(complex(p.q_charge, 0.5), p)


def test_mu0_beta_limit_consistency():
    """beta -> 0 of the mu=0 bulk-boundary equals the mu=0 one-point."""
    p = LiouvilleParams(gamma=1.0, mu=0.0, mu_boundary=1.3)
    alpha = complex(p.q_charge, 0.7)
    u = fzz_mu0_one_point(alpha, p)
    g = bulk_boundary_mu0(alpha, 1e-4, p)
    assert abs(g - u) < 1e-3 * abs(u)
    # bulk_boundary dispatches to the closed form at mu = 0
    g2 = bulk_boundary(alpha, 1e-4, p, SPEC)
    assert g2 == g


# ---------------------------------------------------------------------------
# Hosomichi bulk-boundary (mu > 0)
# ---------------------------------------------------------------------------

def test_bulk_boundary_conjugation():
    p = _p(1.2)
    q = p.q_charge
    gp = bulk_boundary(complex(q, 0.9), 0.5, p, SPEC)
    gm = bulk_boundary(complex(q, -0.9), 0.5, p, SPEC)
    assert abs(gm - np.conj(gp)) < 1e-8 * abs(gp)


def test_bulk_boundary_small_p_linear_zero():
    p = _p(1.0)
    q = p.q_charge
    v1 = bulk_boundary(complex(q, 1e-2), 1.0, p, SPEC) / 1e-2
    v2 = bulk_boundary(complex(q, 1e-3), 1.0, p, SPEC) / 1e-3
    assert abs(abs(v2) / abs(v1) - 1.0) < 0.02


def test_bulk_boundary_beta_limit_is_fzz():
    p = _p(1.0)
    q = p.q_charge
    u = fzz_one_point(complex(q, 0.7), p)
    g = bulk_boundary(complex(q, 0.7), 1e-4, p, SPEC)
    assert abs(g - u) < 1e-3 * abs(u)


def test_bulk_boundary_matches_derivative_formula():
    """The mu>0 formula at beta=gamma equals the mu_B-derivative correlator."""
    for gamma, mub in ((1.0, 1.0), (1.3, 0.7), (0.9, 2.0)):
        p = _p(gamma, mub)
        q = p.q_charge
        for P in (0.5, 1.5):
            g_ho = bulk_boundary(complex(q, P), gamma, p, SPEC)
            g_der = g_gamma_derivative(P, p)
            assert abs(g_ho - g_der) < 1e-10 * abs(g_der)


def test_bulk_boundary_decay_bound_at_cut():
    """The t-integrand modulus at the truncation obeys the exponential bound."""
    from liouville.structure_constants import _hosomichi_t_integral
    p = _p(1.1)
    q = p.q_charge
    alpha, beta = complex(q, 0.8), 0.9
    value, (t_neg, t_pos), edge = _hosomichi_t_integral(alpha, beta, p, SPEC)
    rate = math.pi * (2 * q - beta)
    assert edge <= 10 * max(SPEC.abs_tol, SPEC.rel_tol * abs(value))
    # the decay rate itself: integrand falls by ~e^{-rate} per unit t
    line_probe = _hosomichi_t_integral(alpha, beta, p,
                                       QuadratureSpec(rel_tol=1e-8,
                                                      abs_tol=1e-12))
    assert line_probe[1][1] <= t_pos + 1e-9


def test_bulk_boundary_domain():
    p = _p(1.0)
    with pytest.raises(DomainError):
        bulk_boundary(complex(p.q_charge, 0.5), 2 * p.q_charge + 0.1, p, SPEC)


# ---------------------------------------------------------------------------
# the boundary-derivative correlator
# ---------------------------------------------------------------------------

def test_derivative_finite_difference():
    """Matches -(1/2pi) d U_FZZ / d mu_B by centered differences, 1e-6."""
    for (P, gamma) in ((0.8, 1.2), (0.5, 1.0), (2.0, 0.9)):
        base = _p(gamma)
        h = 1e-5
        up = fzz_one_point(complex(base.q_charge, P), _p(gamma, 1.0 + h))
        um = fzz_one_point(complex(base.q_charge, P), _p(gamma, 1.0 - h))
        fd = -(up - um) / (2 * h) / (2 * math.pi)
        gd = g_gamma_derivative(P, base)
        assert abs(fd - gd) < 1e-6 * abs(gd)
        # closed-form derivative consistency
        dU = fzz_mub_derivative(complex(base.q_charge, P), base)
        assert abs(gd + dU / (2 * math.pi)) < 1e-12 * abs(gd)


def test_derivative_linear_vanishing():
    p = _p(1.0)
    v1 = g_gamma_derivative(1e-2, p) / 1e-2
    v2 = g_gamma_derivative(1e-3, p) / 1e-3
    assert abs(abs(v2) / abs(v1) - 1.0) < 0.01


def test_derivative_conjugate_structure():
    """g(P) from the conjugate side: real part even, imaginary part odd."""
    p = _p(1.2)
    gp = g_gamma_derivative(0.5, p)
    gm = -fzz_mub_derivative(complex(p.q_charge, -0.5), p) / (2 * math.pi)
    assert abs(gm - np.conj(gp)) < 1e-12 * abs(gp)


# ---------------------------------------------------------------------------
# spectral-line regular parts
# ---------------------------------------------------------------------------

def test_fzz_regular_factorization():
    import scipy.special as sp
    p = _p(1.0)
    q = p.q_charge
    P = 0.8
    reg = fzz_regular(P, p, conjugate_side=True)
    full = fzz_one_point(complex(q, -P), p)
    recon = reg * complex(sp.gamma(-2j * P / p.gamma))
    assert abs(recon - full) < 1e-12 * abs(full)


def test_bulk_boundary_regular_factorization():
    import scipy.special as sp
    p = _p(1.0)
    q = p.q_charge
    P = 0.8
    bb = BulkBoundarySpectrum(0.9, p, SPEC)
    reg = bb.regular(P)
    full = bulk_boundary(complex(q, P), 0.9, p, SPEC)
    recon = reg * complex(sp.rgamma(-2j * P / p.gamma))
    assert abs(recon - full) < 1e-9 * abs(full)


def test_inv_gamma_pair():
    import scipy.special as sp
    g = 1.3
    for P in (1e-8, 1e-3, 0.7):
        direct = 1.0 / (complex(sp.gamma(2j * P / g))
                        * complex(sp.gamma(-2j * P / g)))
        assert abs(inv_gamma_pair(P, g) - direct.real) < 1e-10 * abs(direct)
    assert inv_gamma_pair(0.0, g) == 0.0


def test_gamma_spectral_product_matches_direct():
    p = _p(1.0)
    q = p.q_charge
    for P in (0.3, 0.9, 2.0):
        direct = g_gamma_derivative(P, p) * fzz_one_point(complex(q, -P), p)
        fused = gamma_spectral_product(P, p)
        assert abs(fused - direct) < 1e-12 * abs(direct)
    # finite and smooth through P = 0
    v0 = gamma_spectral_product(0.0, p)
    v1 = gamma_spectral_product(1e-5, p)
    assert np.isfinite(v0) and abs(v1 - v0) < 1e-6 * abs(v0)


def test_gamma_spectral_product_two_boundaries():
    p1 = _p(1.0, 1.0)
    p2 = _p(1.0, 2.5)
    q = p1.q_charge
    direct = g_gamma_derivative(0.7, p1) * fzz_one_point(complex(q, -0.7), p2)
    fused = gamma_spectral_product(0.7, p1, p2)
    assert abs(fused - direct) < 1e-12 * abs(direct)


def test_spectrum_point_and_boundary_weight():
    p = _p(1.0)
    sp_ = SpectrumPoint(P=0.5, q_charge=p.q_charge)
    assert sp_.charge == complex(p.q_charge, 0.5)
    with pytest.raises(DomainError):
        SpectrumPoint(P=-0.1, q_charge=p.q_charge)
    bw = BoundaryWeight.from_beta(1.0, p)
    assert bw.seiberg_ok
    assert not BoundaryWeight.from_beta(p.q_charge + 0.1, p).seiberg_ok
