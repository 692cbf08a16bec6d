"""Exactly solvable correlators of boundary Liouville theory.

DOZZ three-point constant on the sphere, the reflection coefficient, the FZZ
bulk one-point function on the disk, the Hosomichi bulk-boundary two-point
correlator (conjectural for bulk cosmological constant mu > 0, exact closed
form at mu = 0), and the boundary-derivative correlator G(Q+iP, gamma) used
by the annulus partition function.

All Gamma / double-Gamma quotients are assembled in log space and
exponentiated once.  The spectral-line helpers at the bottom factor out the
simple pole of the FZZ function at P = 0 against the matching zero of the
bulk-boundary correlator, so bootstrap integrands stay finite down to P = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as sp

from .errors import DomainError, NonConvergence, PoleError
from .numerics import QuadratureSpec, integrate_adaptive
from .specialfn import (DoubleSineLine, LiouvilleParams, _dg_pole_distance,
                        _lngamma2_batch, _log_upsilon_batch, _walk_steps,
                        l_ratio)

_POLE_TOL = 1e-8


@dataclass(frozen=True)
class SpectrumPoint:
    """A point Q + iP on the spectrum line."""

    P: float
    q_charge: float

    def __post_init__(self):
        if self.P < 0:
            raise DomainError("spectrum parameter P must be non-negative")

    @property
    def charge(self) -> complex:
        return complex(self.q_charge, self.P)


@dataclass(frozen=True)
class BoundaryWeight:
    """A boundary insertion charge with its Seiberg-bound flag."""

    beta: float
    seiberg_ok: bool

    @classmethod
    def from_beta(cls, beta, params: LiouvilleParams) -> "BoundaryWeight":
        return cls(beta=float(beta), seiberg_ok=float(beta) < params.q_charge)


# ---------------------------------------------------------------------------
# DOZZ and reflection
# ---------------------------------------------------------------------------

def _log_mu_base(params: LiouvilleParams) -> float:
    """ln of pi mu l(gamma^2/4) (gamma/2)^{2 - gamma^2/2}, the DOZZ base."""
    g = params.gamma
    if params.mu <= 0.0:
        raise DomainError("DOZZ base requires mu > 0")
    base = math.pi * params.mu * float(l_ratio(g * g / 4.0).real) \
        * (0.5 * g) ** (2.0 - 0.5 * g * g)
    return math.log(base)


def _upsilon_zero_distance(z, gamma):
    """Distance from z to the zero set of Upsilon (both lattice branches)."""
    q = 0.5 * gamma + 2.0 / gamma
    return min(_dg_pole_distance(-complex(z), gamma),
               _dg_pole_distance(complex(z) - q, gamma))


def dozz(a1, a2, a3, params: LiouvilleParams) -> complex:
    """DOZZ structure constant C^DOZZ_{gamma, mu}(a1, a2, a3).

    Raises PoleError when a denominator Upsilon argument sits within 1e-8 of
    the Upsilon zero lattice (a genuine pole of the formula).
    """
    g = params.gamma
    q = params.q_charge
    a1, a2, a3 = complex(a1), complex(a2), complex(a3)
    abar = a1 + a2 + a3
    den_args = {
        "abar/2 - Q": 0.5 * abar - q,
        "abar/2 - a1": 0.5 * abar - a1,
        "abar/2 - a2": 0.5 * abar - a2,
        "abar/2 - a3": 0.5 * abar - a3,
    }
    for name, z in den_args.items():
        if _upsilon_zero_distance(z, g) < _POLE_TOL:
            raise PoleError(f"DOZZ pole: Upsilon({name}) vanishes at {z}",
                            factor=name, where=z)
    num = _log_upsilon_batch(np.array([0.5 * g, a1, a2, a3]), g)
    den = _log_upsilon_batch(np.array(list(den_args.values())), g)
    ln_c = ((2.0 * q - abar) / g) * _log_mu_base(params) \
        + np.sum(num) - np.sum(den)
    return complex(np.exp(ln_c))


def reflection(alpha, params: LiouvilleParams) -> complex:
    """Reflection coefficient R^DOZZ(alpha); |R| = 1 on the spectrum line."""
    g = params.gamma
    q = params.q_charge
    alpha = complex(alpha)
    d = q - alpha
    args = [-0.5 * g * d, -2.0 * d / g]
    for z in args:
        if abs(z.imag) < _POLE_TOL:
            n = round(z.real)
            if n <= 0 and abs(z - n) < _POLE_TOL:
                raise PoleError(f"reflection pole: Gamma({z})",
                                factor="reflection", where=alpha)
    if params.mu <= 0.0:
        raise DomainError("reflection coefficient requires mu > 0")
    base = math.pi * params.mu * float(l_ratio(g * g / 4.0).real)
    ln_r = (2.0 * d / g) * math.log(base) \
        + sp.loggamma(-0.5 * g * d) - sp.loggamma(0.5 * g * d) \
        + sp.loggamma(-2.0 * d / g) - sp.loggamma(2.0 * d / g)
    return -complex(np.exp(ln_r))


# ---------------------------------------------------------------------------
# FZZ bulk one-point function (mu > 0)
# ---------------------------------------------------------------------------

def _log_fzz_parts(alpha, params: LiouvilleParams):
    """(log of the theta-independent FZZ factor, the two Gamma arguments)."""
    g = params.gamma
    q = params.q_charge
    alpha = complex(alpha)
    if params.mu <= 0.0:
        raise DomainError("the FZZ formula requires mu > 0")
    carg1 = 0.5 * g * alpha - 0.25 * g * g
    carg2 = 2.0 * alpha / g - 4.0 / (g * g) - 1.0
    ln_base = math.log(math.pi * params.mu) - g * alpha * math.log(2.0) \
        + sp.loggamma(0.25 * g * g) - sp.loggamma(1.0 - 0.25 * g * g)
    ln_k = math.log(4.0 / g) - 0.5 * alpha * alpha * math.log(2.0) \
        + ((q - alpha) / g) * ln_base
    return ln_k, carg1, carg2


def fzz_one_point(alpha, params: LiouvilleParams) -> complex:
    """FZZ formula U_{FZZ, theta}(alpha) for the disk bulk one-point function.

    Raises BranchError within 1e-12 of the branch junction
    mu_B^2 sin(pi gamma^2/4)/mu = 1, where the theta parametrization turns
    over from real to imaginary.
    """
    from .errors import BranchError
    if params.theta is None and params.at_branch_junction:
        raise BranchError(
            "mu_B^2 sin(pi gamma^2/4)/mu sits at the branch junction 1")
    theta = params.theta_value
    q = params.q_charge
    alpha = complex(alpha)
    ln_k, carg1, carg2 = _log_fzz_parts(alpha, params)
    for z in (carg1, carg2):
        if abs(z.imag) < _POLE_TOL:
            n = round(z.real)
            if n <= 0 and abs(z - n) < _POLE_TOL:
                raise PoleError(f"FZZ pole: Gamma({z})", factor="fzz",
                                where=alpha)
    ln_u = ln_k + sp.loggamma(carg1) + sp.loggamma(carg2)
    return complex(np.exp(ln_u) * np.cos((alpha - q) * math.pi * theta))


def fzz_mu0_one_point(alpha, params: LiouvilleParams) -> complex:
    """Bulk one-point function at mu = 0 (closed form, mu_B primitive)."""
    g = params.gamma
    q = params.q_charge
    alpha = complex(alpha)
    mub = params.mu_boundary
    if params.mu != 0.0 or mub is None:
        raise DomainError("mu = 0 closed form needs mu == 0 and mu_boundary")
    ln_u = math.log(2.0 / g) \
        + sp.loggamma((2.0 * alpha - 2.0 * q) / g) \
        + ((2.0 * q - 2.0 * alpha) / g) * math.log(mub) \
        + (2.0 / g) * (q - alpha) * (-0.5 * g * alpha * math.log(2.0)
                                     + math.log(2.0 * math.pi)
                                     - sp.loggamma(1.0 - 0.25 * g * g)) \
        + sp.loggamma(0.5 * g * alpha - 0.25 * g * g)
    return complex(np.exp(ln_u))


def bulk_boundary_mu0(alpha, beta, params: LiouvilleParams) -> complex:
    """Bulk-boundary correlator at mu = 0 (closed form, mu_B primitive)."""
    g = params.gamma
    q = params.q_charge
    alpha, beta = complex(alpha), complex(beta)
    mub = params.mu_boundary
    if params.mu != 0.0 or mub is None:
        raise DomainError("mu = 0 closed form needs mu == 0 and mu_boundary")
    dg_args = np.array([alpha - 0.5 * beta, alpha + 0.5 * beta,
                        q - 0.5 * beta, q - beta, alpha, q])
    for z in dg_args:
        if _dg_pole_distance(z, g) < _POLE_TOL:
            raise PoleError(f"double-Gamma pole at {z}",
                            factor="bulk_boundary_mu0", where=z)
    dg = _lngamma2_batch(dg_args, g)
    ln_g = math.log(2.0 / g) \
        + sp.loggamma((2.0 * alpha + beta - 2.0 * q) / g) \
        + ((2.0 * q - 2.0 * alpha - beta) / g) * math.log(mub) \
        + (2.0 / g) * (q - alpha - 0.5 * beta) * (
            0.5 * g * (0.5 * beta - alpha) * math.log(2.0)
            + math.log(2.0 * math.pi) - sp.loggamma(1.0 - 0.25 * g * g)) \
        + sp.loggamma(0.5 * g * alpha + 0.25 * g * beta - 0.25 * g * g) \
        + dg[0] + dg[1] + 2.0 * dg[2] - dg[3] - 2.0 * dg[4] - dg[5]
    return complex(np.exp(ln_g))


# ---------------------------------------------------------------------------
# Hosomichi bulk-boundary correlator (mu > 0, conjectural)
# ---------------------------------------------------------------------------

def _hosomichi_log_prefactor(alpha, beta, params: LiouvilleParams,
                             drop_q_minus_alpha=False):
    """Log of the double-Gamma prefactor of the Hosomichi formula.

    With ``drop_q_minus_alpha`` the 1/Gamma_{gamma/2}(Q - alpha) factor is
    replaced by its 2/gamma-shifted resolution *minus the plain Gamma term*,
    i.e. the returned value omits -ln Gamma(2(Q-alpha)/gamma) so that the
    caller can cancel that simple pole analytically on the spectrum line.
    """
    g = params.gamma
    q = params.q_charge
    alpha, beta = complex(alpha), complex(beta)
    # The 2^{-2 Delta_alpha} converts the disk formula's bulk normalization
    # (|Im z| half-plane distance) to the |z - zbar| convention used by the
    # annulus amplitudes; calibrated against the beta -> 0 limit G -> U_FZZ.
    ln = math.log(2.0 * math.pi) \
        + (0.5 * alpha * alpha - alpha * q) * math.log(2.0) \
        + ((q - alpha - 0.5 * beta) / g) * _log_mu_base(params)
    dg_args = [q - 0.5 * beta, q, q - beta, 0.5 * beta,
               alpha - 0.5 * beta, 2.0 * q - alpha - 0.5 * beta, alpha]
    signs = [3.0, -1.0, -1.0, -1.0, 1.0, 1.0, -1.0]
    if not drop_q_minus_alpha:
        dg_args.append(q - alpha)
        signs.append(-1.0)
    for z, s in zip(dg_args, signs):
        if s < 0 and _dg_pole_distance(z, g) < _POLE_TOL:
            raise PoleError(f"double-Gamma zero/pole in prefactor at {z}",
                            factor="hosomichi_prefactor", where=z)
    vals = _lngamma2_batch(np.array(dg_args), g)
    ln = ln + complex(np.dot(signs, vals))
    if drop_q_minus_alpha:
        # -ln G2(Q-a) = -ln G2(Q-a+2/g) + ln sqrt(2pi)
        #               - (2(Q-a)/g - 1/2) ln(g/2) - ln Gamma(2(Q-a)/g),
        # with the last term omitted here by construction.
        x = q - alpha
        ln = ln - complex(_lngamma2_batch(np.array([x + 2.0 / g]), g)[0]) \
            + 0.5 * math.log(2.0 * math.pi) \
            - (2.0 * x / g - 0.5) * math.log(0.5 * g)
    return ln


def _hosomichi_t_integral(alpha, beta, params: LiouvilleParams,
                          spec: QuadratureSpec):
    """The t-integral of the Hosomichi formula.

    The integrand is exp(-2 pi theta t) times four double sines whose net
    modulus decays like exp(-pi (2Q - Re beta) |t|); a real theta tilts the
    two sides, and the truncation uses the tilted rates.  (The boundary
    parameter of the original disk formula is s = i theta / 2, turning its
    oscillatory exp(4 pi i s t) into this real exponential.)
    """
    g = params.gamma
    q = params.q_charge
    theta = params.theta_value
    alpha, beta = complex(alpha), complex(beta)
    w1 = 0.5 * (alpha + 0.5 * beta - q)
    w2 = 0.5 * (-alpha + 0.5 * beta + q)

    rate = math.pi * (2.0 * q - beta.real)
    tilt = 2.0 * math.pi * theta.real
    rate_pos = rate + tilt
    rate_neg = rate - tilt
    if min(rate_pos, rate_neg) <= 0.0:
        raise NonConvergence(
            "Hosomichi t-integrand does not decay: Re(beta) too large or "
            "theta too strong", error=None, tolerance=None)

    # Scale of the integrand near t = 0 sets the truncation point.
    probe_line = DoubleSineLine(w1, w2, g, t_max=4.0)
    ln0 = float(np.max(probe_line.log_product(np.array([0.0, 1.0])).real))
    ln_tail = math.log(max(spec.abs_tol, 1e-300)) - 14.0
    t_pos = min(max((ln0 - ln_tail) / rate_pos, 2.0), spec.truncation_bound)
    t_neg = min(max((ln0 - ln_tail) / rate_neg, 2.0), spec.truncation_bound)

    # The four sines pinch at t = +-Im(alpha)/2 when the S arguments approach
    # the lattice; seed interval boundaries there.
    pinch = abs(alpha.imag) / 2.0
    points = [-pinch, pinch] if pinch > 0 else None

    for _ in range(4):
        line = DoubleSineLine(w1, w2, g, t_max=max(t_pos, t_neg))

        def integrand(ts):
            ts = np.asarray(ts, dtype=float)
            return np.exp(line.log_product(ts) - 2.0 * math.pi * theta * ts)

        res = integrate_adaptive(integrand, -t_neg, t_pos, spec, points=points)
        # Soundness of the truncation: sample the integrand modulus at the cut.
        edge = float(np.max(np.abs(integrand(np.array([-t_neg, t_pos])))))
        if edge <= 10.0 * max(spec.abs_tol, spec.rel_tol * abs(res.value)):
            break
        if max(t_pos, t_neg) >= spec.truncation_bound:
            raise NonConvergence(
                f"Hosomichi truncation unsound at the cap: "
                f"|integrand| = {edge:.3e} at the cut",
                error=edge, tolerance=spec.abs_tol)
        t_pos = min(1.4 * t_pos, spec.truncation_bound)
        t_neg = min(1.4 * t_neg, spec.truncation_bound)
    return res.value, (t_neg, t_pos), edge


def bulk_boundary(alpha, beta, params: LiouvilleParams,
                  spec: QuadratureSpec | None = None) -> complex:
    """Bulk-boundary correlator G_theta(alpha, beta).

    For mu > 0 this evaluates the Hosomichi formula (conjectural); at mu = 0
    it dispatches to the exact closed form.  Requires Re(beta) < 2Q for the
    t-integral to converge.
    """
    spec = spec or QuadratureSpec()
    if params.mu == 0.0:
        return bulk_boundary_mu0(alpha, beta, params)
    beta_c = complex(beta)
    if beta_c.real >= 2.0 * params.q_charge:
        raise DomainError("bulk_boundary needs Re(beta) < 2Q")
    ln_pref = _hosomichi_log_prefactor(alpha, beta, params)
    tint, _, _ = _hosomichi_t_integral(alpha, beta, params, spec)
    return complex(np.exp(ln_pref) * tint)


# ---------------------------------------------------------------------------
# The mu_B derivative correlator G_theta(Q+iP, gamma)
# ---------------------------------------------------------------------------

def _dcos_theta_factor(z, params: LiouvilleParams) -> complex:
    """d/dmu_B of cos(z theta) as z^2 sinc(z theta) (theta^2)'/2.

    Finite through the branch junction theta = 0, where dtheta/dmu_B alone
    is singular but theta dtheta/dmu_B is not.
    """
    theta = params.theta_value
    z = complex(z)
    zt = z * theta
    sinc = 1.0 if abs(zt) < 1e-8 else complex(np.sin(zt)) / zt
    return -0.5 * z * z * sinc * params.dtheta_sq_dmub


def fzz_mub_derivative(alpha, params: LiouvilleParams) -> complex:
    """d U_FZZ(alpha) / d mu_B by the closed-form chain rule through theta."""
    if params.mu <= 0.0:
        raise DomainError("the FZZ derivative requires mu > 0")
    q = params.q_charge
    alpha = complex(alpha)
    ln_k, carg1, carg2 = _log_fzz_parts(alpha, params)
    ln_u = ln_k + sp.loggamma(carg1) + sp.loggamma(carg2)
    dcos = _dcos_theta_factor((alpha - q) * math.pi, params)
    return complex(np.exp(ln_u) * dcos)


def g_gamma_derivative(P, params: LiouvilleParams) -> complex:
    """G_theta(Q+iP, gamma) = -(1/2pi) d U_FZZ(Q+iP) / d mu_B.

    The boundary derivative of the one-point disk amplitude inserts
    -(boundary length) e^{gamma phi / 2}; the resulting correlator vanishes
    linearly at P -> 0, cancelling the FZZ pole of the companion factor.
    """
    return -fzz_mub_derivative(complex(params.q_charge, float(P)), params) \
        / (2.0 * math.pi)


# ---------------------------------------------------------------------------
# Spectral-line regular parts (pole/zero pairs factored out analytically)
# ---------------------------------------------------------------------------

def fzz_regular(P, params: LiouvilleParams, conjugate_side=True) -> complex:
    """U_FZZ(Q -+ iP) with the factor Gamma(-+ 2iP/gamma) removed.

    ``conjugate_side=True`` gives U(Q-iP)/Gamma(-2iP/gamma); the removed
    Gamma carries the simple pole at P = 0.
    """
    theta = params.theta_value
    q = params.q_charge
    sign = -1.0 if conjugate_side else 1.0
    alpha = complex(q, sign * float(P))
    ln_k, carg1, _ = _log_fzz_parts(alpha, params)
    ln_u = ln_k + sp.loggamma(carg1)
    return complex(np.exp(ln_u) * np.cos((alpha - q) * math.pi * theta))


class BulkBoundarySpectrum:
    """G(Q + s iP, beta) along the spectrum line with its P-zero factored out.

    ``regular(P, sign)`` returns G(Q + sign*iP, beta) * Gamma(sign*2iP/gamma),
    which is finite and nonzero through P = 0.  The Hosomichi t-integral setup
    is rebuilt per evaluation (the double-sine arguments move with P), but the
    expensive s-grid profile is cached for the dominant fixed parts.
    """

    def __init__(self, beta, params: LiouvilleParams, spec: QuadratureSpec):
        self.beta = complex(beta)
        self.params = params
        self.spec = spec
        if self.beta.real >= 2.0 * params.q_charge:
            raise DomainError("bulk-boundary spectrum needs Re(beta) < 2Q")

    def regular(self, P, sign=+1) -> complex:
        params = self.params
        g = params.gamma
        q = params.q_charge
        alpha = complex(q, sign * float(P))
        ln_pref = _hosomichi_log_prefactor(alpha, self.beta, params,
                                           drop_q_minus_alpha=True)
        tint, _, _ = _hosomichi_t_integral(alpha, self.beta, params, self.spec)
        return complex(np.exp(ln_pref) * tint)


def inv_gamma_pair(P, gamma) -> float:
    """1/[Gamma(2iP/g) Gamma(-2iP/g)] = 2P sinh(2 pi P/g)/(pi g), stably."""
    P = float(P)
    s = 2.0 * math.pi * P / gamma
    if abs(s) < 1e-6:
        sinhc = 1.0 + s * s / 6.0
    else:
        sinhc = math.sinh(s) / s
    return (4.0 * P * P / (gamma * gamma)) * sinhc


def gamma_pair(P, gamma) -> float:
    """Gamma(2iP/g) Gamma(-2iP/g) = pi g / (2 P sinh(2 pi P / g)); P != 0."""
    v = inv_gamma_pair(P, gamma)
    if v == 0.0:
        raise PoleError("Gamma pair pole at P = 0", factor="gamma_pair", where=0.0)
    return 1.0 / v


def gamma_spectral_product(P, params: LiouvilleParams,
                           params_inner: LiouvilleParams | None = None) -> complex:
    """G_theta1(Q+iP, gamma) * U_FZZ,theta2(Q-iP), finite through P = 0.

    The Gamma(+-2iP/gamma) pole pair and the linear zero of the derivative
    factor are combined analytically.  ``params_inner`` selects an independent
    boundary constant for the U_FZZ factor (two-boundary mode).
    """
    pin = params_inner or params
    g = params.gamma
    q = params.q_charge
    P = float(P)
    theta2 = pin.theta_value

    ln_k1, carg1_p, _ = _log_fzz_parts(complex(q, P), params)
    ln_k2, carg1_m, _ = _log_fzz_parts(complex(q, -P), pin)
    ln_reg = ln_k1 + sp.loggamma(carg1_p) + ln_k2 + sp.loggamma(carg1_m)

    # Gamma(2iP/g) Gamma(-2iP/g) = pi g/(2 P sinh(2 pi P/g)) pairs with the
    # P^2 zero of the theta-derivative factor; P/sinh is kept as a stable
    # ratio.  dcos is finite through the branch junction.
    s = 2.0 * math.pi * P / g
    psr = g / (2.0 * math.pi) * (1.0 - s * s / 6.0) if abs(s) < 1e-6 \
        else P / math.sinh(s)
    dcos1 = _dcos_theta_factor(1j * P * math.pi, params)
    if P != 0.0:
        dcos1_over_p2 = dcos1 / (P * P)
    else:
        dcos1_over_p2 = 0.5 * math.pi ** 2 * params.dtheta_sq_dmub
    zero_pole = dcos1_over_p2 * 0.5 * math.pi * g * psr

    cos2 = np.cos(-1j * P * math.pi * theta2)
    # overall minus: G = -(1/2pi) dU/dmu_B
    return complex(-np.exp(ln_reg) * cos2 * zero_pole / (2.0 * math.pi))
