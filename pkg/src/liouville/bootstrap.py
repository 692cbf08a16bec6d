"""Annulus bootstrap spectral integrals and the LQG partition function.

Assembles the spectral integrands (structure constants x Gaussian weight
q^{P^2/2} x conformal block) and evaluates the annulus two-point, one-point
and gamma-insertion bootstrap formulas, plus the bosonic Liouville quantum
gravity partition function as a nested moduli integral.

The FZZ pole at P = 0 and the matching zero of the bulk-boundary correlator
are never multiplied as floating-point near-singular factors: integrands are
built from the regular parts with the Gamma(+-2iP/gamma) pair cancelled
analytically, so every integrand is finite down to P = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .numerics import QuadratureSpec, integrate_adaptive, integrate_halfline_gaussian
from .specialfn import LiouvilleParams, dedekind_eta
from .structure_constants import (BulkBoundarySpectrum, fzz_regular,
                                  gamma_spectral_product, inv_gamma_pair)
from .virasoro import _gram_inv_sqrt, virasoro_tables

_PREFACTOR = math.sqrt(math.pi) / (2.0 ** 2.5 * math.e)
DEFAULT_TRUNCATION = 12


@dataclass
class BootstrapResult:
    """Value and diagnostics of one bootstrap spectral integral."""

    value: complex
    P_max: float
    quadrature_error: float
    integrand_samples: list = field(default=None, repr=False)

    def imag_ratio(self) -> float:
        v = abs(self.value)
        return abs(self.value.imag) / v if v > 0 else 0.0


@dataclass
class PartitionFunctionResult:
    """Converged LQG annulus partition function with refinement diagnostics."""

    value: float
    inner_P_tolerance: float
    outer_q_tolerance: float
    q_grid_report: list = field(default=None, repr=False)


def write_integrand_csv(result: BootstrapResult, path, parameters: dict):
    """Dump integrand samples as CSV: columns P, re, im; header echoes params."""
    lines = ["# " + " ".join(f"{k}={v}" for k, v in sorted(parameters.items())),
             "P,re,im"]
    for p, v in result.integrand_samples or []:
        lines.append(f"{p!r},{v.real!r},{v.imag!r}")
    text = "\n".join(lines) + "\n"
    if hasattr(path, "write"):
        path.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


class _BlockOnLine:
    """Per-P annulus block partial sums with shared Virasoro tables.

    Evaluates sum_n tr W_n(Delta_P) x^n at x = q^2 (one insertion) or the
    paired trace sum for two insertions; the level-diagonal convention makes
    the two-point block independent of the boundary positions b1 b2.
    """

    def __init__(self, betas, params: LiouvilleParams, n_trunc: int):
        self.params = params
        self.n_trunc = n_trunc
        self.c = params.c_liouville
        self.hs = [params.weight(b) for b in betas]
        self.tab = virasoro_tables(self.c, n_trunc)
        self.pairs = [(n, n) for n in range(n_trunc + 1)]

    def coefficients(self, P: float) -> np.ndarray:
        delta = self.params.weight(complex(self.params.q_charge, P))
        grams = self.tab.gram_blocks(delta, levels=range(self.n_trunc + 1))
        roots = {n: _gram_inv_sqrt(g) for n, g in grams.items()}
        per_h = []
        for h in self.hs:
            w = self.tab.matrix_blocks(h, delta, pairs=self.pairs)
            per_h.append({n: roots[n].T @ w[(n, n)] @ roots[n]
                          for n in range(self.n_trunc + 1)})
        if len(per_h) == 1:
            return np.array([np.trace(per_h[0][n])
                             for n in range(self.n_trunc + 1)])
        return np.array([np.sum(per_h[0][n] * per_h[1][n])
                         for n in range(self.n_trunc + 1)])

    def value(self, P: float, q: float) -> complex:
        coeffs = self.coefficients(P)
        x = q * q
        return complex(np.polyval(coeffs[::-1], x))


def _validate_common(q, params):
    if not 0.0 < q < 1.0:
        raise DomainError(f"modulus q must lie in (0,1), got {q}")
    if params.mu <= 0.0:
        raise DomainError("bootstrap formulas require mu > 0")


def _validate_beta(beta, params):
    if not 0.0 < beta < params.q_charge:
        raise DomainError(
            f"boundary weight beta={beta} outside the Seiberg range (0, Q)")


def _unit_modulus(b, name):
    if abs(abs(complex(b)) - 1.0) > 1e-12:
        raise DomainError(f"{name} must have unit modulus")
    return complex(b)


def two_point_bootstrap(beta1, beta2, b1, b2, q, params: LiouvilleParams,
                        spec: QuadratureSpec | None = None,
                        params_inner: LiouvilleParams | None = None,
                        n_trunc: int = DEFAULT_TRUNCATION,
                        record_samples: bool = True) -> BootstrapResult:
    """Annulus two-point function with insertions on the two boundaries.

    Computes (sqrt(pi)/(2^{5/2} e)) q^{-1/12} int_0^inf G(Q+iP, beta1)
    G(Q-iP, beta2) q^{P^2/2} F^A(...) dP.  ``params_inner`` gives the inner
    boundary an independent cosmological constant.
    """
    spec = spec or QuadratureSpec()
    _validate_common(q, params)
    _validate_beta(beta1, params)
    _validate_beta(beta2, params)
    _unit_modulus(b1, "b1")
    _unit_modulus(b2, "b2")
    pin = params_inner or params
    gamma = params.gamma

    outer = BulkBoundarySpectrum(beta1, params, spec)
    inner = BulkBoundarySpectrum(beta2, pin, spec)
    block = _BlockOnLine((beta1, beta2), params, n_trunc)
    lnq = math.log(q)

    def point(P):
        reg1 = outer.regular(P)
        reg2 = np.conj(inner.regular(P))
        return reg1 * reg2 * inv_gamma_pair(P, gamma) \
            * math.exp(0.5 * P * P * lnq) * block.value(P, q)

    def f(ps):
        return np.array([point(float(p)) for p in np.atleast_1d(ps)])

    res = integrate_halfline_gaussian(f, -0.5 * lnq, spec,
                                      record_samples=record_samples)
    value = _PREFACTOR * q ** (-1.0 / 12.0) * res.value
    return BootstrapResult(value=value, P_max=res.cutoff,
                           quadrature_error=_PREFACTOR * q ** (-1.0 / 12.0)
                           * res.error,
                           integrand_samples=res.samples)


def one_point_bootstrap(beta1, b, q, params: LiouvilleParams,
                        spec: QuadratureSpec | None = None,
                        params_inner: LiouvilleParams | None = None,
                        n_trunc: int = DEFAULT_TRUNCATION,
                        record_samples: bool = True) -> BootstrapResult:
    """Annulus one-point function via the bulk-boundary x FZZ spectral integral.

    The integrand combines the P-linear zero of G(Q+iP, beta1) with the
    simple FZZ pole at P = 0 through the analytically cancelled regular
    parts, so it is evaluated straight through P = 0.
    """
    spec = spec or QuadratureSpec()
    _validate_common(q, params)
    _validate_beta(beta1, params)
    _unit_modulus(b, "b")
    pin = params_inner or params

    outer = BulkBoundarySpectrum(beta1, params, spec)
    block = _BlockOnLine((beta1,), params, n_trunc)
    lnq = math.log(q)

    def point(P):
        reg_g = outer.regular(P)
        reg_u = fzz_regular(P, pin, conjugate_side=True)
        return reg_g * reg_u * math.exp(0.5 * P * P * lnq) * block.value(P, q)

    def f(ps):
        return np.array([point(float(p)) for p in np.atleast_1d(ps)])

    res = integrate_halfline_gaussian(f, -0.5 * lnq, spec,
                                      record_samples=record_samples)
    value = _PREFACTOR * q ** (-1.0 / 12.0) * res.value
    return BootstrapResult(value=value, P_max=res.cutoff,
                           quadrature_error=_PREFACTOR * q ** (-1.0 / 12.0)
                           * res.error,
                           integrand_samples=res.samples)


def gamma_insertion_bootstrap(q, params: LiouvilleParams,
                              spec: QuadratureSpec | None = None,
                              params_inner: LiouvilleParams | None = None,
                              record_samples: bool = True) -> BootstrapResult:
    """Annulus one-point function of the weight-gamma boundary field.

    The conformal block degenerates to the partition-counting series: the
    result is (sqrt(pi)/(2^{5/2} e)) int G(Q+iP,gamma) U_FZZ(Q-iP)
    q^{P^2/2} / eta(q^2) dP with G from the closed-form mu_B derivative.
    """
    spec = spec or QuadratureSpec()
    _validate_common(q, params)
    lnq = math.log(q)
    eta = dedekind_eta(q * q)

    def f(ps):
        ps = np.atleast_1d(ps)
        return np.array([gamma_spectral_product(float(p), params, params_inner)
                         * math.exp(0.5 * p * p * lnq) for p in ps]) / eta

    res = integrate_halfline_gaussian(f, -0.5 * lnq, spec,
                                      record_samples=record_samples)
    return BootstrapResult(value=_PREFACTOR * res.value, P_max=res.cutoff,
                           quadrature_error=_PREFACTOR * res.error,
                           integrand_samples=res.samples)


def lqg_partition(params: LiouvilleParams,
                  spec: QuadratureSpec | None = None,
                  params_inner: LiouvilleParams | None = None,
                  q_cap: float = 1.0 - 1e-6,
                  record_report: bool = True) -> PartitionFunctionResult:
    """Bosonic LQG partition function of the annulus.

    -sqrt(pi)/(2^{(c_m+5)/2} e) int_0^1 int_0^inf dU_FZZ/dmu_B (Q+iP)
    U_FZZ(Q-iP) q^{P^2/2} eta(q^2)^{6Q^2-24} dP dq, with c_m = 25 - 6Q^2.
    The q-integrand vanishes at both endpoints (Q > 2 makes the eta exponent
    positive); the outer integral is capped at ``q_cap`` and the ignored tail
    is bounded by the endpoint value.
    """
    spec = spec or QuadratureSpec()
    if params.mu <= 0.0:
        raise DomainError("the LQG partition function requires mu > 0")
    qch = params.q_charge
    eta_power = 6.0 * qch * qch - 24.0
    inner_spec = QuadratureSpec(rel_tol=0.1 * spec.rel_tol,
                                abs_tol=0.1 * spec.abs_tol,
                                max_subdivisions=spec.max_subdivisions,
                                truncation_bound=spec.truncation_bound)
    report = [] if record_report else None

    def inner(q):
        lnq = math.log(q)

        def f(ps):
            ps = np.atleast_1d(ps)
            return np.array([
                gamma_spectral_product(float(p), params, params_inner)
                * math.exp(0.5 * p * p * lnq) for p in ps])

        res = integrate_halfline_gaussian(f, -0.5 * lnq, inner_spec)
        # dU/dmu_B (Q+iP) U(Q-iP) = -2 pi G(Q+iP,gamma) U(Q-iP)
        val = -2.0 * math.pi * res.value
        if report is not None:
            report.append((q, complex(val)))
        return val

    def outer_integrand(qs):
        qs = np.atleast_1d(qs)
        return np.array([inner(float(q)) * dedekind_eta(q * q) ** eta_power
                         for q in qs])

    res = integrate_adaptive(outer_integrand, 1e-8, q_cap, spec,
                             initial_intervals=12)
    pref = -math.sqrt(math.pi) / (2.0 ** (0.5 * (params.c_matter + 5.0))
                                  * math.e)
    value = pref * res.value
    if report is not None:
        report.sort(key=lambda t: t[0])
    return PartitionFunctionResult(value=float(value.real),
                                   inner_P_tolerance=inner_spec.rel_tol,
                                   outer_q_tolerance=spec.rel_tol,
                                   q_grid_report=report)
