"""Special functions of boundary Liouville theory.

Complex Gamma, the double Gamma function Gamma_{gamma/2}, the double sine
S_{gamma/2}, Zamolodchikov's Upsilon_{gamma/2}, the Gamma ratio l(z), the
Dedekind eta function and integer partition counts, together with the
coupling container :class:`LiouvilleParams`.

Gamma_{gamma/2} and Upsilon are evaluated from their defining t-integrals on
a safe strip of the real part and continued everywhere else by repeated
application of their two shift equations.  The t-integrals are computed on a
fixed composite Gauss-Legendre grid after an exact small-t series handles the
removable singularity at t = 0 (the naive integrand suffers catastrophic
cancellation there).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy import special as sp

from .errors import BranchError, DomainError, PoleError, ZeroWarning

_POLE_TOL = 1e-8  # proximity threshold for lattice poles, in argument units


# ---------------------------------------------------------------------------
# Couplings and conformal weights
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LiouvilleParams:
    """Couplings of the theory and the constants derived from them.

    Exactly one of ``mu_boundary`` and ``theta`` is the stored primitive for
    the boundary data; with bulk constant mu > 0 the other is derived through
    cos(pi gamma theta / 2) = (mu_B / sqrt(mu)) sqrt(sin(pi gamma^2 / 4)).
    With mu = 0 the boundary constant mu_B must be the primitive.  Boundary
    data may be omitted entirely for quantities that do not involve it.
    """

    gamma: float
    mu: float = 1.0
    mu_boundary: float | None = None
    theta: complex | None = None

    def __post_init__(self):
        if not 0.0 < self.gamma < 2.0:
            raise DomainError(f"gamma must lie in (0, 2), got {self.gamma}")
        if self.mu < 0.0:
            raise DomainError(f"mu must be non-negative, got {self.mu}")
        if self.mu_boundary is not None and self.theta is not None:
            raise DomainError("give either mu_boundary or theta, not both")
        if self.mu_boundary is not None and not self.mu_boundary > 0.0:
            raise DomainError("mu_boundary must be positive")
        if self.mu == 0.0 and self.theta is not None:
            raise DomainError("with mu = 0 the boundary primitive is mu_boundary")

    @property
    def q_charge(self) -> float:
        """Background charge Q = gamma/2 + 2/gamma."""
        return 0.5 * self.gamma + 2.0 / self.gamma

    @property
    def c_liouville(self) -> float:
        return 1.0 + 6.0 * self.q_charge ** 2

    @property
    def c_matter(self) -> float:
        return 25.0 - 6.0 * self.q_charge ** 2

    def weight(self, charge) -> complex:
        """Conformal weight of a vertex charge, (x/2)(Q - x/2)."""
        x = complex(charge)
        return 0.5 * x * (self.q_charge - 0.5 * x)

    @property
    def _branch_ratio(self) -> float:
        """mu_B^2 sin(pi gamma^2/4) / mu, the branch selector for theta."""
        if self.mu_boundary is None:
            raise DomainError("no boundary cosmological constant supplied")
        if self.mu == 0.0:
            raise DomainError("theta is undefined at mu = 0")
        return self.mu_boundary ** 2 * math.sin(math.pi * self.gamma ** 2 / 4.0) / self.mu

    @property
    def theta_value(self) -> complex:
        """FZZ parameter: real in [0, 1/gamma) or on i[0, inf), by branch.

        Well defined at the branch junction itself (theta = 0); only its
        mu_B-derivative is singular there.
        """
        if self.theta is not None:
            return complex(self.theta)
        r2 = self._branch_ratio
        r = math.sqrt(r2)
        if r2 <= 1.0:
            return complex(2.0 / (math.pi * self.gamma) * math.acos(r))
        return 1j * (2.0 / (math.pi * self.gamma) * math.acosh(r))

    @property
    def at_branch_junction(self) -> bool:
        if self.theta is not None:
            return abs(complex(self.theta)) < 1e-12
        return abs(self._branch_ratio - 1.0) < 1e-12

    @property
    def mu_boundary_value(self) -> float:
        if self.mu_boundary is not None:
            return self.mu_boundary
        if self.mu == 0.0:
            raise DomainError("mu_boundary undefined: mu = 0 and theta stored")
        kappa = math.sqrt(math.sin(math.pi * self.gamma ** 2 / 4.0) / self.mu)
        mub = complex(np.cos(math.pi * self.gamma * self.theta_value / 2.0)) / kappa
        return float(mub.real)

    @property
    def dtheta_dmub(self) -> complex:
        """d theta / d mu_B from the cosine relation; valid on both branches.

        Singular at the branch junction (theta = 0); derivative quantities
        should use :meth:`dtheta_sq_dmub`, which stays finite there.
        """
        theta = self.theta_value
        kappa = math.sqrt(math.sin(math.pi * self.gamma ** 2 / 4.0) / self.mu)
        s = complex(np.sin(math.pi * self.gamma * theta / 2.0))
        if abs(s) < 1e-12:
            raise BranchError("d theta/d mu_B singular at the branch junction")
        return -2.0 * kappa / (math.pi * self.gamma * s)

    @property
    def dtheta_sq_dmub(self) -> complex:
        """d(theta^2)/d mu_B: analytic across the branch junction.

        theta^2 = (2/(pi gamma))^2 g(r) with g(r) = arccos(r)^2 continued to
        -arccosh(r)^2, r = mu_B sqrt(sin(pi gamma^2/4)/mu); g is analytic at
        r = 1, so combinations theta * dtheta/dmu_B = (theta^2)'/2 stay
        finite where dtheta/dmu_B alone blows up.
        """
        kappa = math.sqrt(math.sin(math.pi * self.gamma ** 2 / 4.0) / self.mu)
        r = kappa * self.mu_boundary_value
        x = 1.0 - r
        if abs(x) < 1e-4:
            gp = -(2.0 + 2.0 * x / 3.0 + 4.0 * x * x / 15.0)
        elif r < 1.0:
            gp = -2.0 * math.acos(r) / math.sqrt(1.0 - r * r)
        else:
            gp = -2.0 * math.acosh(r) / math.sqrt(r * r - 1.0)
        return (2.0 / (math.pi * self.gamma)) ** 2 * gp * kappa


@dataclass(frozen=True)
class ConformalWeight:
    """A conformal weight together with the charge it came from."""

    value: complex
    source_charge: complex

    @classmethod
    def from_charge(cls, charge, params: LiouvilleParams) -> "ConformalWeight":
        return cls(value=params.weight(charge), source_charge=complex(charge))


# ---------------------------------------------------------------------------
# Complex Gamma and the ratio l(z) = Gamma(z)/Gamma(1-z)
# ---------------------------------------------------------------------------

def gamma_complex(z) -> complex:
    """Complex Gamma function; raises PoleError near non-positive integers."""
    z = complex(z)
    if abs(z.imag) < _POLE_TOL:
        n = round(z.real)
        if n <= 0 and abs(z - n) < _POLE_TOL:
            raise PoleError(f"Gamma pole at z = {n}", factor="gamma", where=z)
    val = complex(sp.gamma(z))
    if not np.isfinite(val.real) or not np.isfinite(val.imag):
        raise PoleError(f"Gamma overflow/pole at z = {z}", factor="gamma", where=z)
    return val


def l_ratio(z) -> complex:
    """l(z) = Gamma(z)/Gamma(1-z); zeros at positive integers are returned as 0."""
    z = complex(z)
    if abs(z.imag) < _POLE_TOL:
        n = round(z.real)
        if n <= 0 and abs(z - n) < _POLE_TOL:
            raise PoleError(f"l(z) pole at z = {n}", factor="l_ratio", where=z)
    return complex(sp.gamma(z)) * complex(sp.rgamma(1.0 - z))


def _l_inv_stable(u):
    """1/l(u) = u Gamma(1-u)/Gamma(1+u): finite at u = 0, vanishing linearly."""
    u = np.asarray(u, dtype=complex)
    return u * sp.gamma(1.0 - u) * sp.rgamma(1.0 + u)


# ---------------------------------------------------------------------------
# Small-t series machinery shared by the double Gamma / Upsilon integrals
# ---------------------------------------------------------------------------

_SERIES_ORDER = 48


@lru_cache(maxsize=1)
def _bernoulli_gen():
    """Taylor coefficients of z/(1 - e^{-z}) up to _SERIES_ORDER, exact."""
    a = [Fraction(0)] + [Fraction((-1) ** (k + 1), math.factorial(k))
                         for k in range(1, _SERIES_ORDER + 2)]
    beta = [Fraction(1)]
    for n in range(1, _SERIES_ORDER + 1):
        beta.append(-sum(a[k] * beta[n + 1 - k] for k in range(2, n + 2)))
    return np.array([float(b) for b in beta])


@lru_cache(maxsize=64)
def _g_series(gamma: float):
    """Coefficients g_k of 1/((1-e^{-at})(1-e^{-bt})) = sum g_k t^{k-2}."""
    beta = _bernoulli_gen()
    k = np.arange(beta.size)
    ba = beta * (0.5 * gamma) ** k
    bb = beta * (2.0 / gamma) ** k
    return np.convolve(ba, bb)[: _SERIES_ORDER + 1]


@lru_cache(maxsize=64)
def _sinhc_inv_pair_series(gamma: float):
    """Coefficients (even powers of t) of 1/(sinhc(at/2) sinhc(bt/2))."""
    nmax = _SERIES_ORDER // 2 + 1
    j = np.arange(nmax)
    sa = (0.5 * gamma / 2.0) ** (2 * j) / np.array(
        [math.factorial(2 * jj + 1) for jj in j])
    sb = ((2.0 / gamma) / 2.0) ** (2 * j) / np.array(
        [math.factorial(2 * jj + 1) for jj in j])
    prod = np.convolve(sa, sb)[:nmax]
    inv = np.zeros(nmax)
    inv[0] = 1.0
    for n in range(1, nmax):
        inv[n] = -np.dot(prod[1:n + 1], inv[n - 1::-1])
    return inv


def _powers(x, kmax):
    """[x^0, ..., x^kmax] for a batch of complex x: shape (batch, kmax+1)."""
    x = np.atleast_1d(np.asarray(x, dtype=complex))
    out = np.empty((x.size, kmax + 1), dtype=complex)
    out[:, 0] = 1.0
    for k in range(1, kmax + 1):
        out[:, k] = out[:, k - 1] * x
    return out


@lru_cache(maxsize=256)
def _gl_panels(t0: float, t1: float, width: float):
    """Flattened Gauss-Legendre(16) nodes/weights on uniform panels of [t0, t1]."""
    gl_x, gl_w = np.polynomial.legendre.leggauss(16)
    n = max(1, int(math.ceil((t1 - t0) / width)))
    edges = np.linspace(t0, t1, n + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * gl_x[None, :]).ravel()
    weights = (half[:, None] * gl_w[None, :]).ravel()
    return nodes, weights


def _quantize_up(x, base=1.25):
    return float(base ** math.ceil(math.log(max(x, 1e-6)) / math.log(base)))


# ---------------------------------------------------------------------------
# log Gamma_{gamma/2} on the safe strip and by shift continuation
# ---------------------------------------------------------------------------

def _lngamma2_strip_batch(xs, gamma):
    """ln Gamma_{gamma/2} from its integral representation, Re(x) in the strip.

    Splits at t0: exact Taylor series below (removes the cancelling 1/t^2 and
    1/t pieces analytically), composite Gauss-Legendre above, plus the exact
    (x - Q/2)/T tail of the non-decaying 1/t^2 term.
    """
    xs = np.atleast_1d(np.asarray(xs, dtype=complex))
    q = 0.5 * gamma + 2.0 / gamma
    a, b = 0.5 * gamma, 2.0 / gamma

    scale = max(float(np.max(np.abs(xs))), q, b, 1.0)
    t0 = min(0.8, 1.2 / scale)
    g = _g_series(gamma)
    kmax = g.size - 1

    # e_k = ((-x)^k - (-Q/2)^k)/k!; c = conv(e, g); series coeff of t^p is
    # c_{p+3} - ((Q/2-x)^2/2) (-1)^{p+1}/(p+1)!  (p = -2, -1 vanish exactly).
    fact = np.array([math.factorial(k) for k in range(kmax + 1)], dtype=float)
    pw_x = _powers(-xs, kmax)
    pw_q = _powers(np.full(xs.shape, -q / 2.0), kmax)
    e = (pw_x - pw_q) / fact
    small = np.zeros(xs.size, dtype=complex)
    u2 = 0.5 * (q / 2.0 - xs) ** 2
    for p in range(0, kmax - 3):
        c_p3 = e[:, 1:p + 4] @ g[p + 2::-1][: p + 3]
        coeff = c_p3 - u2 * ((-1.0) ** (p + 1)) / math.factorial(p + 1)
        small += coeff * t0 ** (p + 1) / (p + 1)

    re_min = max(min(float(np.min(xs.real)), q / 2.0, 1.0), 1e-3)
    t1 = _quantize_up(45.0 / re_min + t0)
    im_max = float(np.max(np.abs(xs.imag)))
    width = _quantize_up(min(1.0, 12.0 / (im_max + 4.0)))
    nodes, wts = _gl_panels(t0, t1, width)

    expq = np.exp(-0.5 * q * nodes)
    gfun = 1.0 / ((1.0 - np.exp(-a * nodes)) * (1.0 - np.exp(-b * nodes)))
    expt = np.exp(-nodes)
    ex = np.exp(-xs[:, None] * nodes[None, :])
    integ = ((ex - expq) * gfun - u2[:, None] * expt) / nodes + \
        (xs[:, None] - q / 2.0) / nodes ** 2
    large = integ @ wts + (xs - q / 2.0) / t1
    return small + large


def _walk_steps(re_x, gamma):
    """Signed number of gamma/2 steps moving Re(x) into [Q/4, 3Q/4]."""
    q = 0.5 * gamma + 2.0 / gamma
    if re_x < 0.25 * q:
        return int(math.ceil((0.25 * q - re_x) / (0.5 * gamma)))
    if re_x > 0.75 * q:
        return -int(math.ceil((re_x - 0.75 * q) / (0.5 * gamma)))
    return 0


def _dg_pole_distance(x, gamma):
    """Distance from x to the pole lattice {-n gamma/2 - m 2/gamma}."""
    x = complex(x)
    if abs(x.imag) >= _POLE_TOL:
        return abs(x.imag)
    e = -x.real
    if e < -_POLE_TOL:
        return abs(x.real)
    best = math.inf
    n = 0
    while True:
        rem = e - n * 0.5 * gamma
        if rem < -_POLE_TOL:
            break
        m = max(0, round(rem * gamma / 2.0))
        for mm in (m - 1, m, m + 1):
            if mm >= 0:
                best = min(best, abs(rem - mm * 2.0 / gamma))
        n += 1
    return math.hypot(best, x.imag)


def _lngamma2_batch(xs, gamma, step=None):
    """ln Gamma_{gamma/2}(x) for a batch of x, shift-walked into the strip.

    ``step`` overrides the walk increment (gamma/2 by default; 2/gamma is
    accepted so tests can assert both continuation orders agree).
    """
    xs = np.atleast_1d(np.asarray(xs, dtype=complex))
    if step is None:
        step = 0.5 * gamma
    use_b = abs(step - 2.0 / gamma) < abs(step - 0.5 * gamma)
    q = 0.5 * gamma + 2.0 / gamma
    lead = (0.5 * gamma if not use_b else 2.0 / gamma)
    lncm = 0.5 * np.log(2.0 * np.pi)
    lngh = np.log(0.5 * gamma)

    def lnsfac(y):
        # ln[Gamma_{g/2}(y) / Gamma_{g/2}(y + step)]
        if not use_b:
            return -lncm + sp.loggamma(0.5 * gamma * y) + \
                (-0.5 * gamma * y + 0.5) * lngh
        return -lncm + sp.loggamma(2.0 * y / gamma) + \
            (2.0 * y / gamma - 0.5) * lngh

    out = np.zeros(xs.shape, dtype=complex)
    shifted = np.empty(xs.shape, dtype=complex)
    corrections = np.zeros(xs.shape, dtype=complex)
    for i, x in enumerate(xs):
        if use_b:
            if x.real < 0.25 * q:
                n = int(math.ceil((0.25 * q - x.real) / lead))
            elif x.real > 0.75 * q + lead:
                n = -int(math.ceil((x.real - (0.75 * q)) / lead - 1.0))
            else:
                n = 0
        else:
            n = _walk_steps(x.real, gamma)
        if n > 0:
            js = x + lead * np.arange(n)
            corrections[i] = np.sum(lnsfac(js))
            shifted[i] = x + lead * n
        elif n < 0:
            js = x - lead * np.arange(1, -n + 1)
            corrections[i] = -np.sum(lnsfac(js))
            shifted[i] = x + lead * n
        else:
            shifted[i] = x
    out = _lngamma2_strip_batch(shifted, gamma) + corrections
    return out


def log_double_gamma(x, params: LiouvilleParams, step=None) -> complex:
    """ln Gamma_{gamma/2}(x), continued from the strip by the shift equations.

    Raises PoleError within 1e-8 of the pole lattice -n gamma/2 - m 2/gamma.
    """
    x = complex(x)
    if _dg_pole_distance(x, params.gamma) < _POLE_TOL:
        raise PoleError(f"Gamma_(gamma/2) pole near x = {x}",
                        factor="double_gamma", where=x)
    return complex(_lngamma2_batch(np.array([x]), params.gamma, step=step)[0])


def double_gamma(x, params: LiouvilleParams) -> complex:
    """Gamma_{gamma/2}(x) = exp(log_double_gamma(x))."""
    return complex(np.exp(log_double_gamma(x, params)))


# ---------------------------------------------------------------------------
# Double sine
# ---------------------------------------------------------------------------

def _zero_lattice_distance(x, gamma):
    """Distance from x to the shifted lattice {Q + n gamma/2 + m 2/gamma}."""
    q = 0.5 * gamma + 2.0 / gamma
    return _dg_pole_distance(q - complex(x), gamma)


def double_sine(x, params: LiouvilleParams) -> complex:
    """S_{gamma/2}(x) = Gamma_{gamma/2}(x) / Gamma_{gamma/2}(Q - x).

    Poles on the lattice -N gamma/2 - N 2/gamma raise PoleError; zeros on
    Q + N gamma/2 + N 2/gamma return 0 with a ZeroWarning.
    """
    x = complex(x)
    gamma = params.gamma
    q = params.q_charge
    if _dg_pole_distance(x, gamma) < _POLE_TOL:
        raise PoleError(f"double sine pole near x = {x}",
                        factor="double_sine", where=x)
    if _zero_lattice_distance(x, gamma) < _POLE_TOL:
        warnings.warn(f"double sine zero at x = {x}; returning 0", ZeroWarning)
        return 0.0j
    vals = _lngamma2_batch(np.array([x, q - x]), gamma)
    return complex(np.exp(vals[0] - vals[1]))


# ---------------------------------------------------------------------------
# Upsilon
# ---------------------------------------------------------------------------

def _lnupsilon_strip_batch(zs, gamma):
    """ln Upsilon from its integral representation, Re(z) in the strip."""
    zs = np.atleast_1d(np.asarray(zs, dtype=complex))
    q = 0.5 * gamma + 2.0 / gamma
    a, b = 0.5 * gamma, 2.0 / gamma
    u = 0.5 * q - zs

    scale = max(float(np.max(np.abs(u))), q, b, 1.0)
    t0 = min(0.8, 1.2 / scale)

    # Series of sinh^2(ut/2)/(sinh(at/2) sinh(bt/2)) = sum_k r_k t^{2k}:
    # (cosh(ut)-1)/2 * (4/t^2) / (sinhc(at/2) sinhc(bt/2)), since ab = 1.
    nmax = _SERIES_ORDER // 2
    inv = _sinhc_inv_pair_series(gamma)[:nmax]
    jj = np.arange(1, nmax + 1)
    # coefficient of t^{2k} in (cosh(ut)-1)/2 is u^{2k}/(2 (2k)!)
    ch = _powers(u * u, nmax)[:, 1:] / np.array(
        [2.0 * math.factorial(2 * int(j)) for j in jj])
    r = np.zeros((zs.size, nmax), dtype=complex)
    for k in range(nmax):
        r[:, k] = 4.0 * np.sum(ch[:, : k + 1] * inv[k::-1][None, : k + 1], axis=1)

    # integrand series: [u^2 e^{-t} - sum r_m t^{2m}]/t; the 1/t parts cancel,
    # leaving bracket coefficients B_q = u^2 (-1)^q/q! - [q even] r_{q/2}.
    small = np.zeros(zs.size, dtype=complex)
    u2 = u * u
    for p in range(1, 2 * nmax - 1):
        coeff = u2 * ((-1.0) ** p) / math.factorial(p)
        if p % 2 == 0:
            coeff = coeff - r[:, p // 2]
        small += coeff * t0 ** p / p

    re_z = zs.real
    rate = max(min(float(np.min(re_z)), float(np.min(q - re_z)), 1.0), 1e-3)
    t1 = _quantize_up(45.0 / rate + t0)
    im_max = float(np.max(np.abs(u.imag)))
    width = _quantize_up(min(1.0, 12.0 / (im_max + 4.0)))
    nodes, wts = _gl_panels(t0, t1, width)

    # Scaled large-t form: sinh^2(ut/2)/(sinh(at/2)sinh(bt/2)) =
    #   (e^{-zt}(1-e^{-ut})^2 e^{ut-...}) -- assembled from decaying exponentials.
    t = nodes[None, :]
    num = (np.exp((u - 0.5 * q)[:, None] * t) + np.exp(-(u + 0.5 * q)[:, None] * t)
           - 2.0 * np.exp(-0.5 * q * t))
    d = a - b
    den = (1.0 + np.exp(-q * t) - np.exp(0.5 * (d - q) * t)
           - np.exp(-0.5 * (d + q) * t))
    integ = (u2[:, None] * np.exp(-t) - num / den) / t
    large = integ @ wts
    return small + large


def _log_upsilon_batch(zs, gamma):
    """ln Upsilon_{gamma/2}(z), shift-walked; -inf real part marks a zero."""
    zs = np.atleast_1d(np.asarray(zs, dtype=complex))
    q = 0.5 * gamma + 2.0 / gamma
    lead = 0.5 * gamma
    shifted = np.empty(zs.shape, dtype=complex)
    corrections = np.zeros(zs.shape, dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        for i, z in enumerate(zs):
            n = _walk_steps(z.real, gamma)
            if n > 0:
                # Upsilon(z) = Upsilon(z + g/2) (g/2)^{gamma z - 1} / l(gamma z/2)
                js = z + lead * np.arange(n)
                u = 0.5 * gamma * js
                linv = _l_inv_stable(u)
                corrections[i] = np.sum(np.log(linv)
                                        + (gamma * js - 1.0) * np.log(0.5 * gamma))
            elif n < 0:
                # Upsilon(z) = l(gamma y/2) (g/2)^{1 - gamma y} Upsilon(y), y = z - g/2
                js = z - lead * np.arange(1, -n + 1)
                u = 0.5 * gamma * js
                lval = 1.0 / _l_inv_stable(u)
                corrections[i] = np.sum(np.log(lval)
                                        + (1.0 - gamma * js) * np.log(0.5 * gamma))
            shifted[i] = z + lead * n
    return _lnupsilon_strip_batch(shifted, gamma) + corrections


def log_upsilon(z, params: LiouvilleParams) -> complex:
    """ln Upsilon_{gamma/2}(z); real part -inf at the zeros of Upsilon."""
    return complex(_log_upsilon_batch(np.array([complex(z)]), params.gamma)[0])


def upsilon(z, params: LiouvilleParams) -> complex:
    """Zamolodchikov's Upsilon_{gamma/2}(z): entire, with lattice zeros."""
    val = log_upsilon(z, params)
    if val.real == -math.inf or not np.isfinite(val.real):
        return 0.0j
    return complex(np.exp(val))


def upsilon_prime_zero(params: LiouvilleParams) -> complex:
    """Upsilon'(0), which equals Upsilon(gamma/2) by the shift relation."""
    return upsilon(0.5 * params.gamma, params)


# ---------------------------------------------------------------------------
# Vectorized double-sine products along a line (Hosomichi integrand support)
# ---------------------------------------------------------------------------

class DoubleSineLine:
    """Evaluator of ln[ S(w1+it) S(w1-it) S(w2+it) S(w2-it) ] over real t.

    The four double sines are first shift-walked in their real parts into the
    safe strip; the remaining strip integrals combine into a single s-integral
    whose t-dependence enters only through cos(ts).  The s-profile is
    precomputed on a fixed grid, so each t costs one weighted dot product plus
    the cheap sine factors of the shift corrections.
    """

    def __init__(self, w1, w2, gamma, t_max):
        q = 0.5 * gamma + 2.0 / gamma
        self.gamma = gamma
        self.q = q
        self.t_max = t_max
        self.walks = []  # (w_original, n_steps) for the +it/-it pairs
        ws = []
        for w in (complex(w1), complex(w2)):
            n = _walk_steps(w.real, gamma)
            self.walks.append((w, n))
            ws.append(w + n * 0.5 * gamma)
        self.w1s, self.w2s = ws

        a, b = 0.5 * gamma, 2.0 / gamma
        u, v = self.w1s, self.w2s
        scale = max(abs(u), abs(v), q, b, 1.0)
        s0 = min(0.25, 1.0 / scale)
        self.s0 = s0
        self.bconst = 4.0 * (u + v) - 4.0 * q

        # Small-s series: A(s) = E4(s) G(s) / s = sum a_k s^k, k >= -2.
        g = _g_series(gamma)
        kmax = g.size - 1
        fact = np.array([math.factorial(k) for k in range(kmax + 1)])
        pw = sum(_powers(np.array([-u, -v]), kmax)) \
            - sum(_powers(np.array([-(q - u), -(q - v)]), kmax))
        e4 = (pw / fact).ravel()  # E_j, j = 0.. (E_0 = 0)
        # E4(s) G(s)/s = sum_k a_k s^k with a_k = conv(E, g)[k + 3], k >= -2.
        acoef = np.convolve(e4, g)[: kmax + 1]
        # D_j = 2 sum_k a_k s0^{2j+k+1}/(2j+k+1), skipping the cancelled pair
        # (j=0, k=-2) and the identically vanishing a_{-1}.
        jmax = 1
        while (t_max * s0) ** (2 * jmax) / math.factorial(2 * jmax) > 1e-19 \
                and jmax < 60:
            jmax += 1
        dj = np.zeros(jmax + 1, dtype=complex)
        for j in range(jmax + 1):
            for idx in range(1, acoef.size):
                k = idx - 3
                p = 2 * j + k
                if p < 0 or (j == 0 and k in (-2, -1)):
                    continue
                dj[j] += 2.0 * acoef[idx] * s0 ** (p + 1) / (p + 1)
        self.dj = dj
        self.jfact = np.array([math.factorial(2 * j) for j in range(jmax + 1)],
                              dtype=float)

        # Grid profile h(s) on [s0, S].
        rate = max(min(u.real, v.real, q - u.real, q - v.real), 1e-3)
        s1 = _quantize_up(45.0 / rate + s0)
        im_max = max(abs(u.imag), abs(v.imag))
        width = _quantize_up(min(0.5, 10.0 / (t_max + im_max + 4.0)))
        nodes, wts = _gl_panels(s0, s1, width)
        gfun = 1.0 / ((1.0 - np.exp(-a * nodes)) * (1.0 - np.exp(-b * nodes)))
        h = (np.exp(-u * nodes) + np.exp(-v * nodes)
             - np.exp(-(q - u) * nodes) - np.exp(-(q - v) * nodes)) * gfun / nodes
        self.nodes = nodes
        self.hw = h * wts
        self.const = self.bconst / s0  # exact integral of B/s^2 over [s0, inf)

    def log_product(self, ts):
        """ln of the four-sine product at each t in ``ts`` (array)."""
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        cos_part = 2.0 * np.cos(ts[:, None] * self.nodes[None, :]) @ self.hw
        tp = ts[:, None] ** (2 * np.arange(self.dj.size))[None, :]
        signs = (-1.0) ** np.arange(self.dj.size)
        small = tp @ (signs * self.dj / self.jfact)
        total = cos_part + small + self.const

        # Shift corrections: each gamma/2 step of S contributes -ln 2 sin(...)
        # for both the +it and -it member of the pair.
        gamma = self.gamma
        for w, n in self.walks:
            if n > 0:
                for j in range(n):
                    y = w + j * 0.5 * gamma
                    arg_p = 0.5 * math.pi * gamma * (y + 1j * ts)
                    arg_m = 0.5 * math.pi * gamma * (y - 1j * ts)
                    total -= np.log(2.0 * np.sin(arg_p)) + np.log(2.0 * np.sin(arg_m))
            elif n < 0:
                for j in range(1, -n + 1):
                    y = w - j * 0.5 * gamma
                    arg_p = 0.5 * math.pi * gamma * (y + 1j * ts)
                    arg_m = 0.5 * math.pi * gamma * (y - 1j * ts)
                    total += np.log(2.0 * np.sin(arg_p)) + np.log(2.0 * np.sin(arg_m))
        return total


# ---------------------------------------------------------------------------
# Dedekind eta and partition numbers
# ---------------------------------------------------------------------------

def dedekind_eta(q: float, n_terms: int = 1) -> float:
    """eta(q) = q^{1/24} prod_{n>=1} (1 - q^n), truncated adaptively.

    The product is cut at N >= n_terms where the dropped tail factor deviates
    from 1 by less than 1e-15.
    """
    if not 0.0 < q < 1.0:
        raise DomainError(f"eta requires q in (0, 1), got {q}")
    if n_terms < 1:
        raise DomainError("n_terms must be at least 1")
    # tail bound: prod_{n>N} (1-q^n) >= exp(-q^{N+1}/((1-q)(1-q^{N+1})))
    n_tail = int(math.ceil(math.log(1e-15 * (1.0 - q)) / math.log(q))) + 1
    n = max(n_terms, n_tail, 1)
    powers = q ** np.arange(1, n + 1)
    return float(q ** (1.0 / 24.0) * np.prod(1.0 - powers))


@lru_cache(maxsize=None)
def partition_count(n: int) -> int:
    """Number of integer partitions of n, by Euler's pentagonal recurrence."""
    if n < 0:
        raise DomainError("partition_count needs n >= 0")
    if n == 0:
        return 1
    total = 0
    k = 1
    while True:
        g1 = k * (3 * k - 1) // 2
        g2 = k * (3 * k + 1) // 2
        if g1 > n and g2 > n:
            break
        sign = -1 if k % 2 == 0 else 1
        if g1 <= n:
            total += sign * partition_count(n - g1)
        if g2 <= n:
            total += sign * partition_count(n - g2)
        k += 1
    return total
