"""Asymmetrically extended von Mises density and its Fourier functionals.

For wave speed ``k`` and rescaled order parameter ``r``, ``chi_{k,r}`` is
the unique 2pi-periodic solution of

    d(chi)/dphi + (r sin(phi) + k) chi = k,

with the continuous traces ``chi_{0,r} = I_0(r) exp(r cos phi)`` and
``chi_{k,0} = 1``.  The normalized density (the traveling-wave profile)
is ``rho_{k,r} = chi_{k,r} / (2 pi C_0(k,r))``.

Fourier functionals::

    C_n = (1/2pi) int cos(n phi) chi dphi,   S_n = (1/2pi) int sin(n phi) chi dphi

and the normalized forms used by the self-consistency system::

    cal_C_n = C_n / (r C_0),   cal_S_n = -S_n / (r C_0),
    cal_T_n = cal_S_n / cal_C_n,
    cal_R_n = sign(k) sqrt(cal_C_n^2 + cal_S_n^2).

Two independent computational routes are implemented on purpose.  The
production route expands ``C_0`` in the even power series
``C_0 = 1 + sum_p a_{k,p} (r/2)^{2p}`` with the cancellation-free
coefficients

    a_{k,p} = (2p)! / ( (p!)^2 prod_{n=1}^{p} (n^2 + k^2) ),

from which ``C_1 = (1/2) d/dr C_0`` and ``S_1 = -(k/r)(C_0 - 1)`` follow
term by term.  The second route goes through Bessel-product sums for the
Fourier coefficients of ``chi`` (:func:`avm_cs_n`), and tests pin both
against direct quadrature of the defining integrals.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

from .bessel import bessel_i_range, default_n_max

_R_SERIES_LIMIT = 300.0  # a_{k,p}(r/2)^{2p} peaks near I_0(r)^2, which overflows past ~r=350


class QuadratureConvergenceError(RuntimeError):
    """Raised when adaptive quadrature stalls; carries the error estimate."""

    def __init__(self, message, estimate):
        super().__init__(f"{message} (achieved error estimate {estimate:.3e})")
        self.estimate = estimate


@dataclass(frozen=True)
class AvmPoint:
    """A (k, r) parameter pair: wave speed and rescaled order parameter."""

    k: float
    r: float


@dataclass(frozen=True)
class AvmFunctionals:
    """The functionals of chi_{k,r} entering the self-consistency system.

    ``c0, c1, s1`` are the raw Fourier functionals; ``cal_*`` are the
    normalized forms (``cal_t1 = cal_s1 / cal_c1`` and
    ``cal_r1 = sign(k) * hypot(cal_c1, cal_s1)``).
    """

    c0: float
    c1: float
    s1: float
    cal_c1: float
    cal_s1: float
    cal_t1: float
    cal_r1: float


def _c0_c1_sums(k, r):
    """Accumulate S0 = sum_p a_{k,p} x^{2p} and S1 = sum_p p a_{k,p} x^{2p}, x = r/2.

    Terms first grow (they peak near p ~ r) and then decay faster than
    geometrically, so the stop test requires the decaying regime.
    """
    k2 = k * k
    x2 = 0.25 * r * r
    s0 = 0.0
    s1 = 0.0
    term = 1.0  # a_{k,0} x^0
    p = 0
    while True:
        p += 1
        term *= x2 * (2.0 * p) * (2.0 * p - 1.0) / (p * p * (p * p + k2))
        s0 += term
        s1 += p * term
        if term < 1e-17 * (1.0 + s0) and x2 * 4.0 < p * p:
            return s0, s1, p
        if p > 100000:
            raise RuntimeError("power series for C_0 failed to converge")


def avm_functionals(point):
    """Evaluate (C_0, C_1, S_1) and the normalized functionals at (k, r).

    Uses the positive-term power series in ``r`` (no cancellation for
    any real k, r); at ``r = 0`` the closed-form limits are returned:
    ``cal_C_1 = 1/(2(k^2+1))``, ``cal_S_1 = k/(2(k^2+1))``,
    ``cal_T_1 = k``, ``cal_R_1 = sign(k)/(2 sqrt(k^2+1))``.
    """
    k = float(point.k)
    r = float(point.r)
    if abs(r) > _R_SERIES_LIMIT:
        raise OverflowError(f"|r| = {abs(r):g} exceeds {_R_SERIES_LIMIT:g}")
    if r == 0.0:
        den = 2.0 * (k * k + 1.0)
        return AvmFunctionals(
            c0=1.0,
            c1=0.0,
            s1=0.0,
            cal_c1=1.0 / den,
            cal_s1=k / den,
            cal_t1=k,
            cal_r1=math.copysign(1.0, k) / (2.0 * math.sqrt(k * k + 1.0)) if k != 0.0 else 0.0,
        )
    s0, s1p, _ = _c0_c1_sums(k, r)
    c0 = 1.0 + s0
    c1 = s1p / r
    s1 = -(k / r) * s0
    cal_c1 = c1 / (r * c0)
    cal_s1 = -s1 / (r * c0)
    cal_t1 = cal_s1 / cal_c1
    mod = math.hypot(cal_c1, cal_s1)
    cal_r1 = math.copysign(mod, k) if k != 0.0 else 0.0
    return AvmFunctionals(c0, c1, s1, cal_c1, cal_s1, cal_t1, cal_r1)


def branch_modulus(k, r):
    """sqrt(cal_C_1^2 + cal_S_1^2) without the sign(k) convention.

    This is the quantity inverted for mu along a branch; at k = 0 it
    reduces to the classical cal_C_1(0, r) = I_1(r)/(r I_0(r)) > 0,
    where the signed cal_R_1 would degenerate to zero.
    """
    f = avm_functionals(AvmPoint(k, r))
    return math.hypot(f.cal_c1, f.cal_s1)


def avm_c0_series(point, p_max):
    """Truncated power series 1 + sum_{p<=p_max} a_{k,p} (r/2)^{2p} for C_0.

    Emits a non-fatal warning when the last retained term still exceeds
    1e-14 of the sum (series not converged at this p_max).
    """
    p_max = int(p_max)
    if p_max < 1:
        raise ValueError("p_max must be >= 1")
    k = float(point.k)
    r = float(point.r)
    if abs(r) > _R_SERIES_LIMIT:
        raise OverflowError(f"|r| = {abs(r):g} exceeds {_R_SERIES_LIMIT:g}")
    k2 = k * k
    x2 = 0.25 * r * r
    total = 1.0
    term = 1.0
    for p in range(1, p_max + 1):
        term *= x2 * (2.0 * p) * (2.0 * p - 1.0) / (p * p * (p * p + k2))
        total += term
    if term > 1e-14 * total:
        warnings.warn(
            f"C_0 series not converged at p_max={p_max}: last term is "
            f"{term / total:.2e} of the sum",
            RuntimeWarning,
            stacklevel=2,
        )
    return total


def avm_akp(k, p):
    """Power-series coefficient a_{k,p} = (2p)!/((p!)^2 prod_{n=1}^p (n^2+k^2)).

    Evaluated as a running product of the per-step ratios
    2n(2n-1)/(n^2 (n^2+k^2)) to avoid factorial overflow.
    """
    p = int(p)
    if p < 0:
        raise ValueError("p must be >= 0")
    k2 = float(k) ** 2
    val = 1.0
    for n in range(1, p + 1):
        val *= (2.0 * n) * (2.0 * n - 1.0) / (n * n * (n * n + k2))
    return val


def _gauss_integrate(f, n_nodes):
    x, w = leggauss(n_nodes)
    theta = np.pi * x
    return np.pi * float(np.dot(w, f(theta)))


def avm_eta_sigma(k, p):
    """Quadrature values of the weight integrals (eta_{p,0}, sigma_{p,0}).

    eta_{p,0}(k)   = int_{-pi}^{pi} cos^{2p}(theta/2) cosh(k theta) dtheta
    sigma_{p,0}(k) = int_{-pi}^{pi} cos^{2p-1}(theta/2) sin(theta/2) theta^0
                     sinh(k theta) dtheta   (defined for p >= 1)

    For ``p = 0`` only eta is defined and ``(eta, None)`` is returned.
    Gauss-Legendre node counts are doubled until two successive values
    agree to 1e-12 relative; failure raises
    :class:`QuadratureConvergenceError` with the achieved estimate.
    """
    p = int(p)
    if p < 0:
        raise ValueError("p must be >= 0")
    k = float(k)

    def eta_integrand(theta):
        return np.cos(0.5 * theta) ** (2 * p) * np.cosh(k * theta)

    def sigma_integrand(theta):
        return (
            np.cos(0.5 * theta) ** (2 * p - 1)
            * np.sin(0.5 * theta)
            * np.sinh(k * theta)
        )

    def converge(f):
        n = 64
        prev = _gauss_integrate(f, n)
        while n <= 8192:
            n *= 2
            cur = _gauss_integrate(f, n)
            err = abs(cur - prev)
            if err <= 1e-12 * max(1.0, abs(cur)):
                return cur
            prev = cur
        raise QuadratureConvergenceError("eta/sigma quadrature did not converge", err)

    eta = converge(eta_integrand)
    if p == 0:
        return eta, None
    sigma = converge(sigma_integrand)
    return eta, sigma


def _chi_hat(point, n):
    """Complex Fourier coefficient chi_hat_n = (1/2pi) int chi e^{-i n phi} dphi.

    From the convolution of the Fourier series of psi = chi e^{-r cos}
    with the Jacobi-Anger expansion of e^{r cos}:

        chi_hat_n = sum_m k (-1)^m I_m(r) I_{n-m}(r) / (k + i m),

    with the m = 0 prefactor extended continuously to 1 at k = 0.
    """
    k = float(point.k)
    r = float(point.r)
    n = int(n)
    if k == 0.0:
        table = bessel_i_range(abs(n), r).values
        return complex(table[0] * table[abs(n)], 0.0)
    m_top = default_n_max(r) + abs(n)
    table = bessel_i_range(m_top + abs(n), r).values
    m = np.arange(-m_top, m_top + 1)
    im = table[np.abs(m)]
    inm = table[np.abs(n - m)]
    signs = np.where(m % 2 == 0, 1.0, -1.0)
    return complex(np.sum(signs * im * inm * (k / (k + 1j * m))))


def avm_cs_n(point, n):
    """Fourier cosine/sine pair (C_n, S_n) of chi_{k,r}.

    Computed term-by-term from the Bessel-product representation of the
    chi series; an independent route from :func:`avm_functionals`.
    """
    h = _chi_hat(point, n)
    return h.real, -h.imag


def avm_chi(point, phi):
    """Evaluate chi_{k,r} at angle(s) phi in [-pi, pi].

    The series form

        chi = exp(r cos phi) [ I_0(r)
              + 2 sum_{n>=1} (-1)^n I_n(r) (k^2 cos(n phi) + k n sin(n phi))
                                           / (k^2 + n^2) ]

    honors the traces exactly: the sum vanishes at k = 0 and all
    n >= 1 Bessel factors vanish at r = 0, so chi_{0,r} =
    I_0(r) e^{r cos phi} and chi_{k,0} = 1 without special-casing.
    """
    k = float(point.k)
    r = float(point.r)
    phi_arr = np.asarray(phi, dtype=float)
    scalar = phi_arr.ndim == 0
    phi_arr = np.atleast_1d(phi_arr)
    n_top = default_n_max(r)
    table = bessel_i_range(n_top, r).values
    n = np.arange(1, n_top + 1)
    signs = np.where(n % 2 == 0, 1.0, -1.0)
    den = k * k + n.astype(float) ** 2
    ccoef = 2.0 * signs * table[1:] * (k * k) / den
    scoef = 2.0 * signs * table[1:] * (k * n) / den
    angles = np.outer(n, phi_arr)
    series = table[0] + ccoef @ np.cos(angles) + scoef @ np.sin(angles)
    out = np.exp(r * np.cos(phi_arr)) * series
    return float(out[0]) if scalar else out


def avm_chi_ode_oracle(point, m_nodes):
    """Periodic solve of d(chi)/dphi + (r sin phi + k) chi = k on a uniform grid.

    Variation of constants with integrating factor exp(G),
    G(phi) = k phi - r cos phi:

        chi(phi) = e^{-G(phi)} [ chi(-pi) e^{G(-pi)} + k int_{-pi}^{phi} e^G du ],
        chi(-pi) = k (int_{-pi}^{pi} e^G du) / (e^{G(pi)} - e^{G(-pi)}).

    Panel integrals use 8-point Gauss-Legendre, far below discretization
    error elsewhere.  Test-side oracle for :func:`avm_chi`; returns
    ``(phi_grid, chi_values)`` with ``m_nodes`` points on [-pi, pi).
    """
    m_nodes = int(m_nodes)
    if m_nodes < 64:
        raise ValueError("m_nodes must be >= 64")
    k = float(point.k)
    r = float(point.r)
    phi = -np.pi + 2.0 * np.pi * np.arange(m_nodes) / m_nodes
    if k == 0.0:
        table = bessel_i_range(0, r).values
        return phi, table[0] * np.exp(r * np.cos(phi))

    def big_g(u):
        return k * u - r * np.cos(u)

    # panel endpoints: the m_nodes grid points plus +pi to close the period
    edges = np.concatenate([phi, [np.pi]])
    gx, gw = leggauss(8)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = mid[:, None] + half[:, None] * gx[None, :]
    shift = float(np.max(big_g(edges)))  # keep exponentials bounded by 1
    panel = half * np.sum(np.exp(big_g(nodes) - shift) * gw[None, :], axis=1)
    cumulative = np.concatenate([[0.0], np.cumsum(panel)])
    denom = math.exp(big_g(np.pi) - shift) - math.exp(big_g(-np.pi) - shift)
    if denom == 0.0 or not math.isfinite(denom):
        raise ValueError("periodicity condition numerically singular")
    chi_start = k * cumulative[-1] / denom
    chi = np.exp(-(big_g(phi) - shift)) * (
        chi_start * math.exp(big_g(-np.pi) - shift) + k * cumulative[:-1]
    )
    return phi, chi


def functionals_by_quadrature(point, m_nodes=2048):
    """AvmFunctionals from trapezoid quadrature of the chi integrals.

    Independent verification route: C_0, C_1, S_1 are integrated
    numerically from pointwise chi values instead of the power series.
    """
    phi = -np.pi + 2.0 * np.pi * np.arange(int(m_nodes)) / int(m_nodes)
    chi = avm_chi(point, phi)
    c0 = float(np.mean(chi))
    c1 = float(np.mean(np.cos(phi) * chi))
    s1 = float(np.mean(np.sin(phi) * chi))
    k = float(point.k)
    r = float(point.r)
    if r == 0.0:
        return avm_functionals(point)
    cal_c1 = c1 / (r * c0)
    cal_s1 = -s1 / (r * c0)
    cal_t1 = cal_s1 / cal_c1
    mod = math.hypot(cal_c1, cal_s1)
    cal_r1 = math.copysign(mod, k) if k != 0.0 else 0.0
    return AvmFunctionals(c0, c1, s1, cal_c1, cal_s1, cal_t1, cal_r1)


class AvmDensity:
    """Normalized traveling-wave profile rho_{k,r} = chi_{k,r}/(2 pi C_0).

    The Bessel table and series coefficients are precomputed at
    construction and immutable afterwards, so one instance can be shared
    across threads.
    """

    def __init__(self, point):
        self.point = AvmPoint(float(point.k), float(point.r))
        k, r = self.point.k, self.point.r
        n_top = default_n_max(r)
        table = bessel_i_range(n_top, r).values
        n = np.arange(1, n_top + 1)
        signs = np.where(n % 2 == 0, 1.0, -1.0)
        den = k * k + n.astype(float) ** 2
        self._i0 = table[0]
        self._n = n
        self._ccoef = 2.0 * signs * table[1:] * (k * k) / den
        self._scoef = 2.0 * signs * table[1:] * (k * n) / den
        self.c0 = avm_functionals(self.point).c0
        self.normalization = 2.0 * math.pi * self.c0

    def chi(self, phi):
        """Unnormalized profile chi_{k,r}(phi)."""
        phi_arr = np.atleast_1d(np.asarray(phi, dtype=float))
        angles = np.outer(self._n, phi_arr)
        series = self._i0 + self._ccoef @ np.cos(angles) + self._scoef @ np.sin(angles)
        out = np.exp(self.point.r * np.cos(phi_arr)) * series
        return float(out[0]) if np.ndim(phi) == 0 else out

    def pdf(self, phi):
        """Probability density rho_{k,r}(phi); integrates to one."""
        return self.chi(phi) / self.normalization

    def flux_constant(self):
        """The constant c = k / (2 pi C_0) of the traveling-wave balance."""
        return self.point.k / self.normalization


def avm_density(point):
    """Construct the normalized density for a (k, r) pair."""
    return AvmDensity(point)
