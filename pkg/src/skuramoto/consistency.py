"""Self-consistency system for coherent traveling waves and branch tracing.

A nontrivial profile rho_{k,r} solves the traveling-wave equation at
coupling mu and frustration alpha exactly when

    cal_R_1(k, r) = 1 / mu,      cal_T_1(k, r) = tan(alpha).

The monotonicity structure of the functionals (cal_T_1 is strictly
increasing in k and strictly decreasing in r; the branch map
r -> mu(r) is strictly increasing from the onset value) lets the 2D
system be solved as two nested bracketed 1D root problems instead of a
Newton iteration:

    inner:  k(r) from cal_T_1(k, r) = tan(alpha),  bracket [tan(alpha), ...)
    outer:  r from 1 / modulus(k(r), r) = mu,      bracket [0, ...)

The coherent branch bifurcates from the incoherent state at
mu_alpha = 2 sec(alpha) with onset wave speed tan(alpha); the branch is
returned with the r >= 0 representative (the mirror pair -r is recovered
by symmetry).  Frustrations in (pi/2, pi] are mapped back through the
invariance (mu, alpha) -> (-mu, pi - alpha), under which k -> -k.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .avm import AvmPoint, avm_functionals, branch_modulus, functionals_by_quadrature

_HALF_PI = 0.5 * math.pi


class NoBifurcationError(ValueError):
    """Raised for alpha = pi/2, where the incoherent state is unique for all mu."""


class BranchSolveError(RuntimeError):
    """Root solve for a branch point failed; carries the last iterate."""

    def __init__(self, message, last_iterate=None, residual=None):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.residual = residual


@dataclass(frozen=True)
class BranchPoint:
    """One solution (mu, alpha, k, r, c) of the self-consistency system.

    ``residual`` is the max-norm residual of the two equations, evaluated
    both by the power-series route and re-verified by quadrature.
    """

    mu: float
    alpha: float
    k: float
    r: float
    c: float
    residual: float


@dataclass
class BranchCurve:
    """Branch sampled on an increasing r-grid, with solver metadata."""

    alpha: float
    points: list
    r_step: float
    iterations: list = field(default_factory=list)
    failure_index: int | None = None


def bifurcation_point(alpha):
    """Onset (mu_alpha, k at onset) = (2 sec(alpha), tan(alpha)), closed form."""
    alpha = float(alpha)
    if not 0.0 <= alpha <= math.pi:
        raise ValueError("alpha must lie in [0, pi]")
    if abs(alpha - _HALF_PI) < 1e-14:
        raise NoBifurcationError(
            "alpha = pi/2: the incoherent state is the unique solution for every mu"
        )
    return 2.0 / math.cos(alpha), math.tan(alpha)


def solve_k_given_r(alpha, r, tol=1e-12, maxiter=200):
    """The unique k >= 0 with cal_T_1(k, r) = tan(alpha), alpha in [0, pi/2).

    cal_T_1(., r) is a strictly increasing bijection of [0, inf) onto
    itself for r > 0, and cal_T_1(k, r) <= k, so the root is bracketed by
    [tan(alpha), hi] with hi found by doubling.
    """
    alpha = float(alpha)
    r = float(r)
    if not 0.0 <= alpha < _HALF_PI:
        raise ValueError("alpha must lie in [0, pi/2)")
    if r < 0.0:
        raise ValueError("r must be >= 0")
    if alpha == 0.0:
        return 0.0
    target = math.tan(alpha)
    if r == 0.0:
        return target

    def f(k):
        return avm_functionals(AvmPoint(k, r)).cal_t1 - target

    lo = target
    flo = f(lo)
    if flo > 0.0:
        raise BranchSolveError(
            f"bracket failure: cal_T_1({lo:g}, {r:g}) already above tan(alpha)",
            last_iterate=lo,
            residual=flo,
        )
    hi = max(2.0 * target, 1.0)
    for _ in range(200):
        if f(hi) > 0.0:
            break
        hi *= 2.0
    else:
        raise BranchSolveError(
            f"bracket failure: no sign change on [tan(alpha), {hi:g}]",
            last_iterate=hi,
        )
    k = brentq(f, lo, hi, xtol=1e-15, rtol=8.9e-16, maxiter=maxiter)
    res = abs(f(k))
    if res > tol:
        raise BranchSolveError(
            "inner solve residual above tolerance", last_iterate=k, residual=res
        )
    return float(k)


def mu_on_branch(alpha, r):
    """Coupling mu at which the branch for frustration alpha passes through r.

    mu = 1 / sqrt(cal_C_1^2 + cal_S_1^2) at (k(r), r); the positive
    modulus is used so that the alpha = 0 branch (where k = 0 and the
    signed cal_R_1 degenerates) reduces to mu = r I_0(r) / I_1(r).
    """
    r = float(r)
    if r == 0.0:
        return bifurcation_point(alpha)[0]
    k = solve_k_given_r(alpha, r)
    return 1.0 / branch_modulus(k, r)


def _assemble_point(mu, alpha, k, r):
    f = avm_functionals(AvmPoint(k, r))
    c = k / (2.0 * math.pi * f.c0)
    target_t = math.tan(alpha)
    res_series = max(
        abs(math.hypot(f.cal_c1, f.cal_s1) - 1.0 / abs(mu)),
        abs(f.cal_t1 - target_t),
    )
    q = functionals_by_quadrature(AvmPoint(k, r))
    res_quad = max(
        abs(math.hypot(q.cal_c1, q.cal_s1) - 1.0 / abs(mu)),
        abs(q.cal_t1 - target_t) if r != 0.0 else 0.0,
    )
    return BranchPoint(
        mu=float(mu),
        alpha=float(alpha),
        k=float(k),
        r=float(r),
        c=float(c),
        residual=max(res_series, res_quad),
    )


def solve_selfconsistency(mu, alpha, r_tol=1e-13):
    """Nontrivial branch point at (mu, alpha), or None when only incoherence exists.

    For alpha in [0, pi/2) a coherent solution exists iff
    mu > 2 sec(alpha); for alpha in (pi/2, pi] iff mu < 2 sec(alpha)
    (negative), obtained through the (mu, alpha) -> (-mu, pi - alpha)
    invariance with k -> -k.  alpha = pi/2 always returns None.
    """
    mu = float(mu)
    alpha = float(alpha)
    if not 0.0 <= alpha <= math.pi:
        raise ValueError("alpha must lie in [0, pi]")
    if abs(alpha - _HALF_PI) < 1e-14:
        return None
    if alpha > _HALF_PI:
        base = solve_selfconsistency(-mu, math.pi - alpha, r_tol=r_tol)
        if base is None:
            return None
        return BranchPoint(
            mu=mu,
            alpha=alpha,
            k=-base.k,
            r=base.r,
            c=-base.c,
            residual=base.residual,
        )

    mu_alpha = 2.0 / math.cos(alpha)
    if mu <= mu_alpha:
        return None

    def g(r):
        return mu_on_branch(alpha, r) - mu

    r_hi = 1.0
    for _ in range(200):
        if g(r_hi) > 0.0:
            break
        r_hi *= 2.0
    else:
        raise BranchSolveError("outer bracket expansion failed", last_iterate=r_hi)
    try:
        r = brentq(g, 0.0, r_hi, xtol=r_tol, rtol=8.9e-16, maxiter=200)
    except RuntimeError as exc:
        raise BranchSolveError(f"outer solve did not converge: {exc}") from exc
    k = solve_k_given_r(alpha, r) if r > 0.0 else math.tan(alpha)
    return _assemble_point(mu, alpha, k, r)


def trace_branch(alpha, r_max, n_points):
    """Sample the coherent branch on a uniform r-grid from 0 to r_max.

    The r = 0 entry is the closed-form onset point
    (mu, k) = (2 sec(alpha), tan(alpha)).  On a solver failure the curve
    computed so far is returned with ``failure_index`` set.
    """
    alpha = float(alpha)
    r_max = float(r_max)
    n_points = int(n_points)
    if not 0.0 <= alpha < _HALF_PI:
        raise ValueError("alpha must lie in [0, pi/2)")
    if r_max <= 0.0 or n_points < 2:
        raise ValueError("need r_max > 0 and n_points >= 2")
    grid = np.linspace(0.0, r_max, n_points)
    mu_alpha, k_onset = bifurcation_point(alpha)
    points = [
        BranchPoint(
            mu=mu_alpha,
            alpha=alpha,
            k=k_onset,
            r=0.0,
            c=k_onset / (2.0 * math.pi),
            residual=0.0,
        )
    ]
    curve = BranchCurve(alpha=alpha, points=points, r_step=float(grid[1] - grid[0]))
    for i, r in enumerate(grid[1:], start=1):
        try:
            k = solve_k_given_r(alpha, float(r))
            mu = 1.0 / branch_modulus(k, float(r))
            points.append(_assemble_point(mu, alpha, k, float(r)))
        except BranchSolveError:
            curve.failure_index = i
            return curve
    return curve


def stationary_vonmises(mu):
    """Stationary coherent state of the unfrustrated problem, if it exists.

    For mu > 2 returns (r, density) with r solving
    I_1(r)/(r I_0(r)) = 1/mu; the density is the von Mises profile
    e^{r cos phi} / (2 pi I_0(r)) (the k = 0 trace of the extended
    family).  Returns None at or below the onset mu = 2.
    """
    from .avm import avm_density

    mu = float(mu)
    if mu <= 2.0:
        return None

    def f(r):
        return branch_modulus(0.0, r) - 1.0 / mu

    r_hi = 1.0
    while f(r_hi) > 0.0:  # cal_C_1 decreasing: f > 0 until r passes the root
        r_hi *= 2.0
    r = brentq(f, 1e-12, r_hi, xtol=1e-14, rtol=8.9e-16, maxiter=200)
    return float(r), avm_density(AvmPoint(0.0, float(r)))
