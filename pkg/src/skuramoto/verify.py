"""Self-check suites behind the ``verify`` CLI subcommand.

Each suite is a list of (name, callable) pairs; a check returns a detail
string on success and raises :class:`CheckFailure` (or any exception)
on failure.  Suites are sized to run in seconds; the heavyweight
end-to-end experiments live in the test suite instead.
"""

import math

import numpy as np

from . import bessel as bl
from .avm import (
    AvmPoint,
    avm_akp,
    avm_chi,
    avm_chi_ode_oracle,
    avm_cs_n,
    avm_density,
    avm_eta_sigma,
    avm_functionals,
    functionals_by_quadrature,
)
from .consistency import bifurcation_point, solve_selfconsistency, trace_branch
from .meanfield import MeanFieldParams, order_parameter, rhs, state_from_wave, uniform_state
from .particles import ParticleParams, init_ensemble, pairwise_drift_reference, simulate


class CheckFailure(AssertionError):
    pass


def _require(cond, detail):
    if not cond:
        raise CheckFailure(detail)
    return detail


def check_alternating_square_identity():
    worst = 0.0
    for r in (0.1, 1.0, 5.0):
        v = bl.bessel_i_range(bl.default_n_max(r), r).values
        signs = np.where(np.arange(1, v.size) % 2 == 0, 1.0, -1.0)
        res = abs(v[0] ** 2 + 2.0 * float(signs @ (v[1:] ** 2)) - 1.0)
        worst = max(worst, res)
    return _require(worst < 1e-12, f"max residual {worst:.2e}")


def check_recursion_in_order():
    worst = 0.0
    for r in (0.1, 1.0, 5.0, 10.0):
        v = bl.bessel_i_range(25, r).values
        for n in range(1, 21):
            worst = max(worst, abs(2 * n * v[n] - r * (v[n - 1] - v[n + 1])) / v[0])
    return _require(worst < 1e-12, f"max scaled residual {worst:.2e}")


def check_soni_ordering():
    for r in (0.5, 2.0, 8.0):
        v = bl.bessel_i_range(16, r).values
        _require(bool(np.all(v > 0.0)), f"positivity fails at r={r}")
        _require(bool(np.all(np.diff(v) < 0.0)), f"ordering fails at r={r}")
    return "strict on r in {0.5, 2, 8}, n 0..15"


def check_jacobi_anger():
    worst = 0.0
    for r in (0.5, 2.0, 5.0):
        v = bl.bessel_i_range(bl.default_n_max(r), r).values
        for phi in (0.0, 1.0, 2.5):
            s = v[0] + 2.0 * sum(v[n] * math.cos(n * phi) for n in range(1, v.size))
            worst = max(worst, abs(math.exp(r * math.cos(phi)) - s))
    return _require(worst < 1e-11, f"max pointwise error {worst:.2e}")


def check_bessel_oracle():
    worst = 0.0
    for r in (0.3, 1.0, 5.0):
        for n in range(0, 6):
            diff = abs(bl.bessel_i(n, r) - bl.bessel_quadrature_oracle(n, r))
            worst = max(worst, diff)
    return _require(worst < 1e-12, f"max |series - quadrature| {worst:.2e}")


def check_chi_against_ode_oracle():
    worst = 0.0
    for k, r in ((1.0, 1.0), (0.5, 2.0), (2.0, 0.7)):
        phi, chi_ode = avm_chi_ode_oracle(AvmPoint(k, r), 512)
        worst = max(worst, float(np.max(np.abs(chi_ode - avm_chi(AvmPoint(k, r), phi)))))
    return _require(worst < 1e-9, f"max pointwise gap {worst:.2e}")


def check_functionals_quadrature():
    worst = 0.0
    for k in (0.0, 1.0, 2.0):
        for r in (0.5, 1.0, 2.0):
            f = avm_functionals(AvmPoint(k, r))
            q = functionals_by_quadrature(AvmPoint(k, r))
            worst = max(worst, abs(f.c0 - q.c0), abs(f.c1 - q.c1), abs(f.s1 - q.s1))
    return _require(worst < 1e-10, f"max series/quadrature gap {worst:.2e}")


def check_s1_structure():
    worst = 0.0
    for k in (0.5, 1.0, 3.0):
        for r in (0.4, 1.0, 4.0):
            c0, _ = avm_cs_n(AvmPoint(k, r), 0)
            _, s1 = avm_cs_n(AvmPoint(k, r), 1)
            worst = max(worst, abs(s1 + (k / r) * (c0 - 1.0)))
    return _require(worst < 1e-12, f"max identity residual {worst:.2e}")


def check_akp_three_way():
    worst = 0.0
    for k in (0.0, 0.5, 1.0, 2.0):
        for p in (1, 4, 9):
            prod = avm_akp(k, p)
            fact2 = math.factorial(p) ** 2
            alt = sum(
                (-1) ** (n + 1) * (n * n / (n * n + k * k)) * math.comb(2 * p, p + n)
                for n in range(-p, p + 1)
                if n != 0
            ) / fact2
            eta, _ = avm_eta_sigma(k, p)
            pref = (k / math.sinh(k * math.pi)) if k != 0.0 else 1.0 / math.pi
            integ = 2.0 ** (2 * p - 1) / fact2 * pref * eta
            worst = max(worst, abs(alt - prod) / prod, abs(integ - prod) / prod)
    return _require(worst < 1e-10, f"max relative spread {worst:.2e}")


def check_vector_recursion():
    worst = 0.0
    for k, r in ((0.5, 0.5), (1.0, 1.0), (2.0, 3.0)):
        xs = {n: avm_cs_n(AvmPoint(k, r), n) for n in range(0, 12)}
        for n in range(1, 11):
            cn, sn = xs[n]
            cm, sm = xs[n - 1]
            cp, sp = xs[n + 1]
            e1 = k * cn + n * sn - 0.5 * r * (sm - sp)
            e2 = -n * cn + k * sn + 0.5 * r * (cm - cp)
            worst = max(worst, math.hypot(e1, e2))
    return _require(worst < 1e-10, f"max recursion residual {worst:.2e}")


def check_onset_values():
    worst_mu = 0.0
    worst_k = 0.0
    for alpha in (0.0, math.pi / 6, math.pi / 4, math.pi / 3):
        mu_a, k_a = bifurcation_point(alpha)
        curve = trace_branch(alpha, 1e-4, 2)
        end = curve.points[-1]
        worst_mu = max(worst_mu, abs(end.mu - mu_a) / abs(mu_a))
        worst_k = max(worst_k, abs(end.k - k_a))
    return _require(
        worst_mu < 1e-3 and worst_k < 1e-3,
        f"onset gaps: mu rel {worst_mu:.2e}, k abs {worst_k:.2e}",
    )


def check_branch_residual():
    bp = solve_selfconsistency(3.0, math.pi / 6)
    _require(bp is not None, "no branch point found at (3, pi/6)")
    _require(bp.residual < 1e-10, f"residual {bp.residual:.2e}")
    _require(bp.k > math.tan(math.pi / 6), "wave speed not above tan(alpha)")
    none = solve_selfconsistency(2.0, math.pi / 6)
    _require(none is None, "sub-onset coupling returned a coherent state")
    return f"residual {bp.residual:.2e}; sub-onset correctly incoherent"


def check_c_formula():
    bp = solve_selfconsistency(3.0, math.pi / 6)
    dens = avm_density(AvmPoint(bp.k, bp.r))
    m = 2048
    phi = -np.pi + 2.0 * np.pi * np.arange(m) / m
    rho = dens.pdf(phi)
    c_avg = (bp.r * float(np.sum(np.sin(phi) * rho)) * 2.0 * np.pi / m + bp.k) / (
        2.0 * np.pi
    )
    return _require(abs(c_avg - bp.c) < 1e-10, f"|c forms differ| = {abs(c_avg - bp.c):.2e}")


def check_traveling_frame_rhs():
    bp = solve_selfconsistency(3.0, math.pi / 6)
    params = MeanFieldParams(mu=3.0, alpha=math.pi / 6, D=1.0)
    st = state_from_wave(AvmPoint(bp.k, bp.r), params, 96)
    gap = np.max(
        np.abs(rhs(st) + 1j * np.arange(97) * bp.k * st.coeffs)
    )
    return _require(gap < 1e-8, f"max spectral gap {gap:.2e}")


def check_uniform_fixed_point():
    params = MeanFieldParams(mu=3.0, alpha=math.pi / 6, D=1.0)
    st = uniform_state(64, params)
    gap = float(np.max(np.abs(rhs(st))))
    r0, _ = order_parameter(st)
    return _require(gap == 0.0 and r0 == 0.0, f"rhs gap {gap:.2e}, r0 {r0:.2e}")


def check_mean_field_collapse():
    params = ParticleParams(mu=2.0, alpha=0.4, D=0.0, N=96)
    ens = init_ensemble(params, seed=5)
    ref = pairwise_drift_reference(ens.phases, params)
    cos_t = np.cos(ens.phases)
    sin_t = np.sin(ens.phases)
    zr, zi = float(np.mean(cos_t)), float(np.mean(sin_t))
    ca, sa = math.cos(params.alpha), math.sin(params.alpha)
    fast = params.mu * ((ca * zi + sa * zr) * cos_t - (ca * zr - sa * zi) * sin_t)
    gap = float(np.max(np.abs(fast - ref)))
    return _require(gap < 1e-12, f"O(N) vs O(N^2) drift gap {gap:.2e}")


def check_particle_determinism():
    params = ParticleParams(mu=3.0, alpha=math.pi / 6, D=1.0, N=512)
    d1 = simulate(init_ensemble(params, seed=9), T=1.0, dt=1e-3, observe_every=100)
    d2 = simulate(init_ensemble(params, seed=9), T=1.0, dt=1e-3, observe_every=100)
    same = np.array_equal(d1.R, d2.R) and np.array_equal(d1.Psi, d2.Psi)
    return _require(same, "repeat run with identical seed diverged")


SUITES = {
    "identities": [
        ("bessel/alternating-square-identity", check_alternating_square_identity),
        ("bessel/recursion-in-order", check_recursion_in_order),
        ("bessel/soni-ordering", check_soni_ordering),
        ("bessel/jacobi-anger", check_jacobi_anger),
        ("bessel/quadrature-oracle", check_bessel_oracle),
        ("avm/chi-vs-ode-oracle", check_chi_against_ode_oracle),
        ("avm/functionals-vs-quadrature", check_functionals_quadrature),
        ("avm/s1-structure", check_s1_structure),
        ("avm/akp-three-way", check_akp_three_way),
        ("avm/vector-recursion", check_vector_recursion),
    ],
    "branch": [
        ("branch/onset-values", check_onset_values),
        ("branch/residual-and-existence", check_branch_residual),
        ("branch/flux-constant-consistency", check_c_formula),
    ],
    "pde": [
        ("pde/uniform-fixed-point", check_uniform_fixed_point),
        ("pde/traveling-frame-rhs", check_traveling_frame_rhs),
    ],
    "particles": [
        ("particles/mean-field-collapse", check_mean_field_collapse),
        ("particles/determinism", check_particle_determinism),
    ],
}
SUITES["all"] = [item for name in ("identities", "branch", "pde", "particles") for item in SUITES[name]]


def run_suite(name):
    """Run a named suite; returns a list of (check_name, passed, detail)."""
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    results = []
    for check_name, fn in SUITES[name]:
        try:
            detail = fn()
            results.append((check_name, True, detail))
        except Exception as exc:  # report, never abort the table
            results.append((check_name, False, str(exc)))
    return results
