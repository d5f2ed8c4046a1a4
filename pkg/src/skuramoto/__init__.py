"""Mean-field toolkit for noisy phase oscillators with frustrated coupling.

The package is organized around the pipeline that takes the
Sakaguchi-Kuramoto interaction ``W(theta) = -cos(theta - alpha)`` from
microscopic Langevin dynamics to its mean-field phase diagram:

``bessel``
    Modified Bessel functions ``I_n(r)`` of the first kind (series and
    backward-recurrence evaluation, plus a quadrature oracle for tests).
``avm``
    The asymmetrically extended von Mises density ``chi_{k,r}`` /
    ``rho_{k,r}`` and its Fourier functionals ``C_n``, ``S_n`` together
    with the normalized forms used by the self-consistency system.
``consistency``
    Solvers for the two-equation self-consistency system, the pitchfork
    onset ``mu_alpha = 2 sec(alpha)``, and global branch tracing.
``meanfield``
    Fourier-Galerkin integrator for the McKean-Vlasov equation with
    order-parameter and wave-speed diagnostics.
``particles``
    Euler-Maruyama simulation of the interacting Langevin system with
    empirical order parameter and histogram densities.
``cli``
    Command-line front end writing reproducible CSV output.
"""

from .bessel import (
    BesselEvaluator,
    bessel_i,
    bessel_i_range,
    bessel_quadrature_oracle,
    default_n_max,
)
from .avm import (
    AvmDensity,
    AvmFunctionals,
    AvmPoint,
    avm_akp,
    avm_c0_series,
    avm_chi,
    avm_chi_ode_oracle,
    avm_cs_n,
    avm_density,
    avm_eta_sigma,
    avm_functionals,
    functionals_by_quadrature,
)
from .consistency import (
    BranchCurve,
    BranchPoint,
    NoBifurcationError,
    bifurcation_point,
    mu_on_branch,
    solve_k_given_r,
    solve_selfconsistency,
    stationary_vonmises,
    trace_branch,
)
from .meanfield import (
    Diagnostics,
    InstabilityError,
    MeanFieldParams,
    SpectralState,
    density_on_grid,
    evolve,
    l1_distance,
    order_parameter,
    rhs,
    state_from_density,
    state_from_wave,
    step,
    uniform_state,
    wave_speed_estimate,
)
from .particles import (
    EnsembleDiagnostics,
    ParticleEnsemble,
    ParticleParams,
    em_step,
    empirical_density,
    init_ensemble,
    pairwise_drift_reference,
    phase_drift_rate,
    simulate,
    time_averaged_order_parameter,
)

__version__ = "0.1.0"
