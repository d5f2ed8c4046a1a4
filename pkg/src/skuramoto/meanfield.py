"""Fourier-Galerkin integrator for the mean-field oscillator density.

The density rho(t, theta) on the circle evolves by

    d(rho)/dt = D d2(rho)/dtheta2 + mu d/dtheta ( rho d/dtheta (W * rho) ),

with the one-mode frustrated potential W(theta) = -cos(theta - alpha).

Fourier convention (fixed once, used everywhere):

    rho(theta) = sum_n rho_hat_n exp(i n theta),
    rho_hat_n = (1/2pi) int rho exp(-i n theta) dtheta.

Only n >= 0 is stored; rho_hat_{-n} = conj(rho_hat_n) holds by
construction and rho_hat_0 = 1/(2pi) is conserved exactly (its time
derivative vanishes mode-wise).  Because W carries a single harmonic,
the convolution has modes +-1 only, (W*rho)_{+-1} = -pi e^{-+ i alpha}
rho_hat_{+-1}, and the nonlinear term couples each mode to its two
neighbors in closed form:

    d rho_hat_n / dt = -D n^2 rho_hat_n
        + mu pi n ( e^{-i alpha} rho_hat_1 rho_hat_{n-1}
                  - e^{+i alpha} conj(rho_hat_1) rho_hat_{n+1} ).

Time stepping is integrating-factor RK4 (diffusion propagated exactly by
exp(-D n^2 dt), the mode-coupling term by classical RK4), which removes
the stiff n^2 restriction on dt.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from .avm import AvmPoint, avm_cs_n, avm_functionals

TWO_PI = 2.0 * math.pi


class InstabilityError(RuntimeError):
    """Spectral coefficients blew up; integrate with a smaller dt."""


@dataclass(frozen=True)
class MeanFieldParams:
    mu: float
    alpha: float
    D: float = 1.0


@dataclass(frozen=True)
class SpectralState:
    """Truncated Fourier representation of the density at time t.

    ``coeffs[n]`` is rho_hat_n for n = 0 .. n_modes; negative modes are
    implied by conjugate symmetry.
    """

    n_modes: int
    coeffs: np.ndarray
    t: float
    params: MeanFieldParams


def uniform_state(n_modes, params):
    """The incoherent state rho = 1/(2pi)."""
    c = np.zeros(n_modes + 1, dtype=complex)
    c[0] = 1.0 / TWO_PI
    return SpectralState(n_modes=n_modes, coeffs=c, t=0.0, params=params)


def cosine_perturbed_state(n_modes, params, eps=0.05):
    """Uniform state plus eps*cos(theta): excites exactly the unstable mode."""
    c = np.zeros(n_modes + 1, dtype=complex)
    c[0] = 1.0 / TWO_PI
    c[1] = 0.5 * eps
    return SpectralState(n_modes=n_modes, coeffs=c, t=0.0, params=params)


def state_from_density(values, params):
    """Project density samples on a uniform grid onto n_modes = len(values)//2 - 1.

    ``values[j]`` are rho(theta_j) at theta_j = -pi + 2 pi j / m.
    """
    values = np.asarray(values, dtype=float)
    m = values.size
    n_modes = m // 2 - 1
    fft = np.fft.fft(values) / m
    n = np.arange(n_modes + 1)
    # grid starts at -pi, not 0: undo the phase offset e^{-i n (-pi)}
    coeffs = fft[: n_modes + 1] * np.where(n % 2 == 0, 1.0, -1.0)
    coeffs[0] = coeffs[0].real
    return SpectralState(n_modes=n_modes, coeffs=coeffs, t=0.0, params=params)


def state_from_wave(point, params, n_modes, shift=0.0):
    """Spectral state of the traveling-wave profile rho_{k,r}(theta - shift).

    Coefficients come in closed form from the Fourier functionals:
    rho_hat_n = (C_n - i S_n) / (2 pi C_0), rotated by e^{-i n shift}.
    """
    c0 = avm_functionals(point).c0
    coeffs = np.zeros(n_modes + 1, dtype=complex)
    for n in range(n_modes + 1):
        cn, sn = avm_cs_n(point, n)
        coeffs[n] = (cn - 1j * sn) / (TWO_PI * c0)
    coeffs *= np.exp(-1j * np.arange(n_modes + 1) * shift)
    coeffs[0] = 1.0 / TWO_PI
    return SpectralState(n_modes=n_modes, coeffs=coeffs, t=0.0, params=params)


def _nonlinear(coeffs, n_idx, mu, alpha):
    """Mode-coupling part of the right-hand side (the mu term)."""
    c1 = coeffs[1]
    lower = np.empty_like(coeffs)
    lower[1:] = coeffs[:-1]
    lower[0] = np.conj(coeffs[1])  # unused: the n = 0 derivative is zeroed below
    upper = np.empty_like(coeffs)
    upper[:-1] = coeffs[1:]
    upper[-1] = 0.0
    out = mu * math.pi * n_idx * (
        np.exp(-1j * alpha) * c1 * lower - np.exp(1j * alpha) * np.conj(c1) * upper
    )
    out[0] = 0.0
    return out


def rhs(state):
    """Time derivative of the stored coefficients."""
    n = np.arange(state.n_modes + 1, dtype=float)
    p = state.params
    return -p.D * n * n * state.coeffs + _nonlinear(state.coeffs, n, p.mu, p.alpha)


def _if_rk4(coeffs, n_idx, params, dt, decay_full, decay_half):
    """One integrating-factor RK4 step on the coefficient array."""
    mu, alpha = params.mu, params.alpha
    a = _nonlinear(coeffs, n_idx, mu, alpha)
    b = _nonlinear(decay_half * (coeffs + 0.5 * dt * a), n_idx, mu, alpha)
    c = _nonlinear(decay_half * coeffs + 0.5 * dt * b, n_idx, mu, alpha)
    d = _nonlinear(decay_full * coeffs + dt * decay_half * c, n_idx, mu, alpha)
    return decay_full * coeffs + (dt / 6.0) * (
        decay_full * a + 2.0 * decay_half * (b + c) + d
    )


def step(state, dt):
    """Advance one time step; conserves rho_hat_0 and conjugate symmetry exactly."""
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    n = np.arange(state.n_modes + 1, dtype=float)
    decay_full = np.exp(-state.params.D * n * n * dt)
    decay_half = np.exp(-state.params.D * n * n * (0.5 * dt))
    new = _if_rk4(state.coeffs, n, state.params, dt, decay_full, decay_half)
    if np.any(np.abs(new) > 1e6):
        raise InstabilityError(
            f"coefficient magnitude exceeded 1e6 at t = {state.t + dt:g}; reduce dt"
        )
    return replace(state, coeffs=new, t=state.t + dt)


@dataclass
class Diagnostics:
    """Order-parameter time series recorded during a run."""

    t: np.ndarray
    r0: np.ndarray
    psi: np.ndarray
    params: MeanFieldParams


def order_parameter(state):
    """(r_0, psi) with r_0 e^{i psi} = <e^{i theta}>_rho = 2 pi conj(rho_hat_1).

    psi is returned as 0 by convention when r_0 vanishes (the mean phase
    is undefined there).
    """
    z = TWO_PI * np.conj(state.coeffs[1])
    r0 = abs(z)
    psi = math.atan2(z.imag, z.real) if r0 > 1e-14 else 0.0
    return float(r0), float(psi)


def evolve(initial, T, dt, observe_every=10):
    """Integrate for time T, recording diagnostics every observe_every steps.

    Returns (Diagnostics, final_state).  Deterministic: identical inputs
    produce identical output arrays.
    """
    if T <= 0.0:
        raise ValueError("T must be positive")
    n_steps = int(round(T / dt))
    n = np.arange(initial.n_modes + 1, dtype=float)
    p = initial.params
    decay_full = np.exp(-p.D * n * n * dt)
    decay_half = np.exp(-p.D * n * n * (0.5 * dt))
    coeffs = initial.coeffs.copy()
    t = initial.t
    times, r0s, psis = [], [], []

    def record():
        st = SpectralState(initial.n_modes, coeffs, t, p)
        r0, psi = order_parameter(st)
        times.append(t)
        r0s.append(r0)
        psis.append(psi)

    record()
    for i in range(1, n_steps + 1):
        coeffs = _if_rk4(coeffs, n, p, dt, decay_full, decay_half)
        t = initial.t + i * dt
        if np.any(np.abs(coeffs) > 1e6):
            raise InstabilityError(
                f"coefficient magnitude exceeded 1e6 at t = {t:g}; reduce dt"
            )
        if i % observe_every == 0 or i == n_steps:
            record()
    diag = Diagnostics(
        t=np.array(times), r0=np.array(r0s), psi=np.array(psis), params=p
    )
    return diag, SpectralState(initial.n_modes, coeffs, t, p)


def wave_speed_estimate(diag, window):
    """Least-squares slope of the unwrapped mean phase over (t0, t1).

    Raises ValueError when the window is degenerate (fewer than two
    samples, or r_0 indistinguishable from zero so the phase carries no
    signal).
    """
    t0, t1 = window
    mask = (diag.t >= t0) & (diag.t <= t1)
    if np.count_nonzero(mask) < 2:
        raise ValueError("window contains fewer than two samples")
    if np.min(diag.r0[mask]) < 1e-12:
        raise ValueError("order parameter vanishes on the window; speed undefined")
    phase = np.unwrap(diag.psi[mask])
    coeff = np.polyfit(diag.t[mask], phase, 1)
    return float(coeff[0])


def density_on_grid(state, m=2048):
    """Reconstruct rho on theta_j = -pi + 2 pi j / m from the stored modes."""
    theta = -np.pi + TWO_PI * np.arange(m) / m
    n = np.arange(1, state.n_modes + 1)
    phases = np.exp(1j * np.outer(n, theta))
    values = state.coeffs[0].real + 2.0 * np.real(state.coeffs[1:] @ phases)
    return theta, values


def l1_distance(state, reference, m=2048):
    """L1 distance between the reconstructed density and a reference callable."""
    theta, values = density_on_grid(state, m)
    ref = reference(theta)
    return float(np.sum(np.abs(values - ref)) * TWO_PI / m)


def reference_wave_density(point, alpha, psi):
    """Density theta -> rho_{k,r}(theta - psi - alpha) aligned with mean phase psi.

    A converged mean-field run with order-parameter phase psi sits on the
    traveling-wave profile in exactly this alignment.
    """
    from .avm import avm_density

    dens = avm_density(point)

    def ref(theta):
        phi = np.mod(theta - psi - alpha + np.pi, TWO_PI) - np.pi
        return dens.pdf(phi)

    return ref
