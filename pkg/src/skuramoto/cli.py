"""Command-line front end: every computation as a subcommand with CSV output.

Output format: `# key=value` metadata lines (enough to reproduce the run)
followed by a header row and data rows.  Angles are radians; the
``--alpha-deg`` convenience flag converts on input.  Exit codes:
0 success, 1 usage error, 2 numerical failure, 3 verification failure.
"""

import argparse
import math
import sys

import numpy as np

from . import __version__
from . import bessel as bl
from .avm import AvmPoint, avm_chi, avm_density, avm_functionals
from .consistency import (
    BranchSolveError,
    NoBifurcationError,
    solve_selfconsistency,
    trace_branch,
)
from .meanfield import (
    InstabilityError,
    MeanFieldParams,
    cosine_perturbed_state,
    evolve,
)
from .particles import ParticleParams, empirical_density, init_ensemble, simulate
from .verify import run_suite

USAGE_ERROR, NUMERICAL_ERROR, VERIFY_ERROR = 1, 2, 3


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad flags; the contract wants 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        sys.exit(USAGE_ERROR)


def _emit(stream, meta, header, rows):
    for key, value in meta.items():
        stream.write(f"# {key}={value}\n")
    stream.write(",".join(header) + "\n")
    for row in rows:
        stream.write(",".join(_fmt(x) for x in row) + "\n")


def _fmt(x):
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _open_output(path):
    if path is None:
        return sys.stdout, False
    return open(path, "w"), True


def _resolve_alpha(args):
    if getattr(args, "alpha_deg", None) is not None:
        return math.radians(args.alpha_deg)
    if args.alpha is None:
        raise ValueError("one of --alpha / --alpha-deg is required")
    return args.alpha


def _add_alpha(p):
    p.add_argument("--alpha", type=float, default=None, help="frustration angle (radians)")
    p.add_argument("--alpha-deg", type=float, default=None, help="frustration angle (degrees)")


def cmd_bessel(args, stream):
    meta = {"tool": "skuramoto", "version": __version__, "command": "bessel", "r": args.r}
    if args.n_max is not None:
        ev = bl.bessel_i_range(args.n_max, args.r)
        # fold the full decayed tail so the printed residual reflects the
        # identity rather than the user's truncation
        full = bl.bessel_i_range(max(args.n_max, bl.default_n_max(args.r)), args.r)
        signs = np.where(np.arange(1, full.values.size) % 2 == 0, 1.0, -1.0)
        residual = abs(
            full.values[0] ** 2 + 2.0 * float(signs @ (full.values[1:] ** 2)) - 1.0
        )
        meta["n_max"] = args.n_max
        meta["alternating_square_identity_residual"] = repr(float(residual))
        _emit(stream, meta, ["n", "I_n"], [(n, float(v)) for n, v in enumerate(ev.values)])
    elif args.n is not None:
        meta["n"] = args.n
        _emit(stream, meta, ["n", "I_n"], [(args.n, bl.bessel_i(args.n, args.r))])
    else:
        raise ValueError("one of --n / --n-max is required")


def cmd_avm(args, stream):
    point = AvmPoint(args.k, args.r)
    f = avm_functionals(point)
    meta = {
        "tool": "skuramoto",
        "version": __version__,
        "command": "avm",
        "k": args.k,
        "r": args.r,
    }
    if args.grid is None:
        _emit(
            stream,
            meta,
            ["k", "r", "c0", "c1", "s1", "cal_c1", "cal_s1", "cal_t1", "cal_r1"],
            [(args.k, args.r, f.c0, f.c1, f.s1, f.cal_c1, f.cal_s1, f.cal_t1, f.cal_r1)],
        )
        return
    meta["grid"] = args.grid
    meta["c0"] = repr(f.c0)
    meta["cal_t1"] = repr(f.cal_t1)
    dens = avm_density(point)
    phi = -np.pi + 2.0 * np.pi * np.arange(args.grid) / args.grid
    chi = avm_chi(point, phi)
    rho = chi / dens.normalization
    _emit(stream, meta, ["phi", "chi", "rho"], list(zip(phi.tolist(), chi.tolist(), rho.tolist())))


def cmd_solve(args, stream):
    alpha = _resolve_alpha(args)
    meta = {
        "tool": "skuramoto",
        "version": __version__,
        "command": "solve",
        "mu": args.mu,
        "alpha": alpha,
    }
    bp = solve_selfconsistency(args.mu, alpha)
    if bp is None:
        meta["solution"] = "incoherent only"
        _emit(stream, meta, ["r", "k", "mu", "c", "residual"], [])
        return
    _emit(
        stream,
        meta,
        ["r", "k", "mu", "c", "residual"],
        [(bp.r, bp.k, bp.mu, bp.c, bp.residual)],
    )


def cmd_trace(args, stream):
    alpha = _resolve_alpha(args)
    meta = {
        "tool": "skuramoto",
        "version": __version__,
        "command": "trace",
        "alpha": alpha,
        "r_max": args.r_max,
        "n_points": args.n_points,
    }
    curve = trace_branch(alpha, args.r_max, args.n_points)
    if curve.failure_index is not None:
        meta["failure_index"] = curve.failure_index
    rows = [(p.r, p.k, p.mu, p.c, p.residual) for p in curve.points]
    _emit(stream, meta, ["r", "k", "mu", "c", "residual"], rows)


def cmd_pde(args, stream):
    alpha = _resolve_alpha(args)
    params = MeanFieldParams(mu=args.mu, alpha=alpha, D=args.D)
    meta = {
        "tool": "skuramoto",
        "version": __version__,
        "command": "pde",
        "mu": args.mu,
        "alpha": alpha,
        "D": args.D,
        "n_modes": args.n_modes,
        "T": args.T,
        "dt": args.dt,
        "eps": args.eps,
        "observe_every": args.observe_every,
    }
    state = cosine_perturbed_state(args.n_modes, params, eps=args.eps)
    diag, final = evolve(state, args.T, args.dt, observe_every=args.observe_every)
    # trailing-window speed estimate per row; undefined early on
    speeds = np.full(diag.t.size, math.nan)
    phase = np.unwrap(diag.psi)
    for i in range(2, diag.t.size):
        j = max(0, i // 2)
        if np.min(diag.r0[j : i + 1]) > 1e-12:
            speeds[i] = float(np.polyfit(diag.t[j : i + 1], phase[j : i + 1], 1)[0])
    rows = list(zip(diag.t.tolist(), diag.r0.tolist(), diag.psi.tolist(), speeds.tolist()))
    _emit(stream, meta, ["t", "r0", "psi", "speed_est"], rows)
    if args.dump_state is not None:
        with open(args.dump_state, "w") as fh:
            fh.write("n, re, im\n")
            for n, cval in enumerate(final.coeffs):
                fh.write(f"{n}, {cval.real!r}, {cval.imag!r}\n")


def cmd_particles(args, stream):
    alpha = _resolve_alpha(args)
    params = ParticleParams(mu=args.mu, alpha=alpha, D=args.D, N=args.N)
    meta = {
        "tool": "skuramoto",
        "version": __version__,
        "command": "particles",
        "mu": args.mu,
        "alpha": alpha,
        "D": args.D,
        "N": args.N,
        "T": args.T,
        "dt": args.dt,
        "seed": args.seed,
        "observe_every": args.observe_every,
        "bins": args.bins,
        "rng": "numpy PCG64",
    }
    ens = init_ensemble(params, seed=args.seed)
    diag = simulate(ens, args.T, args.dt, observe_every=args.observe_every, n_bins=args.bins)
    rows = list(zip(diag.t.tolist(), diag.R.tolist(), diag.Psi.tolist()))
    _emit(stream, meta, ["t", "R", "Psi"], rows)
    if args.histogram is not None:
        centers, density = empirical_density(diag)
        with open(args.histogram, "w") as fh:
            _emit(fh, meta | {"output": "histogram"}, ["bin_center", "density"],
                  list(zip(centers.tolist(), density.tolist())))


def cmd_verify(args, stream):
    results = run_suite(args.suite)
    width = max(len(name) for name, _, _ in results)
    failures = 0
    for name, passed, detail in results:
        tag = "pass" if passed else "FAIL"
        stream.write(f"[{tag}] {name:<{width}}  {detail}\n")
        failures += 0 if passed else 1
    stream.write(f"{len(results) - failures}/{len(results)} checks passed\n")
    if failures:
        sys.exit(VERIFY_ERROR)


def build_parser():
    parser = _Parser(prog="skuramoto", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bessel", help="modified Bessel function values")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--n-max", type=int, default=None)
    p.add_argument("--r", type=float, required=True)

    p = sub.add_parser("avm", help="extended von Mises density and functionals")
    p.add_argument("--k", type=float, required=True)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--grid", type=int, default=None, help="emit density rows on this grid")

    p = sub.add_parser("solve", help="self-consistency solution at (mu, alpha)")
    p.add_argument("--mu", type=float, required=True)
    _add_alpha(p)

    p = sub.add_parser("trace", help="trace the coherent branch over r")
    _add_alpha(p)
    p.add_argument("--r-max", type=float, required=True)
    p.add_argument("-n", "--n-points", type=int, required=True)

    p = sub.add_parser("pde", help="mean-field spectral simulation")
    p.add_argument("--mu", type=float, required=True)
    _add_alpha(p)
    p.add_argument("--D", type=float, default=1.0)
    p.add_argument("--n-modes", type=int, default=128)
    p.add_argument("--T", type=float, default=50.0)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--eps", type=float, default=0.05)
    p.add_argument("--observe-every", type=int, default=100)
    p.add_argument("--dump-state", default=None, help="write final coefficients to this file")

    p = sub.add_parser("particles", help="Langevin particle simulation")
    p.add_argument("--mu", type=float, required=True)
    _add_alpha(p)
    p.add_argument("--D", type=float, default=1.0)
    p.add_argument("--N", type=int, default=50_000)
    p.add_argument("--T", type=float, default=50.0)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--observe-every", type=int, default=100)
    p.add_argument("--bins", type=int, default=64)
    p.add_argument("--histogram", default=None, help="write histogram CSV to this file")

    p = sub.add_parser("verify", help="run a self-check suite")
    p.add_argument("--suite", default="all",
                   choices=["identities", "branch", "pde", "particles", "all"])

    for name in ("bessel", "avm", "solve", "trace", "pde", "particles", "verify"):
        sub.choices[name].add_argument("-o", "--output", default=None,
                                       help="write to this file instead of stdout")
    return parser


_HANDLERS = {
    "bessel": cmd_bessel,
    "avm": cmd_avm,
    "solve": cmd_solve,
    "trace": cmd_trace,
    "pde": cmd_pde,
    "particles": cmd_particles,
    "verify": cmd_verify,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    stream, close = _open_output(args.output)
    try:
        _HANDLERS[args.command](args, stream)
    except SystemExit:
        raise
    except (ValueError, OverflowError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        sys.exit(USAGE_ERROR if "required" in str(exc) else NUMERICAL_ERROR)
    except (BranchSolveError, InstabilityError, NoBifurcationError, RuntimeError) as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        sys.exit(NUMERICAL_ERROR)
    finally:
        if close:
            stream.close()
    return 0


if __name__ == "__main__":
    sys.exit(main())
