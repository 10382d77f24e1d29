"""Command-line interface.

Every command writes its files atomically (temporary file in the target
directory, then rename) and produces byte-identical output for identical
inputs, whatever the thread count.

Exit status: 0 success, 1 a verification exceeded its tolerance, 2 usage
or input error, 3 numeric-kernel error.
"""

import argparse
import json
import math
import os
import sys
import tempfile

import numpy as np

from . import __version__
from .eisenstein import boundary_factorization_check
from .errors import (DomainError, KernelError, OrderingError, ParseError, ResourceError,
                     RZSpecError, SearchExhaustedError)
from .lfunctions import find_zeros, ingest_zeros, zero_by_index
from .nodal import (classify_nodal_scenario, detect_cross_at_i, extract_nodal_lines,
                    flux_integral, operator_residual)
from .wavefield import SAMPLE_CAP, evaluate_grid, fit_asymptotics, grid_csv_text

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_KERNEL = 3

# Fixed 256-entry gray ramp; level k is drawn as (k, k, k).
PALETTE = np.repeat(np.arange(256, dtype=np.uint8)[:, None], 3, axis=1)


class UsageError(Exception):
    """Invalid command-line input detected after argument parsing."""


# ------------------------------------------------------------- output

def atomic_write(path, data):
    """Write bytes or text to ``path`` through a temporary file and rename."""
    if isinstance(data, str):
        data = data.encode("ascii")
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".rzspec-", dir=directory)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _ppm_levels(values, mode):
    """Map field values to palette indices 0..255."""
    v = np.asarray(values, dtype=complex)
    if mode == "log-abs2":
        a2 = v.real * v.real + v.imag * v.imag
        data = np.full(a2.shape, -np.inf)
        pos = a2 > 0.0
        data[pos] = np.log10(a2[pos])
    elif mode == "linear":
        data = v.real.copy()
    else:
        raise ValueError(f"unknown PPM mode {mode!r}")
    finite = np.isfinite(data)
    if not finite.any():
        return np.full(data.shape, 128, dtype=np.uint8)
    lo, hi = np.percentile(data[finite], [1.0, 99.0])
    # -inf (exact zeros in log mode) takes the darkest level
    data = np.where(finite, data, lo)
    if not hi > lo:
        return np.full(data.shape, 128, dtype=np.uint8)
    t = (np.clip(data, lo, hi) - lo) / (hi - lo)
    return np.floor(t * 255.0 + 0.5).astype(np.uint8)


def emit_ppm(field, mode, path):
    """Write a binary PPM (P6) rendering of a grid.

    Parameters
    ----------
    field : GridField
    mode : {"log-abs2", "linear"}
        log10 |value|^2 or the real part.  Values are clipped to their
        1st..99th percentiles; a constant field maps to mid-palette.
    path : str
        Destination; row 0 of the image is y = ymax.
    """
    levels = _ppm_levels(field.values, mode)[::-1]
    ny, nx = levels.shape
    header = b"P6\n%d %d\n255\n" % (nx, ny)
    atomic_write(path, header + PALETTE[levels].tobytes())


def _fmt(x):
    return "%.17g" % x


def _to_json(obj):
    """JSON text with floats at 17 significant digits."""
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return "null"
        return _fmt(x)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(k)}: {_to_json(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_to_json(v) for v in obj) + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _emit(text):
    sys.stdout.write(text + "\n")


# ------------------------------------------------------------- parsing

def parse_complex(text):
    """Parse '2', '1.5+0.7i' or '0.5+14.1j' into a complex number."""
    t = text.strip().replace(" ", "").replace("i", "j")
    try:
        return complex(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def parse_window(text):
    """Parse 'xmin,xmax,ymin,ymax'."""
    parts = text.split(",")
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("window needs four comma-separated numbers")
    try:
        xmin, xmax, ymin, ymax = (float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad window {text!r}") from None
    if not all(math.isfinite(v) for v in (xmin, xmax, ymin, ymax)):
        raise argparse.ArgumentTypeError("window bounds must be finite")
    if not (xmax > xmin and ymax > ymin):
        raise argparse.ArgumentTypeError("window must have xmax > xmin and ymax > ymin")
    return xmin, xmax, ymin, ymax


def positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def positive_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (v > 0.0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError("must be a positive number")
    return v


def _check_grid(nx, ny):
    if nx < 2 or ny < 2:
        raise UsageError("--nx and --ny must be at least 2")
    if nx * ny > SAMPLE_CAP:
        raise UsageError(f"grid of {nx}x{ny} exceeds the cap of {SAMPLE_CAP} samples")


def _select_zero(args):
    try:
        if args.zeros_file is not None:
            zeros = ingest_zeros(args.zeros_file)
            return zero_by_index(args.zero_index, zeros)
        return zero_by_index(args.zero_index)
    except DomainError as exc:
        raise UsageError(str(exc)) from None


# ------------------------------------------------------------ commands

def cmd_zeros(args):
    zeros = find_zeros(args.count)
    text = "".join("%.12f\n" % z.gamma_n for z in zeros)
    if args.out:
        atomic_write(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _write_grid(grid, args, mode):
    _check_grid(args.nx, args.ny)
    if args.out:
        atomic_write(args.out, grid_csv_text(grid))
    if args.ppm:
        emit_ppm(grid, mode, args.ppm)


def cmd_potential(args):
    _check_grid(args.nx, args.ny)
    grid = evaluate_grid(None, args.window, args.nx, args.ny)
    _write_grid(grid, args, args.mode)
    return EXIT_OK


def cmd_wave(args):
    _check_grid(args.nx, args.ny)
    zero = _select_zero(args)
    grid = evaluate_grid(zero, args.window, args.nx, args.ny)
    _write_grid(grid, args, args.mode)
    return EXIT_OK


def cmd_nodal(args):
    _check_grid(args.nx, args.ny)
    zero = _select_zero(args)
    grid = evaluate_grid(zero, args.window, args.nx, args.ny)
    lines = extract_nodal_lines(grid, tolerance=args.tolerance)
    scenario = classify_nodal_scenario(lines)
    loops = []
    ok = scenario.label != "other"
    for loop in scenario.loops:
        rep = flux_integral(loop, grid)
        ok = ok and rep.im_e_bound <= args.flux_tol
        loops.append({"endpoints_on": list(loop.endpoints_on), "flux": rep.flux,
                      "mass": rep.mass, "im_e_bound": rep.im_e_bound})
    cross = detect_cross_at_i(zero, args.cross_radius)
    doc = {
        "zero_index": zero.index,
        "rho": [zero.rho.real, zero.rho.imag],
        "window": list(grid.window),
        "nx": grid.nx,
        "ny": grid.ny,
        "scenario": scenario.label,
        "diagnostics": scenario.diagnostics,
        "loops": loops,
        "cross": {"radius": cross.radius, "angles_deg": list(cross.angles),
                  "verdict": cross.verdict},
        "lines": [{"closed": ln.closed, "endpoints_on": list(ln.endpoints_on),
                   "points": [[p.real, p.imag] for p in ln.points]} for ln in lines],
    }
    atomic_write(args.out, _to_json(doc) + "\n")
    if args.ppm:
        emit_ppm(grid, "log-abs2", args.ppm)
    _emit(f"zero {zero.index}: {scenario.label}, {len(lines)} lines, "
          f"{len(loops)} loops, cross {'yes' if cross.verdict else 'no'}")
    for item in loops:
        _emit("  loop %s-%s flux=%.3e mass=%.6g im_e_bound=%.3e" % (
            item["endpoints_on"][0], item["endpoints_on"][1],
            item["flux"], item["mass"], item["im_e_bound"]))
    return EXIT_OK if ok else EXIT_FAILED


def cmd_verify_identities(args):
    rows = boundary_factorization_check(args.s)
    _emit(f"s = {args.s.real:g}{args.s.imag:+g}i")
    _emit("%-5s %-44s %-44s %s" % ("tau", "Z(s,tau)", "factorised", "gap"))
    ok = True
    for row in rows:
        _emit("%-5s %-44s %-44s %.3e" % (row.point, _cfmt(row.lhs), _cfmt(row.rhs), row.gap))
        ok = ok and row.gap <= args.tol
    return EXIT_OK if ok else EXIT_FAILED


def _cfmt(z):
    return "%.17g%+.17gi" % (z.real, z.imag)


def cmd_verify_residual(args):
    zero = _select_zero(args)
    xmin, xmax, ymin, ymax = args.window
    reports = []
    for h in (2.0 * args.h, args.h):
        nx = int(round((xmax - xmin) / h)) + 1
        ny = int(round((ymax - ymin) / h)) + 1
        _check_grid(nx, ny)
        grid = evaluate_grid(zero, (xmin, xmin + (nx - 1) * h, ymin, ymin + (ny - 1) * h),
                             nx, ny)
        reports.append(operator_residual(zero, grid))
    coarse, fine = reports
    factor = coarse.median_rel_residual / fine.median_rel_residual \
        if fine.median_rel_residual > 0 else math.inf
    _emit("zero %d: median residual %.3e at h=%g, %.3e at h=%g, factor %.2f" % (
        zero.index, fine.median_rel_residual, fine.grid_spacing,
        coarse.median_rel_residual, coarse.grid_spacing, factor))
    ok = fine.median_rel_residual <= args.tol and factor >= args.min_factor
    return EXIT_OK if ok else EXIT_FAILED


def cmd_asymptotics(args):
    zero = _select_zero(args)
    fit = fit_asymptotics(zero, math.radians(args.angle), (args.rmin, args.rmax))
    rel = abs(fit.omega_est - zero.gamma_n) / zero.gamma_n
    _emit("zero %d: slope %.5f, omega %.5f (gamma %.5f, rel %.2e), %d nodes" % (
        zero.index, fit.slope, fit.omega_est, zero.gamma_n, rel, fit.nodes))
    ok = abs(fit.slope + 1.0) <= args.slope_tol and rel <= args.omega_tol
    return EXIT_OK if ok else EXIT_FAILED


# -------------------------------------------------------------- parser

def _add_zero_flags(p):
    p.add_argument("--zero-index", type=positive_int, default=1,
                   help="index n of the zeta zero (default 1)")
    p.add_argument("--zeros-file", default=None,
                   help="read zeros from this file instead of searching")


def _add_grid_flags(p, window, n):
    p.add_argument("--window", type=parse_window, default=window,
                   help="xmin,xmax,ymin,ymax (default %s)" % ",".join("%g" % v for v in window))
    p.add_argument("--nx", type=positive_int, default=n, help=f"samples along x (default {n})")
    p.add_argument("--ny", type=positive_int, default=n, help=f"samples along y (default {n})")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="rzspec",
        description="Scattering states of the modular-potential Hamiltonian.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("zeros", help="locate zeta zeros on the critical line")
    p.add_argument("--count", type=positive_int, default=10, help="number of zeros (default 10)")
    p.add_argument("--out", default=None, help="zeros file (default: standard output)")
    p.set_defaults(func=cmd_zeros)

    p = sub.add_parser("potential", help="sample the potential V on a grid")
    _add_grid_flags(p, (-2.0, 3.0, -2.0, 2.0), 500)
    p.add_argument("--out", default=None, help="CSV output")
    p.add_argument("--ppm", default=None, help="PPM heatmap output")
    p.add_argument("--mode", choices=("log-abs2", "linear"), default="log-abs2",
                   help="heatmap scale (default log-abs2)")
    p.set_defaults(func=cmd_potential)

    p = sub.add_parser("wave", help="sample the wave function psi_n on a grid")
    _add_zero_flags(p)
    _add_grid_flags(p, (-1.0, 2.0, -1.5, 1.5), 301)
    p.add_argument("--out", default=None, help="CSV output")
    p.add_argument("--ppm", default=None, help="PPM heatmap output")
    p.add_argument("--mode", choices=("log-abs2", "linear"), default="log-abs2",
                   help="heatmap scale (default log-abs2)")
    p.set_defaults(func=cmd_wave)

    p = sub.add_parser("nodal", help="extract nodal lines, classify them, check the flux")
    _add_zero_flags(p)
    _add_grid_flags(p, (-2.0, 3.0, -2.0, 2.0), 401)
    p.add_argument("--out", required=True, help="JSON output")
    p.add_argument("--ppm", default=None, help="PPM heatmap output (log-abs2)")
    p.add_argument("--tolerance", type=positive_float, default=None,
                   help="nodal value tolerance (default 1e-6 of the field maximum)")
    p.add_argument("--flux-tol", type=positive_float, default=1e-3,
                   help="largest accepted |Im E| bound per loop (default 1e-3)")
    p.add_argument("--cross-radius", type=positive_float, default=1e-2,
                   help="circle radius around tau = i for the cross test (default 1e-2)")
    p.set_defaults(func=cmd_nodal)

    p = sub.add_parser("verify-identities",
                       help="compare the Epstein zeta with its L-function factorisations")
    p.add_argument("--s", type=parse_complex, default=complex(2.0),
                   help="spectral parameter, e.g. 2 or 1.5+0.7i (default 2)")
    p.add_argument("--tol", type=positive_float, default=1e-8,
                   help="largest accepted relative gap (default 1e-8)")
    p.set_defaults(func=cmd_verify_identities)

    p = sub.add_parser("verify-residual",
                       help="finite-difference residual of H psi = E psi")
    _add_zero_flags(p)
    p.add_argument("--window", type=parse_window, default=(0.2, 0.8, 0.5, 1.1),
                   help="xmin,xmax,ymin,ymax (default 0.2,0.8,0.5,1.1)")
    p.add_argument("--h", type=positive_float, default=0.004,
                   help="grid spacing (default 0.004); 2h is run for the convergence factor")
    p.add_argument("--tol", type=positive_float, default=1e-2,
                   help="largest accepted median relative residual (default 1e-2)")
    p.add_argument("--min-factor", type=positive_float, default=3.0,
                   help="smallest accepted residual ratio between 2h and h (default 3)")
    p.set_defaults(func=cmd_verify_residual)

    p = sub.add_parser("asymptotics", help="fit the far-field law along a ray")
    _add_zero_flags(p)
    p.add_argument("--angle", type=float, default=90.0, help="ray angle in degrees (default 90)")
    p.add_argument("--rmin", type=positive_float, default=1e2, help="inner radius (default 1e2)")
    p.add_argument("--rmax", type=positive_float, default=1e6, help="outer radius (default 1e6)")
    p.add_argument("--slope-tol", type=positive_float, default=0.05,
                   help="accepted |slope + 1| (default 0.05)")
    p.add_argument("--omega-tol", type=positive_float, default=0.02,
                   help="accepted relative error of omega (default 0.02)")
    p.set_defaults(func=cmd_asymptotics)
    return parser


def _diagnose(exc):
    msg = " ".join(str(exc).split()) or type(exc).__name__
    sys.stderr.write(f"rzspec: error: {msg}\n")


def _join_window(argv):
    # "--window -2,3,-2,2" would otherwise be read as an unknown option
    out = []
    it = iter(argv)
    for tok in it:
        if tok == "--window":
            nxt = next(it, None)
            out.append(tok if nxt is None else f"--window={nxt}")
        else:
            out.append(tok)
    return out


def main(argv=None):
    """Entry point; returns the exit status."""
    parser = build_parser()
    args = parser.parse_args(_join_window(sys.argv[1:] if argv is None else list(argv)))
    try:
        return args.func(args)
    except (UsageError, OSError) as exc:
        _diagnose(exc)
        return EXIT_USAGE
    except KernelError as exc:
        _diagnose(exc)
        return EXIT_KERNEL
    except RZSpecError as exc:
        _diagnose(exc)
        # malformed inputs are usage errors; analysis failures are failed checks
        usage = (ParseError, OrderingError, ResourceError, SearchExhaustedError)
        return EXIT_USAGE if isinstance(exc, usage) else EXIT_FAILED
    except (ArithmeticError, FloatingPointError) as exc:
        _diagnose(exc)
        return EXIT_KERNEL


if __name__ == "__main__":
    sys.exit(main())
