"""Wave functions psi(z) = phi_rho(tau(z)) / sqrt(V(z)) on the z plane.

The field is phase-normalised: phi_rho is rotated by the phase of
xi(2 rho), which makes it real for zeros on the critical line.  Grids are
computed in fixed blocks of rows so the result does not depend on how
many worker threads share the work.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares

from .eisenstein import fourier_bessel
from .errors import (DegenerateFitError, DomainError, InsufficientOscillationError,
                     ParseError, ResourceError, UnsupportedZeroError)
from .modular import reduced_chart

SAMPLE_CAP = 4_000_000
SINGULAR_RADIUS = 1e-9
ROWS_PER_BLOCK = 8


def worker_count(threads=None):
    """Threads to use: explicit value, else RZSPEC_THREADS, else all cores."""
    if threads is None:
        env = os.environ.get("RZSPEC_THREADS")
        if env:
            try:
                threads = int(env)
            except ValueError:
                raise DomainError(f"RZSPEC_THREADS must be a positive integer, got {env!r}") from None
        else:
            threads = os.cpu_count() or 1
    if threads < 1:
        raise DomainError("thread count must be positive")
    return threads


@dataclass
class GridField:
    """Samples of a complex field on a uniform rectangular z grid.

    ``values[j, i]`` belongs to x = xs[i], y = ys[j]; rows run upward
    from ymin.

    Attributes
    ----------
    zero_index : int
        n of the zero rho_n, or 0 for the potential V.
    rho : complex
        The zero itself (0 for the potential).
    mask : ndarray of bool
        Samples pinned to 0 because they sit on z = 0 or z = 1.
    """

    xmin: float
    xmax: float
    ymin: float
    ymax: float
    nx: int
    ny: int
    values: np.ndarray
    zero_index: int = 0
    rho: complex = 0j
    mask: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.nx < 2 or self.ny < 2:
            raise DomainError("a grid needs at least 2 samples per axis")
        if not (self.xmax > self.xmin and self.ymax > self.ymin):
            raise DomainError("window must have positive extent")
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (self.ny, self.nx):
            raise DomainError(f"values shape {self.values.shape} != ({self.ny}, {self.nx})")
        if self.mask is None:
            self.mask = np.zeros(self.values.shape, dtype=bool)

    @property
    def xs(self):
        return np.linspace(self.xmin, self.xmax, self.nx)

    @property
    def ys(self):
        return np.linspace(self.ymin, self.ymax, self.ny)

    @property
    def hx(self):
        return (self.xmax - self.xmin) / (self.nx - 1)

    @property
    def hy(self):
        return (self.ymax - self.ymin) / (self.ny - 1)

    @property
    def window(self):
        return (self.xmin, self.xmax, self.ymin, self.ymax)

    def z(self):
        """Complex sample coordinates with the same shape as values."""
        return self.xs[None, :] + 1j * self.ys[:, None]


def _psi_from_z(series, z):
    """Phase-normalised psi at an array of z (no masking)."""
    tau, v = reduced_chart(z)
    out = np.zeros(z.shape, dtype=complex)
    live = v > 0.0
    if live.any():
        phi = series.phi_normalized_reduced(tau[live])
        out[live] = phi / np.sqrt(v[live])
    return out


def psi_array(zero, z):
    """Phase-normalised psi_n at an array of z; exact 0 at z = 0, 1."""
    z = np.asarray(z, dtype=complex)
    near = (np.abs(z) < SINGULAR_RADIUS) | (np.abs(z - 1.0) < SINGULAR_RADIUS)
    out = np.zeros(z.shape, dtype=complex)
    if (~near).any():
        out[~near] = _psi_from_z(_series_for(zero), z[~near])
    return out


def _series_for(zero):
    _check_supported(zero)
    return fourier_bessel(zero.rho)


def _check_supported(zero):
    if zero.d_n != 0.0:
        raise UnsupportedZeroError(
            "zeros off the critical line have an ambiguous far-field law")


def psi_value(zero, z):
    """psi_n(z) = phi_rho(tau(z)) V(z)^(-1/2), phase-normalised.

    Returns exactly 0 at z = 0 and z = 1, where the field vanishes.
    """
    return complex(psi_array(zero, np.array([complex(z)]))[0])


def _row_blocks(ny):
    return [(j, min(j + ROWS_PER_BLOCK, ny)) for j in range(0, ny, ROWS_PER_BLOCK)]


def _evaluate_rows(fn, z, threads):
    """Apply fn to fixed row blocks of z; block layout never depends on threads."""
    out = np.empty(z.shape, dtype=complex)
    blocks = _row_blocks(z.shape[0])

    def work(block):
        j0, j1 = block
        out[j0:j1] = fn(z[j0:j1])

    if threads == 1 or len(blocks) == 1:
        for b in blocks:
            work(b)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, blocks))
    return out


def evaluate_grid(zero, window, nx, ny, threads=None, cap=SAMPLE_CAP):
    """Sample psi_n on a uniform grid.

    Parameters
    ----------
    zero : ZetaZero or None
        None samples the potential V instead (zero_index 0).
    window : tuple
        (xmin, xmax, ymin, ymax).
    nx, ny : int
        Samples along x and y, each at least 2.
    threads : int, optional
        Worker threads; defaults to RZSPEC_THREADS or the core count.

    Raises
    ------
    ResourceError
        If nx * ny exceeds ``cap``.
    """
    nx, ny = int(nx), int(ny)
    if nx * ny > cap:
        raise ResourceError(f"grid of {nx}x{ny} samples exceeds the cap of {cap}")
    xmin, xmax, ymin, ymax = (float(v) for v in window)
    probe = GridField(xmin, xmax, ymin, ymax, nx, ny, np.zeros((ny, nx), dtype=complex))
    z = probe.z()
    mask = (np.abs(z) < SINGULAR_RADIUS) | (np.abs(z - 1.0) < SINGULAR_RADIUS)
    threads = worker_count(threads)
    if zero is None:
        def fn(block):
            return reduced_chart(block)[1].astype(complex)
        index, rho = 0, 0j
    else:
        series = _series_for(zero)

        def fn(block):
            return _psi_from_z(series, block)
        index, rho = zero.index, zero.rho
    values = _evaluate_rows(fn, z, threads)
    values[mask] = 0.0
    return GridField(xmin, xmax, ymin, ymax, nx, ny, values, index, rho, mask)


# ---------------------------------------------------------------- CSV I/O

def _fmt(x):
    return "%.17g" % x


def grid_csv_text(grid):
    """Render a grid as CSV text: metadata comment, header, one row per sample."""
    rho = complex(grid.rho)
    lines = [
        "# zero_index=%d rho=%s%si window=%s,%s,%s,%s" % (
            grid.zero_index, _fmt(rho.real), ("+" if rho.imag >= 0 else "") + _fmt(rho.imag),
            _fmt(grid.xmin), _fmt(grid.xmax), _fmt(grid.ymin), _fmt(grid.ymax)),
        "x,y,re,im,abs2",
    ]
    xs, ys = grid.xs, grid.ys
    vals = grid.values
    for j in range(grid.ny):
        y = _fmt(ys[j])
        row = vals[j]
        for i in range(grid.nx):
            v = row[i]
            lines.append(",".join((_fmt(xs[i]), y, _fmt(v.real), _fmt(v.imag),
                                   _fmt(v.real * v.real + v.imag * v.imag))))
    return "\n".join(lines) + "\n"


def read_grid_csv(path):
    """Load a grid written by grid_csv_text."""
    with open(path, "r", encoding="ascii") as fh:
        meta = fh.readline().strip()
        header = fh.readline().strip()
        if not meta.startswith("#") or header != "x,y,re,im,abs2":
            raise ParseError("not a grid file", line=1)
        fields = dict(tok.split("=", 1) for tok in meta[1:].split())
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    xmin, xmax, ymin, ymax = (float(v) for v in fields["window"].split(","))
    rho = complex(fields["rho"].replace("i", "j").replace("+-", "-"))
    xs = np.unique(data[:, 0])
    ys = np.unique(data[:, 1])
    nx, ny = len(xs), len(ys)
    values = (data[:, 2] + 1j * data[:, 3]).reshape(ny, nx)
    return GridField(xmin, xmax, ymin, ymax, nx, ny, values, int(fields["zero_index"]), rho)


# ------------------------------------------------------- local expansion

@dataclass(frozen=True)
class LocalExpansionFit:
    """Fit of phi(i + eta) on a small circle.

    Attributes
    ----------
    alpha : complex
        Mean of the eta^2 and conj(eta)^2 coefficients.
    residual_fraction : float
        Share of the squared signal not explained by alpha (eta^2 + conj(eta)^2).
    coef_eta2, coef_etabar2 : complex
        The two quadratic coefficients fitted separately.
    """

    alpha: complex
    residual_fraction: float
    circle_radius: float
    coef_eta2: complex
    coef_etabar2: complex


def fit_local_expansion(zero, radius, phi=None, samples=64):
    """Least-squares fit of phi(i + eta) on the circle |eta| = radius.

    The basis holds eta^k and conj(eta)^k for k = 1, 2, 3, which are the
    Fourier modes +-1, +-2, +-3 on the circle.

    Parameters
    ----------
    zero : ZetaZero or None
        Selects the phase-normalised phi_rho; ignored when ``phi`` is given.
    radius : float
        In [1e-3, 5e-2].
    phi : callable, optional
        Replacement field, called with an array of tau.

    Raises
    ------
    DegenerateFitError
        If the design matrix is rank deficient.
    """
    if not 1e-3 <= radius <= 5e-2:
        raise DomainError("radius must lie in [1e-3, 5e-2]")
    theta = 2.0 * math.pi * np.arange(samples) / samples
    eta = radius * np.exp(1j * theta)
    if phi is None:
        phi = _series_for(zero).phi_normalized
    vals = np.asarray(phi(1j + eta), dtype=complex)
    cols = [eta, eta.conj(), eta ** 2, eta.conj() ** 2, eta ** 3, eta.conj() ** 3]
    design = np.stack(cols, axis=1)
    coef, _, rank, _ = np.linalg.lstsq(design, vals, rcond=None)
    if rank < design.shape[1]:
        raise DegenerateFitError("local expansion design matrix is rank deficient")
    c2, cb2 = coef[2], coef[3]
    alpha = 0.5 * (c2 + cb2)
    lead = alpha * (eta ** 2 + eta.conj() ** 2)
    total = float(np.sum(np.abs(vals) ** 2))
    if total == 0.0:
        raise DegenerateFitError("field vanishes on the whole circle")
    frac = float(np.sum(np.abs(vals - lead) ** 2)) / total
    return LocalExpansionFit(complex(alpha), frac, float(radius), complex(c2), complex(cb2))


# ------------------------------------------------------------ far field

@dataclass(frozen=True)
class AsymptoticFit:
    """Fit of psi along a ray to A r^p L^(-1/2) cos(omega log(L / 2 pi) - phase),
    with L = log(1728 r).

    Attributes
    ----------
    slope : float
        p, the power of r in the envelope.
    omega_est : float
    amplitude, phase : float
        Fitted constants of the oscillation.
    d_n_assumed : float
    nodes : int
        Sign changes seen in the sampled range.
    """

    slope: float
    omega_est: float
    d_n_assumed: float
    amplitude: float
    phase: float
    nodes: int


def fit_asymptotics(zero, ray_angle=0.5 * math.pi, r_range=(1e2, 1e6), samples=400):
    """Fit the far-field law of psi_n along z = r exp(i ray_angle).

    Raises
    ------
    UnsupportedZeroError
        For zeros off the critical line.
    InsufficientOscillationError
        If fewer than two nodes fall inside r_range.
    """
    _check_supported(zero)
    r0, r1 = (float(v) for v in r_range)
    if not (1e2 <= r0 < r1 <= 1e6):
        raise DomainError("r_range must lie within [1e2, 1e6]")
    r = np.geomspace(r0, r1, samples)
    psi = psi_array(zero, r * np.exp(1j * ray_angle)).real
    big_l = np.log(1728.0 * r)
    u = np.log(big_l / (2.0 * math.pi))
    scaled = psi * r * np.sqrt(big_l)
    sign = np.signbit(scaled)
    idx = np.nonzero(sign[1:] != sign[:-1])[0]
    if len(idx) < 2:
        raise InsufficientOscillationError(
            f"{len(idx)} node(s) in r range [{r0:g}, {r1:g}]; need at least 2")
    cross = u[idx] - scaled[idx] * (u[idx + 1] - u[idx]) / (scaled[idx + 1] - scaled[idx])
    omega0 = math.pi * (len(cross) - 1) / (cross[-1] - cross[0])
    lr = np.log(r)

    def model(p):
        amp, slope, omega, phase = p
        return amp * np.exp((slope + 1.0) * (lr - lr[0])) * np.cos(omega * u - phase)

    # linear fit of the amplitude/phase for the starting point
    basis = np.stack([np.cos(omega0 * u), np.sin(omega0 * u)], axis=1)
    (ca, cb), *_ = np.linalg.lstsq(basis, scaled, rcond=None)
    p0 = [math.hypot(ca, cb), -1.0, omega0, math.atan2(cb, ca)]
    res = least_squares(lambda p: model(p) - scaled, p0, method="lm",
                        x_scale=[abs(p0[0]) or 1.0, 0.1, 1.0, 1.0])
    amp, slope, omega, phase = res.x
    if amp < 0:
        amp, phase = -amp, phase + math.pi
    return AsymptoticFit(float(slope), float(omega), 0.0, float(amp),
                         float(math.remainder(phase, 2.0 * math.pi)), int(len(idx)))


def disk_mass_profile(zero, radii, r_min=1e-3, angular=256, radial=48):
    """Cumulative integral of |psi_n|^2 over the disks |z| < R.

    Polar quadrature: trapezoid in angle (periodic, spectrally accurate)
    and Gauss-Legendre in log r on each interval between consecutive
    radii.  The disk |z| < r_min is omitted; psi is bounded there.
    """
    radii = np.asarray(sorted(float(r) for r in radii))
    if radii[0] <= r_min:
        raise DomainError("radii must exceed r_min")
    series = _series_for(zero)
    edges = np.concatenate([[r_min], radii])
    gx, gw = np.polynomial.legendre.leggauss(radial)
    theta = 2.0 * math.pi * np.arange(angular) / angular
    ring = np.exp(1j * theta)
    masses = []
    acc = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        # split long intervals into decades
        cuts = np.unique(np.concatenate([[a, b], 10.0 ** np.arange(
            math.ceil(math.log10(a)), math.floor(math.log10(b)) + 1)]))
        cuts = cuts[(cuts >= a) & (cuts <= b)]
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            la, lb = math.log(lo), math.log(hi)
            lr = 0.5 * (lb - la) * gx + 0.5 * (lb + la)
            rr = np.exp(lr)
            z = rr[:, None] * ring[None, :]
            dens = np.abs(_psi_from_z(series, z)) ** 2
            # dA = r dr dtheta = r^2 dlog r dtheta
            inner = dens.mean(axis=1) * 2.0 * math.pi * rr * rr
            acc += 0.5 * (lb - la) * float(np.dot(gw, inner))
        masses.append(acc)
    return radii, np.array(masses)
