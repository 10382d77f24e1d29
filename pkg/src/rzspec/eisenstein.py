"""The real-analytic Eisenstein series and the Epstein zeta function of
the lattice Z + tau Z.

Two evaluation routes are provided:

* the lattice sum Z(s, tau) = sum' |m tau + n|^(-2s), valid for Re s > 1,
  summed over a box and corrected by the integral of the tail;
* the Fourier-Bessel expansion of the completed series
  E*(tau, s) = xi(2s) y^s + xi(2s-1) y^(1-s)
               + 4 sqrt(y) sum_{n>=1} n^(s-1/2) sigma_{1-2s}(n) K_{s-1/2}(2 pi n y) cos(2 pi n x),
  valid for every s away from the poles.

They are tied together by phi_s(tau) = y^s Z(s, tau) / zeta(2s) = 2 E*(tau, s) / xi(2s).
"""

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernels
from .errors import DegenerateParameterError, DivergenceError, DomainError, PoleError
from .lfunctions import CHI_M3, CHI_M4, dirichlet_l, xi_completed, zeta
from .modular import RHO, _reduce
from .special_functions import BesselKTable

TWO_PI = 2.0 * math.pi
SQRT3_2 = math.sqrt(3.0) / 2.0
# Smallest Bessel argument met on the fundamental domain is 2 pi sqrt(3)/2 = 5.441.
BESSEL_X_LO = 5.4
TERM_TOL = 1e-18

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(64)


@lru_cache(maxsize=None)
def _divisors(n):
    small = [d for d in range(1, int(math.isqrt(n)) + 1) if n % d == 0]
    return tuple(sorted(set(small + [n // d for d in small])))


def divisor_sigma_complex(n, a):
    """sigma_a(n) = sum of d**a over the divisors of n, for complex a."""
    a = complex(a)
    return sum(cmath.exp(a * math.log(d)) for d in _divisors(n))


def _check_s(s):
    s = complex(s)
    if s == 0.5:
        raise DegenerateParameterError("phi_s degenerates at s = 1/2")
    if s == 1.0 or s == 0.0:
        raise PoleError(f"phi_s has a pole at s = {s.real:g}")
    return s


class FourierBesselSeries:
    """Precomputed Fourier-Bessel expansion of E*(tau, s) for one s.

    Parameters
    ----------
    s : complex
        Spectral parameter, not 0, 1/2 or 1.
    term_tol : float
        Bessel terms smaller than ``term_tol * |xi(2s)|`` are dropped.

    Attributes
    ----------
    xi2s, xi2s1 : complex
        xi(2s) and xi(2s - 1).
    coeffs : ndarray
        n^(s-1/2) sigma_{1-2s}(n) for n = 1..N.
    table : BesselKTable
    """

    def __init__(self, s, term_tol=TERM_TOL):
        self.s = _check_s(s)
        self.xi2s = xi_completed(2.0 * self.s)
        self.xi2s1 = xi_completed(2.0 * self.s - 1.0)
        nu = self.s - 0.5
        self.table = BesselKTable(nu, term_tol * abs(self.xi2s), x_lo=BESSEL_X_LO)
        nterms = max(1, math.ceil(self.table.x_hi / (TWO_PI * SQRT3_2)))
        self.coeffs = np.array(
            [cmath.exp(nu * math.log(n)) * divisor_sigma_complex(n, 1.0 - 2.0 * self.s)
             for n in range(1, nterms + 1)], dtype=complex)

    def completed_reduced(self, tau_red):
        """E*(tau, s) at points already in the fundamental domain."""
        t = np.asarray(tau_red, dtype=complex)
        y = t.imag
        ly = np.log(y)
        const = self.xi2s * np.exp(self.s * ly) + self.xi2s1 * np.exp((1.0 - self.s) * ly)
        tab = self.table
        series = kernels.cheb_fourier_sum(t, self.coeffs, tab.x_lo, tab.width,
                                          tab.coeffs, tab.x_hi)
        return const + 4.0 * np.sqrt(y) * series

    def completed(self, tau):
        """E*(tau, s) at arbitrary tau in the upper half plane."""
        t = np.asarray(tau, dtype=complex)
        if np.any(~(t.imag > 0.0)):
            raise DomainError("tau must lie in the upper half plane")
        return self.completed_reduced(_reduce(t)[0])

    def phi(self, tau):
        """phi_s(tau) = 2 E*(tau, s) / xi(2s)."""
        return 2.0 * self.completed(tau) / self.xi2s

    def phi_normalized(self, tau):
        """phi_s rotated by the phase of xi(2s): 2 E* / |xi(2s)|.

        Real for s on the critical line.
        """
        return 2.0 * self.completed(tau) / abs(self.xi2s)

    def phi_normalized_reduced(self, tau_red):
        return 2.0 * self.completed_reduced(tau_red) / abs(self.xi2s)


@lru_cache(maxsize=32)
def fourier_bessel(s):
    """Cached FourierBesselSeries for s (built once per parameter)."""
    return FourierBesselSeries(s)


@dataclass(frozen=True)
class ReducedWave:
    """phi_s evaluated at one point."""

    s: complex
    tau: complex
    value: complex


def phi_s(s, tau):
    """Reduced eigenfunction phi_s(tau) = (Im tau)^s Z(s, tau) / zeta(2s).

    Evaluated through the Fourier-Bessel expansion, so every s other
    than 0, 1/2 and 1 is accepted.

    Raises
    ------
    DegenerateParameterError
        At s = 1/2.
    PoleError
        At s = 0 and s = 1.
    """
    series = fourier_bessel(complex(s))
    tau = complex(tau)
    return ReducedWave(series.s, tau, complex(series.phi(np.array([tau]))[0]))


def epstein_ratio(s, tau):
    """Z(s, tau) / zeta(2s) = phi_s(tau) / y^s, finite at the trivial zeros."""
    tau = complex(tau)
    val = phi_s(s, tau).value
    return val * cmath.exp(-complex(s) * math.log(tau.imag))


def epstein_zeta(s, tau):
    """Analytically continued Epstein zeta Z(s, tau)."""
    s = complex(s)
    return epstein_ratio(s, tau) * zeta(2.0 * s)


@dataclass(frozen=True)
class EpsteinValue:
    """Lattice-sum value of Z(s, tau) with an error estimate."""

    s: complex
    tau: complex
    value: complex
    error: float


def _tail(s, tau, edge):
    u = _GL_NODES
    a = np.abs(tau + u) ** 2
    b = np.abs(1.0 + u * tau) ** 2
    integral = np.sum(_GL_WEIGHTS * (np.exp(-s * np.log(a)) + np.exp(-s * np.log(b))))
    return cmath.exp((2.0 - 2.0 * s) * math.log(edge)) / (s - 1.0) * integral


def _box_sum(s, tau, radius):
    half = kernels.lattice_sum_half(s, tau, radius)
    return 2.0 * half + _tail(s, tau, radius + 0.5)


def epstein_bruteforce(s, tau, radius=400):
    """Z(s, tau) by direct summation over 0 < max(|m|, |n|) <= radius.

    The lattice outside the box is replaced by the integral over the
    region outside the square of half-side radius + 1/2.  The remaining
    error decays like radius^(-2 Re s) and is estimated from the sum at
    radius/2.

    Raises
    ------
    DivergenceError
        If Re s <= 1.
    DomainError
        If Re s <= 1.2, radius < 50 or Im tau <= 0.
    """
    s = complex(s)
    tau = complex(tau)
    if s.real <= 1.0:
        raise DivergenceError("the lattice sum converges only for Re s > 1")
    if s.real <= 1.2:
        raise DomainError("brute-force route needs Re s > 1.2")
    if radius < 50:
        raise DomainError("radius must be at least 50")
    if not tau.imag > 0.0:
        raise DomainError("tau must lie in the upper half plane")
    full = _box_sum(s, tau, radius)
    coarse = _box_sum(s, tau, radius // 2)
    est = 2.0 * abs(full - coarse) / (2.0 ** (2.0 * s.real) - 1.0)
    est += 1e-15 * radius * abs(full)
    return EpsteinValue(s, tau, full, est)


@dataclass(frozen=True)
class FactorizationRow:
    """One line of the boundary factorization report."""

    point: str
    lhs: complex
    rhs: complex
    gap: float


def boundary_factorization_check(s):
    """Compare Z(s, i) with 4 zeta(s) L(chi_-4, s) and Z(s, rho) with
    6 zeta(s) L(chi_-3, s), rho = exp(i pi/3).

    The left sides come from the Fourier-Bessel route, the right sides
    from the L-function kernels.  ``gap`` is |lhs - rhs| / max(|lhs|, |rhs|),
    or the absolute difference when both sides are below 1e-300.
    """
    s = complex(s)
    z = zeta(s)
    rows = []
    for label, tau, mult, chi in (("i", 1j, 4.0, CHI_M4), ("rho", RHO, 6.0, CHI_M3)):
        lhs = epstein_zeta(s, tau)
        rhs = mult * z * dirichlet_l(chi, s)
        scale = max(abs(lhs), abs(rhs))
        gap = abs(lhs - rhs) / scale if scale > 1e-300 else abs(lhs - rhs)
        rows.append(FactorizationRow(label, lhs, rhs, gap))
    return rows
