import cmath
import math

import numpy as np
import pytest

from rzspec import kernels
from rzspec.eisenstein import (FourierBesselSeries, boundary_factorization_check,
                               divisor_sigma_complex, epstein_bruteforce, epstein_ratio,
                               epstein_zeta, phi_s)
from rzspec.errors import DegenerateParameterError, DivergenceError, DomainError, PoleError
from rzspec.lfunctions import CHI_M3, CHI_M4, dirichlet_l, zeta
from rzspec.modular import RHO

RHO1 = complex(0.5, 14.134725141734693)
RHO2 = complex(0.5, 21.022039638771555)


def test_divisor_sigma():
    assert divisor_sigma_complex(6, 1) == pytest.approx(12)
    assert divisor_sigma_complex(12, 0) == pytest.approx(6)
    assert divisor_sigma_complex(1, 3 + 2j) == 1


# ----------------------------------------------------------- brute force

def test_bruteforce_square_lattice():
    val = epstein_bruteforce(2, 1j)
    assert abs(val.value - 6.0268120396919) < 1e-9
    assert val.error <= 1e-6


def test_bruteforce_hexagonal_lattice():
    val = epstein_bruteforce(2, RHO)
    ref = 6 * zeta(2) * dirichlet_l(CHI_M3, 2)
    assert abs(val.value - ref) < 1e-9 * abs(ref)


def test_bruteforce_certified_anchor():
    val = epstein_bruteforce(3, 1 / 3 + 2j, radius=800)
    assert val.error <= 1e-8
    cont = epstein_zeta(3, 1 / 3 + 2j)
    assert abs(val.value - cont) <= max(val.error, 1e-12 * abs(cont))


def test_bruteforce_error_estimate_is_honest():
    ref = epstein_bruteforce(2.5 + 1j, 0.2 + 1.1j, radius=800).value
    val = epstein_bruteforce(2.5 + 1j, 0.2 + 1.1j, radius=100)
    assert abs(val.value - ref) <= val.error


def test_bruteforce_limits():
    with pytest.raises(DivergenceError):
        epstein_bruteforce(1.0, 1j)
    with pytest.raises(DomainError):
        epstein_bruteforce(1.1, 1j)
    with pytest.raises(DomainError):
        epstein_bruteforce(2, 1j, radius=10)


def test_half_lattice_doubling_is_exact():
    s, tau, radius = 1.7 + 0.4j, 0.3 + 0.9j, 20
    m, n = np.meshgrid(np.arange(-radius, radius + 1), np.arange(-radius, radius + 1))
    w = (m * tau + n).ravel()
    w = w[w != 0]
    full = np.sum(np.exp(-s * np.log(np.abs(w) ** 2)))
    half = kernels.lattice_sum_half(s, tau, radius)
    assert abs(full - 2 * half) < 1e-13 * abs(full)


# ----------------------------------------------------- continuation route

def test_phi_matches_bruteforce():
    tau = 1j + 0.3
    brute = epstein_bruteforce(2, tau).value
    expect = tau.imag ** 2 * brute / zeta(4)
    assert abs(phi_s(2, tau).value - expect) < 1e-6 * abs(expect)


@pytest.mark.parametrize("seed", range(2))
def test_continuation_random_pairs(seed):
    rng = np.random.default_rng(seed)
    for _ in range(4):
        s = complex(rng.uniform(1.5, 3.0), rng.uniform(-10, 10))
        tau = complex(rng.uniform(-2, 2), rng.uniform(0.3, 2.5))
        brute = epstein_bruteforce(s, tau, radius=400)
        cont = epstein_zeta(s, tau)
        assert abs(cont - brute.value) < 1e-8 * abs(brute.value)


def test_phi_boundary_condition_at_zero():
    # phi_rho vanishes at i and rho, relative to its size nearby
    scale = max(abs(phi_s(RHO1, 1j + 0.2 * cmath.exp(1j * t)).value)
                for t in np.linspace(0, 2 * math.pi, 8, endpoint=False))
    assert abs(phi_s(RHO1, 1j).value) <= 1e-6 * scale
    assert abs(phi_s(RHO1, RHO).value) <= 1e-6 * scale


def test_phi_modular_invariance():
    rng = np.random.default_rng(4)
    tau0 = 0.21 + 1.37j
    ref = phi_s(RHO1, tau0).value
    for _ in range(6):
        a, b = rng.integers(-5, 6, size=2)
        while math.gcd(int(a), int(b)) != 1:
            a, b = rng.integers(-5, 6, size=2)
        # complete (a b; c d) with ad - bc = 1
        g, x, y = _egcd(int(a), int(b))
        c, d = -y, x
        tau = (a * tau0 + b) / (c * tau0 + d)
        assert abs(phi_s(RHO1, tau).value - ref) < 1e-8 * abs(ref)


def _egcd(a, b):
    if b == 0:
        return (a, 1, 0) if a >= 0 else (-a, -1, 0)
    g, x, y = _egcd(b, a % b)
    return g, y, x - (a // b) * y


def test_phi_is_hyperbolic_eigenfunction():
    s = RHO2
    series = FourierBesselSeries(s)
    tau = 0.13 + 1.41j
    h = 1e-3
    f = series.phi
    lap = (f(tau + h) + f(tau - h) + f(tau + 1j * h) + f(tau - 1j * h) - 4 * f(tau)) / h ** 2
    assert abs(-tau.imag ** 2 * lap - s * (1 - s) * f(tau)) < 1e-4 * abs(s * (1 - s) * f(tau))


def test_phi_normalized_real_on_critical_line():
    series = FourierBesselSeries(RHO1)
    taus = np.array([0.1 + 1.2j, -0.4 + 0.95j, 0.3 + 3j])
    vals = series.phi_normalized(taus)
    assert np.max(np.abs(vals.imag)) < 1e-12 * np.max(np.abs(vals))


def test_phi_parameter_errors():
    with pytest.raises(DegenerateParameterError):
        phi_s(0.5, 1j)
    with pytest.raises(PoleError):
        phi_s(1, 1j)
    with pytest.raises(PoleError):
        phi_s(0, 1j)
    with pytest.raises(DomainError):
        FourierBesselSeries(2).completed(np.array([0.3 - 1j]))


def test_trivial_zero_ratios_finite():
    for s0 in (-1, -2, -3):
        for d in (1e-6, -1e-6):
            for tau in (1j, RHO):
                assert abs(epstein_ratio(s0 + d, tau)) <= 1e6


def test_epstein_square_lattice_identity_left_half_plane():
    s = -1.3 + 2j
    ref = 4 * zeta(s) * dirichlet_l(CHI_M4, s)
    assert abs(epstein_zeta(s, 1j) - ref) < 1e-9 * abs(ref)


# -------------------------------------------------------- factorisation

def test_factorization_real_s():
    for row in boundary_factorization_check(2):
        assert row.gap <= 1e-8


def test_factorization_complex_s():
    for row in boundary_factorization_check(1.5 + 0.7j):
        assert row.gap <= 1e-7


@pytest.mark.parametrize("rho", [RHO1, RHO2])
def test_factorization_vanishes_at_zeros(rho):
    for row in boundary_factorization_check(rho):
        assert abs(row.lhs) <= 1e-6 and abs(row.rhs) <= 1e-6
