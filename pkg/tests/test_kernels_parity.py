"""The compiled kernels and the numpy kernels must agree."""

import os
import subprocess
import sys

import numpy as np
import pytest

from rzspec import kernels

P = kernels.backend_module("python")
try:
    C = kernels.backend_module("cython")
except ImportError:  # extension not built
    C = None

needs_c = pytest.mark.skipif(C is None, reason="compiled kernels not built")


def _rel(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300)))


def _backend_in_subprocess(choice):
    env = dict(os.environ, RZSPEC_KERNELS=choice)
    code = "from rzspec import kernels; print(kernels.BACKEND)"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    return out.stdout.strip()


def test_backend_selection():
    assert _backend_in_subprocess("python") == "python"
    expected = "python" if C is None else "cython"
    assert _backend_in_subprocess("") == expected


@needs_c
def test_hypergeometric_parity():
    rng = np.random.default_rng(1)
    x = rng.normal(size=3000) * 3 + 1j * rng.normal(size=3000) * 3
    x = np.concatenate([x, np.linspace(-5, 6, 301) + 0j, [0j, -0.0j, 2 - 0.0j]])
    assert _rel(C.hyp2f1_16_56_1(x), P.hyp2f1_16_56_1(x)) < 1e-14
    omx = 1 - x
    assert _rel(C.hyp2f1_16_56_1(x, omx), P.hyp2f1_16_56_1(x, omx)) < 1e-14


@needs_c
def test_reduction_parity():
    rng = np.random.default_rng(2)
    tau = rng.uniform(-5, 5, 2000) + 1j * rng.uniform(1e-3, 3, 2000)
    rc, rp = C.reduce_tau(tau), P.reduce_tau(tau)
    assert np.max(np.abs(rc[0] - rp[0])) < 1e-12
    for a, b in zip(rc[1:], rp[1:]):
        assert np.array_equal(a, b)


@needs_c
def test_q_series_parity():
    tau = P.reduce_tau(np.array([0.1 + 1.2j, -0.5 + 0.87j, 0.3 + 4j]))[0]
    for a, b in zip(C.e4_e6_delta(tau), P.e4_e6_delta(tau)):
        assert _rel(a, b) < 1e-14


@needs_c
@pytest.mark.parametrize("nu", [14.134725141734693j, 0.5 + 21j, 1.2 - 3j, 0j, 2.5 + 100j])
def test_bessel_parity(nu):
    xs = np.linspace(0.5, 90, 120)
    assert _rel(C.bessel_k_trap(nu, xs), P.bessel_k_trap(nu, xs)) < 1e-12


@needs_c
def test_series_and_lattice_parity():
    from rzspec.eisenstein import fourier_bessel
    fb = fourier_bessel(complex(0.5, 14.134725141734693))
    tab = fb.table
    tau = P.reduce_tau(np.random.default_rng(3).uniform(-1, 1, 500) + 0.9j)[0]
    args = (tau, fb.coeffs, tab.x_lo, tab.width, tab.coeffs, tab.x_hi)
    assert _rel(C.cheb_fourier_sum(*args), P.cheb_fourier_sum(*args)) < 1e-13
    a = C.lattice_sum_half(2 + 1j, 0.3 + 1.1j, 120)
    b = P.lattice_sum_half(2 + 1j, 0.3 + 1.1j, 120)
    assert abs(a - b) < 1e-13 * abs(b)
