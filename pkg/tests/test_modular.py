import math
import time

import numpy as np
import pytest

from rzspec.errors import DomainError, SingularInputError
from rzspec.modular import (RHO, dz_dtau, eisenstein_e4_e6, fundamental_reduce, potential_v,
                            potential_v_hypergeometric, reduced_chart, tau_of_z, tau_of_z_raw,
                            tau_prime, z_of_tau)


def _random_fd(rng, n):
    """Points of the standard fundamental domain, Im tau up to 3."""
    out = []
    while len(out) < n:
        t = complex(rng.uniform(-0.5, 0.5), rng.uniform(0.8, 3.0))
        if abs(t) >= 1.0:
            out.append(t)
    return np.array(out)


def _lattice_e4(tau, radius=400):
    # E4 = G4 / (2 zeta(4)) with G4 = sum' (m tau + n)^-4
    m = np.arange(-radius, radius + 1)
    total = 0j
    for mm in m:
        w = mm * tau + m
        if mm == 0:
            w = w[m != 0]
        total += np.sum(w ** -4.0)
    # lattice outside the box replaced by the integral over the region
    # max(|m|, |n|) > L, L = radius + 1/2, done in closed form
    big_l = radius + 0.5
    edge = (-((tau + 1) ** -3 - (tau - 1) ** -3) / 3
            - ((1 + tau) ** -3 - (1 - tau) ** -3) / (3 * tau))
    total += edge / big_l ** 2
    return total / (2 * math.pi ** 4 / 90)


# ------------------------------------------------------------- reduction

def test_reduce_translation():
    red = fundamental_reduce(1j + 5)
    assert red.tau_reduced == 1j
    assert red.matrix == ((1, -5), (0, 1))
    assert red.word == ("T^-1",) * 5


def test_reduce_identity():
    red = fundamental_reduce(0.2 + 1.5j)
    assert red.matrix == ((1, 0), (0, 1)) and red.word == ()


def test_reduce_small_point():
    tau = 0.4 + 0.1j
    red = fundamental_reduce(tau)
    t = red.tau_reduced
    assert abs(t.real) <= 0.5 and abs(t) >= 1 - 1e-14
    assert abs(red.apply(tau) - t) < 1e-12
    (a, b), (c, d) = red.matrix
    assert a * d - b * c == 1
    # exhaustive search over short words finds nothing with larger Im
    best = max((g(tau) for g in _short_words(4)), key=lambda v: v.imag)
    assert best.imag <= t.imag + 1e-12


def _short_words(depth):
    ops = [lambda z: z + 1, lambda z: z - 1, lambda z: -1 / z]
    words = [lambda z: z]
    frontier = list(words)
    for _ in range(depth):
        nxt = []
        for w in frontier:
            for op in ops:
                nxt.append(lambda z, w=w, op=op: op(w(z)))
        words.extend(nxt)
        frontier = nxt
    return words


def test_reduce_step_bound():
    tau = 17.3 + 1e-3j
    red = fundamental_reduce(tau)
    bound = 10 * (1 + math.log2(1 / tau.imag) + abs(tau.real))
    assert len(red.word) <= bound


def test_reduce_domain():
    with pytest.raises(DomainError):
        fundamental_reduce(0.3 - 1j)


# ------------------------------------------------------------ forms, z(tau)

def test_e6_vanishes_at_i_and_e4_at_rho():
    e4, e6 = eisenstein_e4_e6(1j)
    assert abs(e6) < 1e-12
    e4, e6 = eisenstein_e4_e6(RHO)
    assert abs(e4) < 1e-12


def test_e4_against_lattice_sum():
    assert abs(eisenstein_e4_e6(2j)[0] - _lattice_e4(2j)) < 1e-8


def test_forms_have_weight():
    tau = 0.1 + 1.3j
    e4, e6 = eisenstein_e4_e6(tau)
    f4, f6 = eisenstein_e4_e6(-1 / tau)
    assert abs(f4 - tau ** 4 * e4) < 1e-12 * abs(f4)
    assert abs(f6 - tau ** 6 * e6) < 1e-12 * abs(f6)


def test_z_anchors():
    assert abs(z_of_tau(1j)) < 1e-10
    assert abs(z_of_tau(RHO) - 1) < 1e-10
    assert abs(z_of_tau(2j) - (1 - 287496 / 1728)) < 1e-10


def test_z_is_modular_invariant():
    rng = np.random.default_rng(2)
    for t in _random_fd(rng, 10):
        for g in (lambda z: z + 3, lambda z: -1 / z, lambda z: (2 * z + 1) / (z + 1)):
            assert abs(z_of_tau(g(t)) - z_of_tau(t)) < 1e-9 * max(1, abs(z_of_tau(t)))


def test_roundtrip_random_points():
    rng = np.random.default_rng(0)
    taus = _random_fd(rng, 100)
    start = time.perf_counter()
    back = tau_of_z(z_of_tau(taus))
    assert time.perf_counter() - start < 10
    assert np.max(np.abs(back - taus)) < 1e-8


def test_z_roundtrip_from_z_side():
    rng = np.random.default_rng(5)
    z = rng.normal(size=200) * 3 + 1j * rng.normal(size=200) * 3
    assert np.max(np.abs(z_of_tau(tau_of_z(z)) - z) / np.abs(z)) < 1e-8


# -------------------------------------------------------------- tau(z)

def test_tau_near_zero_tends_to_i():
    for t in (1e-4, 1e-8, 1e-12):
        assert abs(tau_of_z(-t) - 1j) < 10 * math.sqrt(t)


def test_tau_at_half_on_unit_circle():
    assert abs(abs(tau_of_z(0.5)) - 1) < 1e-13


def test_tau_inverts_two_i():
    assert abs(tau_of_z(-165.375) - 2j) < 1e-12


def test_tau_singular_points():
    for z in (0, 1):
        with pytest.raises(SingularInputError):
            tau_of_z(z)


def test_tau_prime_matches_difference():
    for z in (0.3 + 0.8j, -2 + 0.5j, 4 - 3j):
        h = 1e-6
        fd = (tau_of_z_raw(z + h) - tau_of_z_raw(z - h)) / (2 * h)
        assert abs(tau_prime(z) - fd) < 1e-6 * abs(fd)


# ----------------------------------------------------------- dz/dtau

def test_dz_vanishes_at_elliptic_points():
    assert abs(dz_dtau(1j)) < 1e-10
    assert abs(dz_dtau(RHO)) < 1e-10


def test_dz_matches_difference():
    for tau in (1 / 3 + 2j, 0.1 + 1.1j, 2.7 + 0.4j):
        h = 1e-5
        fd = (z_of_tau(tau + h) - z_of_tau(tau - h)) / (2 * h)
        assert abs(dz_dtau(tau) - fd) < 1e-6 * abs(fd)


def test_dz_chain_rule_with_tau_prime():
    z = 0.7 - 1.9j
    assert abs(dz_dtau(tau_of_z_raw(z)) * tau_prime(z) - 1) < 1e-12


# ---------------------------------------------------------- potential

def test_potential_wells():
    assert potential_v(0).v == 0 and potential_v(1).v == 0
    assert potential_v(0.5).v > 0


def test_potential_two_routes():
    z = 0.5 + 3j
    v1 = potential_v(z).v
    v2 = potential_v_hypergeometric(z)
    assert abs(v1 - v2) < 1e-6 * v1
    rng = np.random.default_rng(9)
    zz = rng.normal(size=300) * 2 + 1j * rng.normal(size=300) * 2
    a = potential_v(zz)
    b = potential_v_hypergeometric(zz)
    assert np.max(np.abs(a - b) / a) < 1e-12


def test_potential_conjugation_symmetry():
    z = np.array([0.3 + 0.4j, -1 + 2j, 2.2 + 0.1j])
    assert np.allclose(potential_v(z), potential_v(z.conj()), rtol=1e-13)


def test_potential_wells_scale():
    # V ~ |z| near 0 (tau - i ~ sqrt z) and ~ |z - 1|^(4/3) near 1 (tau - rho ~ (z-1)^(1/3))
    a, b = potential_v(np.array([1e-6, 1e-8]))
    assert abs(math.log(a / b) / math.log(100) - 1) < 1e-3
    c, d = potential_v(np.array([1 + 1e-6, 1 + 1e-8]))
    assert abs(math.log(c / d) / math.log(100) - 4 / 3) < 1e-3


def test_reduced_chart_fixed_points():
    tau, v = reduced_chart(np.array([0, 1, 0.5 + 0.5j]))
    assert tau[0] == 1j and tau[1] == RHO
    assert v[0] == 0 and v[1] == 0 and v[2] > 0
