"""Modular geometry: Eisenstein q-series, reduction to the fundamental
domain, the map z(tau) = 1 - j(tau)/1728, its inverse through the
hypergeometric ratio, and the geometric potential

    V(z) = (Im tau(z) / |tau'(z)|)^2 = (Im tau * |dz/dtau|)^2 .

Every function accepts a scalar or an array.  Scalars come back as
Python scalars (or a small record), arrays as arrays of the same shape.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ConvergenceError, DomainError, SingularInputError

TWO_PI = 2.0 * math.pi
RHO = complex(0.5, math.sqrt(3.0) / 2.0)


def _as_array(value):
    arr = np.asarray(value, dtype=complex)
    return arr, arr.ndim == 0


def _out(arr, scalar):
    return complex(arr) if scalar else arr


def _check_upper(tau):
    if np.any(~(tau.imag > 0.0)):
        raise DomainError("tau must lie in the upper half plane")


def _reduce(tau):
    res = kernels.reduce_tau(np.atleast_1d(tau))
    if res is None:
        raise ConvergenceError("fundamental-domain reduction did not terminate")
    t, a, b, c, d = (r.reshape(tau.shape) for r in res)
    return t, a, b, c, d


@dataclass(frozen=True)
class ModularReduction:
    """Result of moving tau into the fundamental domain.

    Attributes
    ----------
    tau_reduced : complex
        Representative with |Re| <= 1/2 and |tau| >= 1.
    word : tuple of str
        Generators applied in order; "T" is tau + 1, "T^-1" is tau - 1
        and "S" is -1/tau.
    matrix : tuple
        ((a, b), (c, d)) with (a tau + b)/(c tau + d) = tau_reduced.
    """

    tau_reduced: complex
    word: tuple
    matrix: tuple

    def apply(self, tau):
        (a, b), (c, d) = self.matrix
        return (a * tau + b) / (c * tau + d)


def fundamental_reduce(tau, max_steps=100000):
    """Reduce a single tau to the standard fundamental domain.

    Raises
    ------
    DomainError
        If Im tau <= 0.
    """
    tau = complex(tau)
    if not tau.imag > 0.0:
        raise DomainError("tau must lie in the upper half plane")
    a, b, c, d = 1, 0, 0, 1
    word = []
    for _ in range(max_steps):
        n = math.floor(tau.real + 0.5)
        if n:
            tau -= n
            a, b = a - n * c, b - n * d
            word.extend(["T^-1" if n > 0 else "T"] * abs(n))
        if tau.real * tau.real + tau.imag * tau.imag >= 1.0 - 1e-14:
            break
        tau = -1.0 / tau
        a, b, c, d = -c, -d, a, b
        word.append("S")
    else:
        raise ConvergenceError("fundamental-domain reduction did not terminate")
    return ModularReduction(tau, tuple(word), ((a, b), (c, d)))


def _forms_reduced(t):
    e4, e6, dq, q = kernels.e4_e6_delta(t)
    return e4, e6, q * dq


def eisenstein_e4_e6(tau):
    """Normalised Eisenstein series E4 and E6.

    The q-expansions are summed at the reduced point and carried back
    with the weight factors (c tau + d)^k.

    Returns
    -------
    (complex, complex) or (ndarray, ndarray)
    """
    t, scalar = _as_array(tau)
    _check_upper(t)
    tr, a, b, c, d = _reduce(t)
    e4, e6, _ = _forms_reduced(tr)
    j = c * t + d
    e4 = e4 / j ** 4
    e6 = e6 / j ** 6
    return _out(e4, scalar), _out(e6, scalar)


def z_of_tau(tau):
    """z(tau) = 1 - j(tau)/1728 = -E6^2 / (E4^3 - E6^2).

    Modular invariant; finite on the whole upper half plane.
    """
    t, scalar = _as_array(tau)
    _check_upper(t)
    tr = _reduce(t)[0]
    e4, e6, delta = _forms_reduced(tr)
    return _out(-e6 * e6 / (1728.0 * delta), scalar)


def dz_dtau(tau):
    """dz/dtau = 2 pi i E4^2 E6 / (1728 Delta)."""
    t, scalar = _as_array(tau)
    _check_upper(t)
    tr, a, b, c, d = _reduce(t)
    e4, e6, delta = _forms_reduced(tr)
    dz = TWO_PI * 1j * e4 * e4 * e6 / (1728.0 * delta)
    return _out(dz / (c * t + d) ** 2, scalar)


def _canon(x):
    out = np.empty(x.shape, dtype=complex)
    out.real = x.real
    out.imag = x.imag + 0.0
    return out


def _hyp_pieces(z):
    """w, x = (1 - w)/2, F(x), F(1 - x) for the hypergeometric chart."""
    w = np.sqrt(_canon(z / (z - 1.0)))
    x = -1.0 / (2.0 * (z - 1.0) * (1.0 + w))
    y = 0.5 * (1.0 + w)
    fx = kernels.hyp2f1_16_56_1(x, y)
    f1x = kernels.hyp2f1_16_56_1(y, x)
    return w, x, fx, f1x


def _check_regular(z):
    if np.any((z == 0.0) | (z == 1.0)):
        raise SingularInputError("z = 0 and z = 1 are the singular points of the map")


def tau_of_z_raw(z):
    """tau(z) = i F(1-x)/F(x) before any reduction (principal branch)."""
    zz, scalar = _as_array(z)
    _check_regular(zz)
    _, _, fx, f1x = _hyp_pieces(zz)
    return _out(1j * f1x / fx, scalar)


def tau_of_z(z):
    """Inverse of z_of_tau, reduced to the fundamental domain.

    Raises
    ------
    SingularInputError
        At z = 0 and z = 1.
    """
    zz, scalar = _as_array(z)
    raw = tau_of_z_raw(zz)
    return _out(_reduce(np.asarray(raw))[0], scalar)


def tau_prime(z):
    """Derivative of the unreduced tau(z): i / (2 pi w (z - 1) F(x)^2)."""
    zz, scalar = _as_array(z)
    _check_regular(zz)
    w, _, fx, _ = _hyp_pieces(zz)
    return _out(1j / (TWO_PI * w * (zz - 1.0) * fx * fx), scalar)


@dataclass(frozen=True)
class GeometricPotentialValue:
    """V at one sample point z."""

    v: float
    z: complex


def potential_from_tau(tau_red):
    """V = (Im tau |dz/dtau|)^2 at reduced tau (q-series route)."""
    e4, e6, delta = _forms_reduced(tau_red)
    dz = TWO_PI * np.abs(e4 * e4 * e6 / (1728.0 * delta))
    return (tau_red.imag * dz) ** 2


def reduced_chart(z):
    """Reduced tau and V for an array of regular z.

    Exact zeros of V are returned at z = 0 and z = 1, where tau is set
    to the fixed points i and exp(i pi/3).
    """
    zz = np.asarray(z, dtype=complex)
    sing0 = zz == 0.0
    sing1 = zz == 1.0
    reg = ~(sing0 | sing1)
    tau = np.empty(zz.shape, dtype=complex)
    v = np.zeros(zz.shape)
    tau[sing0] = 1j
    tau[sing1] = RHO
    if reg.any():
        _, _, fx, f1x = _hyp_pieces(zz[reg])
        tr = _reduce(1j * f1x / fx)[0]
        tau[reg] = tr
        v[reg] = potential_from_tau(tr)
    return tau, v


def potential_v(z):
    """Geometric potential V(z) = (Im tau(z) / |tau'(z)|)^2.

    Returns a GeometricPotentialValue for scalar z and an array of V
    otherwise.  V vanishes exactly at z = 0 and z = 1.
    """
    zz, scalar = _as_array(z)
    _, v = reduced_chart(zz)
    if scalar:
        return GeometricPotentialValue(float(v), complex(zz))
    return v


def potential_v_hypergeometric(z):
    """V through the hypergeometric derivative of tau (cross-check route).

    With W[F(x), F(1-x)] = -1/(2 pi x (1-x)) one finds
    V = (2 pi Im tau |w| |z - 1| |F(x)|^2)^2.
    """
    zz, scalar = _as_array(z)
    _check_regular(zz)
    w, _, fx, f1x = _hyp_pieces(zz)
    im_tau = (1j * f1x / fx).imag
    v = (TWO_PI * im_tau * np.abs(w) * np.abs(zz - 1.0) * np.abs(fx) ** 2) ** 2
    return float(v) if scalar else v
