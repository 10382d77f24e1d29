"""Pure-numpy implementations of the hot kernels.

Used when the compiled extension is unavailable or when the environment
variable ``RZSPEC_KERNELS=python`` is set.  Every function here has a
twin with the same signature in ``_ckernels.pyx``.
"""

import math

import numpy as np

from . import _hypgeo as hg
from ._tables import Q_E4, Q_E6, Q_LOGDELTA

TWO_PI = 2.0 * math.pi
MAX_REDUCTION_STEPS = 4096


def _canon(x):
    out = np.empty(x.shape, dtype=complex)
    out.real = x.real
    out.imag = x.imag + 0.0
    return out


def _horner(coef, u):
    acc = np.zeros(u.shape, dtype=complex)
    for c in coef[::-1]:
        acc = acc * u + c
    return acc


def _horner_rows(coef, u):
    # coef has shape (len(u), n): one polynomial per sample.
    acc = np.zeros(u.shape, dtype=complex)
    for k in range(coef.shape[1] - 1, -1, -1):
        acc = acc * u + coef[:, k]
    return acc


def _anchor_taylor(x):
    lower = (x.imag < 0.0) | ((x.imag == 0.0) & (x.real > 1.0))
    xu = np.where(lower, np.conj(x), x)
    i = np.clip(np.rint((xu.real - hg.ANCHOR_RE0) / hg.ANCHOR_STEP), 0, hg.ANCHOR_NRE - 1)
    j = np.clip(np.rint((xu.imag - hg.ANCHOR_IM0) / hg.ANCHOR_STEP), 0, hg.ANCHOR_NIM - 1)
    i = i.astype(np.intp)
    j = j.astype(np.intp)
    x0 = (hg.ANCHOR_RE0 + hg.ANCHOR_STEP * i) + 1j * (hg.ANCHOR_IM0 + hg.ANCHOR_STEP * j)
    val = _horner_rows(hg.ANCHOR_COEFFS[j, i], xu - x0)
    return np.where(lower, np.conj(val), val)


def hyp2f1_16_56_1(x, omx=None):
    """2F1(1/6, 5/6; 1; x) for an array of complex x.

    ``omx``, when given, is 1 - x computed without cancellation by the
    caller; it feeds the logarithm near x = 1.
    """
    x = _canon(np.asarray(x, dtype=complex))
    shape = x.shape
    x = x.ravel()
    if omx is None:
        omx = 1.0 - x
    else:
        omx = np.asarray(omx, dtype=complex).ravel()
    omx = _canon(omx)
    out = np.empty(x.shape, dtype=complex)
    ax = np.abs(x)
    a1 = np.abs(omx)

    r1 = ax <= hg.R_IN
    r2 = ~r1 & (a1 <= hg.R_IN)
    r3 = ~r1 & ~r2 & (ax >= hg.R_OUT)
    r4 = ~r1 & ~r2 & ~r3 & (a1 >= hg.R_OUT)
    r5 = ~(r1 | r2 | r3 | r4)

    if r1.any():
        out[r1] = _horner(hg.COEF_F, x[r1])
    if r2.any():
        v = omx[r2]
        with np.errstate(divide="ignore", invalid="ignore"):
            lv = np.log(v)
        out[r2] = hg.LOG_PREFACTOR * (_horner(hg.COEF_LOG_H, v) - lv * _horner(hg.COEF_F, v))
    # F = C1 b^{-1/6} G1(u) + C2 b^{-5/6} G2(u) with (b, u) = (-x, 1/x) or (1-x, 1/(1-x))
    for mask, from_x in ((r3, True), (r4, False)):
        if not mask.any():
            continue
        if from_x:
            b = _canon(-x[mask])
            u = 1.0 / x[mask]
        else:
            b = omx[mask]
            u = 1.0 / b
        lb = np.log(b)
        out[mask] = (hg.C_SMALL * np.exp(-hg.A * lb) * _horner(hg.COEF_G1, u)
                     + hg.C_LARGE * np.exp(-hg.B * lb) * _horner(hg.COEF_G2, u))
    if r5.any():
        out[r5] = _anchor_taylor(x[r5])
    return out.reshape(shape)


def reduce_tau(tau):
    """Map tau into the standard fundamental domain.

    Returns ``(tau_red, a, b, c, d)`` with float arrays a..d holding the
    integer matrix that sends tau to tau_red.
    """
    t = np.array(tau, dtype=complex).ravel()
    shape = np.shape(tau)
    a = np.ones(t.shape)
    b = np.zeros(t.shape)
    c = np.zeros(t.shape)
    d = np.ones(t.shape)
    for _ in range(MAX_REDUCTION_STEPS):
        n = np.floor(t.real + 0.5)
        t = t - n
        a, b = a - n * c, b - n * d
        flip = (t.real * t.real + t.imag * t.imag) < 1.0 - 1e-14
        if not flip.any():
            break
        t[flip] = -1.0 / t[flip]
        a[flip], b[flip], c[flip], d[flip] = -c[flip], -d[flip], a[flip], b[flip]
    else:
        return None
    return (t.reshape(shape), a.reshape(shape), b.reshape(shape),
            c.reshape(shape), d.reshape(shape))


def e4_e6_delta(tau_red):
    """E4, E6 and Delta / q at reduced tau, plus q itself."""
    t = np.asarray(tau_red, dtype=complex)
    q = np.exp(TWO_PI * 1j * t)
    e4 = _horner(Q_E4, q)
    e6 = _horner(Q_E6, q)
    dq = np.exp(_horner(Q_LOGDELTA, q))
    return e4, e6, dq, q


def bessel_k_trap(nu, x):
    """K_nu(x) for one complex order and an array of x > 0.

    Trapezoid rule for (1/2) int exp(-x cosh t + nu t) dt along the
    shifted line t = u + i alpha, which removes the cancellation that
    plagues the real-axis integral when nu is (nearly) imaginary.
    """
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty(xs.shape, dtype=complex)
    for k, xv in enumerate(xs.ravel()):
        out.flat[k] = _bessel_k_scalar(complex(nu), float(xv))
    return out.reshape(np.shape(x))


def _bessel_k_scalar(nu, x):
    if x > 700.0:
        return 0j
    conj = nu.imag < 0.0
    if conj:
        nu = nu.conjugate()
    beta, gam = nu.real, nu.imag
    if gam > 0.0:
        delta = 1.0 / (1.0 + math.sqrt(gam))
        alpha = min(math.asin(min(gam / x, 1.0)), 0.5 * math.pi - delta)
    else:
        alpha = 0.0
    ca = math.cos(alpha)
    um = math.asinh(beta / (x * ca))

    def logmag(u):
        return -x * math.cosh(u) * ca + beta * u

    top = logmag(um)
    hi = um
    while logmag(hi) > top - 42.0:
        hi += 0.25
    lo = um
    while logmag(lo) > top - 42.0:
        lo -= 0.25

    h = 0.5
    prev = None
    last_diff = None
    level = 0
    while True:
        u = np.arange(math.floor(lo / h), math.ceil(hi / h) + 1) * h
        t = u + 1j * alpha
        g = np.exp(-x * np.cosh(t) + nu * t)
        total = 0.5 * h * np.sum(g)
        scale = 0.5 * h * np.sum(np.abs(g))
        if prev is not None:
            diff = abs(total - prev)
            # the rule converges geometrically: a stalled difference is rounding
            if diff <= 1e-15 * scale or (level >= 3 and diff >= 0.5 * last_diff):
                break
            last_diff = diff
        prev = total
        h *= 0.5
        level += 1
        if h < 1e-6:
            raise ArithmeticError("K-Bessel trapezoid did not converge")
    return total.conjugate() if conj else total


def cheb_fourier_sum(tau_red, coeffs, x_lo, width, cheb, x_hi):
    """Sum_n coeffs[n-1] K(2 pi n y) cos(2 pi n x) with tabulated K.

    ``cheb`` has shape (panels, degree) and holds Chebyshev coefficients
    of K on consecutive panels [x_lo + p*width, x_lo + (p+1)*width].
    Arguments at or beyond x_hi contribute nothing.
    """
    t = np.asarray(tau_red, dtype=complex)
    shape = t.shape
    t = t.ravel()
    xr = t.real
    y = t.imag
    acc = np.zeros(t.shape, dtype=complex)
    npan, deg = cheb.shape
    for n in range(1, len(coeffs) + 1):
        arg = TWO_PI * n * y
        live = arg < x_hi
        if not live.any():
            break
        xa = arg[live]
        pos = (xa - x_lo) / width
        p = np.minimum(np.floor(pos).astype(np.intp), npan - 1)
        s = 2.0 * (pos - p) - 1.0
        rows = cheb[p]
        b1 = np.zeros(xa.shape, dtype=complex)
        b2 = np.zeros(xa.shape, dtype=complex)
        for k in range(deg - 1, 0, -1):
            b1, b2 = 2.0 * s * b1 - b2 + rows[:, k], b1
        kv = s * b1 - b2 + rows[:, 0]
        acc[live] += coeffs[n - 1] * kv * np.cos(TWO_PI * n * xr[live])
    return acc.reshape(shape)


def lattice_sum_half(s, tau, radius):
    """Sum of |m tau + n|^(-2s) over the half box 0 < max(|m|,|n|) <= radius.

    The half lattice is m > 0 with any n, plus m = 0 with n > 0; the full
    sum is twice this by the symmetry (m, n) -> (-m, -n).
    """
    s = complex(s)
    tau = complex(tau)
    n = np.arange(-radius, radius + 1, dtype=float)
    total = 0j
    pos = np.arange(1, radius + 1, dtype=float)
    total += np.sum(np.exp(-s * np.log(pos * pos)))
    for m in range(1, radius + 1):
        re = m * tau.real + n
        im = m * tau.imag
        total += np.sum(np.exp(-s * np.log(re * re + im * im)))
    return total
