"""Scalar bootstrap for 2F1(1/6, 5/6; 1; x).

Holds the constants shared by both kernel backends (series coefficients,
connection constants) and builds the table of Taylor anchors that covers
the annulus where no closed-form transformation converges quickly
(around x = exp(+-i pi/3), all six Kummer maps have modulus one there).

Anchor values are obtained by integrating the hypergeometric ODE

    x(1-x) F'' + (1-2x) F' - 5/36 F = 0

with Taylor steps, starting from a point where the Maclaurin or the
logarithmic series converges fast.
"""

import cmath
import math

import numpy as np

A = 1.0 / 6.0
B = 5.0 / 6.0

# Region boundaries in |x| and |1-x|.
R_IN = 0.6
R_OUT = 1.0 / R_IN

N_SERIES = 96
N_TAYLOR = 44  # |step| / radius <= 0.31 at the worst anchor

# Anchor lattice (upper half plane; lower half handled by conjugation).
ANCHOR_RE0 = -0.7
ANCHOR_IM0 = 0.1
ANCHOR_STEP = 0.2
ANCHOR_NRE = 13
ANCHOR_NIM = 9

# 1/Gamma(1/6)Gamma(5/6) = sin(pi/6)/pi
LOG_PREFACTOR = 0.5 / math.pi
# 2 psi(1) - psi(1/6) - psi(5/6)
LOG_H0 = math.log(432.0)
C_SMALL = math.gamma(2.0 / 3.0) / math.gamma(5.0 / 6.0) ** 2
C_LARGE = math.gamma(-2.0 / 3.0) / math.gamma(1.0 / 6.0) ** 2


def _coefficients(a, b, c, n):
    out = np.empty(n)
    t = 1.0
    for k in range(n):
        out[k] = t
        t *= (a + k) * (b + k) / ((c + k) * (k + 1.0))
    return out


# Maclaurin coefficients of F, G1 = 2F1(1/6,1/6;1/3;u), G2 = 2F1(5/6,5/6;5/3;u).
COEF_F = _coefficients(A, B, 1.0, N_SERIES)
COEF_G1 = _coefficients(A, A, 1.0 / 3.0, N_SERIES)
COEF_G2 = _coefficients(B, B, 5.0 / 3.0, N_SERIES)


def _harmonic_weights(n):
    h = np.empty(n)
    acc = LOG_H0
    for k in range(n):
        h[k] = acc
        acc += 2.0 / (k + 1.0) - 1.0 / (A + k) - 1.0 / (B + k)
    return h


# Coefficients of the c - a - b = 0 connection: c_n * h_n.
COEF_LOG_H = COEF_F * _harmonic_weights(N_SERIES)


def canon(z):
    """Return z with a signed-zero imaginary part replaced by +0.0.

    Keeps every principal log/power on the (-pi, pi] convention.
    """
    z = complex(z)
    if z.imag == 0.0:
        return complex(z.real, 0.0)
    return z


def _poly(coef, u):
    acc = 0j
    for c in coef[::-1]:
        acc = acc * u + c
    return acc


def _dpoly(coef, u):
    acc = 0j
    n = len(coef)
    for k in range(n - 1, 0, -1):
        acc = acc * u + k * coef[k]
    return acc


def maclaurin(x):
    return _poly(COEF_F, x), _dpoly(COEF_F, x)


def log_series(x):
    """F and F' from the logarithmic connection around x = 1."""
    v = canon(1.0 - x)
    lv = cmath.log(v)
    p = _poly(COEF_F, v)
    q = _poly(COEF_LOG_H, v)
    dp = _dpoly(COEF_F, v)
    dq = _dpoly(COEF_LOG_H, v)
    f = LOG_PREFACTOR * (q - lv * p)
    dfdv = LOG_PREFACTOR * (dq - lv * dp - p / v)
    return f, -dfdv


def inversion(u, base):
    """Two-term connection at infinity: base is -x (u = 1/x) or 1-x (u = 1/(1-x))."""
    lb = cmath.log(canon(base))
    return (C_SMALL * cmath.exp(-A * lb) * _poly(COEF_G1, u)
            + C_LARGE * cmath.exp(-B * lb) * _poly(COEF_G2, u))


def taylor_coefficients(x0, f0, d0, n):
    p0 = x0 * (1.0 - x0)
    p1 = 1.0 - 2.0 * x0
    c = [f0, d0]
    for k in range(n - 2):
        c.append((-p1 * (k + 1.0) ** 2 * c[k + 1] + (k + A) * (k + B) * c[k])
                 / (p0 * (k + 1.0) * (k + 2.0)))
    return c


def taylor_step(x0, f0, d0, x1, n=80):
    c = taylor_coefficients(x0, f0, d0, n)
    t = x1 - x0
    f = 0j
    d = 0j
    for k in range(n - 1, -1, -1):
        f = f * t + c[k]
    for k in range(n - 1, 0, -1):
        d = d * t + k * c[k]
    return f, d


def _integrate(x_start, f, d, x_end):
    """Carry (F, F') along the segment x_start -> x_end."""
    x = x_start
    while abs(x_end - x) > 0.0:
        dist = min(abs(x), abs(1.0 - x))
        step = 0.35 * dist
        if abs(x_end - x) <= step:
            nxt = x_end
        else:
            nxt = x + step * (x_end - x) / abs(x_end - x)
        f, d = taylor_step(x, f, d, nxt)
        x = nxt
    return f, d


def value_and_derivative(x):
    """F(x), F'(x) for x in the closed upper half plane, off the real cut."""
    x = complex(x)
    if abs(x) <= 0.5:
        return maclaurin(x)
    if abs(1.0 - x) <= 0.5:
        return log_series(x)
    if x.real <= 0.5:
        start = 0.5 * x / abs(x)
        f, d = maclaurin(start)
    else:
        start = 1.0 + 0.5 * (x - 1.0) / abs(x - 1.0)
        f, d = log_series(start)
    return _integrate(start, f, d, x)


def build_anchor_table():
    """Anchor lattice values F and F' as (nim, nre) complex arrays."""
    vals = np.empty((ANCHOR_NIM, ANCHOR_NRE), dtype=complex)
    ders = np.empty((ANCHOR_NIM, ANCHOR_NRE), dtype=complex)
    for j in range(ANCHOR_NIM):
        for i in range(ANCHOR_NRE):
            x = complex(ANCHOR_RE0 + ANCHOR_STEP * i, ANCHOR_IM0 + ANCHOR_STEP * j)
            vals[j, i], ders[j, i] = value_and_derivative(x)
    return vals, ders


ANCHOR_VALUES, ANCHOR_DERIVS = build_anchor_table()


def _anchor_taylor_table():
    coef = np.empty((ANCHOR_NIM, ANCHOR_NRE, N_TAYLOR), dtype=complex)
    for j in range(ANCHOR_NIM):
        for i in range(ANCHOR_NRE):
            x0 = complex(ANCHOR_RE0 + ANCHOR_STEP * i, ANCHOR_IM0 + ANCHOR_STEP * j)
            coef[j, i] = taylor_coefficients(x0, ANCHOR_VALUES[j, i],
                                             ANCHOR_DERIVS[j, i], N_TAYLOR)
    return coef


# Taylor coefficients of F about every anchor, shape (nim, nre, N_TAYLOR).
ANCHOR_COEFFS = _anchor_taylor_table()
