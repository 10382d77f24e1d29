# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels; see _kernels_py for the contracts."""

import numpy as np
cimport numpy as cnp
from libc.math cimport floor, ceil, fabs, sqrt, cos, sin, exp, log, asin, asinh, cosh, M_PI

from . import _hypgeo as hg
from ._tables import Q_E4, Q_E6, Q_LOGDELTA

cnp.import_array()

cdef extern from "complex.h" nogil:
    double complex cexp(double complex)
    double complex clog(double complex)
    double cabs(double complex)
    double creal(double complex)
    double cimag(double complex)
    double complex conj(double complex)

cdef double TWO_PI = 2.0 * M_PI
cdef int MAX_REDUCTION_STEPS = 4096

cdef const double[::1] COEF_F = np.ascontiguousarray(hg.COEF_F)
cdef const double[::1] COEF_G1 = np.ascontiguousarray(hg.COEF_G1)
cdef const double[::1] COEF_G2 = np.ascontiguousarray(hg.COEF_G2)
cdef const double[::1] COEF_LOG_H = np.ascontiguousarray(hg.COEF_LOG_H)
cdef const double complex[:, :, ::1] ANCHORS = np.ascontiguousarray(hg.ANCHOR_COEFFS)
cdef const double[::1] QE4 = np.ascontiguousarray(Q_E4)
cdef const double[::1] QE6 = np.ascontiguousarray(Q_E6)
cdef const double[::1] QLD = np.ascontiguousarray(Q_LOGDELTA)
# raw views of the tables above, which stay alive for the module's lifetime
cdef const double* P_COEF_F = &COEF_F[0]
cdef Py_ssize_t N_COEF_F = COEF_F.shape[0]
cdef const double* P_COEF_G1 = &COEF_G1[0]
cdef Py_ssize_t N_COEF_G1 = COEF_G1.shape[0]
cdef const double* P_COEF_G2 = &COEF_G2[0]
cdef Py_ssize_t N_COEF_G2 = COEF_G2.shape[0]
cdef const double* P_COEF_LOG_H = &COEF_LOG_H[0]
cdef Py_ssize_t N_COEF_LOG_H = COEF_LOG_H.shape[0]
cdef const double* P_QE4 = &QE4[0]
cdef Py_ssize_t N_QE4 = QE4.shape[0]
cdef const double* P_QE6 = &QE6[0]
cdef Py_ssize_t N_QE6 = QE6.shape[0]
cdef const double* P_QLD = &QLD[0]
cdef Py_ssize_t N_QLD = QLD.shape[0]

cdef double R_IN = hg.R_IN
cdef double R_OUT = hg.R_OUT
cdef double A = hg.A
cdef double B = hg.B
cdef double LOG_PREFACTOR = hg.LOG_PREFACTOR
cdef double C_SMALL = hg.C_SMALL
cdef double C_LARGE = hg.C_LARGE
cdef double ANCHOR_RE0 = hg.ANCHOR_RE0
cdef double ANCHOR_IM0 = hg.ANCHOR_IM0
cdef double ANCHOR_STEP = hg.ANCHOR_STEP
cdef int ANCHOR_NRE = hg.ANCHOR_NRE
cdef int ANCHOR_NIM = hg.ANCHOR_NIM
cdef int N_TAYLOR = hg.N_TAYLOR


cdef inline double complex _canon(double complex z) noexcept nogil:
    return creal(z) + 1j * (cimag(z) + 0.0)


cdef inline double complex _cmul(double complex a, double complex b) noexcept nogil:
    # plain product; the C99 operator routes through __muldc3 for inf/nan recovery
    cdef double ar = creal(a), ai = cimag(a), br = creal(b), bi = cimag(b)
    return (ar * br - ai * bi) + 1j * (ar * bi + ai * br)


cdef inline double complex _horner_p(const double* coef, Py_ssize_t n, double complex u) noexcept nogil:
    # p(u) = E(u^2) + u O(u^2): two independent Horner chains overlap in the
    # pipeline, where a single chain would wait on every multiply-add.
    cdef double ur = creal(u), ui = cimag(u)
    cdef double vr = ur * ur - ui * ui, vi = 2.0 * ur * ui
    cdef double er = 0.0, ei = 0.0, orr = 0.0, oi = 0.0, tmp
    cdef Py_ssize_t k = n - 1
    if k % 2 == 0:
        er = coef[k]
        k -= 1
    while k > 0:
        tmp = orr * vr - oi * vi + coef[k]
        oi = orr * vi + oi * vr
        orr = tmp
        tmp = er * vr - ei * vi + coef[k - 1]
        ei = er * vi + ei * vr
        er = tmp
        k -= 2
    return (er + ur * orr - ui * oi) + 1j * (ei + ur * oi + ui * orr)


cdef inline long _clip(double v, long hi) noexcept nogil:
    cdef long k = <long>floor(v + 0.5)
    if k < 0:
        return 0
    if k > hi:
        return hi
    return k


cdef double complex _hyp_one(double complex x, double complex omx) noexcept nogil:
    cdef double ax = cabs(x)
    cdef double a1 = cabs(omx)
    cdef double complex b, u, lb, xu, x0, acc
    cdef bint lower
    cdef long i, j
    cdef Py_ssize_t k
    if ax <= R_IN:
        return _horner_p(P_COEF_F, N_COEF_F, x)
    if a1 <= R_IN:
        lb = clog(omx)
        return LOG_PREFACTOR * (_horner_p(P_COEF_LOG_H, N_COEF_LOG_H, omx) - lb * _horner_p(P_COEF_F, N_COEF_F, omx))
    if ax >= R_OUT:
        b = _canon(-x)
        u = 1.0 / x
    elif a1 >= R_OUT:
        b = omx
        u = 1.0 / b
    else:
        lower = cimag(x) < 0.0 or (cimag(x) == 0.0 and creal(x) > 1.0)
        xu = conj(x) if lower else x
        i = _clip((creal(xu) - ANCHOR_RE0) / ANCHOR_STEP, ANCHOR_NRE - 1)
        j = _clip((cimag(xu) - ANCHOR_IM0) / ANCHOR_STEP, ANCHOR_NIM - 1)
        x0 = (ANCHOR_RE0 + ANCHOR_STEP * i) + 1j * (ANCHOR_IM0 + ANCHOR_STEP * j)
        u = xu - x0
        acc = 0
        for k in range(N_TAYLOR - 1, -1, -1):
            acc = _cmul(acc, u) + ANCHORS[j, i, k]
        return conj(acc) if lower else acc
    lb = clog(b)
    return (C_SMALL * cexp(-A * lb) * _horner_p(P_COEF_G1, N_COEF_G1, u)
            + C_LARGE * cexp(-B * lb) * _horner_p(P_COEF_G2, N_COEF_G2, u))


def hyp2f1_16_56_1(x, omx=None):
    cdef cnp.ndarray xa = np.ascontiguousarray(np.asarray(x, dtype=complex).ravel())
    cdef cnp.ndarray oa
    if omx is None:
        oa = np.ascontiguousarray(1.0 - xa)
    else:
        oa = np.ascontiguousarray(np.asarray(omx, dtype=complex).ravel())
    cdef const double complex[::1] xv = xa
    cdef const double complex[::1] ov = oa
    cdef cnp.ndarray out = np.empty(xa.shape[0], dtype=complex)
    cdef double complex[::1] res = out
    cdef Py_ssize_t k
    with nogil:
        for k in range(xv.shape[0]):
            res[k] = _hyp_one(_canon(xv[k]), _canon(ov[k]))
    return out.reshape(np.shape(x))


def reduce_tau(tau):
    shape = np.shape(tau)
    cdef cnp.ndarray ta = np.array(tau, dtype=complex).ravel()
    cdef Py_ssize_t m = ta.shape[0]
    cdef double complex[::1] t = ta
    cdef cnp.ndarray aa = np.empty(m), ba = np.empty(m), ca = np.empty(m), da = np.empty(m)
    cdef double[::1] av = aa, bv = ba, cv = ca, dv = da
    cdef Py_ssize_t k
    cdef int it
    cdef double a, b, c, d, n, tmp1, tmp2
    cdef double complex z
    cdef bint failed = False
    with nogil:
        for k in range(m):
            z = t[k]
            a = 1.0
            b = 0.0
            c = 0.0
            d = 1.0
            for it in range(MAX_REDUCTION_STEPS):
                n = floor(creal(z) + 0.5)
                z = z - n
                a = a - n * c
                b = b - n * d
                if creal(z) * creal(z) + cimag(z) * cimag(z) >= 1.0 - 1e-14:
                    break
                z = -1.0 / z
                tmp1 = a
                tmp2 = b
                a = -c
                b = -d
                c = tmp1
                d = tmp2
            else:
                failed = True
            t[k] = z
            av[k] = a
            bv[k] = b
            cv[k] = c
            dv[k] = d
    if failed:
        return None
    return (ta.reshape(shape), aa.reshape(shape), ba.reshape(shape),
            ca.reshape(shape), da.reshape(shape))


def e4_e6_delta(tau_red):
    shape = np.shape(tau_red)
    cdef cnp.ndarray ta = np.ascontiguousarray(np.asarray(tau_red, dtype=complex).ravel())
    cdef Py_ssize_t m = ta.shape[0]
    cdef double complex[::1] t = ta
    cdef cnp.ndarray o4 = np.empty(m, dtype=complex), o6 = np.empty(m, dtype=complex)
    cdef cnp.ndarray od = np.empty(m, dtype=complex), oq = np.empty(m, dtype=complex)
    cdef double complex[::1] r4 = o4, r6 = o6, rd = od, rq = oq
    cdef Py_ssize_t k
    cdef double complex q
    with nogil:
        for k in range(m):
            q = cexp(TWO_PI * 1j * t[k])
            r4[k] = _horner_p(P_QE4, N_QE4, q)
            r6[k] = _horner_p(P_QE6, N_QE6, q)
            rd[k] = cexp(_horner_p(P_QLD, N_QLD, q))
            rq[k] = q
    return o4.reshape(shape), o6.reshape(shape), od.reshape(shape), oq.reshape(shape)


cdef double _logmag(double x, double ca, double beta, double u) noexcept nogil:
    return -x * cosh(u) * ca + beta * u


cdef double complex _bessel_one(double complex nu, double x) except *:
    cdef bint conj_out = cimag(nu) < 0.0
    if conj_out:
        nu = conj(nu)
    cdef double beta = creal(nu), gam = cimag(nu)
    cdef double alpha = 0.0, delta, ca, um, top, lo, hi, h, diff, last_diff
    cdef double complex total, prev, g, tc
    cdef double scale
    cdef long n0, n1, i
    cdef int level
    if x > 700.0:
        return 0
    if gam > 0.0:
        delta = 1.0 / (1.0 + sqrt(gam))
        alpha = asin(gam / x if gam / x < 1.0 else 1.0)
        if alpha > 0.5 * M_PI - delta:
            alpha = 0.5 * M_PI - delta
    ca = cos(alpha)
    um = asinh(beta / (x * ca))
    top = _logmag(x, ca, beta, um)
    hi = um
    while _logmag(x, ca, beta, hi) > top - 42.0:
        hi += 0.25
    lo = um
    while _logmag(x, ca, beta, lo) > top - 42.0:
        lo -= 0.25
    # nested grids on [n0 h0, n1 h0]: each halving only adds the odd points
    h = 0.5
    n0 = <long>floor(lo / h)
    n1 = <long>ceil(hi / h)
    total = 0
    scale = 0.0
    for i in range(n0, n1 + 1):
        tc = i * h + 1j * alpha
        g = cexp(-x * 0.5 * (cexp(tc) + cexp(-tc)) + nu * tc)
        total = total + g
        scale += cabs(g)
    prev = 0.5 * h * total
    last_diff = -1.0
    for level in range(20):
        h *= 0.5
        n0 *= 2
        n1 *= 2
        for i in range(n0 + 1, n1, 2):
            tc = i * h + 1j * alpha
            g = cexp(-x * 0.5 * (cexp(tc) + cexp(-tc)) + nu * tc)
            total = total + g
            scale += cabs(g)
        diff = cabs(0.5 * h * total - prev)
        prev = 0.5 * h * total
        # the rule converges geometrically: a stalled difference is rounding
        if diff <= 1e-15 * 0.5 * h * scale or (level >= 2 and diff >= 0.5 * last_diff):
            return conj(prev) if conj_out else prev
        last_diff = diff
    raise ArithmeticError("K-Bessel trapezoid did not converge")


def bessel_k_trap(nu, x):
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    cdef const double[::1] xv = np.ascontiguousarray(xs.ravel())
    cdef cnp.ndarray out = np.empty(xv.shape[0], dtype=complex)
    cdef double complex[::1] res = out
    cdef double complex cnu = complex(nu)
    cdef Py_ssize_t k
    for k in range(xv.shape[0]):
        res[k] = _bessel_one(cnu, xv[k])
    return out.reshape(np.shape(x))


def cheb_fourier_sum(tau_red, coeffs, double x_lo, double width, cheb, double x_hi):
    shape = np.shape(tau_red)
    cdef const double complex[::1] t = np.ascontiguousarray(np.asarray(tau_red, dtype=complex).ravel())
    cdef const double complex[::1] cf = np.ascontiguousarray(np.asarray(coeffs, dtype=complex))
    cdef const double complex[:, ::1] tab = np.ascontiguousarray(np.asarray(cheb, dtype=complex))
    cdef Py_ssize_t m = t.shape[0], nterms = cf.shape[0]
    cdef Py_ssize_t npan = tab.shape[0], deg = tab.shape[1]
    cdef cnp.ndarray out = np.zeros(m, dtype=complex)
    cdef double complex[::1] res = out
    cdef Py_ssize_t k, n, p, j
    cdef double xr, y, arg, pos, s
    cdef double complex b1, b2, tmp, acc
    with nogil:
        for k in range(m):
            xr = creal(t[k])
            y = cimag(t[k])
            acc = 0
            for n in range(1, nterms + 1):
                arg = TWO_PI * n * y
                if arg >= x_hi:
                    break
                pos = (arg - x_lo) / width
                p = <Py_ssize_t>floor(pos)
                if p > npan - 1:
                    p = npan - 1
                s = 2.0 * (pos - p) - 1.0
                b1 = 0
                b2 = 0
                for j in range(deg - 1, 0, -1):
                    tmp = b1
                    b1 = 2.0 * s * b1 - b2 + tab[p, j]
                    b2 = tmp
                acc = acc + _cmul(cf[n - 1], s * b1 - b2 + tab[p, 0]) * cos(TWO_PI * n * xr)
            res[k] = acc
    return out.reshape(shape)


def lattice_sum_half(s, tau, long radius):
    cdef double complex cs = complex(s)
    cdef double complex ct = complex(tau)
    cdef double sr = creal(cs), si = cimag(cs)
    cdef double tr = creal(ct), ti = cimag(ct)
    cdef double complex total = 0, row
    cdef double re, im, lr, mag
    cdef long m, n
    with nogil:
        for n in range(1, radius + 1):
            lr = log(<double>n * n)
            mag = exp(-sr * lr)
            total = total + mag * (cos(si * lr) - 1j * sin(si * lr))
        for m in range(1, radius + 1):
            row = 0
            im = m * ti
            for n in range(-radius, radius + 1):
                re = m * tr + n
                lr = log(re * re + im * im)
                mag = exp(-sr * lr)
                row = row + mag * (cos(si * lr) - 1j * sin(si * lr))
            total = total + row
    return complex(total)
