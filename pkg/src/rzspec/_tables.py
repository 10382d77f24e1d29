"""Immutable coefficient tables shared by both kernel backends."""

import numpy as np

N_Q = 16


def divisor_sigma(n, k):
    """Sum of d**k over the positive divisors d of n (integer k >= 0)."""
    total = 0
    d = 1
    while d * d <= n:
        if n % d == 0:
            total += d ** k
            e = n // d
            if e != d:
                total += e ** k
        d += 1
    return total


def _qtables(n):
    e4 = np.zeros(n)
    e6 = np.zeros(n)
    leta = np.zeros(n)
    e4[0] = 1.0
    e6[0] = 1.0
    for k in range(1, n):
        e4[k] = 240.0 * divisor_sigma(k, 3)
        e6[k] = -504.0 * divisor_sigma(k, 5)
        # log prod (1 - q^m)^24 = -24 sum sigma_1(k)/k q^k
        leta[k] = -24.0 * divisor_sigma(k, 1) / k
    return e4, e6, leta


# q-expansion coefficients (index = power of q).  With the reduced tau,
# |q| <= exp(-pi sqrt 3) ~ 4.3e-3 and |q|^15 * 15^5 is far below 1e-16.
Q_E4, Q_E6, Q_LOGDELTA = _qtables(N_Q)
for _t in (Q_E4, Q_E6, Q_LOGDELTA):
    _t.setflags(write=False)
