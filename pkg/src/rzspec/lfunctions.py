"""Riemann zeta, Hurwitz zeta, the Dirichlet L-functions of the odd
characters mod 3 and mod 4, the completed zeta function and zeros on the
critical line.

Continuation to the left half plane goes through Euler-Maclaurin
summation, which is accurate to about 1e-14 relative for Re s >= -1.5.
Further left the functional equations take over, since the partial sums
there grow like N**(1 - Re s) and cancel catastrophically.
"""

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import (DomainError, OrderingError, ParseError, PoleError,
                     SearchExhaustedError)
from .special_functions import loggamma, rgamma, sinpi

MAX_ZERO_COUNT = 100


def _bernoulli_even(count):
    """B_{2j} / (2j)! for j = 1..count, as floats."""
    b = [Fraction(1)]
    for m in range(1, 2 * count + 1):
        acc = Fraction(0)
        binom = 1
        for k in range(m):
            acc += binom * b[k]
            binom = binom * (m + 1 - k) // (k + 1)
        b.append(-acc / (m + 1))
    out = []
    fact = 1
    for j in range(1, count + 1):
        fact *= (2 * j - 1) * (2 * j)
        out.append(float(b[2 * j] / fact))
    return tuple(out)


_BERN = _bernoulli_even(60)


def _em_cutoff(s):
    return max(10, int(abs(s) / (2.0 * math.pi)) + 15)


def _em_hurwitz(s, a, pole=True):
    """Euler-Maclaurin sum for the Hurwitz zeta function.

    With ``pole=False`` the integral term (N + a)^(1-s) / (s - 1) is left
    out, so that callers can combine it across several a at s = 1.
    """
    n_direct = _em_cutoff(s)
    total = 0j
    for n in range(n_direct):
        total += cmath.exp(-s * math.log(n + a))
    x = n_direct + a
    lx = math.log(x)
    xs = cmath.exp(-s * lx)
    if pole:
        total += x * xs / (s - 1.0)
    total += 0.5 * xs
    # tail terms B_2j/(2j)! * s(s+1)...(s+2j-2) * x^(-s-2j+1)
    poch = s
    power = xs / x
    inv_x2 = 1.0 / (x * x)
    for j, bj in enumerate(_BERN, start=1):
        term = bj * poch * power
        total += term
        if abs(term) <= 1e-17 * abs(total):
            break
        poch *= (s + 2 * j - 1) * (s + 2 * j)
        power *= inv_x2
    return total


def _check_s(s):
    s = complex(s)
    if s == 1.0:
        raise PoleError("pole at s = 1")
    return s


def zeta(s):
    """Riemann zeta function.

    Parameters
    ----------
    s : complex
        Any point except the pole s = 1.

    Returns
    -------
    complex

    Examples
    --------
    >>> abs(zeta(2) - math.pi ** 2 / 6) < 1e-14
    True
    """
    s = _check_s(s)
    if s.real >= 0.0:
        return _em_hurwitz(s, 1.0)
    if s.imag == 0.0 and s.real == round(s.real) and int(s.real) % 2 == 0:
        return 0j
    # zeta(s) = 2^s pi^(s-1) sin(pi s / 2) Gamma(1 - s) zeta(1 - s)
    lg = s * math.log(2.0) + (s - 1.0) * math.log(math.pi) + loggamma(1.0 - s)
    return cmath.exp(lg) * sinpi(0.5 * s) * _em_hurwitz(1.0 - s, 1.0)


def _rational(a, max_den=24):
    f = Fraction(a).limit_denominator(max_den)
    if abs(float(f) - a) <= 1e-15:
        return f
    return None


def hurwitz_zeta(s, a):
    """Hurwitz zeta function sum_{n>=0} (n + a)^(-s) and its continuation.

    For Re s < -1.5 and a rational with denominator at most 24 the
    Hurwitz formula is used; for other a in that half plane the result
    loses about log10(N**(1 - Re s)) digits to cancellation.

    Raises
    ------
    PoleError
        At s = 1.
    DomainError
        If a is not in (0, 1].
    """
    s = _check_s(s)
    a = float(a)
    if not 0.0 < a <= 1.0:
        raise DomainError("hurwitz_zeta needs 0 < a <= 1")
    if s.real >= -1.5:
        return _em_hurwitz(s, a)
    if a == 1.0:
        return zeta(s)
    frac = _rational(a)
    if frac is None:
        return _em_hurwitz(s, a)
    # zeta(1-u, p/q) = 2 Gamma(u) / (2 pi q)^u * sum_r cos(pi u/2 - 2 pi r p/q) zeta(u, r/q)
    p, q = frac.numerator, frac.denominator
    u = 1.0 - s
    pref = 2.0 * cmath.exp(loggamma(u) - u * math.log(2.0 * math.pi * q))
    acc = 0j
    for r in range(1, q + 1):
        acc += cmath.cos(0.5 * math.pi * u - 2.0 * math.pi * r * p / q) * _em_hurwitz(u, r / q)
    return pref * acc


@dataclass(frozen=True)
class DirichletCharacter:
    """The odd real character chi_{-m} for m = 3 or 4.

    chi_{-4}(n) is 1, -1, 0 for n = 1, 3 and even n (mod 4);
    chi_{-3}(n) is 1, -1, 0 for n = 1, 2, 0 (mod 3).
    """

    modulus: int

    def __post_init__(self):
        if self.modulus not in (3, 4):
            raise DomainError("only the characters mod 3 and mod 4 are available")

    def __call__(self, n):
        r = n % self.modulus
        if self.modulus == 4:
            return (0, 1, 0, -1)[r]
        return (0, 1, -1)[r]


CHI_M4 = DirichletCharacter(4)
CHI_M3 = DirichletCharacter(3)


def dirichlet_l(chi, s):
    """L(chi, s) for chi = chi_{-3} or chi_{-4}.

    Uses m^{-s} (zeta_H(s, 1/m) - zeta_H(s, 1 - 1/m)) for Re s >= 0 and
    the functional equation
    L(s) = (m/pi)^{1/2 - s} Gamma(1 - s/2) / Gamma((s+1)/2) L(1 - s)
    to its left.
    """
    s = complex(s)
    m = chi.modulus
    if s.real >= 0.0:
        a1, a2 = 1.0 / m, 1.0 - 1.0 / m
        diff = _em_hurwitz(s, a1, pole=False) - _em_hurwitz(s, a2, pole=False)
        # the two integral terms combine into a function regular at s = 1
        n = _em_cutoff(s)
        l1, l2 = math.log(n + a1), math.log(n + a2)
        diff -= cmath.exp((1.0 - s) * l2) * (l1 - l2) * _exprel((1.0 - s) * (l1 - l2))
        return cmath.exp(-s * math.log(m)) * diff
    g = rgamma(0.5 * (s + 1.0))
    if g == 0:
        return 0j
    pref = cmath.exp((0.5 - s) * math.log(m / math.pi) + loggamma(1.0 - 0.5 * s))
    return pref * g * dirichlet_l(chi, 1.0 - s)


def _exprel(u):
    """(e^u - 1) / u, accurate near u = 0."""
    if abs(u) < 1e-5:
        return 1.0 + u * (0.5 + u / 6.0)
    return (cmath.exp(u) - 1.0) / u


def xi_completed(s):
    """Completed zeta pi^{-s/2} Gamma(s/2) zeta(s).

    Symmetric under s -> 1 - s; the left half plane is evaluated through
    that symmetry.

    Raises
    ------
    PoleError
        At s = 0 and s = 1.
    """
    s = complex(s)
    if s == 0.0 or s == 1.0:
        raise PoleError("completed zeta has poles at s = 0 and s = 1")
    if s.real < 0.5:
        s = 1.0 - s
    return cmath.exp(loggamma(0.5 * s) - 0.5 * s * math.log(math.pi)) * zeta(s)


def riemann_xi(s):
    """Riemann's entire xi function s(s-1)/2 * xi_completed(s).

    Examples
    --------
    >>> round(riemann_xi(0.5).real, 9)
    0.497120778
    """
    s = complex(s)
    if s == 0.0 or s == 1.0:
        return 0.5 + 0j
    return 0.5 * s * (s - 1.0) * xi_completed(s)


@dataclass(frozen=True)
class ZetaZero:
    """A non-trivial zero rho_n of the Riemann zeta function.

    Attributes
    ----------
    index : int
        n, counting from 1 in order of increasing imaginary part.
    rho : complex
    """

    index: int
    rho: complex

    def __post_init__(self):
        rho = complex(self.rho)
        object.__setattr__(self, "rho", rho)
        if self.index < 1:
            raise DomainError("zero index must be positive")
        if not 0.0 < rho.real < 1.0:
            raise DomainError("non-trivial zeros lie in 0 < Re rho < 1")
        if not rho.imag > 0.0:
            raise DomainError("zeros are indexed in the upper half plane")

    @property
    def gamma_n(self):
        return self.rho.imag

    @property
    def d_n(self):
        return abs(self.rho.real - 0.5)

    @property
    def energy(self):
        """E_n = rho (1 - rho); equals 1/4 + gamma_n^2 on the critical line."""
        if self.d_n == 0.0:
            return complex(0.25 + self.gamma_n ** 2, 0.0)
        return self.rho * (1.0 - self.rho)

    @classmethod
    def on_critical_line(cls, index, gamma):
        return cls(index, complex(0.5, gamma))


def hardy_z(t):
    """Real-valued rotation of zeta on the critical line.

    Returns Re(e^{i theta(t)} zeta(1/2 + i t)) where e^{i theta} is the
    phase of pi^{-s/2} Gamma(s/2).  Its sign changes are the zeros.
    """
    s = complex(0.5, t)
    theta = (loggamma(0.5 * s) - 0.5 * s * math.log(math.pi)).imag
    return (cmath.exp(1j * theta) * zeta(s)).real


def find_zeros(count, step=0.05, t_max=300.0, max_count=MAX_ZERO_COUNT):
    """Locate the first ``count`` zeros on the critical line.

    Scans hardy_z with the given step and bisects every sign change to
    a bracket of width at most 1e-12.

    Raises
    ------
    DomainError
        If count exceeds ``max_count``.
    SearchExhaustedError
        If fewer than ``count`` sign changes occur below ``t_max``.
    """
    if count < 0:
        raise DomainError("count must be non-negative")
    if count > max_count:
        raise DomainError(f"count {count} exceeds the configured maximum {max_count}")
    zeros = []
    t0 = 1.0
    f0 = hardy_z(t0)
    while len(zeros) < count:
        t1 = t0 + step
        if t1 > t_max:
            raise SearchExhaustedError(
                f"found {len(zeros)} of {count} zeros below t = {t_max:g}")
        f1 = hardy_z(t1)
        if f0 == 0.0:
            zeros.append(ZetaZero.on_critical_line(len(zeros) + 1, t0))
        elif f0 * f1 < 0.0:
            zeros.append(ZetaZero.on_critical_line(len(zeros) + 1, _bisect(t0, t1, f0)))
        t0, f0 = t1, f1
    return zeros


def _bisect(a, b, fa):
    while b - a > 1e-12:
        m = 0.5 * (a + b)
        fm = hardy_z(m)
        if fm == 0.0:
            return m
        if (fm < 0.0) == (fa < 0.0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


def parse_zeros(text):
    """Parse zero-file text: one positive gamma_n per line.

    Lines starting with '#' and blank lines are ignored.  LF and CRLF
    line endings are both accepted.
    """
    gammas = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            value = float(line)
        except ValueError:
            raise ParseError(f"not a number: {line!r}", line=lineno) from None
        if not math.isfinite(value) or value <= 0.0:
            raise ParseError(f"expected a positive finite value, got {line!r}", line=lineno)
        if gammas and value <= gammas[-1]:
            raise OrderingError(f"line {lineno}: {value!r} does not exceed the previous entry")
        gammas.append(value)
    return [ZetaZero.on_critical_line(i, g) for i, g in enumerate(gammas, start=1)]


def ingest_zeros(path):
    """Read a zeros file and return the ZetaZero records it lists."""
    with open(path, "r", encoding="ascii", newline="") as fh:
        return parse_zeros(fh.read())


def zero_by_index(n, zeros=None):
    """The n-th zero, from ``zeros`` if given or by direct search."""
    if zeros is not None:
        if not 1 <= n <= len(zeros):
            raise DomainError(f"zero index {n} outside the table (1..{len(zeros)})")
        return zeros[n - 1]
    return find_zeros(n)[-1]
