"""Time the compiled kernels against the numpy fallback.

Usage::

    python benchmarks/bench_kernels.py [--repeat N]

Each kernel runs on the same inputs under both backends.  The table shows
the best wall time per backend, the speedup and the largest relative
difference between the two results.
"""

import argparse
import sys
import timeit

import numpy as np

from rzspec import kernels
from rzspec.eisenstein import fourier_bessel


def _cases(py):
    rng = np.random.default_rng(0)
    x = rng.normal(size=20000) * 3 + 1j * rng.normal(size=20000) * 3
    tau = rng.uniform(-5, 5, 20000) + 1j * rng.uniform(1e-2, 3, 20000)
    tau_red = py.reduce_tau(tau)[0]
    fb = fourier_bessel(complex(0.5, 14.134725141734693))
    tab = fb.table
    series = (tau_red[:5000], fb.coeffs, tab.x_lo, tab.width, tab.coeffs, tab.x_hi)
    return [
        ("hyp2f1_16_56_1 (20000 pts)", "hyp2f1_16_56_1", (x,)),
        ("reduce_tau (20000 pts)", "reduce_tau", (tau,)),
        ("e4_e6_delta (20000 pts)", "e4_e6_delta", (tau_red,)),
        ("bessel_k_trap (200 pts)", "bessel_k_trap",
         (14.134725141734693j, np.linspace(0.5, 80, 200))),
        ("cheb_fourier_sum (5000 pts)", "cheb_fourier_sum", series),
        ("lattice_sum_half (R=400)", "lattice_sum_half", (2.5 + 3j, 0.2 + 1.1j, 400)),
    ]


def _max_rel(a, b):
    if isinstance(a, tuple):
        return max(_max_rel(u, v) for u, v in zip(a, b))
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300)))


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3, help="timing repeats per kernel")
    args = parser.parse_args(argv)

    py = kernels.backend_module("python")
    try:
        cy = kernels.backend_module("cython")
    except ImportError:
        print("compiled kernels are not built; nothing to compare", file=sys.stderr)
        return 1

    print(f"{'kernel':<30}{'python [s]':>12}{'cython [s]':>12}{'speedup':>10}{'max rel diff':>14}")
    for label, name, call_args in _cases(py):
        fp, fc = getattr(py, name), getattr(cy, name)
        tp = min(timeit.repeat(lambda: fp(*call_args), number=1, repeat=args.repeat))
        tc = min(timeit.repeat(lambda: fc(*call_args), number=1, repeat=args.repeat))
        diff = _max_rel(fc(*call_args), fp(*call_args))
        print(f"{label:<30}{tp:>12.4f}{tc:>12.4f}{tp / tc:>9.1f}x{diff:>14.1e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
