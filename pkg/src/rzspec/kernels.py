"""Backend selection for the hot numeric kernels.

The compiled extension ``rzspec._ckernels`` is used when it imports
cleanly.  Setting ``RZSPEC_KERNELS=python`` forces the numpy fallback,
which is also what you get when the extension was never built.

Attributes
----------
BACKEND : str
    ``"cython"`` or ``"python"``.
"""

import os

from . import _kernels_py

_NAMES = (
    "hyp2f1_16_56_1",
    "reduce_tau",
    "e4_e6_delta",
    "bessel_k_trap",
    "cheb_fourier_sum",
    "lattice_sum_half",
)


def _load(choice):
    if choice != "python":
        try:
            from . import _ckernels
        except ImportError:
            if choice == "cython":
                raise
        else:
            return "cython", _ckernels
    return "python", _kernels_py


BACKEND, _impl = _load(os.environ.get("RZSPEC_KERNELS", "").strip().lower())

hyp2f1_16_56_1 = _impl.hyp2f1_16_56_1
reduce_tau = _impl.reduce_tau
e4_e6_delta = _impl.e4_e6_delta
bessel_k_trap = _impl.bessel_k_trap
cheb_fourier_sum = _impl.cheb_fourier_sum
lattice_sum_half = _impl.lattice_sum_half


def backend_module(name):
    """Return the kernel module for ``name`` in {"python", "cython"}."""
    if name == "python":
        return _kernels_py
    from . import _ckernels
    return _ckernels
