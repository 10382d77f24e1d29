"""Spectral toolkit for the Hamiltonian H = -V^(1/2) Lap V^(1/2) with a
modular geometric potential, whose scattering states sit at the energies
rho_n (1 - rho_n) of the Riemann zeta zeros.

Modules
-------
special_functions
    Gamma, 2F1(1/6, 5/6; 1; x) and K-Bessel of complex order.
lfunctions
    zeta, Hurwitz zeta, Dirichlet L-functions, completed xi and zeros.
modular
    Fundamental-domain reduction, E4/E6, the maps z(tau), tau(z), and V.
eisenstein
    Real-analytic Eisenstein series and the Epstein zeta function.
wavefield
    psi_n on grids, local and far-field fits.
nodal
    Operator residual, nodal lines, the cross at tau = i, flux bound.
"""

__version__ = "0.1.0"

from .kernels import BACKEND  # noqa: E402

__all__ = ["BACKEND", "__version__"]
