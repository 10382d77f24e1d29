"""Exception hierarchy.

Kernel errors (poles, domain violations, non-convergence) derive from
:class:`KernelError`; the CLI maps those to exit status 3.  Failed
verification checks are *not* exceptions, they are reported values.
"""


class RZSpecError(Exception):
    """Base class for every error raised by this package."""


class KernelError(RZSpecError):
    """A numeric kernel was asked for something it cannot compute."""


class PoleError(KernelError, ValueError):
    """Argument sits on (or within tolerance of) a pole."""


class DomainError(KernelError, ValueError):
    """Argument outside the documented domain of the routine."""


class ConvergenceError(KernelError, ArithmeticError):
    """An iterative or series method failed to converge."""


class DivergenceError(DomainError):
    """A lattice sum was requested where it does not converge."""


class DegenerateParameterError(KernelError, ValueError):
    """The spectral parameter makes the requested object degenerate."""


class SingularInputError(DomainError):
    """Input is one of the singular points of the coordinate map."""


class ParseError(RZSpecError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class OrderingError(RZSpecError, ValueError):
    """Zero table is not strictly increasing."""


class SearchExhaustedError(RZSpecError, RuntimeError):
    """Zero scan ran out of range before the requested count was found."""


class ResourceError(RZSpecError, ValueError):
    """Requested grid exceeds the configured sample cap."""


class SpacingTooCoarseError(RZSpecError, ValueError):
    """Finite-difference spacing too coarse for the oscillation scale."""


class PhaseResidualError(RZSpecError, ValueError):
    """Field has too large an imaginary part for nodal analysis."""


class DegenerateFitError(RZSpecError, ArithmeticError):
    """Least-squares design matrix is rank deficient."""


class InsufficientOscillationError(RZSpecError, ValueError):
    """Too few oscillation nodes in the sampled range to fit a frequency."""


class OpenLoopError(RZSpecError, ValueError):
    """A closed contour was required."""


class EmptyRegionError(RZSpecError, ArithmeticError):
    """Rasterised enclosed region carries no mass."""


class UnsupportedZeroError(RZSpecError, ValueError):
    """Zero lies off the critical line; the far-field law is ambiguous there."""
