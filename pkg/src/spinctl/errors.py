"""Exception types shared across the package."""


class SpinctlError(Exception):
    """Base class for all package-specific errors."""


class InvalidSize(SpinctlError, ValueError):
    """Network size too small for the requested topology."""


class InvalidCoupling(SpinctlError, ValueError):
    """Coupling strength not finite and strictly positive."""


class InvalidAnisotropy(SpinctlError, ValueError):
    """Anisotropy not finite and non-negative."""


class TooLarge(SpinctlError, ValueError):
    """Full-Hilbert-space construction requested for too many spins."""


class DecompositionFailure(SpinctlError, RuntimeError):
    """Eigenvalue solver failed to converge."""


class NodeOutOfRange(SpinctlError, ValueError):
    """Node index outside 1..N."""


class InvalidGrid(SpinctlError, ValueError):
    """Scan grid parameters inconsistent (need 0 < dt < T)."""


class InvalidHorizon(SpinctlError, ValueError):
    """Time horizon not strictly positive."""


class NegativeDuration(SpinctlError, ValueError):
    """Switching schedule contains a negative segment duration."""


class DimensionOverflow(SpinctlError, RuntimeError):
    """Lie closure exceeded the dimension cap; rank tolerance likely too small."""


class DomainError(SpinctlError, ValueError):
    """Identification parameter domain invalid."""
