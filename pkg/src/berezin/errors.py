"""Exception types shared across the package."""


class BerezinError(Exception):
    """Base class for all package errors."""


class UnsupportedClassError(BerezinError):
    """Observable class has no closed-form assembly path."""


class UnsupportedOrderError(BerezinError):
    """Derivative order outside the supported range."""


class UnsupportedTransformError(BerezinError):
    """Test function has no exact Fourier transform."""


class AssemblyError(BerezinError):
    """Quadrature assembly produced NaN/Inf entries."""


class ConvergenceError(BerezinError):
    """Eigensolver failed to converge; carries diagnostics."""


class ConditioningError(BerezinError):
    """Fit system condition number exceeded the allowed bound."""


class ValidationError(BerezinError):
    """Malformed configuration or CLI input (exit code 2)."""


class ContractViolation(BerezinError):
    """A numerical contract of a verify-* run was violated (exit code 3)."""
