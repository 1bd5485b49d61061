"""
Exception hierarchy for the ladder entropy toolkit.

Every error carries the process exit code the CLI reports for it:
2 validation, 3 capability, 4 numerical failure.
"""

from typing import Optional


class LadderEntropyError(Exception):
    """Base class for all expected failures."""

    exit_code: int = 1


class ValidationError(LadderEntropyError, ValueError):
    """Invalid input: configuration, bipartition, distribution or grid."""

    exit_code = 2


class ShotFileError(ValidationError):
    """Malformed shot file; carries the offending 1-based line number."""

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        self.path = path
        self.line = line
        location = ""
        if path is not None:
            location = f"{path}:{line}: " if line is not None else f"{path}: "
        elif line is not None:
            location = f"line {line}: "
        super().__init__(f"{location}{message}")


class CapabilityError(LadderEntropyError):
    """Requested system is beyond what the exact methods are allowed to handle."""

    exit_code = 3


class NumericalError(LadderEntropyError):
    """A numerical routine failed to produce a trustworthy result."""

    exit_code = 4


class SolverConvergenceError(NumericalError):
    """Krylov eigensolver did not converge; carries the best residual seen."""

    def __init__(self, message: str, residual_norm: float, iterations: int):
        self.residual_norm = residual_norm
        self.iterations = iterations
        super().__init__(f"{message} (best residual {residual_norm:.3e} after {iterations} iterations)")


class SpectrumError(NumericalError):
    """Schmidt spectrum violated normalization or clamping soundness."""


class FitError(NumericalError):
    """Sigmoid fit could not be attempted."""


class InsufficientPointsError(FitError):
    """Fewer usable curve points than the fitter requires."""


class FlatCurveError(FitError):
    """Conditional entropy does not change under filtering: nothing to filter."""


class EmptySelectionError(LadderEntropyError):
    """Filtering or projection left no surviving bitstrings."""

    exit_code = 4

    def __init__(self, message: str, threshold: float):
        self.threshold = threshold
        super().__init__(message)
