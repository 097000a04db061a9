"""
Error types for the legendrian package.

Every failure the library reports is a LegendrianError carrying the process
exit code the command line should use:
- ValidationError (exit 2): the input was rejected before any computation
- NumericalError (exit 3): a computation ran and could not be trusted
"""


class LegendrianError(Exception):
    """Base error with a message and a CLI exit code."""

    def __init__(self, message: str, exit_code: int = 3):
        self.message = message
        self.exit_code = exit_code
        super().__init__(self.message)


class ValidationError(LegendrianError):
    def __init__(self, message: str):
        super().__init__(message, exit_code=2)


class NumericalError(LegendrianError):
    def __init__(self, message: str):
        super().__init__(message, exit_code=3)


# Validation failures

class EllipticDomainError(ValidationError):
    """Parameter outside the domain of an elliptic integral or function."""


class InvalidModulusError(ValidationError):
    """Root data that does not describe a stationary curvature profile."""


class ProfileFormatError(ValidationError):
    """A curvature profile file that cannot be read as uniform samples."""


class DegenerateCurveError(ValidationError):
    """Samples that do not form a regular closed curve."""


# Numerical failures

class HierarchyError(NumericalError):
    """Hierarchy level beyond the cap, or a non-exact inverse derivative."""


class PoleError(NumericalError):
    """A sample lies too close to the pole of the Heisenberg projection."""


class TangencyError(NumericalError):
    """Two projected segments cross at a near-zero angle."""


class NonIntegralError(NumericalError):
    """A quantity that must be an integer is not, within tolerance."""


class PeriodDetectionError(NumericalError):
    """No least period or spin could be read off the samples."""


class NonClosureError(NumericalError):
    """A lift or loop that does not close within the configured bounds."""


class BlowUpError(NumericalError):
    """Curvature growth beyond the blow-up guard during a flow."""


class CompatibilityError(NumericalError):
    """Zero-curvature residual of a frame evolution above tolerance."""


class ConsistencyError(NumericalError):
    """A quantity that must be conserved along a curve drifted."""


class ExceptionalModulusError(NumericalError):
    """Quadrature frame requested on the exceptional circle."""


class ContinuationStallError(NumericalError):
    """Predictor-corrector tracing could not make progress."""
