"""Exception hierarchy shared across the package.

Validation failures (bad domains, bad configs) raise subclasses of
:class:`InputError`; failures of the numerical machinery raise subclasses of
:class:`ComputationError`.  The CLI maps the former to exit code 2 and the
latter to exit code 3.
"""


class DiracNodalError(Exception):
    """Base class for all package errors."""


class InputError(DiracNodalError):
    """Invalid arguments, domains or configuration."""


class DomainError(InputError):
    """Argument outside its mathematical domain."""


class BoundaryConditionError(InputError):
    """Boundary parameters violating a sign or range condition."""


class ConfigError(InputError):
    """Problem-configuration document failed to parse or validate."""

    def __init__(self, message, field=None):
        self.field = field
        super().__init__(message if field is None else f"{field}: {message}")


class ComputationError(DiracNodalError):
    """A numerical procedure could not complete."""


class IntegrationFailure(ComputationError):
    """Initial-value integration produced non-finite components."""


class SeedFailure(ComputationError):
    """No sign change of the characteristic function in the scanned bracket."""

    def __init__(self, index, interval):
        self.index = index
        self.interval = interval
        super().__init__(
            f"no sign change for index {index} in scanned interval "
            f"[{interval[0]:.6g}, {interval[1]:.6g}]"
        )


class AmbiguousBracket(ComputationError):
    """More than one sign change in the scanned bracket."""

    def __init__(self, index, count):
        self.index = index
        self.count = count
        super().__init__(
            f"{count} sign changes for index {index}; shrink the bracket "
            f"expansion or increase the index"
        )


class DegenerateComponent(ComputationError):
    """Eigenfunction component is identically zero on part of the grid."""


class ConstantsUnavailable(ComputationError):
    """Second-order expansion constants are singular for this problem."""


class IterationFailure(ComputationError):
    """A fixed-point iteration failed to converge."""


class RowMismatch(ComputationError):
    """Grid-sequence rows being compared have different lengths."""


class CaseMismatch(ComputationError):
    """Grid sequences belong to different boundary-condition cases."""


class UnsupportedPrediction(ComputationError):
    """No node-count or expansion formula exists for this combination."""
