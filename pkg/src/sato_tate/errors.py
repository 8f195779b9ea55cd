"""
Error hierarchy for the Sato-Tate toolkit.

Every error carries a ``detail`` message and the process exit code the CLI
reports for it (0 success, 2 invalid input, 3 insufficient data, 4 internal
inconsistency).
"""

from typing import Optional

EXIT_OK = 0
EXIT_INVALID_INPUT = 2
EXIT_INSUFFICIENT_DATA = 3
EXIT_INCONSISTENCY = 4


class SatoTateError(Exception):
    """Base error."""

    exit_code: int = EXIT_INVALID_INPUT

    def __init__(self, detail: str, exit_code: Optional[int] = None):
        super().__init__(detail)
        self.detail = detail
        if exit_code is not None:
            self.exit_code = exit_code

    def __str__(self) -> str:
        return self.detail


class InvalidModulusError(SatoTateError):
    """Modulus is not an odd prime below the supported bound."""


class IncompatibleFieldError(SatoTateError):
    """Operands live in different finite fields."""


class InvalidCurveError(SatoTateError):
    """Curve string cannot be parsed or the model is singular."""


class BadReductionError(SatoTateError):
    """The prime divides the discriminant or the leading coefficient."""

    def __init__(self, detail: str, p: int):
        super().__init__(detail)
        self.p = p


class UnsupportedGenusError(SatoTateError):
    """Operation not available for this genus."""


class InconsistencyError(SatoTateError):
    """An internal invariant failed (counting bug, corrupted cache, ...)."""

    exit_code = EXIT_INCONSISTENCY


class InvalidEndoDataError(SatoTateError):
    """Endomorphism data violates its invariants or is malformed."""


class UnknownElementError(SatoTateError):
    """Group element not present in the table."""


class NotASubgroupError(SatoTateError):
    """Subset is not closed under products and inverses."""


class InvalidGaloisError(SatoTateError):
    """A Galois table or map is not a group homomorphism."""


class UnknownComponentError(SatoTateError):
    """No catalog identity component matches the computed invariants."""

    def __init__(self, detail: str, lie_dim: int):
        super().__init__(detail)
        self.lie_dim = lie_dim


class EmbeddingError(SatoTateError):
    """Coset representatives or tags do not fit the ambient symplectic group."""


class UnsupportedError(SatoTateError):
    """Requested precision or order is outside the supported range."""


class EmptySampleError(SatoTateError):
    """No samples to compute statistics from."""

    exit_code = EXIT_INSUFFICIENT_DATA


class InsufficientDataError(SatoTateError):
    """Too few samples or candidates for a meaningful comparison."""

    exit_code = EXIT_INSUFFICIENT_DATA


class IncompleteRuleError(SatoTateError):
    """Splitting rule does not label every prime."""

    def __init__(self, detail: str, p: int):
        super().__init__(detail)
        self.p = p


class ConfigError(SatoTateError):
    """Run configuration is invalid."""
