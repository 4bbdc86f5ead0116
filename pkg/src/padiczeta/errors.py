"""Exception hierarchy for the padiczeta package.

Every failure mode that a caller can reasonably react to gets its own
class; all of them derive from :class:`PadicZetaError` so batch drivers
can catch the whole family at once.
"""

from __future__ import annotations


class PadicZetaError(Exception):
    """Base class for all padiczeta errors."""


class BudgetExceeded(PadicZetaError):
    """An enumeration would visit more points than the configured budget."""


class PolynomialSyntaxError(PadicZetaError):
    """Malformed polynomial text.  Carries the 0-based offset of the problem."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class VariableOutOfRange(PolynomialSyntaxError):
    """A variable index outside 1..n was used."""


class NegativeExponent(PolynomialSyntaxError):
    """An exponent literal was negative."""


class DimensionMismatch(PadicZetaError):
    """A point or matrix has the wrong number of coordinates."""


class UndefinedForZero(PadicZetaError):
    """Angular component requested for a residue that is zero at full precision."""


class ZeroPolynomial(PadicZetaError):
    """Operation undefined for the zero polynomial."""


class NonUnitArgument(PadicZetaError):
    """A multiplicative character was evaluated at a non-unit."""


class TrivialCharacter(PadicZetaError):
    """Gaussian sums are only defined for nontrivial characters."""


class EvenPrimeUnsupported(PadicZetaError):
    """Twisted-character machinery requires an odd prime."""


class ModulusTooLarge(PadicZetaError):
    """Character table modulus beyond the supported size."""


class RankDeficient(PadicZetaError):
    """Matrix rank over Q is smaller than required."""


class GoodReductionFailed(PadicZetaError):
    """A rescaled chart unexpectedly failed the good-reduction test.

    This indicates an internal inconsistency (or a center that is not on
    the variety); the full state is attached for inspection.
    """

    def __init__(self, message: str, state=None):
        super().__init__(message)
        self.state = state


class CenterNotOnVariety(PadicZetaError):
    """Rescaling center does not satisfy the constraints to the required depth."""


class BadReductionInput(PadicZetaError):
    """Hensel enumeration called on a system without good reduction."""


class NotStabilized(PadicZetaError):
    """A stabilization recount disagreed with the base count."""


class NoRecurrenceFound(PadicZetaError):
    """No linear recurrence fits the series within the provided depth."""


class ValidationFailed(PadicZetaError):
    """A fitted rational function failed to predict the held-out coefficients."""


class ConstantDenominator(PadicZetaError):
    """Pole analysis requested for a rational function without poles."""


class PoleSetMismatch(PadicZetaError):
    """Denominator has poles outside the candidate set (falsification signal)."""


class MissingTable(PadicZetaError):
    """A required twisted coefficient table is absent."""


class HypothesisNotVerified(PadicZetaError):
    """A finite-level probe found suspect critical residues."""


class SchemaError(PadicZetaError):
    """Problem specification file violates the JSON schema."""
