"""Exception types shared across the package."""


class LinecoalError(Exception):
    """Base class for package errors."""


class DegenerateTie(LinecoalError):
    """An exact length tie made a recolouring decision ambiguous."""


class NotRedEnded(LinecoalError):
    """Operation requires an interval that starts and ends red."""


class MalformedAlternation(LinecoalError):
    """Bound-tracking state does not alternate red-ended / blue entries."""


class ParseError(LinecoalError):
    """Distribution expression failed to parse.

    Attributes:
        offset: byte offset of the failure in the input text.
        expected: set of token descriptions that would have been accepted.
    """

    def __init__(self, message, offset, expected=()):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset
        self.expected = frozenset(expected)


class Unsupported(LinecoalError):
    """No analytic tail path exists for this distribution."""


class InfiniteMoment(LinecoalError):
    """A required moment of the distribution is infinite."""


class DomainError(LinecoalError):
    """Argument outside the mathematical domain of the operation."""


class UnknownPreset(LinecoalError):
    """Preset name not recognised."""


class MissingParam(LinecoalError):
    """Preset invoked without a required parameter."""


class PreconditionFailed(LinecoalError):
    """A verification routine was called with parameters outside its contract."""
