"""Exception hierarchy shared by all wotsim modules."""

from __future__ import annotations


class WotSimError(Exception):
    """Base class for every error raised by this package."""


# --- TD parsing ---------------------------------------------------------


class MalformedJson(WotSimError):
    """Input text is not valid JSON (includes NaN/Infinity, which JSON forbids)."""


class NotAnObject(WotSimError):
    """Top level of a TD document is not a JSON object."""


class MissingTitle(WotSimError):
    """TD has no "title" member, or it is not a non-empty string."""


class InvalidSchemaBounds(WotSimError):
    """A data schema violates a numeric invariant (e.g. minimum > maximum)."""


class TypeMismatch(WotSimError):
    """A recognized schema keyword carries the wrong JSON type or shape."""


# --- generation ---------------------------------------------------------


class Unsatisfiable(WotSimError):
    """No value can conform to the schema (conflicting keyword combination)."""


# --- runtime ------------------------------------------------------------


class UnknownProperty(WotSimError):
    pass


class UnknownAction(WotSimError):
    pass


class UnknownEvent(WotSimError):
    pass


class ReadOnlyProperty(WotSimError):
    pass


class ValidationFailed(WotSimError):
    """Carries the validation violations that caused a rejection."""

    def __init__(self, message: str, violations: list):
        super().__init__(message)
        self.violations = violations


class InvalidValue(ValidationFailed):
    """Property write rejected: value does not conform to the schema."""


class InvalidInput(ValidationFailed):
    """Action invocation rejected: input does not conform to the input schema."""


class MissingInput(ValidationFailed):
    """Action requires an input but none was supplied."""


class DuplicateThingName(WotSimError):
    """Two Things resolve to the same URL segment on one servient."""


class BindFailure(WotSimError):
    """The HTTP server could not bind the configured address/port."""
