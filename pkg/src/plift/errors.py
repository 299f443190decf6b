"""Exception hierarchy shared across the toolkit."""

from __future__ import annotations


class PliftError(Exception):
    """Base class for all toolkit errors."""


# --- metamodel / model lookups -----------------------------------------

class UnknownType(PliftError):
    pass


class UnknownAttribute(PliftError):
    pass


class BasicTypeHasNoAttributes(PliftError):
    pass


class NavigationKindError(PliftError):
    """A navigation step was applied to a basic value or a list."""


# --- constraint language ------------------------------------------------

class ParseError(PliftError):
    """Syntax error with position and the set of expected tokens."""

    def __init__(self, message: str, line: int, column: int,
                 expected: tuple[str, ...] = ()):
        self.line = line
        self.column = column
        self.expected = expected
        suffix = f" (expected one of: {', '.join(expected)})" if expected else ""
        super().__init__(f"{message} at line {line}, column {column}{suffix}")


class UnboundVariable(PliftError):
    pass


class UnknownTypeInQuantifier(PliftError):
    pass


class AtomTypeMismatch(PliftError):
    pass


# --- variability ----------------------------------------------------------

class UnknownFeature(PliftError):
    pass


class InvalidConfiguration(PliftError):
    pass


class TooManyFeatures(PliftError):
    pass


# --- SMT back-end ---------------------------------------------------------

class UnsupportedAtom(PliftError):
    pass


class SolverProcessError(PliftError):
    """The solver process could not be spawned or died on I/O."""


class SolverParseError(PliftError):
    """The solver produced an unreadable response."""


class DecodeError(PliftError):
    """A feature value in a solver model could not be parsed."""


# --- bundles --------------------------------------------------------------

class BundleError(PliftError):
    """A bundle document is missing, malformed, or inconsistent."""
