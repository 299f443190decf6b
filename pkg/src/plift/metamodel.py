"""Metamodels: class tables with typed, multiplicity-carrying attributes.

A metamodel is a finite map from class names to class bodies; a class body
is a finite map from attribute names to (target type, multiplicity).  The
basic types ``int``, ``bool`` and ``string`` are implicit and cannot be
redeclared.  Everything is immutable after construction.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field

from .errors import BasicTypeHasNoAttributes, UnknownAttribute, UnknownType

BASIC_TYPES = ("int", "bool", "string")

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def is_identifier(name: str) -> bool:
    return bool(_IDENT_RE.match(name))


class Multiplicity(enum.Enum):
    ONE = "1"
    MANY = "*"


@dataclass(frozen=True)
class Attribute:
    target_type: str
    multiplicity: Multiplicity = Multiplicity.ONE

    @property
    def many(self) -> bool:
        return self.multiplicity is Multiplicity.MANY

    @property
    def is_basic(self) -> bool:
        return self.target_type in BASIC_TYPES


@dataclass(frozen=True)
class ClassBody:
    """Attribute table of one class; insertion order is preserved."""

    attributes: dict[str, Attribute] = field(default_factory=dict)


@dataclass(frozen=True)
class Metamodel:
    """Finite map from class names to class bodies.

    Construction does not validate; run :func:`validate_metamodel` and
    check for an empty report before trusting lookups.
    """

    classes: dict[str, ClassBody] = field(default_factory=dict)

    def is_class(self, name: str) -> bool:
        return name in self.classes

    def is_type(self, name: str) -> bool:
        return name in BASIC_TYPES or name in self.classes


@dataclass(frozen=True)
class Diagnostic:
    """One validation finding; the empty report means well-defined/valid."""

    code: str
    message: str
    subject: str = ""

    def __str__(self) -> str:
        return f"[{self.code}] {self.subject}: {self.message}" if self.subject \
            else f"[{self.code}] {self.message}"


def validate_metamodel(mm: Metamodel) -> list[Diagnostic]:
    """Well-definedness check: every referenced type must be declared.

    Returns one diagnostic per offence, naming the class, attribute and
    missing type.  Deterministic and independent of declaration order
    (diagnostics are sorted).
    """
    report = []
    for basic in BASIC_TYPES:
        if basic in mm.classes:
            report.append(Diagnostic(
                "basic-type-redeclared",
                f"basic type '{basic}' must not be declared as a class",
                basic))
    for cname, body in mm.classes.items():
        if not is_identifier(cname):
            report.append(Diagnostic(
                "bad-identifier", f"class name '{cname}' is not a valid identifier",
                cname))
        for aname, attr in body.attributes.items():
            if not is_identifier(aname):
                report.append(Diagnostic(
                    "bad-identifier",
                    f"attribute name '{aname}' is not a valid identifier",
                    f"{cname}.{aname}"))
            if not mm.is_type(attr.target_type):
                report.append(Diagnostic(
                    "unknown-type",
                    f"attribute '{aname}' refers to undeclared type "
                    f"'{attr.target_type}'",
                    f"{cname}.{aname}"))
    report.sort(key=lambda d: (d.code, d.subject, d.message))
    return report


def lookup_attribute(mm: Metamodel, type_name: str, attr_name: str) -> Attribute:
    """Resolve one attribute of a declared class.

    Raises UnknownType / BasicTypeHasNoAttributes / UnknownAttribute.
    """
    if type_name in BASIC_TYPES:
        raise BasicTypeHasNoAttributes(
            f"basic type '{type_name}' has no attribute '{attr_name}'")
    body = mm.classes.get(type_name)
    if body is None:
        raise UnknownType(f"type '{type_name}' is not declared")
    attr = body.attributes.get(attr_name)
    if attr is None:
        raise UnknownAttribute(
            f"class '{type_name}' has no attribute '{attr_name}'")
    return attr
