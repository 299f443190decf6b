"""Instance graphs: typed objects with slots holding values.

A slot value is one of BoolVal / IntVal / StringVal / Ref / ListVal.  Ref
may hold NONE, the absent-object marker produced by binding a product line;
in strict mode the typechecker reports NONE since a hand-written core model
has no business containing it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from .errors import NavigationKindError
from .metamodel import Diagnostic, Metamodel, Multiplicity

#: Sentinel for the absent object.  A distinct singleton (not Python None)
#: so that accidental None propagation cannot masquerade as model data.
NONE = "⊥"  # rendered as the bottom symbol in reprs


@dataclass(frozen=True)
class BoolVal:
    value: bool


@dataclass(frozen=True)
class IntVal:
    value: int


@dataclass(frozen=True)
class StringVal:
    value: str


@dataclass(frozen=True)
class Ref:
    """Reference to an object id, or to NONE."""

    target: str

    @property
    def is_none(self) -> bool:
        return self.target == NONE


@dataclass(frozen=True)
class ListVal:
    """Ordered object-id list; never contains NONE."""

    targets: tuple[str, ...]


Value = Union[BoolVal, IntVal, StringVal, Ref, ListVal]


@dataclass(frozen=True)
class ModelObject:
    id: str
    type: str
    slots: dict[str, Value] = field(default_factory=dict)


@dataclass(frozen=True)
class InstanceGraph:
    """Registry of objects keyed by id; insertion order is semantic."""

    objects: dict[str, ModelObject] = field(default_factory=dict)

    def get(self, oid: str) -> ModelObject | None:
        return self.objects.get(oid)


def _value_kind(v: Value) -> str:
    if isinstance(v, BoolVal):
        return "bool"
    if isinstance(v, IntVal):
        return "int"
    if isinstance(v, StringVal):
        return "string"
    if isinstance(v, Ref):
        return "ref"
    if isinstance(v, ListVal):
        return "list"
    raise TypeError(f"not a Value: {v!r}")


def typecheck_graph(mm: Metamodel, g: InstanceGraph,
                    allow_none: bool = False) -> list[Diagnostic]:
    """Check every object of ``g`` against its declared class.

    ``allow_none=False`` is strict mode: a Ref slot holding NONE is an
    offence.  Post-binding graphs are checked with ``allow_none=True``
    because binding legitimately produces NONE for dropped targets.
    """
    report = []

    def diag(code, msg, subject):
        report.append(Diagnostic(code, msg, subject))

    for oid, obj in g.objects.items():
        if oid != obj.id:
            diag("id-mismatch", f"registered under '{oid}' but carries id "
                 f"'{obj.id}'", oid)
        body = mm.classes.get(obj.type)
        if body is None:
            diag("unknown-class", f"object type '{obj.type}' is not declared",
                 oid)
            continue
        for aname, attr in body.attributes.items():
            if aname not in obj.slots:
                diag("missing-slot", f"slot '{aname}' is not populated", oid)
        for sname, val in obj.slots.items():
            attr = body.attributes.get(sname)
            subject = f"{oid}.{sname}"
            if attr is None:
                diag("undeclared-slot",
                     f"class '{obj.type}' declares no attribute '{sname}'",
                     subject)
                continue
            kind = _value_kind(val)
            if attr.multiplicity is Multiplicity.MANY:
                if kind != "list":
                    diag("kind-mismatch",
                         f"expected a list for multiplicity-* slot, got {kind}",
                         subject)
                    continue
                for t in val.targets:
                    if t == NONE:
                        diag("none-in-list", "lists may not contain NONE",
                             subject)
                    elif t not in g.objects:
                        diag("dangling-ref", f"list element '{t}' is not a "
                             "registered object", subject)
                    elif g.objects[t].type != attr.target_type:
                        diag("kind-mismatch",
                             f"list element '{t}' has type "
                             f"'{g.objects[t].type}', expected "
                             f"'{attr.target_type}'", subject)
                continue
            if attr.is_basic:
                if kind != attr.target_type:
                    diag("kind-mismatch",
                         f"expected {attr.target_type}, got {kind}", subject)
                continue
            # single reference to a class type
            if kind != "ref":
                diag("kind-mismatch", f"expected a reference, got {kind}",
                     subject)
                continue
            if val.is_none:
                if not allow_none:
                    diag("none-ref", "NONE reference in strict mode", subject)
            elif val.target not in g.objects:
                diag("dangling-ref",
                     f"reference target '{val.target}' is not registered",
                     subject)
            elif g.objects[val.target].type != attr.target_type:
                diag("kind-mismatch",
                     f"target '{val.target}' has type "
                     f"'{g.objects[val.target].type}', expected "
                     f"'{attr.target_type}'", subject)
    return report


def extent(g: InstanceGraph, type_name: str) -> list[str]:
    """All object ids of the given type, in insertion order.

    This is the closed-world quantification domain for type quantifiers;
    an unknown type yields the empty extent.
    """
    return [oid for oid, obj in g.objects.items() if obj.type == type_name]


def navigate(g: InstanceGraph, start: str, path: list[str]) -> Value:
    """Fold slot lookups along ``path`` starting from object ``start``.

    NONE is absorbing: once a step yields NONE the result is Ref(NONE)
    regardless of the remaining path.  Stepping from a basic value or
    through a list raises NavigationKindError; a multiplicity-* slot may
    only appear as the final step.
    """
    if start != NONE and start not in g.objects:
        raise NavigationKindError(f"object '{start}' is not registered")
    current: Value = Ref(start)
    for step in path:
        if isinstance(current, Ref):
            if current.is_none:
                return Ref(NONE)
            obj = g.objects.get(current.target)
            if obj is None:
                raise NavigationKindError(
                    f"dangling reference '{current.target}' during navigation")
            if step not in obj.slots:
                raise NavigationKindError(
                    f"object '{obj.id}' of type '{obj.type}' has no slot "
                    f"'{step}'")
            current = obj.slots[step]
        elif isinstance(current, ListVal):
            raise NavigationKindError(
                f"cannot navigate '{step}' through a list; multiplicity-* "
                "slots terminate a path")
        else:
            raise NavigationKindError(
                f"cannot navigate '{step}' from a basic value")
    return current
