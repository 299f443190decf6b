"""Feature models, presence conditions, configurations, product lines.

A feature model is an ordered feature list plus a propositional formula
over it; a presence table maps object ids to propositional presence
conditions (absent ids default to true).  Configurations are total
assignments that satisfy the feature-model formula, enumerated in
lexicographic order of the declared feature list (False before True).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Union

from . import satscan
from .errors import InvalidConfiguration, TooManyFeatures, UnknownFeature
from .metamodel import Diagnostic, Metamodel
from .model import InstanceGraph, typecheck_graph

logger = logging.getLogger(__name__)

DEFAULT_ENUMERATION_CAP = 24


# --- propositional formulas ---------------------------------------------

@dataclass(frozen=True)
class TrueLit:
    pass


@dataclass(frozen=True)
class FalseLit:
    pass


@dataclass(frozen=True)
class FeatVar:
    name: str


@dataclass(frozen=True)
class Not:
    operand: "PropFormula"


@dataclass(frozen=True)
class And:
    lhs: "PropFormula"
    rhs: "PropFormula"


@dataclass(frozen=True)
class Or:
    lhs: "PropFormula"
    rhs: "PropFormula"


@dataclass(frozen=True)
class Implies:
    lhs: "PropFormula"
    rhs: "PropFormula"


PropFormula = Union[TrueLit, FalseLit, FeatVar, Not, And, Or, Implies]

TRUE = TrueLit()
FALSE = FalseLit()


def formula_features(phi: PropFormula) -> set[str]:
    if isinstance(phi, FeatVar):
        return {phi.name}
    if isinstance(phi, Not):
        return formula_features(phi.operand)
    if isinstance(phi, (And, Or, Implies)):
        return formula_features(phi.lhs) | formula_features(phi.rhs)
    return set()


def eval_formula(phi: PropFormula, k: dict[str, bool]) -> bool:
    """Truth value of ``phi`` under the total assignment ``k``."""
    if isinstance(phi, TrueLit):
        return True
    if isinstance(phi, FalseLit):
        return False
    if isinstance(phi, FeatVar):
        try:
            return k[phi.name]
        except KeyError:
            raise UnknownFeature(
                f"formula mentions unmapped feature '{phi.name}'") from None
    if isinstance(phi, Not):
        return not eval_formula(phi.operand, k)
    if isinstance(phi, And):
        return eval_formula(phi.lhs, k) and eval_formula(phi.rhs, k)
    if isinstance(phi, Or):
        return eval_formula(phi.lhs, k) or eval_formula(phi.rhs, k)
    if isinstance(phi, Implies):
        return (not eval_formula(phi.lhs, k)) or eval_formula(phi.rhs, k)
    raise TypeError(f"not a formula: {phi!r}")


def render_formula(phi: PropFormula) -> str:
    """Deterministic text form in the presence-condition syntax.

    Precedence ! > && > || > =>, with => right-associative; associative
    chains of the same operator print without parentheses.
    """
    def rend(p, parent_prec):
        if isinstance(p, TrueLit):
            return "true"
        if isinstance(p, FalseLit):
            return "false"
        if isinstance(p, FeatVar):
            return p.name
        if isinstance(p, Not):
            return "!" + rend(p.operand, 4)
        sym, prec = {And: ("&&", 3), Or: ("||", 2), Implies: ("=>", 1)}[type(p)]
        lhs_prec = prec + 1 if isinstance(p, Implies) else prec
        text = f"{rend(p.lhs, lhs_prec)} {sym} {rend(p.rhs, prec)}"
        return f"({text})" if prec < parent_prec else text

    return rend(phi, 0)


def conjuncts(phi: PropFormula) -> list[PropFormula]:
    """Flatten the top-level conjunction, left to right."""
    if isinstance(phi, And):
        return conjuncts(phi.lhs) + conjuncts(phi.rhs)
    return [phi]


def conjoin(parts: list[PropFormula]) -> PropFormula:
    if not parts:
        return TRUE
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def compile_formula(phi: PropFormula, feature_order: list[str]) -> bytes:
    """Postfix bytecode for the assignment-scan kernel."""
    index = {name: i for i, name in enumerate(feature_order)}
    ops = bytearray()

    def emit(p):
        if isinstance(p, TrueLit):
            ops.extend((satscan.OP_TRUE, 0))
        elif isinstance(p, FalseLit):
            ops.extend((satscan.OP_FALSE, 0))
        elif isinstance(p, FeatVar):
            try:
                ops.extend((satscan.OP_VAR, index[p.name]))
            except KeyError:
                raise UnknownFeature(
                    f"formula mentions undeclared feature '{p.name}'") from None
        elif isinstance(p, Not):
            emit(p.operand)
            ops.extend((satscan.OP_NOT, 0))
        elif isinstance(p, And):
            emit(p.lhs)
            emit(p.rhs)
            ops.extend((satscan.OP_AND, 0))
        elif isinstance(p, Or):
            emit(p.lhs)
            emit(p.rhs)
            ops.extend((satscan.OP_OR, 0))
        elif isinstance(p, Implies):
            emit(p.lhs)
            ops.extend((satscan.OP_NOT, 0))
            emit(p.rhs)
            ops.extend((satscan.OP_OR, 0))
        else:
            raise TypeError(f"not a formula: {p!r}")

    emit(phi)
    return bytes(ops)


# --- feature models and configurations ------------------------------------

@dataclass(frozen=True)
class FeatureModel:
    features: tuple[str, ...]
    formula: PropFormula = TRUE

    def __post_init__(self):
        seen = set()
        for f in self.features:
            if f in seen:
                raise UnknownFeature(f"duplicate feature '{f}'")
            seen.add(f)
        extra = formula_features(self.formula) - seen
        if extra:
            raise UnknownFeature(
                "feature-model formula mentions undeclared features: "
                + ", ".join(sorted(extra)))


@dataclass(frozen=True)
class Configuration:
    """Total assignment satisfying the feature model; build via
    :func:`make_configuration` (or enumeration), not directly."""

    assignment: dict[str, bool]

    def selected(self) -> list[str]:
        return [f for f, v in self.assignment.items() if v]

    def __str__(self) -> str:
        return "{" + ", ".join(f"{f}={'true' if v else 'false'}"
                               for f, v in self.assignment.items()) + "}"


def make_configuration(fm: FeatureModel,
                       assignment: dict[str, bool]) -> Configuration:
    """Validate a total assignment against the feature model.

    Rejection names the first violated conjunct when the formula is a
    conjunction.
    """
    extra = set(assignment) - set(fm.features)
    if extra:
        raise UnknownFeature(
            "assignment mentions undeclared features: " + ", ".join(sorted(extra)))
    missing = [f for f in fm.features if f not in assignment]
    if missing:
        raise InvalidConfiguration(
            "assignment is not total; missing: " + ", ".join(missing))
    ordered = {f: bool(assignment[f]) for f in fm.features}
    for part in conjuncts(fm.formula):
        if not eval_formula(part, ordered):
            raise InvalidConfiguration(
                f"assignment violates feature-model conjunct "
                f"'{render_formula(part)}'")
    return Configuration(ordered)


def assignment_from_mask(features: tuple[str, ...], mask: int) -> dict[str, bool]:
    """Feature j maps to bit (n-1-j), so ascending masks are lexicographic
    over assignment tuples with False < True."""
    n = len(features)
    return {f: bool((mask >> (n - 1 - j)) & 1) for j, f in enumerate(features)}


def enumerate_configurations(fm: FeatureModel,
                             cap: int = DEFAULT_ENUMERATION_CAP) -> list[Configuration]:
    """All valid configurations in lexicographic order of the feature list."""
    n = len(fm.features)
    if n > cap:
        raise TooManyFeatures(
            f"{n} features exceed the enumeration cap of {cap}")
    code = compile_formula(fm.formula, list(fm.features))
    masks = satscan.scan_all(code, n)
    return [Configuration(assignment_from_mask(fm.features, mask))
            for mask in masks]


# --- presence tables and product lines -------------------------------------

@dataclass(frozen=True)
class PresenceTable:
    """Object id to presence condition; unlisted objects are always present."""

    conditions: dict[str, PropFormula] = field(default_factory=dict)

    def condition(self, oid: str) -> PropFormula:
        return self.conditions.get(oid, TRUE)


@dataclass(frozen=True)
class ProductLine:
    metamodel: Metamodel
    model: InstanceGraph
    feature_model: FeatureModel
    presence: PresenceTable


def validate_product_line(pl: ProductLine) -> list[Diagnostic]:
    """Strict-mode model typecheck plus presence-table consistency."""
    report = typecheck_graph(pl.metamodel, pl.model, allow_none=False)
    declared = set(pl.feature_model.features)
    for oid, phi in pl.presence.conditions.items():
        if oid not in pl.model.objects:
            report.append(Diagnostic(
                "unknown-object",
                "presence condition attached to unregistered object", oid))
        extra = formula_features(phi) - declared
        if extra:
            report.append(Diagnostic(
                "unknown-feature",
                "presence condition mentions undeclared features: "
                + ", ".join(sorted(extra)), oid))
    return report
