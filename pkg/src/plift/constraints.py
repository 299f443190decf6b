"""First-order constraint ASTs: typechecking, evaluation, rendering.

Constraints quantify over class extents or over navigated lists, combine
subexpressions with !, &&, || and =>, and bottom out in comparison atoms
over int, bool, string and object references (plus list size).  ``exists``,
``&&`` and ``=>`` are first-class nodes; rewrite rules that need the
minimal core treat them through their ¬/∨ desugaring.

Evaluation implements the closed-world semantics used by the brute-force
oracle: type quantifiers range over the graph extent, navigation-set
quantifiers over the navigated list (empty when the navigation hits NONE),
and comparison atoms treat NONE as documented on :func:`evaluate`.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Callable, Union

from . import model as m
from .errors import (AtomTypeMismatch, NavigationKindError, UnboundVariable,
                     UnknownTypeInQuantifier)
from .metamodel import BASIC_TYPES, Metamodel, Multiplicity, lookup_attribute

FORALL = "forall"
EXISTS = "exists"

ORDER_OPS = ("<", "<=", ">", ">=")
EQUALITY_OPS = ("=", "!=")
COMPARE_OPS = EQUALITY_OPS + ORDER_OPS


# --- terms ------------------------------------------------------------

@dataclass(frozen=True)
class Nav:
    """Navigation ``var.step1.step2...``; the empty path is the variable."""

    var: str
    path: tuple[str, ...] = ()

    def __str__(self) -> str:
        return ".".join((self.var,) + self.path)


@dataclass(frozen=True)
class SizeOf:
    """Length of a multiplicity-* navigation, as an int-valued term."""

    nav: Nav


@dataclass(frozen=True)
class IntLit:
    value: int


@dataclass(frozen=True)
class StrLit:
    value: str


@dataclass(frozen=True)
class BoolLit:
    value: bool


Term = Union[Nav, SizeOf, IntLit, StrLit, BoolLit]


# --- quantification domains -------------------------------------------

@dataclass(frozen=True)
class TypeSet:
    type_name: str


@dataclass(frozen=True)
class NavSet:
    nav: Nav


SetExpr = Union[TypeSet, NavSet]


# --- expressions --------------------------------------------------------

@dataclass(frozen=True)
class Compare:
    op: str
    lhs: Term
    rhs: Term
    #: semantic type shared by both operands, filled in by the typechecker;
    #: ignored by equality so hand-built expected ASTs compare cleanly.
    #: Needed at evaluation time because a navigation that absorbed NONE is
    #: indistinguishable by value from an object-typed NONE reference.
    operand_type: str | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Not:
    operand: "Expr"


@dataclass(frozen=True)
class Or:
    lhs: "Expr"
    rhs: "Expr"


@dataclass(frozen=True)
class And:
    lhs: "Expr"
    rhs: "Expr"


@dataclass(frozen=True)
class Implies:
    lhs: "Expr"
    rhs: "Expr"


@dataclass(frozen=True)
class Selected:
    """Selection guard over a quantified variable; only in lifted ASTs."""

    var: str


@dataclass(frozen=True)
class Quant:
    kind: str  # FORALL or EXISTS
    var: str
    domain: SetExpr
    body: "Expr"
    #: element type filled in by the typechecker; ignored by equality so
    #: hand-built expected ASTs compare cleanly
    elem_type: str | None = field(default=None, compare=False)


Expr = Union[Compare, Not, Or, And, Implies, Quant, Selected, BoolLit]


@dataclass(frozen=True)
class Constraint:
    """A whole constraint; the grammar start symbol is a quantification."""

    root: Quant


@dataclass(frozen=True)
class TypedConstraint:
    """Constraint whose Quant nodes carry their element types.

    ``var_types`` is a convenience view (variable name to element type);
    with shadowing the per-node annotation is authoritative.
    """

    root: Quant
    var_types: dict[str, str] = field(default_factory=dict)


# --- typechecking ---------------------------------------------------------

def _resolve_nav(mm: Metamodel, nav: Nav, env: dict[str, str]) -> str | tuple[str, str]:
    """Semantic type of a navigation under a variable environment.

    Returns a basic type name, a class name, or ``("list", class)`` when
    the final step has multiplicity *.  Raises on unbound variables and on
    paths stepping through basic values or lists.
    """
    if nav.var not in env:
        raise UnboundVariable(f"variable '{nav.var}' is not bound")
    current = env[nav.var]
    for i, step in enumerate(nav.path):
        if current in BASIC_TYPES:
            raise NavigationKindError(
                f"cannot navigate '{step}' from basic type '{current}' "
                f"in '{nav}'")
        attr = lookup_attribute(mm, current, step)
        if attr.multiplicity is Multiplicity.MANY:
            if i != len(nav.path) - 1:
                raise NavigationKindError(
                    f"multiplicity-* slot '{step}' must be the final step "
                    f"in '{nav}'")
            return ("list", attr.target_type)
        current = attr.target_type
    return current


def _term_type(mm: Metamodel, term: Term, env: dict[str, str]) -> str:
    if isinstance(term, IntLit):
        return "int"
    if isinstance(term, StrLit):
        return "string"
    if isinstance(term, BoolLit):
        return "bool"
    if isinstance(term, SizeOf):
        t = _resolve_nav(mm, term.nav, env)
        if not (isinstance(t, tuple) and t[0] == "list"):
            raise AtomTypeMismatch(
                f"'.size' applies to multiplicity-* navigations, "
                f"'{term.nav}' has type {t}")
        return "int"
    t = _resolve_nav(mm, term, env)
    if isinstance(t, tuple):
        raise AtomTypeMismatch(
            f"navigation '{term}' is list-valued and cannot be compared "
            "directly; quantify over it or use '.size'")
    return t


def typecheck_constraint(c: Constraint, mm: Metamodel) -> TypedConstraint:
    """Resolve navigations and atom kinds; annotate quantifier types."""
    var_types: dict[str, str] = {}

    def walk(e: Expr, env: dict[str, str]) -> Expr:
        if isinstance(e, Quant):
            if isinstance(e.domain, TypeSet):
                t = e.domain.type_name
                if t in BASIC_TYPES:
                    raise UnknownTypeInQuantifier(
                        f"cannot quantify over basic type '{t}'")
                if not mm.is_class(t):
                    raise UnknownTypeInQuantifier(
                        f"type '{t}' is not declared")
                elem = t
            else:
                res = _resolve_nav(mm, e.domain.nav, env)
                if not (isinstance(res, tuple) and res[0] == "list"):
                    raise NavigationKindError(
                        f"quantification domain '{e.domain.nav}' must end "
                        "in a multiplicity-* slot")
                elem = res[1]
            var_types[e.var] = elem
            body = walk(e.body, {**env, e.var: elem})
            return dataclasses.replace(e, body=body, elem_type=elem)
        if isinstance(e, Not):
            return Not(walk(e.operand, env))
        if isinstance(e, (Or, And, Implies)):
            return type(e)(walk(e.lhs, env), walk(e.rhs, env))
        if isinstance(e, Selected):
            if e.var not in env:
                raise UnboundVariable(
                    f"selected() over unbound variable '{e.var}'")
            return e
        if isinstance(e, BoolLit):
            return e
        if isinstance(e, Compare):
            lt = _term_type(mm, e.lhs, env)
            rt = _term_type(mm, e.rhs, env)
            if lt != rt:
                raise AtomTypeMismatch(
                    f"cannot compare {lt} with {rt} in "
                    f"'{render_expr(e)}'")
            if e.op in ORDER_OPS and lt != "int":
                raise AtomTypeMismatch(
                    f"ordering '{e.op}' requires int operands, got {lt}")
            return Compare(e.op, e.lhs, e.rhs, operand_type=lt)
        raise TypeError(f"not an expression: {e!r}")

    root = walk(c.root, {})
    assert isinstance(root, Quant)
    return TypedConstraint(root=root, var_types=var_types)


# --- evaluation ---------------------------------------------------------

_NONE_MARK = object()  # basic-typed operand that navigated through NONE


def _eval_term(term: Term, g: m.InstanceGraph, env: dict[str, str]):
    """Runtime value of a term: python scalar, ('obj', id) or _NONE_MARK."""
    if isinstance(term, IntLit):
        return term.value
    if isinstance(term, StrLit):
        return term.value
    if isinstance(term, BoolLit):
        return term.value
    if isinstance(term, SizeOf):
        v = m.navigate(g, env[term.nav.var], list(term.nav.path))
        if isinstance(v, m.Ref) and v.is_none:
            return _NONE_MARK
        if not isinstance(v, m.ListVal):
            raise NavigationKindError(
                f"'.size' applied to non-list value of '{term.nav}'")
        return len(v.targets)
    v = m.navigate(g, env[term.var], list(term.path))
    if isinstance(v, m.Ref):
        return ("obj", v.target)
    if isinstance(v, m.ListVal):
        raise NavigationKindError(
            f"list-valued navigation '{term}' used as a comparison operand")
    return v.value


def _eval_compare(atom: Compare, g: m.InstanceGraph,
                  env: dict[str, str]) -> bool:
    lv = _eval_term(atom.lhs, g, env)
    rv = _eval_term(atom.rhs, g, env)
    if atom.operand_type is not None:
        object_semantics = atom.operand_type not in BASIC_TYPES
    else:
        # unannotated AST: fall back to the runtime shape of the values
        object_semantics = (isinstance(lv, tuple) and lv[0] == "obj"
                            and isinstance(rv, tuple) and rv[0] == "obj")
    if object_semantics:
        # object identity; NONE = NONE holds, NONE = o does not
        if not (isinstance(lv, tuple) and isinstance(rv, tuple)):
            return False
        eq = lv[1] == rv[1]
        return eq if atom.op == "=" else not eq
    if lv is _NONE_MARK or rv is _NONE_MARK:
        return False
    # a Ref in a basic-typed atom means the navigation absorbed NONE
    if isinstance(lv, tuple) or isinstance(rv, tuple):
        return False
    if atom.op == "=":
        return lv == rv
    if atom.op == "!=":
        return lv != rv
    if atom.op == "<":
        return lv < rv
    if atom.op == "<=":
        return lv <= rv
    if atom.op == ">":
        return lv > rv
    return lv >= rv


def evaluate(tc: TypedConstraint | Constraint, mm: Metamodel,
             g: m.InstanceGraph,
             selected: Callable[[str], bool] | None = None) -> bool:
    """Evaluate a constraint on a variability-free graph.

    NONE handling: a comparison with a NONE-valued operand is false,
    except =/!= over object references where NONE equals exactly NONE.
    ``selected`` interprets selection guards in lifted constraints and
    defaults to everything-selected; it receives object ids.
    """
    sel = selected or (lambda _oid: True)

    def ev(e: Expr, env: dict[str, str]) -> bool:
        if isinstance(e, Quant):
            if isinstance(e.domain, TypeSet):
                domain = m.extent(g, e.domain.type_name)
            else:
                nav = e.domain.nav
                v = m.navigate(g, env[nav.var], list(nav.path))
                if isinstance(v, m.Ref) and v.is_none:
                    domain = []
                elif isinstance(v, m.ListVal):
                    domain = list(v.targets)
                else:
                    raise NavigationKindError(
                        f"quantification domain '{nav}' did not yield a list")
            if e.kind == FORALL:
                return all(ev(e.body, {**env, e.var: oid}) for oid in domain)
            return any(ev(e.body, {**env, e.var: oid}) for oid in domain)
        if isinstance(e, Not):
            return not ev(e.operand, env)
        if isinstance(e, Or):
            return ev(e.lhs, env) or ev(e.rhs, env)
        if isinstance(e, And):
            return ev(e.lhs, env) and ev(e.rhs, env)
        if isinstance(e, Implies):
            return (not ev(e.lhs, env)) or ev(e.rhs, env)
        if isinstance(e, Selected):
            return sel(env[e.var])
        if isinstance(e, BoolLit):
            return e.value
        if isinstance(e, Compare):
            return _eval_compare(e, g, env)
        raise TypeError(f"not an expression: {e!r}")

    return ev(tc.root, {})


# --- rendering -----------------------------------------------------------

_PREC_IMPLIES, _PREC_OR, _PREC_AND, _PREC_UNARY = 1, 2, 3, 4


def _render(e: Expr) -> tuple[str, int, bool]:
    """Render to text.  Returns (text, precedence, has-open-quant-tail).

    The tail flag marks text ending in a quantifier body, which would
    greedily swallow a following infix operator on reparse and therefore
    needs parentheses when it appears as a left operand.
    """
    if isinstance(e, BoolLit):
        return ("true" if e.value else "false"), _PREC_UNARY, False
    if isinstance(e, Compare):
        return f"{_render_term(e.lhs)} {e.op} {_render_term(e.rhs)}", \
            _PREC_UNARY, False
    if isinstance(e, Selected):
        return f"selected({e.var})", _PREC_UNARY, False
    if isinstance(e, Quant):
        dom = e.domain.type_name if isinstance(e.domain, TypeSet) \
            else str(e.domain.nav)
        body, _, _ = _render(e.body)
        return f"{e.kind} {e.var} in {dom}: {body}", _PREC_UNARY, True
    if isinstance(e, Not):
        text, _, tail = _render(e.operand)
        if isinstance(e.operand, Quant):
            return f"!{text}", _PREC_UNARY, True
        return f"!({text})", _PREC_UNARY, False
    ops = {Or: ("||", _PREC_OR), And: ("&&", _PREC_AND),
           Implies: ("=>", _PREC_IMPLIES)}
    sym, prec = ops[type(e)]
    lt, lp, ltail = _render(e.lhs)
    rt, rp, rtail = _render(e.rhs)
    # left operand: parenthesize on lower precedence, on equal precedence
    # for the right-associative =>, and on a dangling quantifier body
    if lp < prec or (lp == prec and isinstance(e, Implies)) or ltail:
        lt, ltail = f"({lt})", False
    # right operand: associative chains stay flat; lower precedence nests
    if rp < prec:
        rt, rtail = f"({rt})", False
    return f"{lt} {sym} {rt}", prec, rtail


def _render_term(t: Term) -> str:
    if isinstance(t, Nav):
        return str(t)
    if isinstance(t, SizeOf):
        return f"{t.nav}.size"
    if isinstance(t, IntLit):
        return str(t.value)
    if isinstance(t, StrLit):
        escaped = t.value.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    return "true" if t.value else "false"


def render_expr(e: Expr) -> str:
    return _render(e)[0]


def render_constraint(c: Constraint | TypedConstraint) -> str:
    return render_expr(c.root)
