"""Constraint lifting: make a variant-level constraint family-checkable.

The rewrite guards every quantifier over a class extent with a selection
predicate on the bound variable — implication under forall, conjunction
under exists — and leaves quantifiers over navigated lists untouched,
because symbolic binding already restricts those lists to selected
elements.  Navigations and atoms pass through unchanged.

``selected`` stays abstract here: the SMT back-end interprets it as the
per-class selection functions, and the direct evaluator as the presence
condition of the bound object under the configuration at hand.  And/=>
are rewritten homomorphically, which coincides with routing them through
their ¬/∨ desugaring.
"""

from __future__ import annotations

from dataclasses import dataclass

from .constraints import (And, BoolLit, Compare, Constraint, EXISTS, Expr,
                          FORALL, Implies, Not, Or, Quant, Selected, TypeSet,
                          TypedConstraint, render_expr)


@dataclass(frozen=True)
class LiftedConstraint:
    """Marker wrapper distinguishing lifted ASTs from source ASTs."""

    root: Quant


def _lift(e: Expr) -> Expr:
    if isinstance(e, Quant):
        body = _lift(e.body)
        if isinstance(e.domain, TypeSet):
            guard = Selected(e.var)
            body = Implies(guard, body) if e.kind == FORALL \
                else And(guard, body)
        return Quant(e.kind, e.var, e.domain, body, elem_type=e.elem_type)
    if isinstance(e, Not):
        return Not(_lift(e.operand))
    if isinstance(e, (Or, And, Implies)):
        return type(e)(_lift(e.lhs), _lift(e.rhs))
    if isinstance(e, (Compare, BoolLit, Selected)):
        return e
    raise TypeError(f"not an expression: {e!r}")


def lift(tc: TypedConstraint | Constraint) -> LiftedConstraint:
    """Apply the lifting rewrite; the input AST is left untouched."""
    root = _lift(tc.root)
    assert isinstance(root, Quant)
    return LiftedConstraint(root)


def strip_guards(e: Expr) -> Expr:
    """Inverse check helper: remove selection guards inserted by lift."""
    if isinstance(e, Quant):
        body = e.body
        if isinstance(e.domain, TypeSet):
            if isinstance(body, Implies) and isinstance(body.lhs, Selected):
                body = body.rhs
            elif isinstance(body, And) and isinstance(body.lhs, Selected):
                body = body.rhs
        return Quant(e.kind, e.var, e.domain, strip_guards(body),
                     elem_type=e.elem_type)
    if isinstance(e, Not):
        return Not(strip_guards(e.operand))
    if isinstance(e, (Or, And, Implies)):
        return type(e)(strip_guards(e.lhs), strip_guards(e.rhs))
    return e


def print_lifted(lc: LiftedConstraint) -> str:
    """Render in the constraint DSL extended with selected(v) guards."""
    return render_expr(lc.root)
