"""SMT-LIB v2 back-end: script emission, solver driver, verdict decoding.

The emitted script encodes a product line plus one lifted constraint:

  features   -- one Bool constant per feature, feature-model conjuncts
                asserted one by one
  datatypes  -- per class an enumeration datatype listing its objects plus
                a NONE constructor (empty classes keep just NONE)
  selection  -- per class a selected_<Class> function asserted to each
                object's presence condition; NONE is never selected
  slots      -- per attribute a total function; single references bind via
                (ite (selected ...) target NONE), lists via concatenation
                of ite-guarded unit sequences in source order; NONE rows
                are pinned to defaults (0, false, "", NONE, empty)
  constraint -- the translated lifted constraint, negated, so that sat
                means some variant violates the original constraint
  check      -- (check-sat) then (get-model)

Comparison atoms over basic values carry an explicit non-NONE side
condition on any operand that dereferences at least one reference slot,
which keeps the solver's semantics aligned with the evaluator's rule that
a NONE-valued basic operand falsifies the atom.  Object equality needs no
guard: NONE propagation in the slot functions matches the evaluator.

A solver is any executable that accepts a script on stdin and answers
sat/unsat/unknown (plus a get-model block) on stdout.  The command is
taken from the explicit argument, else the PLIFT_SOLVER environment
variable, else the bundled fragment solver is spawned.
"""

from __future__ import annotations

import os
import shlex
import subprocess
import sys
from dataclasses import dataclass
from typing import Union

from . import variability as v
from .binding import bind
from .constraints import (And, BoolLit, Compare, EXISTS, Expr, FORALL,
                          Implies, IntLit, Nav, Not, Or, Quant, Selected,
                          SizeOf, StrLit, COMPARE_OPS, TypeSet,
                          TypedConstraint, evaluate)
from .errors import (BundleError, DecodeError, SolverParseError,
                     SolverProcessError, UnsupportedAtom)
from .lifting import LiftedConstraint, lift
from .metamodel import BASIC_TYPES, Metamodel, Multiplicity, is_identifier
from .model import ListVal, Ref
from .variability import Configuration, FeatureModel, ProductLine, \
    make_configuration

DEFAULT_SOLVER = (sys.executable, "-m", "plift.smtsolve")

_SECTION_ORDER = ("features", "datatypes", "selection", "slots",
                  "constraint", "check")


@dataclass(frozen=True)
class SmtScript:
    """Ordered command lists per section; rendering is byte-deterministic."""

    sections: tuple[tuple[str, tuple[str, ...]], ...]

    @property
    def text(self) -> str:
        lines = []
        for name, cmds in self.sections:
            lines.append(f"; --- {name} ---")
            lines.extend(cmds)
        return "\n".join(lines) + "\n"

    def section(self, name: str) -> tuple[str, ...]:
        for sec, cmds in self.sections:
            if sec == name:
                return cmds
        raise KeyError(name)


# --- verdicts ---------------------------------------------------------

@dataclass(frozen=True)
class AllVariantsSatisfy:
    pass


@dataclass(frozen=True)
class Violation:
    config: Configuration
    confirmed: bool


@dataclass(frozen=True)
class SolverUnknown:
    reason: str


Verdict = Union[AllVariantsSatisfy, Violation, SolverUnknown]


# --- formula and literal rendering ---------------------------------------

def _formula_sexpr(phi: v.PropFormula) -> str:
    if isinstance(phi, v.TrueLit):
        return "true"
    if isinstance(phi, v.FalseLit):
        return "false"
    if isinstance(phi, v.FeatVar):
        return phi.name
    if isinstance(phi, v.Not):
        return f"(not {_formula_sexpr(phi.operand)})"
    sym = {v.And: "and", v.Or: "or", v.Implies: "=>"}[type(phi)]
    return f"({sym} {_formula_sexpr(phi.lhs)} {_formula_sexpr(phi.rhs)})"


def _int_lit(n: int) -> str:
    return str(n) if n >= 0 else f"(- {-n})"


def _string_lit(s: str) -> str:
    return '"' + s.replace('"', '""') + '"'


def _sort_of(mm: Metamodel, type_name: str, many: bool) -> str:
    if many:
        return f"(Seq {type_name})"
    return {"int": "Int", "bool": "Bool", "string": "String"}.get(
        type_name, type_name)


def _default_for(type_name: str, many: bool) -> str:
    if many:
        return f"(as seq.empty (Seq {type_name}))"
    return {"int": "0", "bool": "false", "string": '""'}.get(
        type_name, f"NONE_{type_name}")


# --- emission ---------------------------------------------------------------

class _Emitter:
    def __init__(self, pl: ProductLine):
        self.pl = pl
        self.mm = pl.metamodel

    def _check_symbols(self) -> None:
        """The term namespace (features, object ids, function names) must be
        collision-free and SMT-embeddable."""
        seen: dict[str, str] = {}

        def claim(symbol: str, role: str):
            if not is_identifier(symbol):
                raise BundleError(
                    f"{role} '{symbol}' is not embeddable as an SMT symbol")
            if symbol in seen:
                raise BundleError(
                    f"symbol collision: {role} '{symbol}' already used as "
                    f"{seen[symbol]}")
            seen[symbol] = role

        for f in self.pl.feature_model.features:
            claim(f, "feature")
        for cls in self.mm.classes:
            claim(f"NONE_{cls}", "none constructor")
            claim(f"selected_{cls}", "selection function")
            for attr in self.mm.classes[cls].attributes:
                claim(f"{cls}_{attr}", "slot function")
        for oid in self.pl.model.objects.keys():
            claim(oid, "object id")

    def _objects_of(self, cls: str) -> list[str]:
        return [oid for oid, obj in self.pl.model.objects.items()
                if obj.type == cls]

    def emit(self, lc: LiftedConstraint) -> SmtScript:
        self._check_symbols()
        sections = {name: [] for name in _SECTION_ORDER}

        fm = self.pl.feature_model
        for f in fm.features:
            sections["features"].append(f"(declare-const {f} Bool)")
        for part in v.conjuncts(fm.formula):
            if isinstance(part, v.FeatVar):
                sections["features"].append(f"(assert (= {part.name} true))")
            else:
                sections["features"].append(
                    f"(assert {_formula_sexpr(part)})")

        for cls in self.mm.classes:
            ctors = " ".join(self._objects_of(cls) + [f"NONE_{cls}"])
            sections["datatypes"].append(
                f"(declare-datatypes () (({cls} {ctors})))")

        for cls in self.mm.classes:
            sel = f"selected_{cls}"
            sections["selection"].append(
                f"(declare-fun {sel} ({cls}) Bool)")
            for oid in self._objects_of(cls):
                pc = _formula_sexpr(self.pl.presence.condition(oid))
                sections["selection"].append(
                    f"(assert (= ({sel} {oid}) {pc}))")
            sections["selection"].append(
                f"(assert (= ({sel} NONE_{cls}) false))")

        for cls, body in self.mm.classes.items():
            for aname, attr in body.attributes.items():
                fn = f"{cls}_{aname}"
                many = attr.multiplicity is Multiplicity.MANY
                sort = _sort_of(self.mm, attr.target_type, many)
                sections["slots"].append(
                    f"(declare-fun {fn} ({cls}) {sort})")
                for oid in self._objects_of(cls):
                    val = self.pl.model.objects[oid].slots[aname]
                    sections["slots"].append(
                        f"(assert (= ({fn} {oid}) "
                        f"{self._slot_value(attr, val)}))")
                sections["slots"].append(
                    f"(assert (= ({fn} NONE_{cls}) "
                    f"{_default_for(attr.target_type, many)}))")

        sections["constraint"].append(
            f"(assert (not {self._expr(lc.root, {})}))")
        sections["check"].append("(check-sat)")
        sections["check"].append("(get-model)")
        return SmtScript(tuple(
            (name, tuple(sections[name])) for name in _SECTION_ORDER))

    def _slot_value(self, attr, val) -> str:
        t = attr.target_type
        if attr.multiplicity is Multiplicity.MANY:
            assert isinstance(val, ListVal)
            items = [
                f"(ite (selected_{t} {e}) (seq.unit {e}) "
                f"(as seq.empty (Seq {t})))"
                for e in val.targets
            ]
            if not items:
                return f"(as seq.empty (Seq {t}))"
            if len(items) == 1:
                return items[0]
            return "(seq.++ " + " ".join(items) + ")"
        if isinstance(val, Ref):
            if val.is_none:
                return f"NONE_{t}"
            return f"(ite (selected_{t} {val.target}) {val.target} NONE_{t})"
        if t == "int":
            return _int_lit(val.value)
        if t == "bool":
            return "true" if val.value else "false"
        return _string_lit(val.value)

    # --- navigation helpers -----------------------------------------

    def _nav_term(self, nav: Nav, env: dict[str, str]) -> tuple[str, str, bool]:
        """Translate a navigation; returns (term, final type, is_many)."""
        term = nav.var
        cls = env[nav.var]
        many = False
        for step in nav.path:
            attr = self.mm.classes[cls].attributes[step]
            term = f"({cls}_{step} {term})"
            many = attr.multiplicity is Multiplicity.MANY
            cls = attr.target_type
        return term, cls, many

    def _none_guard(self, nav: Nav, env: dict[str, str]) -> str | None:
        """Non-NONE side condition for an operand that dereferences at
        least one reference slot before its final step."""
        if len(nav.path) < 2:
            return None
        prefix = Nav(nav.var, nav.path[:-1])
        term, cls, many = self._nav_term(prefix, env)
        assert not many
        return f"(not (= {term} NONE_{cls}))"

    def _term(self, t, env: dict[str, str]) -> tuple[str, bool, str | None]:
        """Translate a term: (text, is_object_valued, optional guard)."""
        if isinstance(t, IntLit):
            return _int_lit(t.value), False, None
        if isinstance(t, StrLit):
            return _string_lit(t.value), False, None
        if isinstance(t, BoolLit):
            return ("true" if t.value else "false"), False, None
        if isinstance(t, SizeOf):
            text, _cls, many = self._nav_term(t.nav, env)
            if not many:
                raise UnsupportedAtom(
                    f"'.size' over non-list navigation '{t.nav}'")
            return f"(seq.len {text})", False, self._none_guard(t.nav, env)
        assert isinstance(t, Nav)
        text, cls, many = self._nav_term(t, env)
        if many:
            raise UnsupportedAtom(
                f"list-valued navigation '{t}' in a comparison")
        if cls in BASIC_TYPES:
            return text, False, self._none_guard(t, env)
        return text, True, None

    def _atom(self, e: Compare, env: dict[str, str]) -> str:
        if e.op not in COMPARE_OPS:
            raise UnsupportedAtom(f"comparison operator '{e.op}'")
        lhs, _, g1 = self._term(e.lhs, env)
        rhs, _, g2 = self._term(e.rhs, env)
        if e.op == "=":
            core = f"(= {lhs} {rhs})"
        elif e.op == "!=":
            core = f"(not (= {lhs} {rhs}))"
        else:
            core = f"({e.op} {lhs} {rhs})"
        guards = [g for g in (g1, g2) if g]
        if guards:
            return "(and " + " ".join(guards + [core]) + ")"
        return core

    def _expr(self, e: Expr, env: dict[str, str]) -> str:
        if isinstance(e, Quant):
            op = "forall" if e.kind == FORALL else "exists"
            if isinstance(e.domain, TypeSet):
                cls = e.domain.type_name
                body = self._expr(e.body, {**env, e.var: cls})
                return f"({op} (({e.var} {cls})) {body})"
            nav = e.domain.nav
            text, cls, many = self._nav_term(nav, env)
            if not many:
                raise UnsupportedAtom(
                    f"quantification domain '{nav}' is not list-valued")
            body = self._expr(e.body, {**env, e.var: cls})
            member = f"(seq.contains {text} (seq.unit {e.var}))"
            if e.kind == FORALL:
                return f"({op} (({e.var} {cls})) (=> {member} {body}))"
            return f"({op} (({e.var} {cls})) (and {member} {body}))"
        if isinstance(e, Selected):
            return f"(selected_{env[e.var]} {e.var})"
        if isinstance(e, Not):
            return f"(not {self._expr(e.operand, env)})"
        if isinstance(e, And):
            return f"(and {self._expr(e.lhs, env)} {self._expr(e.rhs, env)})"
        if isinstance(e, Or):
            return f"(or {self._expr(e.lhs, env)} {self._expr(e.rhs, env)})"
        if isinstance(e, Implies):
            return f"(=> {self._expr(e.lhs, env)} {self._expr(e.rhs, env)})"
        if isinstance(e, BoolLit):
            return "true" if e.value else "false"
        if isinstance(e, Compare):
            return self._atom(e, env)
        raise TypeError(f"not an expression: {e!r}")


def emit_smt(pl: ProductLine, lc: LiftedConstraint) -> SmtScript:
    """Translate a product line plus lifted constraint to SMT-LIB v2."""
    return _Emitter(pl).emit(lc)


# --- solver driver --------------------------------------------------------

def resolve_solver_cmd(solver_cmd=None) -> list[str]:
    if solver_cmd is None:
        solver_cmd = os.environ.get("PLIFT_SOLVER") or DEFAULT_SOLVER
    if isinstance(solver_cmd, str):
        return shlex.split(solver_cmd)
    return list(solver_cmd)


def run_solver(script_text: str, solver_cmd=None,
               timeout: float | None = None) -> str:
    """Feed a script to the solver process; returns raw stdout.

    Raises SolverProcessError on spawn/IO failure and
    subprocess.TimeoutExpired on timeout (mapped by check()).
    """
    cmd = resolve_solver_cmd(solver_cmd)
    try:
        proc = subprocess.run(
            cmd, input=script_text, capture_output=True, text=True,
            timeout=timeout)
    except (OSError, ValueError) as exc:
        raise SolverProcessError(
            f"could not run solver {' '.join(cmd)}: {exc}") from exc
    if not proc.stdout.strip():
        raise SolverProcessError(
            f"solver {' '.join(cmd)} produced no output"
            + (f"; stderr: {proc.stderr.strip()}" if proc.stderr.strip() else ""))
    return proc.stdout


# --- model decoding ---------------------------------------------------------

def _sexpr_tokens(text: str):
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif ch in "()":
            yield ch
            i += 1
        elif ch == '"':
            j = i + 1
            while j < n:
                if text[j] == '"':
                    if j + 1 < n and text[j + 1] == '"':
                        j += 2
                        continue
                    break
                j += 1
            yield text[i:j + 1]
            i = j + 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in '();"':
                j += 1
            yield text[i:j]
            i = j


def _parse_sexprs(text: str) -> list:
    stack: list[list] = [[]]
    for tok in _sexpr_tokens(text):
        if tok == "(":
            stack.append([])
        elif tok == ")":
            done = stack.pop()
            if not stack:
                raise SolverParseError("unbalanced parentheses in output")
            stack[-1].append(done)
        else:
            stack[-1].append(tok)
    if len(stack) != 1:
        raise SolverParseError("unbalanced parentheses in output")
    return stack[0]


def decode_model(solver_output: str, fm: FeatureModel) -> Configuration:
    """Extract the feature assignment from a sat response.

    Features absent from the model default to false; the decoded
    assignment is validated against the feature model (a violation here
    signals a translation bug, surfaced as InvalidConfiguration).
    """
    try:
        nodes = _parse_sexprs(solver_output)
    except SolverParseError as exc:
        raise DecodeError(str(exc)) from exc
    values: dict[str, bool] = {}

    def visit(node):
        if not isinstance(node, list):
            return
        if len(node) >= 5 and node[0] == "define-fun" and node[2] == [] \
                and node[3] == "Bool" and isinstance(node[1], str):
            name, val = node[1], node[4]
            if name in fm.features:
                if val not in ("true", "false"):
                    raise DecodeError(
                        f"unparseable value {val!r} for feature '{name}'")
                values[name] = val == "true"
            return
        for child in node:
            visit(child)

    for node in nodes:
        if node == "model" or isinstance(node, str):
            continue
        if isinstance(node, list) and node[:1] == ["model"]:
            node = node[1:]
        visit(node)
    assignment = {f: values.get(f, False) for f in fm.features}
    return make_configuration(fm, assignment)


# --- end-to-end check -------------------------------------------------------

def check(pl: ProductLine, tc: TypedConstraint, solver_cmd=None,
          timeout: float | None = None) -> Verdict:
    """Lift, translate, solve, decode, and confirm.

    unsat means every variant satisfies the constraint; sat yields the
    violating configuration, recheck-confirmed by concretely binding the
    product line and evaluating the original constraint on the variant.
    """
    lc = lift(tc)
    script = emit_smt(pl, lc)
    try:
        output = run_solver(script.text, solver_cmd, timeout)
    except subprocess.TimeoutExpired:
        return SolverUnknown(f"solver timeout after {timeout}s")
    status = None
    for line in output.splitlines():
        line = line.strip()
        if line in ("sat", "unsat", "unknown"):
            status = line
            break
        if line and not line.startswith(";"):
            break
    if status is None:
        raise SolverParseError(
            f"unrecognized solver response: {output.strip()[:200]!r}")
    if status == "unsat":
        return AllVariantsSatisfy()
    if status == "unknown":
        return SolverUnknown(output.strip()[:500])
    config = decode_model(output, pl.feature_model)
    variant = bind(pl, config)
    violates = not evaluate(tc, pl.metamodel, variant.graph)
    return Violation(config=config, confirmed=violates)
