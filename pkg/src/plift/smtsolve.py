"""Bundled batch SMT solver for the emitted product-line fragment.

Reads an SMT-LIB v2 script on stdin (or a file argument), prints
``sat``/``unsat`` and a Z3-style model block on stdout.  Deliberately a
decision procedure for a fragment, not a general solver:

  * free constants must be Bool (the feature variables);
  * datatypes are plain enumerations;
  * every declared function must be totally defined by equational asserts
    ``(= (f CTOR) rhs)`` over closed right-hand sides;
  * sequences are built from unit/empty/concat over enumeration elements
    and consumed by ``seq.contains`` (single-element needles) and
    ``seq.len``;
  * quantifiers range over the finite enumeration sorts.

Everything else is rejected with an ``(error ...)`` response rather than
answered wrongly.  Remaining asserts are evaluated symbolically into
propositional formulas over the free Booleans; satisfiability is decided
by the assignment-scan kernel for small variable counts and by a
lexicographic-first DPLL beyond that, so the reported model is always the
lexicographically smallest in declaration order.

This module must stay importable without the rest of the package's
dependency surface (it is spawned as a subprocess per check), so it only
uses the standard library and the scan kernel.
"""

from __future__ import annotations

import re
import sys

from . import satscan

_TOKEN_RE = re.compile(r'\(|\)|"(?:[^"]|"")*"|;[^\n]*|[^\s()";]+')
_NUM_RE = re.compile(r"-?[0-9]+\Z")

SCAN_VAR_LIMIT = 20


class FragmentError(Exception):
    """Input outside the supported fragment, or malformed."""


def tokenize(text: str):
    for tok in _TOKEN_RE.findall(text):
        if tok.startswith(";"):
            continue
        yield tok


def parse_script(text: str) -> list:
    """Parse into nested lists of atoms (strings)."""
    stack: list[list] = [[]]
    for tok in tokenize(text):
        if tok == "(":
            stack.append([])
        elif tok == ")":
            if len(stack) == 1:
                raise FragmentError("unbalanced ')'")
            done = stack.pop()
            stack[-1].append(done)
        else:
            stack[-1].append(tok)
    if len(stack) != 1:
        raise FragmentError("unbalanced '('")
    return stack[0]


# --- propositional formulas over the free Booleans -------------------------
#
# True/False are Python bools; otherwise hash-consed tuples:
#   ('v', name) | ('!', f) | ('&', (f, ...)) | ('|', (f, ...))

def mk_not(f):
    if f is True:
        return False
    if f is False:
        return True
    if f[0] == "!":
        return f[1]
    return ("!", f)


def _mk_nary(tag, absorber, fs):
    flat = []
    seen = set()
    for f in fs:
        if f is absorber:
            return absorber
        if f is (not absorber):
            continue
        children = f[1] if (isinstance(f, tuple) and f[0] == tag) else (f,)
        for c in children:
            if c is absorber:
                return absorber
            if c is (not absorber):
                continue
            if c not in seen:
                seen.add(c)
                flat.append(c)
    for c in flat:
        if mk_not(c) in seen:
            return absorber
    if not flat:
        return not absorber
    if len(flat) == 1:
        return flat[0]
    return (tag, tuple(flat))


def mk_and(fs):
    return _mk_nary("&", False, fs)


def mk_or(fs):
    return _mk_nary("|", True, fs)


def mk_iff(a, b):
    return mk_or((mk_and((a, b)), mk_and((mk_not(a), mk_not(b)))))


def formula_vars(f, acc: set):
    if isinstance(f, bool):
        return
    tag = f[0]
    if tag == "v":
        acc.add(f[1])
    elif tag == "!":
        formula_vars(f[1], acc)
    else:
        for c in f[1]:
            formula_vars(c, acc)


def subst(f, assignment: dict):
    """Partial evaluation under a var->bool assignment (with folding)."""
    if isinstance(f, bool):
        return f
    tag = f[0]
    if tag == "v":
        return assignment.get(f[1], f)
    if tag == "!":
        return mk_not(subst(f[1], assignment))
    parts = tuple(subst(c, assignment) for c in f[1])
    return mk_and(parts) if tag == "&" else mk_or(parts)


def compile_to_bytecode(f, var_order: list[str]) -> bytes:
    index = {name: i for i, name in enumerate(var_order)}
    ops = bytearray()

    def emit(g):
        if g is True:
            ops.extend((satscan.OP_TRUE, 0))
        elif g is False:
            ops.extend((satscan.OP_FALSE, 0))
        elif g[0] == "v":
            ops.extend((satscan.OP_VAR, index[g[1]]))
        elif g[0] == "!":
            emit(g[1])
            ops.extend((satscan.OP_NOT, 0))
        else:
            op = satscan.OP_AND if g[0] == "&" else satscan.OP_OR
            children = g[1]
            emit(children[0])
            for c in children[1:]:
                emit(c)
                ops.extend((op, 0))

    emit(f)
    return bytes(ops)


def dpll(f, var_order: list[str]):
    """Lexicographically-first model, or None.  False is tried before True
    at every level, so the first model found is the smallest one."""
    assignment: dict[str, bool] = {}

    def units(g):
        found = {}
        clauses = g[1] if (isinstance(g, tuple) and g[0] == "&") else (g,)
        for c in clauses:
            if isinstance(c, tuple):
                if c[0] == "v":
                    found[c[1]] = True
                elif c[0] == "!" and c[1][0] == "v":
                    found[c[1][1]] = False
        return found

    def search(g, depth):
        while True:
            if g is True:
                return True
            if g is False:
                return False
            forced = units(g)
            if not forced:
                break
            assignment.update(forced)
            g = subst(g, forced)
        if depth >= len(var_order):
            return False
        var = var_order[depth]
        if var in assignment:
            return search(g, depth + 1)
        for value in (False, True):
            assignment[var] = value
            trail = dict(assignment)
            if search(subst(g, {var: value}), depth + 1):
                return True
            assignment.clear()
            assignment.update(trail)
            del assignment[var]
        return False

    if search(f, 0):
        return {name: assignment.get(name, False) for name in var_order}
    return None


# --- symbolic values ---------------------------------------------------------
#
#   ('c', pyval)                      concrete scalar / constructor
#   ('cases', ((guard, pyval), ...))  guarded scalar case split
#   ('gseq', ((guard, ctor), ...))    ordered guarded sequence elements

def is_formula(x) -> bool:
    return isinstance(x, bool) or (isinstance(x, tuple)
                                   and x[0] in ("v", "!", "&", "|"))


def as_cases(x):
    if x[0] == "c":
        return ((True, x[1]),)
    if x[0] == "cases":
        return x[1]
    raise FragmentError(f"expected a scalar value, got {x[0]}")


def make_cases(pairs):
    """Normalize a guard/value list: drop false guards, merge duplicates."""
    merged: dict = {}
    order = []
    for guard, val in pairs:
        if guard is False:
            continue
        if val in merged:
            merged[val] = mk_or((merged[val], guard))
        else:
            merged[val] = guard
            order.append(val)
    if len(order) == 1 and merged[order[0]] is True:
        return ("c", order[0])
    return ("cases", tuple((merged[v], v) for v in order))


def _unescape_smt_string(tok: str) -> str:
    return tok[1:-1].replace('""', '"')


class Solver:
    def __init__(self):
        self.sorts: dict[str, tuple[str, ...]] = {}       # sort -> constructors
        self.ctor_sort: dict[str, str] = {}
        self.funcs: dict[str, tuple[str, str]] = {}       # name -> (arg, result)
        self.defs: dict[tuple[str, str], list] = {}       # (fn, ctor) -> rhs term
        self.rows: dict[tuple[str, str], object] = {}     # evaluated rows
        self.row_stack: list[tuple[str, str]] = []
        self.bools: list[str] = []                        # free Bool constants
        self.goal = []                                    # formulas to satisfy
        self.last_result: str | None = None
        self.model: dict[str, bool] | None = None
        self.out: list[str] = []
        self._free_cache: dict[int, frozenset] = {}
        self._eval_cache: dict = {}

    # --- commands ---------------------------------------------------

    def run(self, text: str) -> str:
        for cmd in parse_script(text):
            if not isinstance(cmd, list) or not cmd:
                raise FragmentError(f"stray token {cmd!r}")
            head = cmd[0]
            handler = getattr(self, "cmd_" + head.replace("-", "_")
                              .replace(".", "_"), None)
            if handler is None:
                if head in ("set-logic", "set-option", "set-info",
                            "get-info"):
                    continue
                raise FragmentError(f"unsupported command '{head}'")
            if handler(cmd) is StopIteration:
                break
        return "\n".join(self.out) + ("\n" if self.out else "")

    def cmd_exit(self, cmd):
        return StopIteration

    def cmd_echo(self, cmd):
        self.out.append(_unescape_smt_string(cmd[1]))

    def cmd_declare_const(self, cmd):
        name, sort = cmd[1], cmd[2]
        self._declare_free(name, sort)

    def cmd_declare_fun(self, cmd):
        name, args, result = cmd[1], cmd[2], cmd[3]
        if args == []:
            self._declare_free(name, result)
            return
        if not (isinstance(args, list) and len(args) == 1
                and isinstance(args[0], str)):
            raise FragmentError(
                f"function '{name}': only unary functions over enumeration "
                "sorts are supported")
        if args[0] not in self.sorts:
            raise FragmentError(
                f"function '{name}': argument sort '{args[0]}' is not an "
                "enumeration")
        self.funcs[name] = (args[0], self._sort_name(result))

    def _declare_free(self, name: str, sort) -> None:
        if sort != "Bool":
            raise FragmentError(
                f"free constant '{name}' has sort {sort}; only Bool "
                "constants are supported")
        if name in self.bools:
            raise FragmentError(f"duplicate declaration of '{name}'")
        self.bools.append(name)

    def _sort_name(self, sort) -> str:
        if isinstance(sort, str):
            return sort
        if isinstance(sort, list) and len(sort) == 2 and sort[0] == "Seq":
            return f"(Seq {self._sort_name(sort[1])})"
        raise FragmentError(f"unsupported sort {sort!r}")

    def cmd_declare_datatypes(self, cmd):
        params, groups = cmd[1], cmd[2]
        if params == []:
            # legacy syntax: ((T c1 c2 ...) ...)
            for group in groups:
                name, ctors = group[0], group[1:]
                self._add_enum(name, ctors)
        else:
            # 2.6 syntax: ((T 0) ...) (((c1) (c2) ...) ...)
            for (name, _arity), ctors in zip(params, groups):
                self._add_enum(name, [c[0] if isinstance(c, list) else c
                                      for c in ctors])

    def _add_enum(self, name: str, ctors) -> None:
        if name in self.sorts:
            raise FragmentError(f"duplicate sort '{name}'")
        names = []
        for c in ctors:
            if not isinstance(c, str):
                raise FragmentError(
                    f"sort '{name}': constructors must be nullary")
            if c in self.ctor_sort:
                raise FragmentError(f"duplicate constructor '{c}'")
            self.ctor_sort[c] = name
            names.append(c)
        self.sorts[name] = tuple(names)

    def cmd_assert(self, cmd):
        term = cmd[1]
        if self._try_definition(term):
            return
        value = self.eval(term, {})
        if not is_formula(value):
            raise FragmentError("assert of a non-Boolean term")
        self.goal.append(value)

    def _try_definition(self, term) -> bool:
        if not (isinstance(term, list) and len(term) == 3 and term[0] == "="):
            return False
        for app, rhs in ((term[1], term[2]), (term[2], term[1])):
            if (isinstance(app, list) and len(app) == 2
                    and isinstance(app[0], str) and app[0] in self.funcs
                    and isinstance(app[1], str)
                    and app[1] in self.ctor_sort
                    and self.ctor_sort[app[1]] == self.funcs[app[0]][0]
                    and (app[0], app[1]) not in self.defs):
                self.defs[(app[0], app[1])] = rhs
                return True
        return False

    def cmd_check_sat(self, cmd):
        goal = mk_and(self.goal)
        model = self._solve(goal)
        if model is None:
            self.last_result = "unsat"
            self.model = None
        else:
            self.last_result = "sat"
            self.model = model
        self.out.append(self.last_result)

    def cmd_get_model(self, cmd):
        if self.model is None:
            self.out.append('(error "model is not available")')
            return
        lines = ["("]
        for name in self.bools:
            val = "true" if self.model[name] else "false"
            lines.append(f"  (define-fun {name} () Bool")
            lines.append(f"    {val})")
        lines.append(")")
        self.out.append("\n".join(lines))

    def _solve(self, goal):
        if goal is False:
            return None
        order = list(self.bools)
        if goal is True:
            return {name: False for name in order}
        relevant: set[str] = set()
        formula_vars(goal, relevant)
        missing = relevant - set(order)
        if missing:
            raise FragmentError(
                "goal mentions undeclared symbols: " + ", ".join(sorted(missing)))
        if len(order) <= SCAN_VAR_LIMIT:
            code = compile_to_bytecode(goal, order)
            mask = satscan.find_first(code, len(order))
            if mask is None:
                return None
            n = len(order)
            return {name: bool((mask >> (n - 1 - j)) & 1)
                    for j, name in enumerate(order)}
        return dpll(goal, order)

    # --- symbolic evaluation ------------------------------------------

    def _free_idents(self, term) -> frozenset:
        """Bare identifiers occurring in a term, cached by node identity;
        used to key the evaluation memo on just the relevant bindings."""
        if isinstance(term, str):
            return frozenset((term,))
        key = id(term)
        cached = self._free_cache.get(key)
        if cached is None:
            acc: set[str] = set()
            for sub in term:
                acc |= self._free_idents(sub)
            cached = frozenset(acc)
            self._free_cache[key] = cached
        return cached

    def eval(self, term, env: dict):
        if isinstance(term, str):
            return self._eval_atom(term, env)
        if env:
            relevant = tuple(sorted(
                (v, env[v][1]) for v in self._free_idents(term) if v in env))
        else:
            relevant = ()
        key = (id(term), relevant)
        hit = self._eval_cache.get(key)
        if hit is None:
            hit = self._eval_list(term, env)
            self._eval_cache[key] = hit
        return hit

    def _eval_atom(self, term: str, env: dict):
        if term in env:
            return env[term]
        if term in self.ctor_sort:
            return ("c", term)
        if term in self.bools:
            return ("v", term)
        if term == "true":
            return True
        if term == "false":
            return False
        if _NUM_RE.match(term):
            return ("c", int(term))
        if term.startswith('"'):
            return ("c", _unescape_smt_string(term))
        raise FragmentError(f"unknown symbol '{term}'")

    def _eval_list(self, term: list, env: dict):
        head = term[0]
        if head == "ite":
            return self._eval_ite(term, env)
        if head == "not":
            return mk_not(self._eval_bool(term[1], env))
        if head == "and":
            return mk_and(tuple(self._eval_bool(t, env) for t in term[1:]))
        if head == "or":
            return mk_or(tuple(self._eval_bool(t, env) for t in term[1:]))
        if head == "=>":
            args = [self._eval_bool(t, env) for t in term[1:]]
            out = args[-1]
            for a in reversed(args[:-1]):
                out = mk_or((mk_not(a), out))
            return out
        if head == "=":
            return self._eval_eq(term[1], term[2], env)
        if head in ("<", "<=", ">", ">="):
            return self._eval_order(head, term[1], term[2], env)
        if head in ("+", "-", "*"):
            return self._eval_arith(head, term[1:], env)
        if head == "seq.unit":
            return ("gseq", tuple((g, val) for g, val
                                  in as_cases(self.eval(term[1], env))))
        if head == "seq.++":
            parts = []
            for t in term[1:]:
                parts.extend(self._eval_seq(t, env))
            return ("gseq", tuple(parts))
        if head == "as":
            if term[1] == "seq.empty":
                return ("gseq", ())
            raise FragmentError(f"unsupported qualified term {term!r}")
        if head == "seq.contains":
            return self._eval_contains(term[1], term[2], env)
        if head == "seq.len":
            return self._eval_len(term[1], env)
        if head in ("forall", "exists"):
            return self._eval_quant(head, term[1], term[2], env)
        if isinstance(head, str) and head in self.funcs:
            return self._eval_app(head, term[1], env)
        raise FragmentError(f"unsupported term {head!r}")

    def _eval_bool(self, term, env):
        val = self.eval(term, env)
        if not is_formula(val):
            raise FragmentError(f"expected a Boolean term, got {val[0]}")
        return val

    def _eval_seq(self, term, env):
        val = self.eval(term, env)
        if not (isinstance(val, tuple) and val[0] == "gseq"):
            raise FragmentError("expected a sequence term")
        return val[1]

    def _eval_ite(self, term, env):
        guard = self._eval_bool(term[1], env)
        if guard is True:
            return self.eval(term[2], env)
        if guard is False:
            return self.eval(term[3], env)
        a = self.eval(term[2], env)
        b = self.eval(term[3], env)
        if is_formula(a) and is_formula(b):
            return mk_or((mk_and((guard, a)), mk_and((mk_not(guard), b))))
        if a[0] == "gseq" and b[0] == "gseq":
            ng = mk_not(guard)
            return ("gseq",
                    tuple((mk_and((guard, g)), k) for g, k in a[1])
                    + tuple((mk_and((ng, g)), k) for g, k in b[1]))
        ng = mk_not(guard)
        pairs = [(mk_and((guard, g)), val) for g, val in as_cases(a)]
        pairs += [(mk_and((ng, g)), val) for g, val in as_cases(b)]
        return make_cases(pairs)

    def _eval_app(self, fn: str, arg, env):
        argval = self.eval(arg, env)
        pairs = []
        bool_result = None
        for guard, ctor in as_cases(argval):
            row = self._row(fn, ctor)
            if is_formula(row):
                bool_result = mk_or(((bool_result if bool_result is not None
                                      else False), mk_and((guard, row))))
            elif row[0] == "gseq":
                pairs.extend((mk_and((guard, g)), k) for g, k in row[1])
                bool_result = "seq"
            else:
                pairs.extend((mk_and((guard, g)), val)
                             for g, val in as_cases(row))
        if bool_result == "seq":
            return ("gseq", tuple(pairs))
        if bool_result is not None:
            return bool_result
        return make_cases(pairs)

    def _row(self, fn: str, ctor: str):
        key = (fn, ctor)
        if key in self.rows:
            return self.rows[key]
        if key not in self.defs:
            raise FragmentError(
                f"function '{fn}' has no defining assert for '{ctor}'")
        if key in self.row_stack:
            raise FragmentError(
                f"circular definition of ({fn} {ctor})")
        self.row_stack.append(key)
        try:
            value = self.eval(self.defs[key], {})
        finally:
            self.row_stack.pop()
        self.rows[key] = value
        return value

    def _eval_eq(self, lt, rt, env):
        a = self.eval(lt, env)
        b = self.eval(rt, env)
        if is_formula(a) and is_formula(b):
            return mk_iff(a, b)
        if is_formula(a) or is_formula(b):
            raise FragmentError("equality between Bool and non-Bool terms")
        if a[0] == "gseq" or b[0] == "gseq":
            raise FragmentError(
                "sequence equality outside defining asserts is unsupported")
        return mk_or(tuple(
            mk_and((ga, gb))
            for ga, va in as_cases(a) for gb, vb in as_cases(b) if va == vb))

    _ORDER_FNS = {"<": lambda x, y: x < y, "<=": lambda x, y: x <= y,
                  ">": lambda x, y: x > y, ">=": lambda x, y: x >= y}

    def _eval_order(self, op, lt, rt, env):
        cmp = self._ORDER_FNS[op]
        a, b = self.eval(lt, env), self.eval(rt, env)
        return mk_or(tuple(
            mk_and((ga, gb))
            for ga, va in as_cases(a) for gb, vb in as_cases(b)
            if isinstance(va, int) and isinstance(vb, int) and cmp(va, vb)))

    def _eval_arith(self, op, args, env):
        if op == "-" and len(args) == 1:
            return make_cases(tuple(
                (g, -v) for g, v in as_cases(self.eval(args[0], env))))
        fns = {"+": lambda x, y: x + y, "-": lambda x, y: x - y,
               "*": lambda x, y: x * y}
        out = self.eval(args[0], env)
        for arg in args[1:]:
            nxt = self.eval(arg, env)
            out = make_cases(tuple(
                (mk_and((ga, gb)), fns[op](va, vb))
                for ga, va in as_cases(out) for gb, vb in as_cases(nxt)))
        return out

    def _eval_contains(self, seq_t, needle_t, env):
        seq = self._eval_seq(seq_t, env)
        needle = self._eval_seq(needle_t, env)
        if len(needle) == 0:
            return True
        if len(needle) != 1:
            raise FragmentError(
                "seq.contains is only supported with single-element needles")
        present, item = needle[0]
        found = mk_or(tuple(g for g, k in seq if k == item))
        # an absent needle degenerates to the empty sequence, contained always
        return mk_or((mk_not(present), mk_and((present, found))))

    def _eval_len(self, seq_t, env):
        elems = self._eval_seq(seq_t, env)
        counts: dict[int, object] = {0: True}
        for guard, _ in elems:
            nxt: dict[int, object] = {}
            ng = mk_not(guard)
            for count, phi in counts.items():
                inc = mk_and((phi, guard))
                keep = mk_and((phi, ng))
                if inc is not False:
                    nxt[count + 1] = mk_or((nxt.get(count + 1, False), inc))
                if keep is not False:
                    nxt[count] = mk_or((nxt.get(count, False), keep))
            counts = nxt
        return make_cases(tuple(
            (phi, count) for count, phi in sorted(counts.items())))

    def _eval_quant(self, kind, binders, body, env):
        if not binders:
            return self._eval_bool(body, env)
        (var, sort), rest = binders[0], binders[1:]
        if not isinstance(sort, str) or sort not in self.sorts:
            raise FragmentError(
                f"quantified sort {sort!r} is not an enumeration")
        results = []
        for ctor in self.sorts[sort]:
            inner = {**env, var: ("c", ctor)}
            results.append(self._eval_quant(kind, rest, body, inner))
            if kind == "forall" and results[-1] is False:
                return False
            if kind == "exists" and results[-1] is True:
                return True
        return mk_and(tuple(results)) if kind == "forall" \
            else mk_or(tuple(results))


def solve_script(text: str) -> str:
    return Solver().run(text)


def main(argv=None) -> int:
    args = sys.argv[1:] if argv is None else list(argv)
    if args:
        with open(args[0], encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = sys.stdin.read()
    try:
        sys.stdout.write(solve_script(text))
    except FragmentError as exc:
        message = str(exc).replace('"', "'")
        sys.stdout.write(f'(error "{message}")\n')
        print(f"plift-solve: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
