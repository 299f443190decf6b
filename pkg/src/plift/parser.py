"""Recursive-descent parsers for the constraint DSL and for
presence-condition / feature-model formulas.

Constraint grammar (authoritative surface syntax):

    constraint := quant
    quant      := ("forall"|"exists") IDENT "in" set ":" expr
    set        := IDENT              -- a type name
                | IDENT ("." IDENT)+ -- a navigation
    expr       := quant | "!" expr | expr ("||"|"&&"|"=>") expr
                | "(" expr ")" | atom
    atom       := term ("="|"!="|"<"|"<="|">"|">=") term | "true" | "false"
    term       := nav | nav ".size" | INT | STRING | "true" | "false"

Precedence: ! > && > || > "=>" (right-associative); quantifier bodies
extend maximally to the right.  A trailing ".size" step is always the
size operator, so an attribute literally named "size" is not addressable.
In lifted mode the extra production  guard := "selected" "(" IDENT ")"
is allowed in expression position.

Formula grammar (presence conditions, feature models):

    formula := IDENT | "true" | "false" | "!" formula
             | formula ("&&"|"||"|"=>") formula | "(" formula ")"
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from . import constraints as c
from . import variability as v
from .errors import ParseError

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<int>-?[0-9]+)
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<op>&&|\|\||=>|!=|<=|>=|[()!:.=<>])
""", re.VERBOSE)

KEYWORDS = ("forall", "exists", "in", "true", "false", "selected")

COMPARE_TOKENS = ("=", "!=", "<", "<=", ">", ">=")


@dataclass(frozen=True)
class Token:
    kind: str  # ident | int | string | op | eof
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    line, col, pos = 1, 1, 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = match.lastgroup
        lexeme = match.group()
        if kind != "ws":
            tokens.append(Token(kind, lexeme, line, col))
        newlines = lexeme.count("\n")
        if newlines:
            line += newlines
            col = len(lexeme) - lexeme.rfind("\n")
        else:
            col += len(lexeme)
        pos = match.end()
    tokens.append(Token("eof", "", line, col))
    return tokens


def _unescape(raw: str) -> str:
    body = raw[1:-1]
    return body.replace('\\"', '"').replace("\\\\", "\\")


class _Parser:
    def __init__(self, text: str, allow_selected: bool = False):
        self.tokens = tokenize(text)
        self.pos = 0
        self.allow_selected = allow_selected

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def error(self, message: str, *expected: str) -> ParseError:
        tok = self.peek()
        return ParseError(message, tok.line, tok.column, expected)

    def expect(self, text: str) -> Token:
        tok = self.peek()
        if tok.text != text:
            raise self.error(f"found {tok.text!r}", text)
        return self.advance()

    def expect_ident(self) -> str:
        tok = self.peek()
        if tok.kind != "ident" or tok.text in KEYWORDS:
            raise self.error(f"found {tok.text!r}", "identifier")
        return self.advance().text

    def at(self, text: str) -> bool:
        return self.peek().text == text

    def at_quantifier(self) -> bool:
        return self.peek().text in (c.FORALL, c.EXISTS)

    # --- constraint grammar -------------------------------------------

    def parse_constraint(self) -> c.Constraint:
        root = self.parse_quant()
        tok = self.peek()
        if tok.kind != "eof":
            raise self.error(f"trailing input {tok.text!r}", "end of input")
        return c.Constraint(root)

    def parse_quant(self) -> c.Quant:
        kw = self.advance()
        if kw.text not in (c.FORALL, c.EXISTS):
            raise ParseError(f"found {kw.text!r}", kw.line, kw.column,
                             (c.FORALL, c.EXISTS))
        var = self.expect_ident()
        self.expect("in")
        first = self.expect_ident()
        steps = []
        while self.at("."):
            self.advance()
            steps.append(self.expect_ident())
        domain = c.NavSet(c.Nav(first, tuple(steps))) if steps \
            else c.TypeSet(first)
        self.expect(":")
        body = self.parse_expr()
        return c.Quant(kw.text, var, domain, body)

    def parse_expr(self) -> c.Expr:
        return self.parse_implies()

    def parse_implies(self) -> c.Expr:
        lhs = self.parse_or()
        if self.at("=>"):
            self.advance()
            return c.Implies(lhs, self.parse_implies())
        return lhs

    def parse_or(self) -> c.Expr:
        lhs = self.parse_and()
        while self.at("||"):
            self.advance()
            lhs = c.Or(lhs, self.parse_and())
        return lhs

    def parse_and(self) -> c.Expr:
        lhs = self.parse_unary()
        while self.at("&&"):
            self.advance()
            lhs = c.And(lhs, self.parse_unary())
        return lhs

    def parse_unary(self) -> c.Expr:
        if self.at("!"):
            self.advance()
            return c.Not(self.parse_unary())
        if self.at_quantifier():
            return self.parse_quant()
        return self.parse_primary()

    def parse_primary(self) -> c.Expr:
        tok = self.peek()
        if tok.text == "(":
            self.advance()
            inner = self.parse_expr()
            self.expect(")")
            return inner
        if tok.text == "selected":
            if not self.allow_selected:
                raise self.error(
                    "selection guards are only valid in lifted constraints")
            self.advance()
            self.expect("(")
            var = self.expect_ident()
            self.expect(")")
            return c.Selected(var)
        lhs = self.parse_term()
        op_tok = self.peek()
        if op_tok.text in COMPARE_TOKENS:
            self.advance()
            rhs = self.parse_term()
            return c.Compare(op_tok.text, lhs, rhs)
        if isinstance(lhs, c.BoolLit):
            return lhs  # bare boolean literal atom
        raise self.error(f"found {op_tok.text!r}", *COMPARE_TOKENS)

    def parse_term(self) -> c.Term:
        tok = self.peek()
        if tok.kind == "int":
            self.advance()
            return c.IntLit(int(tok.text))
        if tok.kind == "string":
            self.advance()
            return c.StrLit(_unescape(tok.text))
        if tok.text == "true":
            self.advance()
            return c.BoolLit(True)
        if tok.text == "false":
            self.advance()
            return c.BoolLit(False)
        var = self.expect_ident()
        steps = []
        while self.at("."):
            self.advance()
            steps.append(self.expect_ident())
        if steps and steps[-1] == "size":
            return c.SizeOf(c.Nav(var, tuple(steps[:-1])))
        return c.Nav(var, tuple(steps))

    # --- formula grammar ---------------------------------------------

    def parse_formula(self) -> v.PropFormula:
        out = self.parse_formula_implies()
        tok = self.peek()
        if tok.kind != "eof":
            raise self.error(f"trailing input {tok.text!r}", "end of input")
        return out

    def parse_formula_implies(self) -> v.PropFormula:
        lhs = self.parse_formula_or()
        if self.at("=>"):
            self.advance()
            return v.Implies(lhs, self.parse_formula_implies())
        return lhs

    def parse_formula_or(self) -> v.PropFormula:
        lhs = self.parse_formula_and()
        while self.at("||"):
            self.advance()
            lhs = v.Or(lhs, self.parse_formula_and())
        return lhs

    def parse_formula_and(self) -> v.PropFormula:
        lhs = self.parse_formula_unary()
        while self.at("&&"):
            self.advance()
            lhs = v.And(lhs, self.parse_formula_unary())
        return lhs

    def parse_formula_unary(self) -> v.PropFormula:
        tok = self.peek()
        if tok.text == "!":
            self.advance()
            return v.Not(self.parse_formula_unary())
        if tok.text == "(":
            self.advance()
            inner = self.parse_formula_implies()
            self.expect(")")
            return inner
        if tok.text == "true":
            self.advance()
            return v.TRUE
        if tok.text == "false":
            self.advance()
            return v.FALSE
        if tok.kind == "ident" and tok.text not in KEYWORDS:
            self.advance()
            return v.FeatVar(tok.text)
        raise self.error(f"found {tok.text!r}",
                         "feature name", "true", "false", "!", "(")


def parse_constraint(text: str, allow_selected: bool = False) -> c.Constraint:
    """Parse one constraint; parse-print-parse is a fixed point."""
    return _Parser(text, allow_selected=allow_selected).parse_constraint()


def parse_prop_formula(text: str) -> v.PropFormula:
    """Parse a presence-condition / feature-model formula."""
    return _Parser(text).parse_formula()
