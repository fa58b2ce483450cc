"""Expression grammar: parsing and canonical printing.

Grammar (whitespace insignificant, identifiers ASCII words)::

    expr   := ['-'] term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := base ('^' nonneg-integer)?
    base   := integer | identifier | '(' expr ')'

Rational literals like ``1/2`` come out of the division operator. Printing
emits the same grammar with graded-lex term order, and parse(print(e)) is a
fixed point on canonical expressions.
"""

from __future__ import annotations

import re

from .expr import (
    DivisionByZeroExpr,
    ExprError,
    Polynomial,
    RationalExpr,
    UnknownVariableError,
    VarSet,
    grlex_key,
)


class ParseError(ExprError):
    """Syntax error with position information."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<int>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            raise ParseError(f"unexpected character {stripped[0]!r}", pos)
        if m.lastgroup is None:
            break
        tokens.append((m.lastgroup, m.group(m.lastgroup), m.start(m.lastgroup)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, vars: VarSet, auto_declare: bool):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.vars = vars
        self.auto_declare = auto_declare

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, val, pos = self.take()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}", pos)

    def parse(self) -> RationalExpr:
        e = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected {val!r}", pos)
        return e

    def expr(self) -> RationalExpr:
        kind, val, _ = self.peek()
        negate = False
        if kind == "op" and val == "-":
            self.take()
            negate = True
        e = self.term()
        if negate:
            e = -e
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                rhs = self.term()
                e = e + rhs if val == "+" else e - rhs
            else:
                return e

    def term(self) -> RationalExpr:
        e = self.factor()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "*/":
                _, _, pos = self.take()
                rhs = self.factor()
                if val == "*":
                    e = e * rhs
                else:
                    if rhs.is_zero():
                        raise DivisionByZeroExpr(
                            f"division by a zero expression (at position {pos})")
                    e = e / rhs
            else:
                return e

    def factor(self) -> RationalExpr:
        e = self.base()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.take()
            k, v, pos = self.take()
            if k != "int":
                raise ParseError("exponent must be a non-negative integer", pos)
            e = e ** int(v)
        return e

    def base(self) -> RationalExpr:
        kind, val, pos = self.take()
        if kind == "int":
            return RationalExpr.const(self.vars, int(val))
        if kind == "ident":
            if val not in self.vars:
                if not self.auto_declare:
                    raise UnknownVariableError(f"unknown variable {val!r}")
                self.vars.add(val)
            return RationalExpr.var(self.vars, val)
        if kind == "op" and val == "(":
            e = self.expr()
            self.expect_op(")")
            return e
        raise ParseError(f"unexpected {val!r}" if val else "unexpected end of input", pos)


def parse(text: str, vars: VarSet, auto_declare: bool = True) -> RationalExpr:
    """Parse ``text`` into a canonical expression over ``vars``.

    Unknown identifiers are declared in order of first appearance unless
    ``auto_declare`` is False.
    """
    return _Parser(text, vars, auto_declare).parse()


# ---------------------------------------------------------------------------
# printing


def _format_mono(m, names) -> str:
    parts = []
    for i, e in enumerate(m):
        if e == 1:
            parts.append(names[i])
        elif e > 1:
            parts.append(f"{names[i]}^{e}")
    return "*".join(parts)


def format_poly(p: Polynomial, vars: VarSet) -> str:
    if p.is_zero():
        return "0"
    names = vars.names
    pieces = []
    for m, c in sorted(p.terms.items(), key=lambda t: grlex_key(t[0]), reverse=True):
        mono = _format_mono(m, names)
        mag = abs(c)
        if not mono:
            body = str(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{mag}*{mono}"
        pieces.append(("-" if c < 0 else "+", body))
    sign, body = pieces[0]
    out = [body if sign == "+" else f"-{body}"]
    for sign, body in pieces[1:]:
        out.append(f" {'+' if sign == '+' else '-'} {body}")
    return "".join(out)


def _den_needs_parens(p: Polynomial) -> bool:
    if len(p.terms) != 1:
        return True
    (m, c), = p.terms.items()
    if not m:
        return False  # bare positive integer (sign normalization guarantees c > 0)
    if c != 1:
        return True  # coefficient and variables would split under '/'
    return sum(1 for e in m if e) > 1


def format_expr(e: RationalExpr) -> str:
    num_s = format_poly(e.num, e.vars)
    if e.den.is_const() and e.den.const_value() == 1:
        return num_s
    if len(e.num.terms) > 1:
        num_s = f"({num_s})"
    den_s = format_poly(e.den, e.vars)
    if _den_needs_parens(e.den):
        den_s = f"({den_s})"
    return f"{num_s}/{den_s}"
