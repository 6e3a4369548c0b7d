"""Surface syntax for rational expressions on a chart.

Grammar: identifiers, integer literals, ``+ - * / ^`` with integer exponents,
and parentheses.  ``^`` binds tighter than unary minus, so ``-x^2`` is
``-(x^2)``.  Jet coordinates use the suffix syntax ``x:e1e2`` (the coordinate
``x`` differentiated along source parameters 1 and 2).  The canonical printer
in :mod:`jetcalc.exactalg` emits exactly this grammar, so printing and parsing
round-trip on normalized values.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .cartan import Chart
from .exactalg import Polynomial, Q, RationalFunction


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class _Token:
    kind: str  # 'int', 'ident', 'op', 'end'
    text: str
    line: int
    column: int


_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<int>\d+)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*(?::(?:e\d+)+)?)"
    r"|(?P<op>[-+*/^()])"
)


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        chunk = m.group(0)
        if m.lastgroup == "int":
            tokens.append(_Token("int", chunk, line, col))
        elif m.lastgroup == "ident":
            tokens.append(_Token("ident", chunk, line, col))
        elif m.lastgroup == "op":
            tokens.append(_Token("op", chunk, line, col))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            col = len(chunk) - chunk.rfind("\n")
        else:
            col += len(chunk)
        pos = m.end()
    tokens.append(_Token("end", "", line, col))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token], universe: tuple[str, ...]):
        self.tokens = tokens
        self.pos = 0
        self.universe = universe

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, text: str):
        tok = self.peek()
        if tok.kind != "op" or tok.text != text:
            raise ParseError(f"expected {text!r}", tok.line, tok.column)
        return self.advance()

    def parse(self) -> RationalFunction:
        value = self.expr()
        tok = self.peek()
        if tok.kind != "end":
            raise ParseError(f"unexpected token {tok.text!r}", tok.line, tok.column)
        return value

    def expr(self) -> RationalFunction:
        value = self.term()
        while True:
            tok = self.peek()
            if tok.kind == "op" and tok.text in "+-":
                self.advance()
                rhs = self.term()
                value = value + rhs if tok.text == "+" else value - rhs
            else:
                return value

    def term(self) -> RationalFunction:
        value = self.unary()
        while True:
            tok = self.peek()
            if tok.kind == "op" and tok.text in "*/":
                self.advance()
                rhs = self.unary()
                if tok.text == "*":
                    value = value * rhs
                else:
                    if rhs.is_zero():
                        raise ParseError("division by zero", tok.line, tok.column)
                    value = value / rhs
            else:
                return value

    def unary(self) -> RationalFunction:
        tok = self.peek()
        if tok.kind == "op" and tok.text == "-":
            self.advance()
            return -self.unary()
        return self.power()

    def power(self) -> RationalFunction:
        base = self.atom()
        tok = self.peek()
        if tok.kind == "op" and tok.text == "^":
            self.advance()
            sign = 1
            tok2 = self.peek()
            if tok2.kind == "op" and tok2.text == "-":
                self.advance()
                sign = -1
                tok2 = self.peek()
            if tok2.kind != "int":
                raise ParseError("exponent must be an integer literal", tok2.line, tok2.column)
            self.advance()
            e = sign * int(tok2.text)
            if e < 0 and base.is_zero():
                raise ParseError("negative power of zero", tok.line, tok.column)
            return base**e
        return base

    def atom(self) -> RationalFunction:
        tok = self.advance()
        if tok.kind == "int":
            return RationalFunction.const(self.universe, int(tok.text))
        if tok.kind == "ident":
            if tok.text not in self.universe:
                raise ParseError(f"unknown identifier {tok.text!r}", tok.line, tok.column)
            return RationalFunction.variable(self.universe, tok.text)
        if tok.kind == "op" and tok.text == "(":
            value = self.expr()
            self.expect_op(")")
            return value
        raise ParseError(f"unexpected token {tok.text or 'end of input'!r}", tok.line, tok.column)


def parse_expression(text: str, chart) -> RationalFunction:
    """Parse ``text`` into a canonical rational function on the chart."""
    universe = chart.variables if isinstance(chart, Chart) else tuple(chart)
    return _Parser(_tokenize(text), universe).parse()
