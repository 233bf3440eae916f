"""Recursive-descent parser for scalar expressions.

Grammar (whitespace is insignificant)::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | base ('^' uint)?
    base   := int | identifier | '(' expr ')'

A rational literal ``p/q`` is read as the division ``p / q``; the value is the
same.  Unary minus binds looser than ``^`` so ``-x^2`` means ``-(x^2)``.
"""

from __future__ import annotations

import re

from modcalc.errors import DivisionByZeroFunction, ExpressionSyntaxError, UnknownIdentifier
from modcalc.ratfun import Chart, ScalarFunction

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.))")


def _tokenize(text):
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN.match(text, pos)
        if m is None:  # trailing whitespace
            break
        if m.group(1) is not None:
            tokens.append(("int", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            tokens.append(("ident", m.group(2), m.start(2)))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch.isspace():
                pos = m.end()
                continue
            if ch not in "+-*/^()":
                raise ExpressionSyntaxError(f"unexpected character {ch!r}", text, m.start(3))
            tokens.append((ch, ch, m.start(3)))
        pos = m.end()
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str, chart: Chart):
        self.text = text
        self.chart = chart
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, message, tok=None):
        tok = tok or self.peek()
        raise ExpressionSyntaxError(message, self.text, tok[2])

    def parse(self) -> ScalarFunction:
        if self.peek()[0] == "end":
            self.fail("empty expression")
        value = self.expr()
        if self.peek()[0] != "end":
            self.fail(f"unexpected {self.peek()[1]!r}")
        return value

    def expr(self):
        value = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self):
        value = self.factor()
        while self.peek()[0] in ("*", "/"):
            op = self.take()
            rhs = self.factor()
            if op[0] == "*":
                value = value * rhs
            else:
                if rhs.is_zero():
                    raise DivisionByZeroFunction(
                        f"division by an expression equal to zero at position {op[2]}"
                    )
                value = value / rhs
        return value

    def factor(self):
        if self.peek()[0] == "-":
            self.take()
            return -self.factor()
        value = self.base()
        if self.peek()[0] == "^":
            self.take()
            tok = self.take()
            if tok[0] != "int":
                self.fail("exponent must be a nonnegative integer", tok)
            value = value ** int(tok[1])
        return value

    def base(self):
        tok = self.take()
        kind = tok[0]
        if kind == "int":
            return self.chart.const(int(tok[1]))
        if kind == "ident":
            try:
                return self.chart.coord(tok[1])
            except Exception:
                raise UnknownIdentifier(tok[1], tok[2]) from None
        if kind == "(":
            value = self.expr()
            close = self.take()
            if close[0] != ")":
                self.fail("expected ')'", close)
            return value
        if kind == "end":
            self.fail("unexpected end of expression", tok)
        self.fail(f"unexpected {tok[1]!r}", tok)


def parse_expression(text: str, chart: Chart) -> ScalarFunction:
    if not isinstance(text, str):
        raise TypeError("expression must be a string")
    return _Parser(text, chart).parse()
