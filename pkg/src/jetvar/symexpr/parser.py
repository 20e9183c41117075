"""Recursive-descent parser for the jet expression grammar.

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := atom ('^' ['-'] INT)?
    atom    := NUMBER | VARIABLE | NAME '(' expr ')' | '(' expr ')'

Variables: ``x<k>``, ``y<s>``, ``y<s>_<digits>``, ``X<A>``, ``X<A>_<digits>``
and the mixed-chart ``x<k>_<digits>``; each digit is one direction, and
``_[1,2,11]`` spells indices with directions above 9.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .chart import ChartSpec
from .core import FUNCTIONS, Expr, apply_function, atom


class ParseError(ValueError):
    def __init__(self, message: str, position: int) -> None:
        super().__init__(f"{message} at position {position}")
        self.position = position


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<var>[xXy]\d+(?:_(?:\d+|\[\d+(?:,\d+)*\]))?)"
    r"|(?P<name>[A-Za-z][A-Za-z0-9]*)|(?P<op>[-+*/^()]))"
)
_VAR = re.compile(r"([xXy])(\d+)(?:_(\d+|\[[\d,]+\]))?$")


@dataclass
class _Tok:
    kind: str
    text: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    out = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos:].lstrip()[:1]!r}", pos)
        kind = m.lastgroup
        out.append(_Tok(kind, m.group(kind), m.start(kind)))
        pos = m.end()
    out.append(_Tok("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str, chart: ChartSpec | None, params: tuple[str, ...]) -> None:
        self.toks = _tokenize(text)
        self.i = 0
        self.chart = chart
        self.params = params

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> None:
        t = self.take()
        if t.text != text:
            raise ParseError(f"expected {text!r}, found {t.text or 'end of input'!r}", t.pos)

    def parse(self) -> Expr:
        e = self.expr()
        t = self.peek()
        if t.kind != "end":
            raise ParseError(f"unexpected {t.text!r}", t.pos)
        return e

    def expr(self) -> Expr:
        e = self.term()
        while self.peek().text in ("+", "-"):
            op = self.take().text
            rhs = self.term()
            e = e + rhs if op == "+" else e - rhs
        return e

    def term(self) -> Expr:
        e = self.unary()
        while self.peek().text in ("*", "/"):
            t = self.take()
            rhs = self.unary()
            if t.text == "*":
                e = e * rhs
            else:
                if rhs.is_zero():
                    raise ParseError("division by zero", t.pos)
                e = e / rhs
        return e

    def unary(self) -> Expr:
        if self.peek().text == "-":
            self.take()
            return -self.unary()
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.peek().text == "^":
            self.take()
            sign = 1
            if self.peek().text == "-":
                self.take()
                sign = -1
            t = self.take()
            if t.kind != "num":
                raise ParseError("exponent must be an integer literal", t.pos)
            e = sign * int(t.text)
            if e < 0 and base.is_zero():
                raise ParseError("division by zero", t.pos)
            return base ** e
        return base

    def atom(self) -> Expr:
        t = self.take()
        if t.kind == "num":
            return Expr.const(Fraction(int(t.text)))
        if t.text == "(":
            e = self.expr()
            self.expect(")")
            return e
        if t.kind == "var":
            return self.variable(t)
        if t.kind == "name":
            if self.peek().text == "(":
                if t.text not in FUNCTIONS:
                    raise ParseError(f"unknown function {t.text!r}", t.pos)
                self.take()
                arg = self.expr()
                self.expect(")")
                return apply_function(t.text, arg)
            if t.text in self.params:
                return Expr.of_atom(atom("p", t.text))
            raise ParseError(f"unknown variable {t.text!r}", t.pos)
        raise ParseError(f"unexpected {t.text or 'end of input'!r}", t.pos)

    def variable(self, t: _Tok) -> Expr:
        m = _VAR.match(t.text)
        kind, label, idx = m.group(1), int(m.group(2)), m.group(3)
        if idx is None:
            index: tuple[int, ...] = ()
        elif idx.startswith("["):
            index = tuple(int(v) for v in idx[1:-1].split(","))
        else:
            index = tuple(int(c) for c in idx)
        a = atom(kind, label, index)
        if label < 1 or any(e < 1 for e in index):
            raise ParseError(f"index out of range in {t.text!r}", t.pos)
        if self.chart is not None and not self.chart.contains(a):
            raise ParseError(f"variable {t.text!r} is not in the {self.chart.side} chart "
                             f"(n={self.chart.n}, m={self.chart.m}, r={self.chart.r})", t.pos)
        return Expr.of_atom(a)


def parse(text: str, chart: ChartSpec | None = None, params: tuple[str, ...] = ()) -> Expr:
    """Parse ``text`` into a normalized expression over ``chart``'s variables.

    ``params`` lists identifiers accepted as named parameters (for example
    the curve parameter ``t``).
    """
    return _Parser(text, chart, tuple(params)).parse()
