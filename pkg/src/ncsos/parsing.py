"""Text format for free-*-algebra polynomials.

Grammar (whitespace insignificant)::

    expr    := term (('+' | '-') term)*
    term    := factor ('*' factor)*
    factor  := '-' factor | postfix
    postfix := atom ("'" | '^' NUMBER)*
    atom    := NUMBER ('/' NUMBER)? | VAR | '(' expr ')'

Variables are x1, x2, ...; the postfix apostrophe is the adjoint; '^k'
repeats a product (k a nonnegative integer); NUMBER is an integer or
decimal, optionally with an exponent, and '/' joins two numeric literals
into an exact fraction.  All coefficients are exact rationals.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction

from .ncpoly import NcPoly, Word


class PolyParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    line: int
    column: int


_TOKEN_RE = re.compile(
    r"""
    (?P<WS>\s+)
  | (?P<VAR>x\d+)
  | (?P<NUM>\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+(?:[eE][+-]?\d+)?)
  | (?P<OP>['^*+\-/()])
    """,
    re.VERBOSE,
)


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    line = 1
    line_start = 0
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise PolyParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        column = pos - line_start + 1
        if m.lastgroup != "WS":
            kind = m.lastgroup
            if kind == "OP":
                kind = m.group()
            tokens.append(_Token(kind, m.group(), line, column))
        if "\n" in m.group():
            line += m.group().count("\n")
            line_start = text.rindex("\n", 0, m.end()) + 1
        pos = m.end()
    tokens.append(_Token("END", "", line, len(text) - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token], n: int):
        self.tokens = tokens
        self.pos = 0
        self.n = n

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def take(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, message: str) -> PolyParseError:
        tok = self.peek()
        return PolyParseError(message, tok.line, tok.column)

    def parse(self) -> NcPoly:
        poly = self.expr()
        if self.peek().kind != "END":
            raise self.fail(f"trailing input {self.peek().text!r}")
        return poly

    def expr(self) -> NcPoly:
        poly = self.term()
        while self.peek().kind in ("+", "-"):
            op = self.take().kind
            rhs = self.term()
            poly = poly + rhs if op == "+" else poly - rhs
        return poly

    def term(self) -> NcPoly:
        poly = self.factor()
        while self.peek().kind == "*":
            self.take()
            poly = poly * self.factor()
        return poly

    def factor(self) -> NcPoly:
        if self.peek().kind == "-":
            self.take()
            return -self.factor()
        return self.postfix()

    def postfix(self) -> NcPoly:
        poly = self.atom()
        while True:
            kind = self.peek().kind
            if kind == "'":
                self.take()
                poly = poly.adjoint()
            elif kind == "^":
                self.take()
                if self.peek().kind != "NUM":
                    raise self.fail("expected an integer exponent after '^'")
                tok = self.take()
                value = Fraction(tok.text)
                if value.denominator != 1 or value < 0:
                    raise PolyParseError("exponent must be a nonnegative integer", tok.line, tok.column)
                poly = poly ** int(value)
            else:
                return poly

    def atom(self) -> NcPoly:
        tok = self.peek()
        if tok.kind == "NUM":
            self.take()
            value = Fraction(tok.text)
            if self.peek().kind == "/":
                self.take()
                if self.peek().kind != "NUM":
                    raise self.fail("expected a number after '/'")
                den_tok = self.take()
                den = Fraction(den_tok.text)
                if den == 0:
                    raise PolyParseError("zero denominator", den_tok.line, den_tok.column)
                value /= den
            return NcPoly.scalar(self.n, value)
        if tok.kind == "VAR":
            self.take()
            index = int(tok.text[1:])
            if not 1 <= index <= self.n:
                raise PolyParseError(
                    f"variable {tok.text} outside the declared alphabet of {self.n} variables",
                    tok.line,
                    tok.column,
                )
            return NcPoly.variable(self.n, index)
        if tok.kind == "(":
            self.take()
            poly = self.expr()
            if self.peek().kind != ")":
                raise self.fail("expected ')'")
            self.take()
            return poly
        raise self.fail(f"expected a number, variable, or '(' but found {tok.text or 'end of input'!r}")


def parse(text: str, n: int | None = None) -> NcPoly:
    """Parse a polynomial, inferring the alphabet from the largest variable index.

    Passing ``n`` fixes the alphabet instead; variables beyond it are
    rejected.  An input without variables defaults to one variable.
    """
    tokens = _tokenize(text)
    largest = max((int(t.text[1:]) for t in tokens if t.kind == "VAR"), default=0)
    if n is None:
        n = max(largest, 1)
    return _Parser(tokens, n).parse()


def _format_word(word: Word, n: int) -> str:
    parts = []
    for letter, run in itertools.groupby(word):
        name = f"x{letter}" if letter <= n else f"x{letter - n}'"
        k = len(list(run))
        parts.append(name if k == 1 else f"{name}^{k}")
    return "*".join(parts)


def _format_coeff(c) -> str:
    return str(c) if isinstance(c, Fraction) else repr(float(c))


def format_poly(p: NcPoly) -> str:
    """Render in the grammar above; parsing the result reproduces p exactly
    when the coefficients are rational."""
    if p.is_zero():
        return "0"
    chunks = []
    for word, coeff in p.sorted_terms():
        negative = coeff < 0
        mag = -coeff if negative else coeff
        if not word:
            body = _format_coeff(mag)
        elif isinstance(mag, Fraction) and mag == 1:
            body = _format_word(word, p.n)
        else:
            body = f"{_format_coeff(mag)}*{_format_word(word, p.n)}"
        if not chunks:
            chunks.append(f"-{body}" if negative else body)
        else:
            chunks.append(f"- {body}" if negative else f"+ {body}")
    return " ".join(chunks)
