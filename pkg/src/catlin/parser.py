"""Text expression parser for real-valued polynomials in z and zbar.

Grammar (documented in the README):

    expr    := term (('+' | '-') term)*
    term    := factor (('*' factor) | factor)*          -- adjacency multiplies
    factor  := atom ('^' INT)?
    atom    := RATIONAL | 'i' | VAR | CONJVAR
             | 'Re' '(' expr ')' | 'Im' '(' expr ')' | 'conj' '(' expr ')'
             | '~' atom | '|' expr '|' | '(' expr ')' | '-' factor
    VAR     := 'z' INT          CONJVAR := 'zbar' INT
    RATIONAL:= INT ('/' INT)?

Sugar: Re/Im expand to Hermitian-symmetric pairs, conj/~ conjugates, and
|e|^2k expands to (e*conj(e))^k.  A modulus must carry an even power; the
whole expression must be real-valued after expansion.
"""

from __future__ import annotations

import re as _re
from fractions import Fraction
from typing import List, Optional, Tuple

from .exact import CRat, CI
from .poly import NonRealError, Poly, PolyError, require_real


class ParseError(PolyError):
    """Syntax error; carries the character position."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"parse error at position {pos}: {message}")
        self.pos = pos


_TOKEN = _re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<cvar>zbar(?P<cidx>\d+))|(?P<var>z(?P<idx>\d+))"
    r"|(?P<name>Re|Im|conj)|(?P<op>[-+*^/()|~])|(?P<imag>i))")


def _tokenize(text: str) -> List[Tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == m.start():
            if text[pos:].strip() == "":
                break
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        for kind in ("num", "cvar", "var", "name", "op", "imag"):
            if m.group(kind):
                tokens.append((kind, m.group(kind), m.start(kind)))
                break
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, n: int):
        self.text = text
        self.n = n
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> Tuple[str, str, int]:
        return self.tokens[self.i]

    def next(self) -> Tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, val, pos = self.next()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}, found {val!r}", pos)

    def parse(self) -> Poly:
        p = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ParseError(f"trailing input {val!r}", pos)
        return p

    def expr(self) -> Poly:
        p = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.next()
                q = self.term()
                p = p + q if val == "+" else p - q
            else:
                return p

    def term(self) -> Poly:
        p = self.factor()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val == "*":
                self.next()
                p = p * self.factor()
            elif kind in ("num", "var", "cvar", "name", "imag") or (
                    kind == "op" and val in "(~"):
                # adjacency multiplies; a bar never opens a factor here since
                # it would be ambiguous with the closing bar of a modulus
                p = p * self.factor()
            else:
                return p

    def factor(self) -> Poly:
        kind, val, pos = self.peek()
        if kind == "op" and val == "-":
            self.next()
            return -self.factor()
        p, modulus = self.atom()
        kind, val, _ = self.peek()
        exponent: Optional[int] = None
        if kind == "op" and val == "^":
            self.next()
            k2, v2, p2 = self.next()
            if k2 != "num":
                raise ParseError("expected an integer exponent", p2)
            exponent = int(v2)
        if modulus:
            if exponent is None or exponent % 2 != 0 or exponent <= 0:
                raise ParseError(
                    "modulus requires a positive even power, e.g. |z2|^4", pos)
            return (p * p.conj()) ** (exponent // 2)
        if exponent is not None:
            return p ** exponent
        return p

    def atom(self) -> Tuple[Poly, bool]:
        """Returns (poly, is_modulus)."""
        kind, val, pos = self.next()
        if kind == "num":
            value = Fraction(int(val))
            k2, v2, _ = self.peek()
            if k2 == "op" and v2 == "/":
                self.next()
                k3, v3, p3 = self.next()
                if k3 != "num":
                    raise ParseError("expected integer denominator", p3)
                if int(v3) == 0:
                    raise ParseError("zero denominator", p3)
                value /= int(v3)
            return Poly.const(self.n, value), False
        if kind == "imag":
            return Poly.const(self.n, CI), False
        if kind == "var":
            j = int(val[1:])
            self._check_var(j, pos)
            return Poly.variable(self.n, j), False
        if kind == "cvar":
            j = int(val[4:])
            self._check_var(j, pos)
            return Poly.conj_variable(self.n, j), False
        if kind == "name":
            self.expect_op("(")
            inner = self.expr()
            self.expect_op(")")
            if val == "conj":
                return inner.conj(), False
            if val == "Re":
                return (inner + inner.conj()) * Fraction(1, 2), False
            return (inner - inner.conj()) * (CRat(0, Fraction(-1, 2))), False
        if kind == "op" and val == "~":
            inner, modulus = self.atom()
            if modulus:
                raise ParseError("cannot conjugate a modulus directly", pos)
            return inner.conj(), False
        if kind == "op" and val == "(":
            inner = self.expr()
            self.expect_op(")")
            return inner, False
        if kind == "op" and val == "|":
            inner = self.expr()
            k2, v2, p2 = self.next()
            if k2 != "op" or v2 != "|":
                raise ParseError("unterminated modulus bar", p2)
            return inner, True
        raise ParseError(f"unexpected token {val!r}", pos)

    def _check_var(self, j: int, pos: int):
        if not 1 <= j <= self.n:
            raise ParseError(
                f"variable z{j} outside dimension n={self.n}", pos)


def parse_poly(text: str, n: int) -> Poly:
    """Parse a real-valued polynomial expression in z1..zn.

    Raises ParseError on syntax problems and NonRealError when the expanded
    expression is not Hermitian-symmetric (e.g. a lone "z2^2").
    """
    if n < 1:
        raise PolyError("dimension must be >= 1")
    p = _Parser(text, n).parse()
    return require_real(p, f"expression {text!r}")
