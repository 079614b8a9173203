"""Parser for A_theta element expressions such as ``2*x*g - 1/3*z + g^2``.

Grammar (whitespace-insensitive)::

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := power (['*'] power)*          # juxtaposition multiplies
    power  := atom ['^' ['-'] INT]
    atom   := NUMBER ['/' NUMBER] | 'i' | SYMBOL | '(' expr ')'

SYMBOL is one of x, y, z, g (``g = xy``).  Negative powers are allowed on
symbols only.
"""

from __future__ import annotations

import re
from fractions import Fraction

from ..fpalgebra import FPElement, FPPresentation
from ..scalars import EXACT, QQi


class ExprError(ValueError):
    def __init__(self, msg: str, column: int):
        super().__init__(f"{msg} (column {column})")
        self.column = column


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+)|(?P<sym>[A-Za-z])|(?P<op>[-+*/^()]))")
_INVERSE_WORD = {"x": "x", "y": "y", "z": "z", "g": "yx"}


def _tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            col = pos + len(text[pos:]) - len(text[pos:].lstrip()) + 1
            raise ExprError(f"unexpected character {text[col - 1]!r}", col)
        kind = m.lastgroup
        start = m.start(kind)
        out.append((kind, m.group(kind), start + 1))
        pos = m.end()
    out.append(("end", "", len(text) + 1))
    return out


class _Parser:
    def __init__(self, text: str, pres: FPPresentation):
        self.toks = _tokenize(text)
        self.i = 0
        self.pres = pres
        self.exact = pres.backend == EXACT

    @property
    def tok(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect_op(self, op: str):
        kind, val, col = self.tok
        if kind != "op" or val != op:
            raise ExprError(f"expected {op!r}", col)
        self.take()

    def number(self, text: str):
        return Fraction(text) if self.exact else float(text)

    def scalar(self, value):
        if isinstance(value, FPElement):
            return value
        if self.exact:
            return QQi(value) if not isinstance(value, QQi) else value
        return complex(value)

    def parse(self):
        if self.tok[0] == "end":
            raise ExprError("empty expression", 1)
        value = self.expr()
        kind, val, col = self.tok
        if kind != "end":
            raise ExprError(f"unexpected {val!r}", col)
        if not isinstance(value, FPElement):
            value = self.pres.unit.scale(self.scalar(value))
        return value

    def expr(self):
        sign = 1
        kind, val, _ = self.tok
        if kind == "op" and val in "+-":
            self.take()
            sign = -1 if val == "-" else 1
        acc = self._mul(sign, self.term())
        while self.tok[0] == "op" and self.tok[1] in "+-":
            s = -1 if self.take()[1] == "-" else 1
            acc = self._add(acc, self._mul(s, self.term()))
        return acc

    def _add(self, a, b):
        if isinstance(a, FPElement) or isinstance(b, FPElement):
            if not isinstance(a, FPElement):
                a = self.pres.unit.scale(self.scalar(a))
            if not isinstance(b, FPElement):
                b = self.pres.unit.scale(self.scalar(b))
        elif self.exact:
            a, b = self.scalar(a), self.scalar(b)
        return a + b

    def _mul(self, a, b):
        if isinstance(a, FPElement) and isinstance(b, FPElement):
            return a * b
        if isinstance(a, FPElement):
            return a.scale(self.scalar(b))
        if isinstance(b, FPElement):
            return b.scale(self.scalar(a))
        if self.exact:
            return self.scalar(a) * self.scalar(b)
        return complex(a) * complex(b)

    def term(self):
        acc = self.power()
        while True:
            kind, val, _ = self.tok
            if kind == "op" and val == "*":
                self.take()
                acc = self._mul(acc, self.power())
            elif kind in ("num", "sym") or (kind == "op" and val == "("):
                acc = self._mul(acc, self.power())
            else:
                return acc

    def power(self):
        start = self.tok
        base = self.atom()
        if self.tok[0] == "op" and self.tok[1] == "^":
            self.take()
            neg = False
            if self.tok[0] == "op" and self.tok[1] == "-":
                self.take()
                neg = True
            kind, val, col = self.take()
            if kind != "num" or not val.isdigit():
                raise ExprError("exponent must be an integer", col)
            n = int(val)
            if neg:
                if start[0] != "sym" or start[1] not in _INVERSE_WORD:
                    raise ExprError("negative powers are only allowed on x, y, z, g", start[2])
                base = self.pres.normal_form(_INVERSE_WORD[start[1]])
            out = self.pres.unit if isinstance(base, FPElement) else (self.scalar(1))
            for _ in range(n):
                out = self._mul(out, base)
            return out
        return base

    def atom(self):
        kind, val, col = self.take()
        if kind == "num":
            value = self.number(val)
            if self.tok[0] == "op" and self.tok[1] == "/":
                self.take()
                k2, v2, c2 = self.take()
                if k2 != "num":
                    raise ExprError("expected a denominator", c2)
                den = self.number(v2)
                if den == 0:
                    raise ExprError("division by zero", c2)
                value = value / den
            return value
        if kind == "sym":
            if val == "i":
                return QQi(0, 1) if self.exact else 1j
            if val not in ("x", "y", "z", "g"):
                raise ExprError(f"unknown symbol {val!r}", col)
            return self.pres.gen(val)
        if kind == "op" and val == "(":
            inner = self.expr()
            self.expect_op(")")
            return inner
        if kind == "end":
            raise ExprError("unexpected end of expression", col)
        raise ExprError(f"unexpected {val!r}", col)


def parse_element(text: str, pres: FPPresentation) -> FPElement:
    """Parse and normal-form an element of A_theta."""
    return _Parser(text, pres).parse()
