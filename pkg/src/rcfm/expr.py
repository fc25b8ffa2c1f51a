"""A small expression language for banded infinite matrices.

Grammar (whitespace-insensitive)::

    expr    := term (("+" | "-") term)*
    term    := unary ("*" unary | "/" NUMBER)*
    unary   := "-" unary | power
    power   := primary ("^" INT)?
    primary := NUMBER | "I" | "S(" INT ")" | "T(" INT ")" | "Dgeo(" RAT ")"
             | "Dfact(" INT ")" | "E(" INT "," INT ")" | "conj(" expr "," expr ")"
             | "(" expr ")"

``S(i)`` is the shift with ones on ``row - col = i``; ``T(1)`` and ``T(-1)``
are the weighted shifts with entries ``j+1`` and ``1/(i+1)``;
``Dgeo(r) = Diag(1, r, r^2, ...)``; ``Dfact(s) = Diag((i!)^s)``;
``E(i,j)`` is a matrix unit; a number ``c`` stands for ``c*I``;
``conj(U, X) = U^-1 X U``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .bpfmatrix import (
    BPFMatrix,
    factorial_diag,
    geometric_diag,
    identity,
    make_shift,
    make_T,
    make_unit,
)
from .errors import EvalError, NonInvertiblePower, NotInvertible, ParseError


@dataclass(frozen=True)
class Shift:
    i: int


@dataclass(frozen=True)
class TShift:
    i: int


@dataclass(frozen=True)
class Dgeo:
    r: Fraction


@dataclass(frozen=True)
class Dfact:
    s: int


@dataclass(frozen=True)
class Unit:
    i: int
    j: int


@dataclass(frozen=True)
class Ident:
    pass


@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class Add:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Sub:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Mul:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exp: int


@dataclass(frozen=True)
class Conj:
    u: "Expr"
    x: "Expr"


Expr = Union[Shift, TShift, Dgeo, Dfact, Unit, Ident, Num, Neg, Add, Sub, Mul, Pow, Conj]

# -- tokenizer ------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^(),]))")


@dataclass(frozen=True)
class _Tok:
    kind: str  # "num", "name", "op", "end"
    text: str
    offset: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m or m.start(m.lastgroup) != pos:
            raise ParseError(_byte_offset(text, pos), {"number", "name", "operator"}, text[pos])
        kind = m.lastgroup
        toks.append(_Tok(kind, m.group(kind), _byte_offset(text, pos)))
        pos = m.end()
    toks.append(_Tok("end", "", _byte_offset(text, n)))
    return toks


def _byte_offset(text: str, pos: int) -> int:
    return len(text[:pos].encode("utf-8"))


_ATOMS = {"I", "S", "T", "Dgeo", "Dfact", "E", "conj"}
_PRIMARY_START = frozenset({"number", "(", "-", *sorted(_ATOMS)})


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.pos = 0

    @property
    def cur(self) -> _Tok:
        return self.toks[self.pos]

    def fail(self, expected):
        t = self.cur
        raise ParseError(t.offset, set(expected), t.text)

    def accept(self, text: str) -> bool:
        if self.cur.kind == "op" and self.cur.text == text:
            self.pos += 1
            return True
        return False

    def expect(self, text: str):
        if not self.accept(text):
            self.fail({text})

    def number(self) -> int:
        if self.cur.kind != "num":
            self.fail({"number"})
        v = int(self.cur.text)
        self.pos += 1
        return v

    def signed_int(self) -> int:
        sign = -1 if self.accept("-") else 1
        if sign > 0:
            self.accept("+")
        if self.cur.kind != "num":
            self.fail({"number"} if sign < 0 else {"number", "-"})
        return sign * self.number()

    def rational(self) -> Fraction:
        v = Fraction(self.signed_int())
        if self.accept("/"):
            den = self.number()
            if den == 0:
                raise ParseError(self.toks[self.pos - 1].offset, {"nonzero number"}, "0")
            v /= den
        return v

    def parse(self) -> Expr:
        e = self.expr()
        if self.cur.kind != "end":
            self.fail({"+", "-", "*", "/", "^", "end of input"})
        return e

    def expr(self) -> Expr:
        e = self.term()
        while True:
            if self.accept("+"):
                e = Add(e, self.term())
            elif self.accept("-"):
                e = Sub(e, self.term())
            else:
                return e

    def term(self) -> Expr:
        e = self.unary()
        while True:
            if self.accept("*"):
                e = Mul(e, self.unary())
            elif self.accept("/"):
                den = self.number()
                if den == 0:
                    raise ParseError(self.toks[self.pos - 1].offset, {"nonzero number"}, "0")
                e = Num(e.value / den) if isinstance(e, Num) else Mul(e, Num(Fraction(1, den)))
            else:
                return e

    def unary(self) -> Expr:
        if self.accept("-"):
            arg = self.unary()
            return Num(-arg.value) if isinstance(arg, Num) else Neg(arg)
        return self.power()

    def power(self) -> Expr:
        base = self.primary()
        if self.accept("^"):
            return Pow(base, self.signed_int())
        return base

    def args(self, n: int, parse_one):
        self.expect("(")
        out = [parse_one()]
        for _ in range(n - 1):
            self.expect(",")
            out.append(parse_one())
        self.expect(")")
        return out

    def primary(self) -> Expr:
        t = self.cur
        if t.kind == "num":
            return Num(Fraction(self.number()))
        if t.kind == "op" and t.text == "(":
            self.pos += 1
            e = self.expr()
            self.expect(")")
            return e
        if t.kind != "name" or t.text not in _ATOMS:
            self.fail(_PRIMARY_START)
        self.pos += 1
        name = t.text
        if name == "I":
            return Ident()
        if name == "S":
            (i,) = self.args(1, self.signed_int)
            return Shift(i)
        if name == "T":
            (i,) = self.args(1, self.signed_int)
            if i not in (-1, 1):
                raise ParseError(t.offset, {"T(-1)", "T(1)"}, f"T({i})")
            return TShift(i)
        if name == "Dgeo":
            (r,) = self.args(1, self.rational)
            if r == 0:
                raise ParseError(t.offset, {"nonzero ratio"}, "Dgeo(0)")
            return Dgeo(r)
        if name == "Dfact":
            (s,) = self.args(1, self.signed_int)
            return Dfact(s)
        if name == "E":
            i, j = self.args(2, self.signed_int)
            if i < 1 or j < 1:
                raise ParseError(t.offset, {"positive indices"}, f"E({i},{j})")
            return Unit(i, j)
        u, x = self.args(2, self.expr)
        return Conj(u, x)


def parse(text: str) -> Expr:
    return _Parser(text).parse()


# -- printing ---------------------------------------------------------------------

def _prec(e: Expr) -> int:
    if isinstance(e, (Add, Sub)):
        return 1
    if isinstance(e, Mul):
        return 2
    if isinstance(e, Num):
        if e.value.denominator != 1:
            return 2
        return 3 if e.value < 0 else 5
    if isinstance(e, Neg):
        return 3
    if isinstance(e, Pow):
        return 4
    return 5


def _wrap(e: Expr, min_prec: int) -> str:
    s = to_text(e)
    return f"({s})" if _prec(e) < min_prec else s


def to_text(e: Expr) -> str:
    """Canonical text; ``parse(to_text(e)) == e`` for parser-produced ASTs."""
    if isinstance(e, Shift):
        return f"S({e.i})"
    if isinstance(e, TShift):
        return f"T({e.i})"
    if isinstance(e, Dgeo):
        return f"Dgeo({e.r})"
    if isinstance(e, Dfact):
        return f"Dfact({e.s})"
    if isinstance(e, Unit):
        return f"E({e.i},{e.j})"
    if isinstance(e, Ident):
        return "I"
    if isinstance(e, Num):
        return str(e.value)
    if isinstance(e, Neg):
        return "-" + _wrap(e.arg, 3)
    if isinstance(e, Add):
        return f"{_wrap(e.left, 1)} + {_wrap(e.right, 2)}"
    if isinstance(e, Sub):
        return f"{_wrap(e.left, 1)} - {_wrap(e.right, 2)}"
    if isinstance(e, Mul):
        return f"{_wrap(e.left, 2)}*{_wrap(e.right, 3)}"
    if isinstance(e, Pow):
        return f"{_wrap(e.base, 5)}^{e.exp}"
    if isinstance(e, Conj):
        return f"conj({to_text(e.u)}, {to_text(e.x)})"
    raise TypeError(f"not an expression node: {e!r}")


# -- evaluation -------------------------------------------------------------------

def evaluate(e: "Expr | str") -> BPFMatrix:
    if isinstance(e, str):
        e = parse(e)
    if isinstance(e, Shift):
        return make_shift(e.i)
    if isinstance(e, TShift):
        return make_T(e.i)
    if isinstance(e, Dgeo):
        return geometric_diag(e.r)
    if isinstance(e, Dfact):
        return factorial_diag(e.s)
    if isinstance(e, Unit):
        return make_unit(e.i, e.j)
    if isinstance(e, Ident):
        return identity()
    if isinstance(e, Num):
        return identity().scale(e.value)
    if isinstance(e, Neg):
        return -evaluate(e.arg)
    if isinstance(e, Add):
        return evaluate(e.left) + evaluate(e.right)
    if isinstance(e, Sub):
        return evaluate(e.left) - evaluate(e.right)
    if isinstance(e, Mul):
        return evaluate(e.left) * evaluate(e.right)
    if isinstance(e, Pow):
        if e.exp >= 0:
            return evaluate(e.base) ** e.exp
        return inverse_of(e.base) ** (-e.exp)
    if isinstance(e, Conj):
        return inverse_of(e.u) * evaluate(e.x) * evaluate(e.u)
    raise EvalError(f"cannot evaluate {e!r}")


def inverse_of(e: Expr) -> BPFMatrix:
    """Exact two-sided inverse of an expression, or NonInvertiblePower."""
    if isinstance(e, Dgeo):
        return geometric_diag(e.r, -1)
    if isinstance(e, Dfact):
        return factorial_diag(-e.s)
    if isinstance(e, Ident):
        return identity()
    if isinstance(e, Num):
        if e.value == 0:
            raise NonInvertiblePower("0 has no inverse")
        return identity().scale(1 / e.value)
    if isinstance(e, Neg):
        return -inverse_of(e.arg)
    if isinstance(e, Mul):
        return inverse_of(e.right) * inverse_of(e.left)
    if isinstance(e, Pow):
        if e.exp >= 0:
            return inverse_of(e.base) ** e.exp
        return evaluate(e.base) ** (-e.exp)
    if isinstance(e, Conj):
        return inverse_of(e.u) * inverse_of(e.x) * evaluate(e.u)
    from .fredholm import exact_inverse

    try:
        return exact_inverse(evaluate(e))
    except NotInvertible as exc:
        raise NonInvertiblePower(f"{to_text(e)} has no two-sided inverse: {exc}") from exc


def parse_matrix(text: str) -> BPFMatrix:
    return evaluate(parse(text))
