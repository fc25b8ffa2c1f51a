"""Exact algebra of band coefficient sequences.

A coefficient sequence is a finite sum of *atoms*

    i  ->  q(i) * r**i * (i!)**s          (i >= 1)

with ``q`` a rational function over Q, ``r`` a nonzero rational and ``s`` an
integer.  Sums, products and index shifts of such sums stay in the same class,
which is what makes products of banded matrices representable.

The canonical form keeps at most one atom per growth class ``(r, s)`` and
drops atoms whose ``q`` is identically zero.  Because the functions
``r**i (i!)**s`` are linearly independent over the rational functions, an
empty atom list is the only representation of the zero sequence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Union

from sympy.polys.domains import QQ
from sympy.polys.fields import field

from .errors import PoleAtIndex, ZeroSequence

Number = Union[int, Fraction]

_FIELD, _IVAR = field("i", QQ)
_RING = _FIELD.ring
_X = _RING.gens[0]

# search caps for the dominance certificate in nonvanishing_threshold
_THRESHOLD_CAP = 1 << 13


def _to_qq(v: Number):
    v = Fraction(v)
    return QQ(v.numerator, v.denominator)


def _to_fraction(v) -> Fraction:
    return Fraction(int(v.numerator), int(v.denominator))


def _poly_coeffs(p) -> list[Fraction]:
    """Ascending coefficient list of a univariate ring element."""
    if not p:
        return []
    out = [Fraction(0)] * (p.degree() + 1)
    for (e,), c in p.terms():
        out[e] = _to_fraction(c)
    return out


def _poly_from_coeffs(coeffs: Iterable[Number]):
    p = _RING.zero
    for e, c in enumerate(coeffs):
        if c:
            p += _to_qq(c) * _X**e
    return p


def _integer_roots(p) -> set[int]:
    if not p or p.degree() <= 0:
        return set()
    return set(_integer_roots_cached(tuple(_poly_coeffs(p))))


@lru_cache(maxsize=4096)
def _integer_roots_cached(coeffs: tuple[Fraction, ...]) -> frozenset[int]:
    roots = set()
    _, factors = _poly_from_coeffs(coeffs).factor_list()
    for f, _mult in factors:
        if f.degree() == 1:
            c = _poly_coeffs(f)
            root = -c[0] / c[1]
            if root.denominator == 1:
                roots.add(int(root))
    return frozenset(roots)


@lru_cache(maxsize=1024)
def _const_field(num: int, den: int):
    return _FIELD(QQ(num, den))


@lru_cache(maxsize=256)
def _rising(k: int):
    """``(i+1)...(i+k)`` for ``k > 0`` and ``(i+k+1)...i`` for ``k < 0``."""
    p = _RING.one
    for t in range(1, k + 1) if k > 0 else range(k + 1, 1):
        p = p * (_X + t)
    return p


class RatFunc:
    """Rational function in one indeterminate ``i`` over Q, in lowest terms."""

    __slots__ = ("_f", "_h")

    def __init__(self, f):
        self._f = f
        self._h = None

    @classmethod
    def const(cls, c: Number) -> "RatFunc":
        c = Fraction(c)
        return cls(_const_field(c.numerator, c.denominator))

    @classmethod
    def index(cls) -> "RatFunc":
        """The identity function ``i``."""
        return cls(_IVAR)

    @classmethod
    def from_coeffs(cls, numer: Iterable[Number], denom: Iterable[Number] = (1,)) -> "RatFunc":
        d = _poly_from_coeffs(denom)
        if not d:
            raise ZeroDivisionError("zero denominator polynomial")
        return cls(_FIELD(_poly_from_coeffs(numer)) / _FIELD(d))

    @classmethod
    def coerce(cls, v: "RatFunc | Number") -> "RatFunc":
        return v if isinstance(v, RatFunc) else cls.const(v)

    # -- coefficient views, denominator normalised to be monic
    def _normal(self):
        num, den = self._f.numer, self._f.denom
        lc = den.LC
        return num.quo_ground(lc), den.quo_ground(lc)

    def numer_coeffs(self) -> list[Fraction]:
        return _poly_coeffs(self._normal()[0])

    def denom_coeffs(self) -> list[Fraction]:
        return _poly_coeffs(self._normal()[1])

    def is_zero(self) -> bool:
        return not self._f.numer

    def is_const(self) -> bool:
        return self._f.numer.degree() <= 0 and self._f.denom.degree() <= 0

    def degree(self) -> int:
        """``deg(numerator) - deg(denominator)``; undefined for zero."""
        return self._f.numer.degree() - self._f.denom.degree()

    def integer_roots(self) -> set[int]:
        return _integer_roots(self._f.numer)

    def integer_poles(self) -> set[int]:
        return _integer_roots(self._f.denom)

    def __call__(self, i: int) -> Fraction:
        den = self._f.denom(i)
        if den == 0:
            raise PoleAtIndex(i)
        num = self._f.numer(i)
        return _to_fraction(num) / _to_fraction(den)

    def shift(self, k: int) -> "RatFunc":
        """The function ``i -> self(i + k)``."""
        if k == 0:
            return self
        num = self._f.numer.compose(_X, _X + k)
        den = self._f.denom.compose(_X, _X + k)
        return RatFunc(_FIELD(num) / _FIELD(den))

    def __add__(self, other):
        return RatFunc(self._f + RatFunc.coerce(other)._f)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self._f)

    def __sub__(self, other):
        return RatFunc(self._f - RatFunc.coerce(other)._f)

    def __rsub__(self, other):
        return RatFunc(RatFunc.coerce(other)._f - self._f)

    def __mul__(self, other):
        return RatFunc(self._f * RatFunc.coerce(other)._f)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = RatFunc.coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RatFunc(self._f / other._f)

    def __rtruediv__(self, other):
        return RatFunc.coerce(other) / self

    def reciprocal(self) -> "RatFunc":
        return RatFunc.const(1) / self

    def __pow__(self, n: int):
        if n < 0:
            return self.reciprocal() ** (-n)
        return RatFunc(self._f**n)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = RatFunc.const(other)
        if not isinstance(other, RatFunc):
            return NotImplemented
        return self._f == other._f

    def __hash__(self):
        if self._h is None:
            self._h = hash((tuple(self.numer_coeffs()), tuple(self.denom_coeffs())))
        return self._h

    def __str__(self):
        return str(self._f.as_expr())

    def __repr__(self):
        return f"RatFunc({self})"


def _factorial_power(i: int, s: int) -> Fraction:
    if s == 0:
        return Fraction(1)
    f = math.factorial(i)
    return Fraction(f**s) if s > 0 else Fraction(1, f ** (-s))


@dataclass(frozen=True)
class SeqAtom:
    """The sequence ``i -> q(i) * r**i * (i!)**s``."""

    q: RatFunc
    r: Fraction
    s: int

    def __post_init__(self):
        object.__setattr__(self, "q", RatFunc.coerce(self.q))
        object.__setattr__(self, "r", Fraction(self.r))
        if self.r == 0:
            raise ValueError("atom ratio r must be nonzero")

    @property
    def key(self) -> tuple[Fraction, int]:
        return (self.r, self.s)

    def __call__(self, i: int) -> Fraction:
        return self.q(i) * self.r**i * _factorial_power(i, self.s)

    def shift(self, k: int) -> "SeqAtom":
        if k == 0:
            return self
        return _atom_shift(self, k)


@lru_cache(maxsize=8192)
def _atom_shift(a: SeqAtom, k: int) -> SeqAtom:
    # (i+k)! / i! is the rising product for k > 0 and its reciprocal for k < 0
    q = a.q.shift(k) * RatFunc.const(a.r**k)
    if a.s:
        ratio = RatFunc(_FIELD(_rising(k) ** abs(a.s)))
        q = q * ratio if (k > 0) == (a.s > 0) else q / ratio
    return SeqAtom(q, a.r, a.s)


class CoeffSeq:
    """Canonical finite sum of :class:`SeqAtom` values.

    Instances are immutable.  Equality is structural on the canonical form,
    which coincides with pointwise equality on all non-pole indices.
    """

    __slots__ = ("_atoms", "_cache", "_hash", "_poles")

    def __init__(self, atoms: Iterable[SeqAtom] = ()):
        merged: dict[tuple[Fraction, int], RatFunc] = {}
        for a in atoms:
            k = a.key
            merged[k] = merged[k] + a.q if k in merged else a.q
        self._atoms: tuple[SeqAtom, ...] = tuple(
            SeqAtom(q, r, s) for (r, s), q in sorted(merged.items(), key=lambda kv: (kv[0][1], kv[0][0]))
            if not q.is_zero()
        )
        self._cache: dict[int, Fraction] = {}
        self._hash = None
        self._poles: frozenset[int] | None = None

    # -- constructors
    @classmethod
    def zero(cls) -> "CoeffSeq":
        return cls()

    @classmethod
    def const(cls, c: Number) -> "CoeffSeq":
        return cls([SeqAtom(RatFunc.const(c), Fraction(1), 0)])

    @classmethod
    def atom(cls, q: "RatFunc | Number" = 1, r: Number = 1, s: int = 0) -> "CoeffSeq":
        return cls([SeqAtom(RatFunc.coerce(q), Fraction(r), s)])

    @property
    def atoms(self) -> tuple[SeqAtom, ...]:
        return self._atoms

    def keys(self) -> list[tuple[Fraction, int]]:
        return [a.key for a in self._atoms]

    def q_for(self, r: Number, s: int) -> RatFunc:
        for a in self._atoms:
            if a.key == (Fraction(r), s):
                return a.q
        return RatFunc.const(0)

    def is_zero(self) -> bool:
        return not self._atoms

    def is_single_atom(self) -> bool:
        return len(self._atoms) == 1

    def __call__(self, i: int) -> Fraction:
        try:
            return self._cache[i]
        except KeyError:
            pass
        v = sum((a(i) for a in self._atoms), Fraction(0))
        self._cache[i] = v
        return v

    def __add__(self, other: "CoeffSeq") -> "CoeffSeq":
        return CoeffSeq(self._atoms + other._atoms)

    def __neg__(self) -> "CoeffSeq":
        return CoeffSeq(SeqAtom(-a.q, a.r, a.s) for a in self._atoms)

    def __sub__(self, other: "CoeffSeq") -> "CoeffSeq":
        return self + (-other)

    def __mul__(self, other: "CoeffSeq | Number") -> "CoeffSeq":
        if isinstance(other, (int, Fraction)):
            return CoeffSeq(SeqAtom(a.q * other, a.r, a.s) for a in self._atoms)
        return CoeffSeq(
            SeqAtom(a.q * b.q, a.r * b.r, a.s + b.s) for a in self._atoms for b in other._atoms
        )

    __rmul__ = __mul__

    def shift(self, k: int) -> "CoeffSeq":
        """The sequence ``i -> self(i + k)``, expressed again in atoms."""
        if k == 0:
            return self
        return CoeffSeq(a.shift(k) for a in self._atoms)

    def reciprocal(self) -> "CoeffSeq":
        """Pointwise reciprocal; only defined for a single atom."""
        if not self.is_single_atom():
            raise ValueError("reciprocal is only representable for a single atom")
        a = self._atoms[0]
        return CoeffSeq([SeqAtom(a.q.reciprocal(), 1 / a.r, -a.s)])

    def poles(self) -> set[int]:
        """Integer poles (any sign) of the atoms' rational parts."""
        if self._poles is None:
            out: set[int] = set()
            for a in self._atoms:
                out |= a.q.integer_poles()
            self._poles = frozenset(out)
        return set(self._poles)

    def min_start(self, lo: int) -> int:
        """Smallest ``t >= lo`` such that no pole lies in ``[t, oo)``."""
        p = [x for x in self.poles() if x >= lo]
        return max(p) + 1 if p else lo

    def nonvanishing_threshold(self) -> int | None:
        """Certified ``N0`` with ``self(i) != 0`` for every ``i >= N0``.

        Returns None when no certificate is available (no single atom
        strictly dominates the growth order).
        """
        if self.is_zero():
            raise ZeroSequence("threshold requested for the zero sequence")
        if self.is_single_atom():
            q = self._atoms[0].q
            bad = q.integer_roots() | q.integer_poles()
            return max([0, *bad]) + 1
        bound = _dominance_bound(self._atoms)
        if bound is None:
            return None
        # tighten: walk down while values stay defined and nonzero
        n0 = bound
        while n0 > 1:
            try:
                if self(n0 - 1) == 0:
                    break
            except PoleAtIndex:
                break
            n0 -= 1
        return n0

    def __eq__(self, other):
        if not isinstance(other, CoeffSeq):
            return NotImplemented
        return self._atoms == other._atoms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple((a.r, a.s, a.q) for a in self._atoms))
        return self._hash

    def __repr__(self):
        if not self._atoms:
            return "CoeffSeq(0)"
        parts = []
        for a in self._atoms:
            term = f"({a.q})"
            if a.r != 1:
                term += f"*({a.r})^i"
            if a.s:
                term += f"*(i!)^{a.s}"
            parts.append(term)
        return "CoeffSeq(" + " + ".join(parts) + ")"

    # -- JSON form: list of {q_num, q_den, r, s}
    def to_json(self) -> list[dict]:
        return [
            {
                "q_num": [str(c) for c in a.q.numer_coeffs()],
                "q_den": [str(c) for c in a.q.denom_coeffs()],
                "r": str(a.r),
                "s": a.s,
            }
            for a in self._atoms
        ]

    @classmethod
    def from_json(cls, data: list[dict]) -> "CoeffSeq":
        return cls(
            SeqAtom(
                RatFunc.from_coeffs([Fraction(c) for c in d["q_num"]], [Fraction(c) for c in d["q_den"]]),
                Fraction(d["r"]),
                int(d["s"]),
            )
            for d in data
        )


# -- certificate for sums with a strictly dominant atom ---------------------

def _abs_sum(coeffs: list[Fraction]) -> Fraction:
    return sum((abs(c) for c in coeffs), Fraction(0))


def _lower_bound_start(coeffs: list[Fraction]) -> Fraction:
    # |P(i)| >= |lc| i^n / 2 for i >= max(1, 2 * sum_{j<n}|c_j| / |lc|)
    return max(Fraction(1), 2 * _abs_sum(coeffs[:-1]) / abs(coeffs[-1]))


def _first_true(pred, lo: int, cap: int) -> int | None:
    """Smallest ``i`` in ``[lo, cap]`` with ``pred(i)``, for monotone ``pred``."""
    if lo > cap:
        return None
    if pred(lo):
        return lo
    bad, step = lo, 1
    while True:
        probe = min(lo + step, cap)
        if pred(probe):
            good = probe
            break
        if probe == cap:
            return None
        bad, step = probe, step * 2
    while good - bad > 1:
        mid = (good + bad) // 2
        if pred(mid):
            good = mid
        else:
            bad = mid
    return good


def _dominance_bound(atoms: tuple[SeqAtom, ...]) -> int | None:
    growth = sorted(atoms, key=lambda a: (a.s, abs(a.r)))
    dom = growth[-1]
    if (growth[-2].s, abs(growth[-2].r)) == (dom.s, abs(dom.r)):
        return None
    others = growth[:-1]

    pd, qd = dom.q.numer_coeffs(), dom.q.denom_coeffs()
    big_b = abs(pd[-1]) / (2 * _abs_sum(qd))
    b_deg = len(pd) - len(qd)
    start = max([_lower_bound_start(pd), _lower_bound_start(qd)]
                + [_lower_bound_start(a.q.denom_coeffs()) for a in others])
    lo = math.ceil(start)

    terms = []
    for a in others:
        pk, qk = a.q.numer_coeffs(), a.q.denom_coeffs()
        coef = 2 * _abs_sum(pk) / abs(qk[-1]) / big_b
        e = (len(pk) - len(qk)) - b_deg
        ratio = abs(a.r / dom.r)
        ds = a.s - dom.s
        terms.append((coef, e, ratio, ds))

    # |atom_k(i) / atom_dom(i)| <= g_k(i); h_k bounds g_k(i+1)/g_k(i) and is nonincreasing
    def g(t, i):
        coef, e, ratio, ds = t
        return coef * Fraction(i) ** e * ratio**i * _factorial_power(i, ds)

    def h(t, i):
        _, e, ratio, ds = t
        return (1 + Fraction(1, i)) ** max(e, 0) * ratio * Fraction(i + 1) ** ds

    n1 = lo
    for t in terms:
        nk = _first_true(lambda i, t=t: h(t, i) < 1, lo, _THRESHOLD_CAP)
        if nk is None:
            return None
        n1 = max(n1, nk)
    return _first_true(lambda i: sum(g(t, i) for t in terms) < 1, n1, _THRESHOLD_CAP)


# -- functional surface -------------------------------------------------------

def seq_eval(seq: CoeffSeq, i: int) -> Fraction:
    return seq(i)


def seq_add(a: CoeffSeq, b: CoeffSeq) -> CoeffSeq:
    return a + b


def seq_mul(a: CoeffSeq, b: CoeffSeq) -> CoeffSeq:
    return a * b


def seq_shift(seq: CoeffSeq, k: int) -> CoeffSeq:
    return seq.shift(k)


def seq_is_zero(seq: CoeffSeq) -> bool:
    return seq.is_zero()


def seq_nonvanishing_threshold(seq: CoeffSeq) -> int | None:
    return seq.nonvanishing_threshold()
