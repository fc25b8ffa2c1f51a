"""Exact sparse linear algebra over Q by fraction-free elimination.

Rows are dictionaries ``column -> value``.  Each row is scaled to integers on
entry and kept primitive (content 1) after every elimination step, so the
arithmetic is plain Python integers throughout.  Columns are 0-based here;
callers translate from the 1-based matrix indices.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

SparseRow = Mapping[int, Fraction]


def _integer_row(row: Mapping[int, Fraction | int]) -> dict[int, int]:
    items = [(c, Fraction(v)) for c, v in row.items() if v]
    if not items:
        return {}
    den = math.lcm(*(v.denominator for _, v in items))
    out = {c: int(v * den) for c, v in items}
    return _primitive(out)


def _primitive(row: dict[int, int]) -> dict[int, int]:
    g = 0
    for v in row.values():
        g = math.gcd(g, v)
        if g == 1:
            return row
    if g > 1:
        return {c: v // g for c, v in row.items()}
    return row


def _combine(a: dict[int, int], ca: int, b: dict[int, int], cb: int) -> dict[int, int]:
    """Primitive part of ``ca*a - cb*b``."""
    out = {c: ca * v for c, v in a.items()}
    for c, v in b.items():
        nv = out.get(c, 0) - cb * v
        if nv:
            out[c] = nv
        else:
            out.pop(c, None)
    return _primitive(out)


class Echelon:
    """Incrementally maintained reduced row echelon form.

    Every stored pivot row has zeros in all other pivot columns.
    """

    def __init__(self):
        self.pivots: dict[int, dict[int, int]] = {}

    def reduce(self, row: dict[int, int]) -> dict[int, int]:
        for c in [c for c in row if c in self.pivots]:
            v = row.get(c)
            if not v:
                continue
            prow = self.pivots[c]
            p = prow[c]
            g = math.gcd(p, v)
            row = _combine(row, p // g, prow, v // g)
        return row

    def add(self, row: Mapping[int, Fraction | int]) -> bool:
        """Insert a row; returns True when it raised the rank."""
        r = self.reduce(_integer_row(row))
        if not r:
            return False
        pc = min(r)
        if r[pc] < 0:
            r = {c: -v for c, v in r.items()}
        for c, prow in list(self.pivots.items()):
            v = prow.get(pc)
            if v:
                g = math.gcd(r[pc], v)
                self.pivots[c] = _combine(prow, r[pc] // g, r, v // g)
        self.pivots[pc] = r
        return True

    @property
    def rank(self) -> int:
        return len(self.pivots)


def rank(rows: Iterable[SparseRow]) -> int:
    ech = Echelon()
    for row in rows:
        ech.add(row)
    return ech.rank


def nullspace(rows: Iterable[SparseRow], ncols: int) -> list[dict[int, Fraction]]:
    """Basis of ``{x : rows @ x = 0}`` for ``x`` indexed by ``0..ncols-1``.

    One vector per free column, normalised so the free coordinate is 1.
    """
    ech = Echelon()
    for row in rows:
        ech.add(row)
    free = [c for c in range(ncols) if c not in ech.pivots]
    basis = []
    for f in free:
        vec = {f: Fraction(1)}
        for pc, prow in ech.pivots.items():
            v = prow.get(f)
            if v:
                vec[pc] = Fraction(-v, prow[pc])
        basis.append(vec)
    return basis


def pivot_columns(rows: Sequence[SparseRow]) -> list[int]:
    """Columns selected as pivots by elimination; a maximal independent set."""
    ech = Echelon()
    for row in rows:
        ech.add(row)
    return sorted(ech.pivots)


def solve(rows: Sequence[SparseRow], rhs: Sequence[Fraction], ncols: int) -> dict[int, Fraction] | None:
    """One solution of ``rows @ x = rhs`` (free variables set to 0), or None."""
    aug = ncols
    ech = Echelon()
    for row, b in zip(rows, rhs):
        r = dict(row)
        if b:
            r[aug] = Fraction(b)
        ech.add(r)
    if aug in ech.pivots:
        return None
    sol = {}
    for pc, prow in ech.pivots.items():
        b = prow.get(aug, 0)
        if b:
            sol[pc] = Fraction(b, prow[pc])
    return sol


def dense_rank(mat: Sequence[Sequence[Fraction]]) -> int:
    return rank({j: v for j, v in enumerate(row) if v} for row in mat)


def dense_nullspace(mat: Sequence[Sequence[Fraction]], ncols: int) -> list[dict[int, Fraction]]:
    return nullspace(({j: v for j, v in enumerate(row) if v} for row in mat), ncols)


def inverse(mat: Sequence[Sequence[Fraction]]) -> list[list[Fraction]]:
    """Inverse of a small square matrix by Gauss-Jordan on Fractions."""
    n = len(mat)
    a = [[Fraction(v) for v in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(mat)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        a[col] = [v / p for v in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]
