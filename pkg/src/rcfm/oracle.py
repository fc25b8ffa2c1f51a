"""Brute-force dense-truncation checks for kernel, cokernel and index.

This module deliberately shares no elimination code with
:mod:`rcfm.fredholm`: it materialises dense top-left blocks with
:meth:`BPFMatrix.truncate` and row-reduces them over ``Fraction``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .bpfmatrix import BPFMatrix


def _sparse(mat: list[list[Fraction]]) -> list[dict[int, Fraction]]:
    return [{c: v for c, v in enumerate(row) if v} for row in mat]


def _rank(rows: list[dict[int, Fraction]], cols: int) -> int:
    """Rank by ordinary Gaussian elimination over Fraction on columns ``< cols``."""
    pivots: dict[int, dict[int, Fraction]] = {}
    for full in rows:
        row = {c: v for c, v in full.items() if c < cols}
        while row:
            c = min(row)
            prow = pivots.get(c)
            if prow is None:
                pivots[c] = row
                break
            f = row[c] / prow[c]
            for k, v in prow.items():
                nv = row.get(k, 0) - f * v
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
    return len(pivots)


def _dense_rank(mat: list[list[Fraction]]) -> int:
    return _rank(_sparse(mat), len(mat[0]) if mat else 0)


def _d_max(a: BPFMatrix) -> int:
    return max(a.bands) if a.bands else 0


def _d_min(a: BPFMatrix) -> int:
    return min(a.bands) if a.bands else 0


def dense_nullity(a: BPFMatrix, n: int) -> int:
    """Nullity of the ``(n + d_max) x n`` top-left block."""
    rows = max(n + _d_max(a), 0)
    if rows == 0:
        return n
    return n - _dense_rank(a.truncate(rows, n))


def _sweep(a: BPFMatrix, max_n: int) -> tuple[list[int], list[int]]:
    """Nullities and coranks for sizes ``1..max_n`` from one materialised block."""
    up, down = max(_d_max(a), 0), max(-_d_min(a), 0)
    block = _sparse(a.truncate(max_n + up, max_n + down))
    nullities, coranks = [], []
    for n in range(1, max_n + 1):
        rows = max(n + _d_max(a), 0)
        nullities.append(n - _rank(block[:rows], n))
        coranks.append(n - _rank(block[:n], n + down))
    return nullities, coranks


def dense_corank(a: BPFMatrix, n: int) -> int:
    """``n`` minus the rank of the ``n x (n + |d_min|)`` top-left block."""
    cols = n + max(-_d_min(a), 0)
    return n - _dense_rank(a.truncate(n, cols))


@dataclass
class StabilizationReport:
    sizes: list[int] = field(default_factory=list)
    nullities: list[int] = field(default_factory=list)
    coranks: list[int] = field(default_factory=list)
    stabilized: bool = False
    window: int = 16

    @property
    def value(self) -> int | None:
        """Stabilised nullity minus corank, or None."""
        if not self.stabilized:
            return None
        return self.nullities[-1] - self.coranks[-1]

    def to_json(self) -> dict:
        return {
            "sizes": self.sizes,
            "nullities": self.nullities,
            "coranks": self.coranks,
            "stabilized": self.stabilized,
            "window": self.window,
            "value": self.value,
        }


def stabilized_index(a: BPFMatrix, max_n: int, window: int = 16) -> StabilizationReport:
    """Sweep sizes ``1..max_n`` and test whether nullity - corank settles.

    Stabilised means the difference is constant over the trailing ``window``
    sizes.  A report is always returned; ``stabilized=False`` is the
    diagnostic for non-Fredholm input.
    """
    if window < 2:
        raise ValueError("window must be at least 2")
    rep = StabilizationReport(window=window)
    rep.sizes = list(range(1, max_n + 1))
    rep.nullities, rep.coranks = _sweep(a, max_n)
    if len(rep.sizes) >= window:
        tail = [k - c for k, c in zip(rep.nullities[-window:], rep.coranks[-window:])]
        # also require the individual dimensions to have settled
        rep.stabilized = (
            len(set(tail)) == 1
            and len(set(rep.nullities[-window:])) == 1
            and len(set(rep.coranks[-window:])) == 1
        )
    return rep
