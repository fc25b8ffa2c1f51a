"""Banded-plus-finite-rank infinite matrices.

A :class:`BPFMatrix` is a finite set of diagonal bands whose entries follow a
:class:`~rcfm.seqalg.CoeffSeq`, plus a sparse finite part.  Rows and columns
are indexed from 1.  A band with offset ``d`` puts ``seq(j)`` at position
``(j + d, j)`` for every column ``j >= start``.

Canonical form: each band starts at the smallest column its sequence is
pole-free from (never below ``max(1, 1 - d)``), and the finite part holds the
exact difference between the matrix and its band formulas.  With this
convention two matrices are equal iff their canonical forms coincide, and
two matrices agree modulo finite matrices iff their band lists coincide.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import BadStart, PoleAtIndex, PoleOnDomain
from .seqalg import CoeffSeq, Number, RatFunc

Entry = tuple[int, int]


@dataclass(frozen=True)
class Band:
    offset: int
    seq: CoeffSeq
    start: int

    def entry(self, j: int) -> Fraction:
        return self.seq(j) if j >= self.start else Fraction(0)


def _base_start(d: int) -> int:
    return max(1, 1 - d)


def _canonical(components: Iterable[tuple[int, CoeffSeq, int]], finite: Mapping[Entry, Fraction]):
    """Merge raw ``(offset, seq, start)`` components and a finite map.

    Components sharing an offset are summed; the merged band is re-started at
    its minimal pole-free column and the prefix where some component was not
    yet active is folded into the finite part.
    """
    fin: dict[Entry, Fraction] = {k: Fraction(v) for k, v in finite.items() if v}
    groups: dict[int, list[tuple[CoeffSeq, int]]] = {}
    for d, seq, start in components:
        if seq.is_zero():
            continue
        groups.setdefault(d, []).append((seq, start))

    bands: dict[int, Band] = {}
    for d, comps in groups.items():
        base = _base_start(d)
        total = CoeffSeq()
        for seq, _ in comps:
            total = total + seq
        s_star = total.min_start(base) if not total.is_zero() else None
        max_start = max(t for _, t in comps)
        hi = max_start if s_star is None else max(max_start, s_star)
        for j in range(base, hi):
            if s_star is None or j >= s_star:
                # band covers j; remove contributions of components not yet active
                pending = [seq for seq, t in comps if t > j]
                if not pending:
                    continue
                val = -_sum(pending)(j)
            else:
                active = [seq for seq, t in comps if t <= j]
                if not active:
                    continue
                val = _sum(active)(j)
            if val:
                key = (j + d, j)
                nv = fin.get(key, 0) + val
                if nv:
                    fin[key] = nv
                else:
                    fin.pop(key, None)
        if s_star is not None:
            bands[d] = Band(d, total, s_star)
    return bands, {k: v for k, v in fin.items() if v}


def _sum(seqs: list[CoeffSeq]) -> CoeffSeq:
    out = CoeffSeq()
    for s in seqs:
        out = out + s
    return out


class BPFMatrix:
    """Row-and-column-finite matrix given by bands plus a finite part.

    Build instances with :func:`make_shift`, :func:`make_band`,
    :func:`make_unit`, :func:`identity`, :func:`from_finite` or arithmetic.
    ``==`` is exact equality of the represented infinite matrices.
    """

    __slots__ = ("bands", "finite", "_hash")

    def __init__(self, components: Iterable[tuple[int, CoeffSeq, int]] = (), finite: Mapping[Entry, Number] | None = None):
        self.bands, self.finite = _canonical(components, finite or {})
        self._hash = None

    @classmethod
    def _raw(cls, bands: dict[int, Band], finite: dict[Entry, Fraction]) -> "BPFMatrix":
        obj = cls.__new__(cls)
        obj.bands, obj.finite, obj._hash = bands, finite, None
        return obj

    def components(self):
        return [(b.offset, b.seq, b.start) for b in self.bands.values()]

    # -- inspection
    def is_finite_rank(self) -> bool:
        return not self.bands

    def is_zero(self) -> bool:
        return not self.bands and not self.finite

    @property
    def offsets(self) -> list[int]:
        return sorted(self.bands)

    def entry(self, i: int, j: int) -> Fraction:
        b = self.bands.get(i - j)
        v = b.entry(j) if b is not None else Fraction(0)
        return v + self.finite.get((i, j), 0)

    def column(self, j: int) -> dict[int, Fraction]:
        """Nonzero entries of column ``j`` as ``row -> value``."""
        col: dict[int, Fraction] = {}
        for d, b in self.bands.items():
            if j >= b.start:
                v = b.seq(j)
                if v:
                    col[j + d] = v
        for (i, jj), v in self.finite.items():
            if jj == j:
                nv = col.get(i, 0) + v
                if nv:
                    col[i] = nv
                else:
                    col.pop(i, None)
        return col

    def max_finite_row(self) -> int:
        return max((i for i, _ in self.finite), default=0)

    def max_finite_col(self) -> int:
        return max((j for _, j in self.finite), default=0)

    def truncate(self, rows: int, cols: int) -> list[list[Fraction]]:
        out = [[Fraction(0)] * cols for _ in range(rows)]
        for d, b in self.bands.items():
            for j in range(max(b.start, 1 - d, 1), cols + 1):
                i = j + d
                if i > rows:
                    break
                out[i - 1][j - 1] = b.seq(j)
        for (i, j), v in self.finite.items():
            if i <= rows and j <= cols:
                out[i - 1][j - 1] += v
        return out

    def sparse_rows(self, rows: int, cols: int) -> list[dict[int, Fraction]]:
        """Truncation as sparse 0-based rows, for the elimination routines."""
        out: list[dict[int, Fraction]] = [{} for _ in range(rows)]
        for d, b in self.bands.items():
            for j in range(max(b.start, 1 - d, 1), cols + 1):
                i = j + d
                if i > rows:
                    break
                v = b.seq(j)
                if v:
                    out[i - 1][j - 1] = v
        for (i, j), v in self.finite.items():
            if i <= rows and j <= cols:
                r = out[i - 1]
                nv = r.get(j - 1, 0) + v
                if nv:
                    r[j - 1] = nv
                else:
                    r.pop(j - 1, None)
        return out

    def apply(self, vec: Mapping[int, Fraction]) -> dict[int, Fraction]:
        """Matrix times a finitely supported vector."""
        out: dict[int, Fraction] = {}
        for j, x in vec.items():
            if not x:
                continue
            for i, v in self.column(j).items():
                out[i] = out.get(i, 0) + v * x
        return {i: v for i, v in out.items() if v}

    # -- ring operations
    def __add__(self, other: "BPFMatrix") -> "BPFMatrix":
        if not isinstance(other, BPFMatrix):
            return NotImplemented
        fin = dict(self.finite)
        for k, v in other.finite.items():
            fin[k] = fin.get(k, 0) + v
        return BPFMatrix(self.components() + other.components(), fin)

    def __neg__(self) -> "BPFMatrix":
        return self.scale(-1)

    def __sub__(self, other: "BPFMatrix") -> "BPFMatrix":
        return self + (-other)

    def scale(self, c: Number) -> "BPFMatrix":
        c = Fraction(c)
        if c == 0:
            return BPFMatrix()
        bands = {d: Band(d, b.seq * c, b.start) for d, b in self.bands.items()}
        return BPFMatrix._raw(bands, {k: v * c for k, v in self.finite.items()})

    def __rmul__(self, c):
        if isinstance(c, (int, Fraction)):
            return self.scale(c)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, BPFMatrix):
            return NotImplemented
        return bpf_mul(self, other)

    def __pow__(self, n: int) -> "BPFMatrix":
        if n < 0:
            raise ValueError("negative powers need an exact inverse; see rcfm.fredholm.exact_inverse")
        result = identity()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def transpose(self) -> "BPFMatrix":
        comps = []
        for d, b in self.bands.items():
            # entry (j+d, j) = c(j) becomes (j, j+d); new column k = j+d carries c(k-d)
            comps.append((-d, b.seq.shift(-d), b.start + d))
        return BPFMatrix(comps, {(j, i): v for (i, j), v in self.finite.items()})

    @property
    def T(self) -> "BPFMatrix":
        return self.transpose()

    def band_part(self) -> "BPFMatrix":
        return BPFMatrix._raw(dict(self.bands), {})

    def finite_part(self) -> "BPFMatrix":
        return BPFMatrix._raw({}, dict(self.finite))

    def coset_equals(self, other: "BPFMatrix") -> bool:
        return (self - other).is_finite_rank()

    def __eq__(self, other):
        if not isinstance(other, BPFMatrix):
            return NotImplemented
        return self.bands == other.bands and self.finite == other.finite

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((tuple(sorted(self.bands.items())), tuple(sorted(self.finite.items()))))
        return self._hash

    def __repr__(self):
        parts = [f"band[{d}]@{b.start}:{b.seq!r}" for d, b in sorted(self.bands.items())]
        if self.finite:
            parts.append("finite{" + ", ".join(f"({i},{j}):{v}" for (i, j), v in sorted(self.finite.items())) + "}")
        return "BPFMatrix(" + ("; ".join(parts) if parts else "0") + ")"

    # -- canonical JSON
    def to_json(self) -> dict:
        return {
            "bands": [
                {"offset": d, "atoms": b.seq.to_json(), "start": b.start}
                for d, b in sorted(self.bands.items())
            ],
            "finite": [[i, j, str(v)] for (i, j), v in sorted(self.finite.items())],
        }

    @classmethod
    def from_json(cls, data: dict) -> "BPFMatrix":
        comps = [(int(b["offset"]), CoeffSeq.from_json(b["atoms"]), int(b["start"])) for b in data.get("bands", [])]
        fin = {(int(i), int(j)): Fraction(v) for i, j, v in data.get("finite", [])}
        # stored starts are canonical, so no prefix folding happens here
        return cls(comps, fin)


def bpf_mul(a: BPFMatrix, b: BPFMatrix) -> BPFMatrix:
    comps = []
    fin: dict[Entry, Fraction] = {}

    def put(i, j, v):
        if v:
            fin[(i, j)] = fin.get((i, j), 0) + v

    for d1, b1 in a.bands.items():
        for d2, b2 in b.bands.items():
            # (AB)(j+d1+d2, j) = c1(j+d2) c2(j) for j >= t2 and j+d2 >= t1
            start = max(b2.start, b1.start - d2, 1, 1 - d1 - d2)
            comps.append((d1 + d2, b1.seq.shift(d2) * b2.seq, start))
    # band part of a times finite part of b
    for (k, j), v in b.finite.items():
        for d, band in a.bands.items():
            if k >= band.start:
                put(k + d, j, band.seq(k) * v)
    # finite part of a times band part of b
    for (i, k), v in a.finite.items():
        for d, band in b.bands.items():
            j = k - d
            if j >= band.start:
                put(i, j, v * band.seq(j))
    # finite times finite
    by_row: dict[int, list[tuple[int, Fraction]]] = {}
    for (k, j), v in b.finite.items():
        by_row.setdefault(k, []).append((j, v))
    for (i, k), v in a.finite.items():
        for j, w in by_row.get(k, ()):
            put(i, j, v * w)
    try:
        return BPFMatrix(comps, fin)
    except PoleAtIndex as exc:  # pragma: no cover - inputs are pole-free on their domains
        raise PoleOnDomain(str(exc)) from exc


# -- constructors -------------------------------------------------------------

def identity() -> BPFMatrix:
    return make_shift(0)


def zero() -> BPFMatrix:
    return BPFMatrix()


def make_shift(i: int) -> BPFMatrix:
    """``S_i``: ones on the band ``row - col = i``."""
    return BPFMatrix([(i, CoeffSeq.const(1), _base_start(i))])


def make_band(d: int, seq: CoeffSeq, start: int | None = None) -> BPFMatrix:
    """Single band with entries ``(j + d, j) = seq(j)`` for ``j >= start``."""
    base = _base_start(d)
    if start is None:
        start = seq.min_start(base)
    if start < base:
        raise BadStart(f"start {start} below {base} for offset {d}")
    bad = [p for p in seq.poles() if p >= start]
    if bad:
        raise PoleOnDomain(f"sequence has poles {sorted(bad)} at columns >= {start}")
    return BPFMatrix([(d, seq, start)])


def make_unit(i: int, j: int) -> BPFMatrix:
    if i < 1 or j < 1:
        raise ValueError("matrix unit indices are positive")
    return BPFMatrix((), {(i, j): 1})


def from_finite(entries: Mapping[Entry, Number]) -> BPFMatrix:
    return BPFMatrix((), {k: Fraction(v) for k, v in entries.items()})


def diag(seq: CoeffSeq) -> BPFMatrix:
    return make_band(0, seq)


def weighted_shift_up() -> BPFMatrix:
    """``T_1``: ``(j+1)`` at ``(j+1, j)``."""
    return make_band(1, CoeffSeq.atom(RatFunc.index() + 1), 1)


def weighted_shift_down() -> BPFMatrix:
    """``T_{-1}``: ``1/(i+1)`` at ``(i, i+1)``."""
    return make_band(-1, CoeffSeq.atom(RatFunc.index().reciprocal()), 2)


def make_T(i: int) -> BPFMatrix:
    if i == 1:
        return weighted_shift_up()
    if i == -1:
        return weighted_shift_down()
    raise ValueError("T(i) is defined for i in {-1, 1}")


def geometric_diag(r: Number, power: int = 1) -> BPFMatrix:
    """``Diag(1, r, r^2, ...)**power``, i.e. entry ``r^(power (i-1))``."""
    rr = Fraction(r) ** power
    return make_band(0, CoeffSeq.atom(1 / rr, rr, 0), 1)


def factorial_diag(s: int) -> BPFMatrix:
    """``Diag((i!)^s)``."""
    return make_band(0, CoeffSeq.atom(1, 1, s), 1)


D2 = geometric_diag(2)


# -- functional surface -------------------------------------------------------

def bpf_add(a: BPFMatrix, b: BPFMatrix) -> BPFMatrix:
    return a + b


def bpf_entry(a: BPFMatrix, i: int, j: int) -> Fraction:
    return a.entry(i, j)


def bpf_truncate(a: BPFMatrix, rows: int, cols: int) -> list[list[Fraction]]:
    return a.truncate(rows, cols)


def bpf_transpose(a: BPFMatrix) -> BPFMatrix:
    return a.transpose()


def bpf_equals(a: BPFMatrix, b: BPFMatrix) -> bool:
    return a == b


def coset_equals(a: BPFMatrix, b: BPFMatrix) -> bool:
    return a.coset_equals(b)

