"""Extensions of Laurent polynomials by finite matrices.

An extension is encoded by the images of the generators ``x`` and ``x^-1``
in row-and-column-finite matrices; their cosets modulo finite matrices must
be mutually inverse, and the monomials in them independent modulo finite
matrices.  Elements of the resulting pullback algebra are a Laurent
polynomial plus a finite correction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from . import linalg
from .bpfmatrix import (
    BPFMatrix,
    factorial_diag,
    from_finite,
    geometric_diag,
    identity,
    make_shift,
    make_unit,
)
from .errors import (
    CanonicalizationFailure,
    DependentMonomials,
    DuplicateExponents,
    InconsistentScalar,
    NotCosetInverse,
    NotDirectlyInfinite,
    NotFredholm,
    NotInvertible,
    NotInvertibleWitness,
    NotRightInverse,
    UncertifiedIndex,
)
from .fredholm import DEFAULT_MAX_TRUNC, DEFAULT_WINDOW, exact_inverse, index, index_zero_split
from .seqalg import RatFunc

DEFAULT_DEPTH = 6


# -- matrix units ---------------------------------------------------------------

@dataclass(frozen=True)
class MatrixUnitSystem:
    x: BPFMatrix
    y: BPFMatrix
    cache: Mapping[tuple[int, int], BPFMatrix]

    @property
    def size(self) -> int:
        return max((i for i, _ in self.cache), default=0)

    def unit(self, i: int, j: int) -> BPFMatrix:
        return self.cache[(i, j)]

    def to_json(self) -> dict:
        return {
            "n": self.size,
            "units": {f"{i},{j}": m.to_json() for (i, j), m in sorted(self.cache.items())},
        }


def matrix_units(x: BPFMatrix, y: BPFMatrix, n: int) -> MatrixUnitSystem:
    """``E_ij = y^(i-1) (1 - yx) x^(j-1)`` for ``1 <= i, j <= n``, verified."""
    if n < 1:
        raise ValueError("n must be positive")
    one = identity()
    if x * y != one:
        raise NotRightInverse("x*y is not the identity")
    yx = y * x
    if yx == one:
        raise NotDirectlyInfinite("y*x is the identity")
    p = one - yx
    left = [one]
    right = [one]
    for _ in range(n - 1):
        left.append(left[-1] * y)
        right.append(right[-1] * x)
    cache = {(i + 1, j + 1): left[i] * p * right[j] for i in range(n) for j in range(n)}
    zero = BPFMatrix()
    for (i, j), a in cache.items():
        for (k, l), b in cache.items():
            want = cache[(i, l)] if j == k else zero
            if a * b != want:
                raise AssertionError(f"E_{i}{j} E_{k}{l} violates the unit relations")
    return MatrixUnitSystem(x, y, cache)


def _nonzero_entry(m: BPFMatrix, limit: int = 4096) -> tuple[int, int] | None:
    for pos in sorted(m.finite):
        if m.entry(*pos):
            return pos
    for d, band in sorted(m.bands.items()):
        for j in range(band.start, band.start + limit):
            if m.entry(j + d, j):
                return (j + d, j)
    return None


def embed(a: BPFMatrix, units: MatrixUnitSystem, n: int) -> list[list[Fraction]]:
    """Top-left ``n x n`` block of the embedding read off ``E_ii a E_jj``."""
    if n > units.size:
        raise ValueError(f"unit system only covers indices up to {units.size}")
    out = []
    for i in range(1, n + 1):
        row = []
        left = units.unit(i, i) * a
        for j in range(1, n + 1):
            m = left * units.unit(j, j)
            e = units.unit(i, j)
            pos = _nonzero_entry(e)
            if pos is None:
                raise InconsistentScalar(f"E_{i}{j} has no detectable nonzero entry")
            c = m.entry(*pos) / e.entry(*pos)
            if m != e.scale(c):
                raise InconsistentScalar(f"E_{i}{i} a E_{j}{j} is not a multiple of E_{i}{j}")
            row.append(c)
        out.append(row)
    return out


# -- Laurent polynomials --------------------------------------------------------

class LaurentPoly:
    """Finitely supported map ``exponent -> coefficient``; no stored zeros."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Mapping[int, Fraction | int] | None = None):
        self.coeffs: dict[int, Fraction] = {
            int(k): Fraction(v) for k, v in sorted((coeffs or {}).items()) if v
        }

    @classmethod
    def monomial(cls, n: int, c: Fraction | int = 1) -> "LaurentPoly":
        return cls({n: c})

    def is_zero(self) -> bool:
        return not self.coeffs

    def degree_span(self) -> int:
        return max((abs(k) for k in self.coeffs), default=0)

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + v
        return LaurentPoly(out)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly({k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def __mul__(self, other: "LaurentPoly | Fraction | int") -> "LaurentPoly":
        if not isinstance(other, LaurentPoly):
            return LaurentPoly({k: v * other for k, v in self.coeffs.items()})
        out: dict[int, Fraction] = {}
        for a, u in self.coeffs.items():
            for b, v in other.coeffs.items():
                out[a + b] = out.get(a + b, 0) + u * v
        return LaurentPoly(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, LaurentPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(tuple(self.coeffs.items()))

    def __repr__(self):
        if not self.coeffs:
            return "LaurentPoly(0)"
        return "LaurentPoly(" + " + ".join(f"{v}*x^{k}" for k, v in self.coeffs.items()) + ")"

    def to_json(self) -> dict:
        return {str(k): str(v) for k, v in self.coeffs.items()}


# -- extension algebras ---------------------------------------------------------

def _signature(m: BPFMatrix) -> dict[tuple[int, Fraction, int], RatFunc]:
    """Band signature: ``(offset, r, s) -> q`` over all atoms of all bands."""
    sig = {}
    for d, band in m.bands.items():
        for atom in band.seq.atoms:
            sig[(d, atom.r, atom.s)] = atom.q
    return sig


def _dependencies(mats: list[BPFMatrix]) -> list[dict[int, Fraction]]:
    """Null combinations of ``mats`` modulo finite matrices.

    A combination is finite iff for every offset and growth class the
    rational coefficients cancel identically; clearing denominators turns
    that into linear equations on polynomial coefficients.
    """
    sigs = [_signature(m) for m in mats]
    classes = sorted({k for s in sigs for k in s}, key=lambda k: (k[0], k[2], k[1]))
    rows: list[dict[int, Fraction]] = []
    for cls_ in classes:
        qs = {k: s[cls_] for k, s in enumerate(sigs) if cls_ in s}
        dens = {tuple(q.denom_coeffs()) for q in qs.values()}
        clear = RatFunc.const(1)
        for d in dens:
            clear = clear * RatFunc.from_coeffs(d)
        polys = {k: (q * clear).numer_coeffs() for k, q in qs.items()}
        width = max(len(p) for p in polys.values())
        for deg in range(width):
            row = {k: p[deg] for k, p in polys.items() if deg < len(p) and p[deg]}
            if row:
                rows.append(row)
    return linalg.nullspace(rows, len(mats))


@dataclass(frozen=True, eq=False)
class ExtensionAlgebra:
    x_image: BPFMatrix
    y_image: BPFMatrix
    label: str
    depth: int = DEFAULT_DEPTH
    _powers: dict = field(default_factory=dict, repr=False, compare=False)

    def monomial(self, n: int) -> BPFMatrix:
        """``x_image^n`` for ``n > 0``, ``y_image^(-n)`` for ``n < 0``, ``I`` for 0."""
        if n not in self._powers:
            self._powers[n] = self.x_image**n if n >= 0 else self.y_image ** (-n)
        return self._powers[n]

    def realize_poly(self, p: LaurentPoly) -> BPFMatrix:
        out = BPFMatrix()
        for n, c in p.coeffs.items():
            out = out + self.monomial(n).scale(c)
        return out

    def element(self, poly: LaurentPoly | Mapping[int, Fraction | int] | None = None,
                correction: BPFMatrix | Mapping | None = None) -> "PullbackElem":
        if not isinstance(poly, LaurentPoly):
            poly = LaurentPoly(poly)
        if correction is None:
            correction = BPFMatrix()
        elif not isinstance(correction, BPFMatrix):
            correction = from_finite(correction)
        if not correction.is_finite_rank():
            raise CanonicalizationFailure("correction must be a finite matrix")
        return PullbackElem(poly, correction, self)

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "depth": self.depth,
            "x": self.x_image.to_json(),
            "y": self.y_image.to_json(),
        }


def make_extension(x: BPFMatrix, y: BPFMatrix, label: str, depth: int = DEFAULT_DEPTH) -> ExtensionAlgebra:
    """Validate generator images and return the extension they define.

    Checks that ``x`` and ``y`` are inverse modulo finite matrices and that
    ``I, x, ..., x^depth, y, ..., y^depth`` are independent modulo finite
    matrices.
    """
    one = identity()
    if not ((x * y).coset_equals(one) and (y * x).coset_equals(one)):
        raise NotCosetInverse(f"{label}: generator images are not inverse modulo finite matrices")
    ext = ExtensionAlgebra(x, y, label, depth)
    exps = list(range(-depth, depth + 1))
    deps = _dependencies([ext.monomial(n) for n in exps])
    if deps:
        witness = {exps[k]: v for k, v in sorted(deps[0].items())}
        raise DependentMonomials(witness)
    return ext


def family_Tn(n: int, depth: int = DEFAULT_DEPTH) -> ExtensionAlgebra:
    """``x -> S_{-n}`` for ``n >= 1``; ``x -> Diag(2^(i-1))`` for ``n = 0``."""
    if n < 0:
        raise ValueError("family index must be nonnegative")
    if n == 0:
        return make_extension(geometric_diag(2), geometric_diag(2, -1), "T_0", depth)
    return make_extension(make_shift(-n), make_shift(n), f"T_{n}", depth)


# -- pullback elements ------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PullbackElem:
    """``sum_n a_n monomial(n) + correction`` in a given extension."""

    poly: LaurentPoly
    correction: BPFMatrix
    parent: ExtensionAlgebra

    def realize(self) -> BPFMatrix:
        return self.parent.realize_poly(self.poly) + self.correction

    def is_zero(self) -> bool:
        return self.poly.is_zero() and self.correction.is_zero()

    def __add__(self, other: "PullbackElem") -> "PullbackElem":
        return ext_add(self, other)

    def __mul__(self, other: "PullbackElem") -> "PullbackElem":
        return ext_mul(self, other)

    def __eq__(self, other):
        return (
            isinstance(other, PullbackElem)
            and other.parent is self.parent
            and self.poly == other.poly
            and self.correction == other.correction
        )

    def __hash__(self):
        return hash((self.poly, self.correction))

    def __repr__(self):
        return f"PullbackElem({self.poly!r}, {self.correction!r}, parent={self.parent.label})"

    def to_json(self) -> dict:
        return {"poly": self.poly.to_json(), "correction": self.correction.to_json()}


def _same_parent(a: PullbackElem, b: PullbackElem) -> ExtensionAlgebra:
    if a.parent is not b.parent:
        raise ValueError("elements belong to different extensions")
    return a.parent


def ext_add(a: PullbackElem, b: PullbackElem) -> PullbackElem:
    parent = _same_parent(a, b)
    return PullbackElem(a.poly + b.poly, a.correction + b.correction, parent)


def ext_mul(a: PullbackElem, b: PullbackElem) -> PullbackElem:
    parent = _same_parent(a, b)
    poly = a.poly * b.poly
    correction = a.realize() * b.realize() - parent.realize_poly(poly)
    if not correction.is_finite_rank():
        raise CanonicalizationFailure(f"{parent.label}: product residual has a band")
    return PullbackElem(poly, correction, parent)


def faithfulness_witness(p: PullbackElem, bound: int | None = None) -> tuple[int, int] | None:
    """A matrix unit ``e_ij`` with ``p * e_ij != 0``, searched up to ``bound``."""
    if bound is None:
        bound = 2 * p.poly.degree_span() + 6
    m = p.realize()
    for i in range(1, bound + 1):
        if m.column(i):
            return (i, 1)
    return None


# -- triviality ---------------------------------------------------------------------

@dataclass(frozen=True)
class TrivialityVerdict:
    trivial: bool
    index: int
    splitting: tuple[BPFMatrix, BPFMatrix] | None = None
    diagnostic: str = ""

    def to_json(self) -> dict:
        out = {"trivial": self.trivial, "index": self.index}
        if self.splitting is not None:
            out["splitting"] = {"sigma_x": self.splitting[0].to_json(), "sigma_x_inv": self.splitting[1].to_json()}
        else:
            out["splitting"] = None
        if self.diagnostic:
            out["diagnostic"] = self.diagnostic
        return out


def classify_trivial(ext: ExtensionAlgebra, max_trunc: int = DEFAULT_MAX_TRUNC,
                     window: int = DEFAULT_WINDOW) -> TrivialityVerdict:
    """Trivial iff the index of ``x_image`` is zero.

    For index zero a splitting ``sigma(x) = u`` is built from the index-zero
    decomposition ``x_image = u + t`` and its exact inverse, found from
    ``y_image`` as a Fredholm inverse.
    """
    res = index(ext.x_image, max_trunc, window)
    if not res.certified:
        raise UncertifiedIndex(f"{ext.label}: index of the x image is not certified")
    if res.index != 0:
        return TrivialityVerdict(False, res.index)
    split = index_zero_split(ext.x_image, max_trunc, window)
    u = split.u
    u_inv = None
    errors = []
    for a0 in (ext.y_image, None):
        try:
            u_inv = exact_inverse(u, a0)
            break
        except (NotInvertible, NotFredholm) as exc:
            errors.append(str(exc))
    if u_inv is None:
        return TrivialityVerdict(True, 0, None, "splitting not representable: " + "; ".join(errors))
    one = identity()
    if u * u_inv != one or u_inv * u != one or not u.coset_equals(ext.x_image):
        raise AssertionError("splitting verification failed")
    return TrivialityVerdict(True, 0, (u, u_inv))


# -- equivalence ----------------------------------------------------------------------

def _check_witness(u: BPFMatrix, u_inv: BPFMatrix) -> None:
    one = identity()
    if u * u_inv != one or u_inv * u != one:
        raise NotInvertibleWitness("u and u_inv are not mutually inverse")


def equivalence_check(e1: ExtensionAlgebra, e2: ExtensionAlgebra, u: BPFMatrix, u_inv: BPFMatrix) -> bool:
    """Whether conjugation by ``u`` carries the invariant of ``e1`` to that of ``e2``."""
    _check_witness(u, u_inv)
    return (u_inv * e1.x_image * u).coset_equals(e2.x_image) and (
        u_inv * e1.y_image * u
    ).coset_equals(e2.y_image)


def conjugation_is_exact(e1: ExtensionAlgebra, e2: ExtensionAlgebra, u: BPFMatrix, u_inv: BPFMatrix) -> bool:
    """Stronger check: ``u^-1 x1 u = x2`` and ``u^-1 y1 u = y2`` on the nose."""
    _check_witness(u, u_inv)
    return u_inv * e1.x_image * u == e2.x_image and u_inv * e1.y_image * u == e2.y_image


def invertible_catalog() -> dict[str, tuple[BPFMatrix, BPFMatrix]]:
    """Named invertible matrices with their exact inverses."""
    one = identity()
    e12 = make_unit(1, 2)
    return {
        "I": (one, one),
        "Dgeo(2)": (geometric_diag(2), geometric_diag(2, -1)),
        "Dgeo(1/2)": (geometric_diag(2, -1), geometric_diag(2)),
        "Dfact(-1)": (factorial_diag(-1), factorial_diag(1)),
        "Dfact(1)": (factorial_diag(1), factorial_diag(-1)),
        "I + E(1,2)": (one + e12, one - e12),
    }


# -- diagonal independence ------------------------------------------------------------

@dataclass(frozen=True)
class IndependenceReport:
    exponents: tuple[int, ...]
    cutoff: int
    symbolic: bool
    numeric: bool

    @property
    def independent(self) -> bool:
        return self.symbolic and self.numeric

    def to_json(self) -> dict:
        return {
            "exponents": list(self.exponents),
            "cutoff": self.cutoff,
            "symbolic": self.symbolic,
            "numeric": self.numeric,
            "independent": self.independent,
        }


def diag_independence_report(exponents: Iterable[int], cutoff: int = 1) -> IndependenceReport:
    exps = list(exponents)
    if len(set(exps)) != len(exps):
        raise DuplicateExponents(f"repeated exponents in {exps}")
    if cutoff < 1:
        raise ValueError("cutoff must be positive")
    exps.sort()
    mats = [geometric_diag(2, n) for n in exps]
    symbolic = not _dependencies(mats)
    k = len(exps)
    # rows cutoff..cutoff+k-1 of the diagonals: a Vandermonde system in the nodes 2^n
    vander = [[m.entry(i, i) for m in mats] for i in range(cutoff, cutoff + k)]
    numeric = linalg.dense_rank(vander) == k
    if symbolic != numeric:
        raise AssertionError("symbolic and Vandermonde independence tests disagree")
    return IndependenceReport(tuple(exps), cutoff, symbolic, numeric)


def diag_independence(exponents: Iterable[int], cutoff: int = 1) -> bool:
    """Whether ``{Diag(2^(n(i-1))) : n in exponents}`` is independent modulo finite matrices."""
    return diag_independence_report(exponents, cutoff).independent
