"""Kernels, cokernels and the algebraic Fredholm index.

Vectors are finitely supported maps ``index -> Fraction`` (1-based).  The
kernel of a matrix is computed on a finite truncation whose size is
*certified*: if the top band's sequence is nonzero from ``N0`` on, a kernel
vector whose highest nonzero coordinate is ``m > N*`` would leave the single
term ``c(m) v_m`` in row ``m + d_max`` of ``A v``, so every kernel vector is
supported in ``[1, N*]``.  Cokernels are kernels of the transpose; for
Fredholm matrices these vanish on the same finitely supported functionals.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import linalg
from .bpfmatrix import BPFMatrix, identity, make_band, from_finite
from .errors import (
    NotFredholm,
    NotFredholmEvidence,
    NotIndexZero,
    NotInvertible,
    UncertifiedInput,
    UnsupportedExpression,
)

Vector = dict[int, Fraction]

DEFAULT_MAX_TRUNC = 256
DEFAULT_WINDOW = 16


@dataclass(frozen=True)
class KernelBasis:
    vectors: tuple[Vector, ...]
    certified: bool
    truncation_used: int

    @property
    def dim(self) -> int:
        return len(self.vectors)

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "certified": self.certified,
            "truncation_used": self.truncation_used,
            "vectors": [{str(k): str(v) for k, v in sorted(vec.items())} for vec in self.vectors],
        }


@dataclass(frozen=True)
class IndexResult:
    kernel_dim: int
    coker_dim: int
    index: int
    certified: bool
    kernel: KernelBasis | None = None
    cokernel: KernelBasis | None = None

    def to_json(self) -> dict:
        out = {
            "kernel_dim": self.kernel_dim,
            "coker_dim": self.coker_dim,
            "index": self.index,
            "certified": self.certified,
        }
        if self.kernel is not None:
            out["kernel_truncation"] = self.kernel.truncation_used
            out["cokernel_truncation"] = self.cokernel.truncation_used
        return out


@dataclass(frozen=True)
class FredholmInverseCertificate:
    """``a0 * A = I - r`` and ``A * a0 = I - s`` with ``r``, ``s`` finite."""

    a0: BPFMatrix
    r: BPFMatrix
    s: BPFMatrix

    def to_json(self) -> dict:
        return {"a0": self.a0.to_json(), "r": self.r.to_json(), "s": self.s.to_json()}


@dataclass(frozen=True)
class SplitCertificate:
    """``A = u + t`` with ``u`` bijective and ``t`` finite."""

    u: BPFMatrix
    t: BPFMatrix

    def to_json(self) -> dict:
        return {"u": self.u.to_json(), "t": self.t.to_json()}


# -- kernels -----------------------------------------------------------------

def support_bound(a: BPFMatrix) -> int | None:
    """``N*`` such that every kernel vector of ``a`` lives in ``[1, N*]``.

    None when the top band's nonvanishing threshold is not certifiable.
    """
    if not a.bands:
        return None
    d_max = max(a.bands)
    n0 = a.bands[d_max].seq.nonvanishing_threshold()
    if n0 is None:
        return None
    return max(
        n0,
        *(b.start for b in a.bands.values()),
        a.max_finite_col(),
        a.max_finite_row() - d_max,
        1,
    )


def _truncated_kernel(a: BPFMatrix, n: int) -> list[Vector]:
    d_max = max(a.bands)
    rows = max(n + d_max, a.max_finite_row(), 0)
    basis = linalg.nullspace(a.sparse_rows(rows, n), n)
    return [{c + 1: v for c, v in vec.items()} for vec in basis]


def _check_kernel(a: BPFMatrix, vectors: list[Vector]) -> None:
    for v in vectors:
        if a.apply(v):
            raise AssertionError("computed kernel vector is not annihilated")


def kernel_basis(a: BPFMatrix, max_trunc: int = DEFAULT_MAX_TRUNC, window: int = DEFAULT_WINDOW) -> KernelBasis:
    """Basis of the kernel of ``v -> a v`` on finitely supported vectors.

    Certified when the support bound is available; otherwise nullities of
    growing truncations must agree over ``window`` consecutive sizes, and the
    result is flagged uncertified.
    """
    if not a.bands:
        raise NotFredholmEvidence("no bands: the kernel of a finite matrix is infinite dimensional")
    n_star = support_bound(a)
    if n_star is not None:
        vecs = _truncated_kernel(a, n_star)
        _check_kernel(a, vecs)
        return KernelBasis(tuple(vecs), True, n_star)

    history: list[int] = []
    for n in range(1, max_trunc + 1):
        history.append(len(_truncated_kernel(a, n)))
        if len(history) >= window and len(set(history[-window:])) == 1:
            vecs = _truncated_kernel(a, n)
            _check_kernel(a, vecs)
            return KernelBasis(tuple(vecs), False, n)
    raise NotFredholmEvidence(
        f"kernel dimension not certifiable and truncated nullities unstable up to {max_trunc}"
    )


def cokernel_basis(a: BPFMatrix, max_trunc: int = DEFAULT_MAX_TRUNC, window: int = DEFAULT_WINDOW) -> KernelBasis:
    """Basis of ``ker(a^T)``; its dimension is ``dim coker(a)``."""
    return kernel_basis(a.transpose(), max_trunc, window)


def index(a: BPFMatrix, max_trunc: int = DEFAULT_MAX_TRUNC, window: int = DEFAULT_WINDOW) -> IndexResult:
    try:
        ker = kernel_basis(a, max_trunc, window)
        cok = cokernel_basis(a, max_trunc, window)
    except NotFredholmEvidence as exc:
        raise NotFredholm(exc.reason) from exc
    return IndexResult(ker.dim, cok.dim, ker.dim - cok.dim, ker.certified and cok.certified, ker, cok)


# -- Fredholm inverses ---------------------------------------------------------

def _residuals(a: BPFMatrix, a0: BPFMatrix) -> FredholmInverseCertificate:
    one = identity()
    r = one - a0 * a
    s = one - a * a0
    if not (r.is_finite_rank() and s.is_finite_rank()):
        raise NotFredholm("candidate is not an inverse modulo finite matrices")
    return FredholmInverseCertificate(a0, r, s)


def band_inverse_candidate(a: BPFMatrix) -> BPFMatrix:
    """Reciprocal band for a single-band, single-atom matrix."""
    if len(a.bands) != 1:
        raise UnsupportedExpression("band inverse needs exactly one band")
    (d, band), = a.bands.items()
    if not band.seq.is_single_atom():
        raise UnsupportedExpression("band inverse needs a single-atom sequence")
    n0 = max(band.start, band.seq.nonvanishing_threshold())
    # a0 has entry 1/c(j) at (j, j+d); as a column-indexed band that is c'(k) = 1/c(k-d)
    seq = band.seq.reciprocal().shift(-d)
    return make_band(-d, seq, max(n0 + d, 1, 1 + d))


def _finv_matrix(a: BPFMatrix) -> FredholmInverseCertificate:
    return _residuals(a, band_inverse_candidate(a))


def perturb(cert: FredholmInverseCertificate, t: BPFMatrix) -> FredholmInverseCertificate:
    """Certificate for ``A + t`` from one for ``A`` (``t`` finite)."""
    return FredholmInverseCertificate(cert.a0, cert.r - cert.a0 * t, cert.s - t * cert.a0)


def fredholm_inverse(e) -> FredholmInverseCertificate:
    """Fredholm inverse with exact residuals.

    ``e`` is a :class:`BPFMatrix` (single band plus finite part), an
    expression AST, or expression text.  Expressions are handled
    compositionally: shifts and weighted shifts invert to their opposites,
    diagonals entrywise, products in reverse order, finite perturbations keep
    the inverse and update the residuals, conjugations conjugate the inverse.
    """
    from . import expr as ex

    if isinstance(e, BPFMatrix):
        return _finv_matrix(e)
    if isinstance(e, str):
        e = ex.parse(e)
    a, cert = _finv(e)
    check = _residuals(a, cert.a0)
    if check.r != cert.r or check.s != cert.s:
        raise AssertionError("residual bookkeeping disagrees with direct products")
    return cert


def _finv(node) -> tuple[BPFMatrix, FredholmInverseCertificate]:
    from . import expr as ex

    if isinstance(node, ex.Shift):
        a = ex.evaluate(node)
        return a, _residuals(a, ex.evaluate(ex.Shift(-node.i)))
    if isinstance(node, ex.TShift):
        a = ex.evaluate(node)
        return a, _residuals(a, ex.evaluate(ex.TShift(-node.i)))
    if isinstance(node, (ex.Dgeo, ex.Dfact, ex.Ident)):
        a = ex.evaluate(node)
        return a, _residuals(a, ex.evaluate(ex.Pow(node, -1)))
    if isinstance(node, ex.Num):
        if node.value == 0:
            raise NotFredholm("the zero matrix is not Fredholm")
        a = ex.evaluate(node)
        return a, _residuals(a, identity().scale(1 / node.value))
    if isinstance(node, ex.Unit):
        raise NotFredholm("a finite matrix is not Fredholm")
    if isinstance(node, ex.Neg):
        a, c = _finv(node.arg)
        return -a, FredholmInverseCertificate(-c.a0, c.r, c.s)
    if isinstance(node, ex.Mul):
        a, ca = _finv(node.left)
        b, cb = _finv(node.right)
        prod = a * b
        return prod, _residuals(prod, cb.a0 * ca.a0)
    if isinstance(node, ex.Pow):
        if node.exp >= 0:
            a, c = _finv(node.base)
            return a**node.exp, _residuals(a**node.exp, c.a0**node.exp)
        a = ex.evaluate(node)
        return a, _residuals(a, ex.evaluate(node.base) ** (-node.exp))
    if isinstance(node, ex.Conj):
        u = ex.evaluate(node.u)
        u_inv = exact_inverse(u)
        x, c = _finv(node.x)
        a = u_inv * x * u
        return a, _residuals(a, u_inv * c.a0 * u)
    if isinstance(node, (ex.Add, ex.Sub)):
        left = ex.evaluate(node.left)
        right = ex.evaluate(node.right)
        sign = 1 if isinstance(node, ex.Add) else -1
        total = left + right.scale(sign)
        if right.is_finite_rank():
            _, c = _finv(node.left)
            return total, perturb(c, right.scale(sign))
        if left.is_finite_rank():
            _, c = _finv(node.right)
            if sign < 0:
                c = FredholmInverseCertificate(-c.a0, c.r, c.s)
            return total, perturb(c, left)
        try:
            return total, _finv_matrix(total)
        except UnsupportedExpression:
            raise UnsupportedExpression("sum of two non-finite terms with no single-band form") from None
    raise UnsupportedExpression(f"no Fredholm inverse rule for {type(node).__name__}")


# -- exact inverses and the index-zero splitting ------------------------------------

def _solve_on_support(a: BPFMatrix, support: list[int], b: Vector) -> Vector | None:
    cols = {j: a.column(j) for j in support}
    rows_touched = sorted(set(b).union(*(c.keys() for c in cols.values())))
    pos = {j: k for k, j in enumerate(support)}
    system = []
    rhs = []
    for i in rows_touched:
        system.append({pos[j]: col[i] for j, col in cols.items() if i in col})
        rhs.append(b.get(i, Fraction(0)))
    sol = linalg.solve(system, rhs, len(support))
    if sol is None:
        return None
    return {support[k]: v for k, v in sol.items() if v}


def is_bijective(a: BPFMatrix, max_trunc: int = DEFAULT_MAX_TRUNC, window: int = DEFAULT_WINDOW) -> bool:
    res = index(a, max_trunc, window)
    return res.certified and res.kernel_dim == 0 and res.coker_dim == 0


def exact_inverse(a: BPFMatrix, a0: BPFMatrix | None = None) -> BPFMatrix:
    """Two-sided inverse of a bijective matrix, inside the banded class.

    With a Fredholm inverse ``a0`` (``a a0 = I - s``, ``a0 a = I - r``) the
    inverse is ``a0 + a^{-1} s``; each column ``a^{-1} s_j`` is found by an
    exact solve on the support of ``a0 s_j`` plus the rows of ``r``.
    """
    if a0 is None:
        try:
            a0 = band_inverse_candidate(a)
        except UnsupportedExpression as exc:
            raise NotInvertible(str(exc)) from exc
    cert = _residuals(a, a0)
    if not is_bijective(a):
        raise NotInvertible("matrix is not a certified bijection")
    r_rows = {i for i, _ in cert.r.finite}
    s_cols: dict[int, Vector] = {}
    for (i, j), v in cert.s.finite.items():
        s_cols.setdefault(j, {})[i] = v
    correction: dict[tuple[int, int], Fraction] = {}
    for j, col in s_cols.items():
        support = sorted(set(a0.apply(col)) | r_rows | set(col))
        x = _solve_on_support(a, support, col)
        if x is None:
            raise NotInvertible(f"no preimage found for column {j} of the residual")
        for i, v in x.items():
            correction[(i, j)] = v
    inv = a0 + from_finite(correction)
    one = identity()
    if a * inv != one or inv * a != one:
        raise NotInvertible("inverse verification failed")
    return inv


def _pivot_set(vectors: list[Vector]) -> list[int]:
    rows = [{j - 1: v for j, v in vec.items()} for vec in vectors]
    cols = linalg.pivot_columns(rows)
    return [c + 1 for c in cols]


def index_zero_split(a: BPFMatrix, max_trunc: int = DEFAULT_MAX_TRUNC, window: int = DEFAULT_WINDOW) -> SplitCertificate:
    """Write an index-zero matrix as bijective ``u`` plus finite ``t``.

    ``Phi`` sends the kernel basis onto standard vectors completing the
    image; ``P`` projects onto the kernel along ``{x : x_J = 0}`` where ``J``
    is a set of coordinates on which the kernel projects isomorphically.
    Then ``u = a + Phi P`` and ``t = -Phi P``.
    """
    res = index(a, max_trunc, window)
    if not res.certified:
        raise UncertifiedInput("index of the input is not certified")
    if res.index != 0:
        raise NotIndexZero(f"index is {res.index}")
    kvecs = list(res.kernel.vectors)
    fvecs = list(res.cokernel.vectors)
    k = len(kvecs)
    if k == 0:
        phi_p = from_finite({})
    else:
        J = _pivot_set(kvecs)
        C = _pivot_set(fvecs)
        m = [[kvecs[i].get(J[l], Fraction(0)) for i in range(k)] for l in range(k)]
        m_inv = linalg.inverse(m)
        phi_p = from_finite(
            {(C[i], J[l]): m_inv[i][l] for i in range(k) for l in range(k) if m_inv[i][l]}
        )
    u = a + phi_p
    t = -phi_p
    if not is_bijective(u, max_trunc, window):
        raise AssertionError("split produced a non-bijective matrix")
    return SplitCertificate(u, t)
