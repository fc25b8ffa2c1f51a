"""Self-check suites run by ``rcfm verify``.

Each check returns a :class:`Check` with a pass flag and a short detail
string.  Randomised checks use a seeded generator, so reruns are identical.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from . import expr as ex
from . import generators as gen
from .bpfmatrix import factorial_diag, from_finite, identity, make_shift, make_T, make_unit
from .extensions import (
    LaurentPoly,
    classify_trivial,
    conjugation_is_exact,
    diag_independence_report,
    embed,
    equivalence_check,
    ext_mul,
    faithfulness_witness,
    family_Tn,
    invertible_catalog,
    make_extension,
    matrix_units,
)
from .fredholm import fredholm_inverse, index, index_zero_split
from .oracle import stabilized_index
from .seqalg import CoeffSeq, RatFunc

SUITES = ("fredholm", "ring", "extensions")


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


def _run(name: str, fn: Callable[[], str]) -> Check:
    try:
        detail = fn()
    except AssertionError as exc:
        return Check(name, False, str(exc))
    return Check(name, True, detail)


def oracle_agrees(a, res, window: int = 16) -> bool:
    """Certified dims versus the dense stabilisation sweep."""
    n_star = max(res.kernel.truncation_used, res.cokernel.truncation_used)
    rep = stabilized_index(a, 2 * n_star + 32, window)
    return (
        rep.stabilized
        and rep.nullities[-1] == res.kernel_dim
        and rep.coranks[-1] == res.coker_dim
    )


# -- fredholm ---------------------------------------------------------------------

def fredholm_checks(seed: int = 0, samples: int = 40) -> list[Check]:
    rng = random.Random(seed)

    def shifts():
        for i in range(-5, 6):
            res = index(make_shift(i))
            assert res.certified and res.index == -i, f"index S({i}) = {res.index}"
        return "S(i) for |i| <= 5"

    def weighted():
        assert index(make_T(-1)).index == 1 and index(make_T(1)).index == -1
        return "T(-1) -> 1, T(1) -> -1"

    def additivity():
        for _ in range(samples):
            a, _ = gen.random_instance(rng)
            b, _ = gen.random_instance(rng)
            ra, rb = index(ex.evaluate(a)), index(ex.evaluate(b))
            rab = index(ex.evaluate(ex.Mul(a, b)))
            assert rab.index == ra.index + rb.index, f"{ex.to_text(a)} ; {ex.to_text(b)}"
        return f"{samples} pairs"

    def inverse_index():
        for _ in range(samples):
            a, _ = gen.random_instance(rng)
            cert = fredholm_inverse(a)
            assert index(cert.a0).index == -index(ex.evaluate(a)).index, ex.to_text(a)
        return f"{samples} certificates"

    def perturbation():
        for _ in range(samples):
            a, _ = gen.random_product(rng)
            t = gen.random_finite(rng)
            if t is None:
                continue
            assert index(ex.evaluate(ex.Add(a, t))).index == index(ex.evaluate(a)).index, ex.to_text(a)
        return f"{samples} perturbations"

    def conjugation():
        for name, (u, _) in invertible_catalog().items():
            assert index(u).index == 0, name
        for _ in range(samples):
            a, k = gen.random_product(rng)
            c = rng.choice(gen.CONJUGATORS)
            assert index(ex.evaluate(ex.Conj(c, a))).index == k, ex.to_text(a)
        return f"{samples} conjugations"

    def splits():
        for _ in range(samples):
            node = gen.random_index_zero(rng)
            a = ex.evaluate(node)
            s = index_zero_split(a)
            assert s.u + s.t == a and s.t.is_finite_rank(), ex.to_text(node)
        return f"{samples} index-zero splits"

    def oracle():
        for _ in range(max(samples // 4, 1)):
            a, _ = gen.random_instance(rng)
            m = ex.evaluate(a)
            assert oracle_agrees(m, index(m)), ex.to_text(a)
        return "certified dims match the dense sweep"

    return [
        _run("shift_index", shifts),
        _run("weighted_shift_index", weighted),
        _run("index_additivity", additivity),
        _run("inverse_index", inverse_index),
        _run("perturbation_invariance", perturbation),
        _run("conjugation_invariance", conjugation),
        _run("index_zero_split", splits),
        _run("oracle_agreement", oracle),
    ]


# -- ring ----------------------------------------------------------------------------

def _random_seq(rng: random.Random) -> CoeffSeq:
    atoms = []
    for _ in range(rng.randint(1, 2)):
        q = RatFunc.from_coeffs([rng.randint(-3, 3) for _ in range(rng.randint(1, 3))] or [1])
        atoms.append(CoeffSeq.atom(q, rng.choice([1, 2, Fraction(1, 2), -1]), rng.choice([-1, 0, 1])))
    out = CoeffSeq.zero()
    for a in atoms:
        out = out + a
    return out


def ring_checks(seed: int = 0, samples: int = 40) -> list[Check]:
    rng = random.Random(seed)
    one = identity()

    def toeplitz():
        e11 = make_unit(1, 1)
        assert make_shift(-1) * make_shift(1) == one
        assert make_shift(1) * make_shift(-1) == one - e11
        assert make_T(-1) * make_T(1) == one
        assert make_T(1) * make_T(-1) == one - e11
        return "S and T relations"

    def seq_laws():
        for _ in range(samples):
            a, b, c = (_random_seq(rng) for _ in range(3))
            assert (a * b) * c == a * (b * c)
            assert a * (b + c) == a * b + a * c
            k = rng.randint(-3, 3)
            i = rng.randint(8, 20)
            assert (a * b).shift(k)(i) == a.shift(k)(i) * b.shift(k)(i)
        return f"{samples} triples"

    def matrix_laws():
        for _ in range(samples // 2):
            a, b, c = (ex.evaluate(gen.random_instance(rng)[0]) for _ in range(3))
            assert (a * b) * c == a * (b * c)
            assert a * (b + c) == a * b + a * c
            assert (a * b).transpose() == b.transpose() * a.transpose()
        return f"{samples // 2} triples"

    return [
        _run("toeplitz_relations", toeplitz),
        _run("sequence_ring_laws", seq_laws),
        _run("matrix_ring_laws", matrix_laws),
    ]


# -- extensions ------------------------------------------------------------------------

def random_pullback(rng: random.Random, ext, max_exp: int = 3):
    poly = LaurentPoly({rng.randint(-max_exp, max_exp): rng.randint(-3, 3) for _ in range(rng.randint(0, 3))})
    corr = {
        (rng.randint(1, 6), rng.randint(1, 6)): rng.randint(-3, 3) for _ in range(rng.randint(0, 3))
    }
    return ext.element(poly, corr)


def extension_checks(seed: int = 0, samples: int = 10) -> list[Check]:
    rng = random.Random(seed)

    def units():
        for x, y in ((make_shift(-1), make_shift(1)), (make_T(-1), make_T(1))):
            matrix_units(x, y, 8)
        return "E_ij E_kl = delta_jk E_il for i,j,k,l <= 8 (S and T)"

    def embedding():
        u = matrix_units(make_shift(-1), make_shift(1), 5)
        for _ in range(samples):
            m = from_finite({(rng.randint(1, 5), rng.randint(1, 5)): rng.randint(-5, 5) for _ in range(3)})
            assert embed(m, u, 5) == m.truncate(5, 5)
        return "embedding fixes finite matrices"

    def classification():
        for n in range(6):
            v = classify_trivial(family_Tn(n))
            assert v.index == n and v.trivial == (n == 0), f"T_{n}"
            if n == 0:
                assert v.splitting is not None, "T_0 splitting missing"
        return "T_0 trivial; T_1..T_5 nontrivial with index n"

    def witness():
        e1 = make_extension(make_shift(-1), make_shift(1), "S")
        e2 = make_extension(make_T(-1), make_T(1), "T")
        u, ui = factorial_diag(-1), factorial_diag(1)
        assert equivalence_check(e1, e2, u, ui) and conjugation_is_exact(e1, e2, u, ui)
        return "Diag(1/i!) conjugates (S(-1), S(1)) onto (T(-1), T(1)) exactly"

    def obstruction():
        fams = {n: family_Tn(n) for n in range(4)}
        cat = invertible_catalog()
        for m in fams:
            for n in fams:
                for name, (u, ui) in cat.items():
                    got = equivalence_check(fams[m], fams[n], u, ui)
                    if m != n:
                        assert not got, f"T_{m} ~ T_{n} via {name}"
            assert equivalence_check(fams[m], fams[m], identity(), identity())
        return "distinct family members never equivalent under the catalog"

    def vandermonde():
        rep = diag_independence_report(range(-4, 5))
        assert rep.symbolic and rep.numeric
        return "Dgeo(2)^n, |n| <= 4"

    def pullback():
        for n in (0, 1, 2):
            ext = family_Tn(n)
            for _ in range(samples):
                a, b, c = (random_pullback(rng, ext) for _ in range(3))
                assert ext_mul(ext_mul(a, b), c) == ext_mul(a, ext_mul(b, c)), f"associativity in T_{n}"
                assert ext_mul(a, b + c) == ext_mul(a, b) + ext_mul(a, c), f"distributivity in T_{n}"
                if not a.is_zero():
                    assert faithfulness_witness(a) is not None, f"no witness in T_{n}"
        return "associative, distributive, faithful on samples of T_0, T_1, T_2"

    return [
        _run("matrix_units", units),
        _run("embedding", embedding),
        _run("family_classification", classification),
        _run("equivalence_witness", witness),
        _run("equivalence_obstruction", obstruction),
        _run("vandermonde_independence", vandermonde),
        _run("pullback_ring_laws", pullback),
    ]


def run_suite(name: str, seed: int = 0) -> list[Check]:
    if name == "all":
        return [c for s in SUITES for c in run_suite(s, seed)]
    return {
        "fredholm": fredholm_checks,
        "ring": ring_checks,
        "extensions": extension_checks,
    }[name](seed)
