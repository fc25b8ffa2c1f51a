import random
from fractions import Fraction

import pytest
from hypothesis import given, settings

from rcfm import expr as ex
from rcfm import generators as gen
from rcfm.bpfmatrix import D2, diag, factorial_diag, geometric_diag, identity, make_shift, make_T, make_unit
from rcfm.errors import NotFredholm, NotIndexZero, NotInvertible, UnsupportedExpression
from rcfm.fredholm import (
    cokernel_basis,
    exact_inverse,
    fredholm_inverse,
    index,
    index_zero_split,
    kernel_basis,
    support_bound,
)
from rcfm.seqalg import CoeffSeq
from strategies import finite_mats

I = identity()
e11 = make_unit(1, 1)


def test_kernel_examples():
    k = kernel_basis(make_shift(-1))
    assert k.certified and k.vectors == ({1: 1},)
    assert kernel_basis(make_shift(1)).dim == 0
    assert kernel_basis(make_shift(-2)).vectors == ({1: 1}, {2: 1})


def test_cokernel_examples():
    assert cokernel_basis(make_shift(1)).vectors == ({1: 1},)
    assert cokernel_basis(make_shift(-1)).dim == 0
    assert cokernel_basis(I - e11).vectors == ({1: 1},)


def test_index_examples():
    for i in range(-3, 4):
        assert index(make_shift(i)).index == -i
    assert index(make_T(-1)).index == 1
    assert index(make_T(1)).index == -1
    assert index(I).index == 0


def test_finite_matrix_is_not_fredholm():
    with pytest.raises(NotFredholm):
        index(e11)


def test_kernel_vectors_are_annihilated():
    a = ex.evaluate("S(-2)*T(1) + 3*E(1,4) - E(2,2)")
    for v in kernel_basis(a).vectors:
        assert a.apply(v) == {}
    at = a.transpose()
    for v in cokernel_basis(a).vectors:
        assert at.apply(v) == {}


def test_uncertified_fallback():
    # 2^i + (-2)^i + 1 has no strictly dominant atom, so no threshold certificate
    seq = CoeffSeq.atom(1, 2) + CoeffSeq.atom(1, -2) + CoeffSeq.const(1)
    a = diag(seq)
    assert support_bound(a) is None
    k = kernel_basis(a)
    assert not k.certified and k.dim == 0
    assert not index(a).certified


def test_fredholm_inverse_examples():
    c = fredholm_inverse("S(1)")
    assert c.a0 == make_shift(-1) and c.r.is_zero() and c.s == e11
    c = fredholm_inverse(ex.parse("Dgeo(2)"))
    assert c.a0 == geometric_diag(2, -1) and c.r.is_zero() and c.s.is_zero()
    c = fredholm_inverse("S(1) + E(1,3)")
    a0 = make_shift(-1)
    assert c.a0 == a0
    assert c.r == (a0 * make_unit(1, 3)).scale(-1)
    assert c.s == e11 - make_unit(1, 3) * a0


def test_fredholm_inverse_of_matrix_and_unsupported():
    c = fredholm_inverse(make_T(1) + make_unit(2, 2))
    a = make_T(1) + make_unit(2, 2)
    assert c.a0 * a == I - c.r and a * c.a0 == I - c.s
    with pytest.raises(UnsupportedExpression):
        fredholm_inverse("S(1) + S(-1)")


def test_split_examples():
    s = index_zero_split(I - e11)
    assert s.u == I and s.t == e11.scale(-1)
    s = index_zero_split(D2)
    assert s.u == D2 and s.t.is_zero()
    s2 = index_zero_split(make_shift(1) * make_shift(-1))
    assert s2.u == I
    with pytest.raises(NotIndexZero):
        index_zero_split(make_shift(1))


def test_exact_inverse():
    u = I + make_unit(1, 2)
    assert exact_inverse(u) == I - make_unit(1, 2)
    assert exact_inverse(factorial_diag(1)) == factorial_diag(-1)
    with pytest.raises(NotInvertible):
        exact_inverse(make_shift(1))
    # bijective with a nontrivial finite correction in its inverse
    a = ex.evaluate("S(1)*S(-1) + E(1,1) + 2*E(1,3)")
    inv = exact_inverse(a)
    assert a * inv == I and inv * a == I


def _certified(node):
    m = ex.evaluate(node)
    res = index(m)
    return m, res


def test_index_calculus_random():
    rng = random.Random(11)
    for _ in range(40):
        a_node, k = gen.random_instance(rng)
        b_node, _ = gen.random_instance(rng)
        a, ra = _certified(a_node)
        b, rb = _certified(b_node)
        assert ra.certified and ra.index == k
        assert index(a * b).index == ra.index + rb.index
        cert = fredholm_inverse(a_node)
        assert index(cert.a0).index == -ra.index
        assert cert.a0 * a == I - cert.r and a * cert.a0 == I - cert.s


@settings(max_examples=30, deadline=None)
@given(finite_mats(size=10))
def test_perturbation_invariance(t):
    for a in (make_shift(2), make_T(-1), D2 * make_shift(-1), factorial_diag(-1) * make_shift(1)):
        assert index(a + t).index == index(a).index


def test_conjugation_invariance():
    rng = random.Random(12)
    for u_node in gen.CONJUGATORS:
        assert index(ex.evaluate(u_node)).index == 0
    for _ in range(20):
        a_node, k = gen.random_product(rng)
        assert index(ex.evaluate(ex.Conj(rng.choice(gen.CONJUGATORS), a_node))).index == k


def test_split_roundtrip_random():
    rng = random.Random(13)
    seen_kernel = 0
    for _ in range(25):
        a = ex.evaluate(gen.random_index_zero(rng))
        s = index_zero_split(a)
        assert s.u + s.t == a and s.t.is_finite_rank()
        r = index(s.u)
        assert r.certified and r.kernel_dim == r.coker_dim == 0
        seen_kernel += index(a).kernel_dim > 0
    assert seen_kernel


def test_json_shapes():
    r = index(make_shift(-1))
    j = r.to_json()
    assert j["index"] == 1 and j["kernel_dim"] == 1 and j["certified"] is True
    k = kernel_basis(make_shift(-2)).to_json()
    assert k["vectors"] == [{"1": "1"}, {"2": "1"}]
    assert Fraction(k["dim"]) == 2
