from fractions import Fraction

import pytest
from hypothesis import given, settings

from rcfm.bpfmatrix import (
    D2,
    BPFMatrix,
    coset_equals,
    factorial_diag,
    from_finite,
    identity,
    make_band,
    make_shift,
    make_T,
    make_unit,
)
from rcfm.errors import BadStart, PoleOnDomain
from rcfm.seqalg import CoeffSeq, RatFunc
from strategies import finite_mats, matrices

i = RatFunc.index()
I = identity()
e11 = make_unit(1, 1)


def dense_product(a, b, n, margin):
    ta, tb = a.truncate(n, n + margin), b.truncate(n + margin, n)
    return [[sum(ta[r][k] * tb[k][c] for k in range(n + margin)) for c in range(n)] for r in range(n)]


def test_shift_examples():
    s1 = make_shift(1)
    assert s1.entry(2, 1) == 1 and s1.entry(1, 1) == 0
    assert make_shift(0) == I
    s = make_shift(-2)
    assert s.entry(1, 3) == 1
    assert s.column(1) == {} and s.column(2) == {}


def test_band_examples():
    t1 = make_band(1, CoeffSeq.atom(i + 1), 1)
    assert t1 == make_T(1) and t1.entry(5, 4) == 5
    tm = make_band(-1, CoeffSeq.atom(1 / i), 2)
    assert tm == make_T(-1) and tm.entry(1, 2) == Fraction(1, 2)
    assert make_band(0, CoeffSeq.atom(1, 1, -1), 1).entry(3, 3) == Fraction(1, 6)


def test_band_errors():
    with pytest.raises(PoleOnDomain):
        make_band(0, CoeffSeq.atom(1 / (i - 3)), 1)
    with pytest.raises(BadStart):
        make_band(-2, CoeffSeq.const(1), 1)


def test_unit_examples():
    u = make_unit(2, 3)
    assert u.entry(2, 3) == 1 and u.finite == {(2, 3): 1}
    assert e11 * e11 == e11
    assert (make_unit(1, 2) * make_unit(3, 4)).is_zero()


def test_add_examples():
    s1 = make_shift(1)
    assert (s1 + s1.scale(-1)).is_zero()
    m = I - e11
    assert m.entry(1, 1) == 0 and all(m.entry(k, k) == 1 for k in range(2, 12))
    assert make_band(0, CoeffSeq.const(1), 3) + from_finite({(1, 1): 1, (2, 2): 1}) == I


def test_toeplitz_relations():
    assert make_shift(-1) * make_shift(1) == I
    assert make_shift(1) * make_shift(-1) == I - e11
    assert make_T(-1) * make_T(1) == I
    assert make_T(1) * make_T(-1) == I - e11


def test_entry_and_truncate_examples():
    assert make_T(1).entry(5, 4) == 5
    assert I.entry(7, 7) == 1
    assert D2.entry(4, 4) == 8
    assert make_shift(1).truncate(3, 3) == [[0, 0, 0], [1, 0, 0], [0, 1, 0]]
    assert BPFMatrix().truncate(2, 2) == [[0, 0], [0, 0]]
    assert D2.truncate(3, 3) == [[1, 0, 0], [0, 2, 0], [0, 0, 4]]


def test_transpose_examples():
    assert make_shift(1).transpose() == make_shift(-1)
    assert D2.transpose() == D2
    assert make_unit(2, 3).transpose() == make_unit(3, 2)
    assert make_T(1).transpose().truncate(6, 6) == [list(r) for r in zip(*make_T(1).truncate(6, 6))]


def test_equality_examples():
    assert coset_equals(I, I - e11)
    assert I != I - e11
    assert not coset_equals(make_shift(1), make_T(1))


def test_factorial_conjugation():
    assert factorial_diag(1) * make_shift(-1) * factorial_diag(-1) == make_T(-1)
    assert factorial_diag(1) * make_shift(1) * factorial_diag(-1) == make_T(1)


def test_json_roundtrip():
    m = make_T(1) * D2 + make_unit(3, 1).scale(Fraction(-2, 7))
    assert BPFMatrix.from_json(m.to_json()) == m


def test_power():
    assert D2**3 == D2 * D2 * D2
    assert make_shift(1) ** 0 == I


@settings(max_examples=40, deadline=None)
@given(matrices(), matrices(), matrices())
def test_ring_axioms_structural(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert (a + b) * c == a * c + b * c


@settings(max_examples=40, deadline=None)
@given(matrices(), matrices())
def test_product_matches_truncations(a, b):
    margin = 10  # two factors with |offset| <= 3 each, plus finite parts inside [1, 6]
    n = 25
    assert (a * b).truncate(n, n) == dense_product(a, b, n, margin)


@settings(max_examples=40, deadline=None)
@given(matrices(), matrices())
def test_entry_of_product(a, b):
    p = a * b
    for r in range(1, 21, 3):
        for c in range(1, 21, 2):
            assert p.entry(r, c) == sum(a.entry(r, k) * b.entry(k, c) for k in range(1, 40))


@settings(max_examples=40, deadline=None)
@given(matrices(), finite_mats())
def test_finite_is_ideal(a, f):
    assert (a * f).is_finite_rank() and (f * a).is_finite_rank()


@settings(max_examples=40, deadline=None)
@given(matrices(), matrices())
def test_transpose(a, b):
    assert a.transpose().transpose() == a
    assert (a * b).transpose() == b.transpose() * a.transpose()


@settings(max_examples=30, deadline=None)
@given(matrices(), finite_mats(), finite_mats(), matrices())
def test_coset_congruence(a, f, g, c):
    b = a + f
    d = b + g
    assert coset_equals(a, a) and coset_equals(a, b) == coset_equals(b, a)
    assert coset_equals(a, d)
    assert coset_equals(a * c, b * c) and coset_equals(c * a, c * b)
    assert coset_equals(a + c, b + c)
