from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from rcfm.errors import PoleAtIndex, ZeroSequence
from rcfm.seqalg import (
    CoeffSeq,
    RatFunc,
    seq_add,
    seq_eval,
    seq_is_zero,
    seq_mul,
    seq_nonvanishing_threshold,
    seq_shift,
)
from strategies import seqs

i = RatFunc.index()


def atom(q=1, r=1, s=0):
    return CoeffSeq.atom(q, r, s)


def test_eval_examples():
    assert seq_eval(atom(Fraction(1, 2), 2), 3) == 4
    assert seq_eval(atom(), 10) == 1
    assert seq_eval(atom(1, 1, -1), 4) == Fraction(1, 24)


def test_add_examples():
    assert seq_is_zero(seq_add(atom(1), atom(-1)))
    assert seq_add(atom(1, 2), atom(1, 3)).keys() == [(2, 0), (3, 0)]
    s = seq_add(atom(i), atom(1))
    assert s.is_single_atom() and s.atoms[0].q == i + 1


def test_mul_examples():
    assert seq_mul(atom(1 / i), atom(i)) == atom()
    assert seq_mul(atom(Fraction(1, 2), 2), atom(Fraction(1, 2), 2)) == atom(Fraction(1, 4), 4)
    assert seq_mul(atom(1, 1, 1), atom(1, 1, -1)) == atom()


def test_shift_examples():
    assert seq_shift(atom(1, 1, 1), 1) == atom(i + 1, 1, 1)
    assert seq_shift(atom(Fraction(1, 2), 2), 1) == atom(1, 2)
    a = atom(i**2 - 3, Fraction(1, 3), -1)
    assert seq_shift(a, 0) == a


def test_zero_examples():
    assert seq_is_zero(CoeffSeq.zero())
    assert not seq_is_zero(atom())
    with pytest.raises(ZeroSequence):
        seq_nonvanishing_threshold(CoeffSeq.zero())


def test_threshold_examples():
    assert seq_nonvanishing_threshold(atom((i - 3) * (i - 7))) == 8
    assert seq_nonvanishing_threshold(atom(1, 2)) == 1
    assert seq_nonvanishing_threshold(atom(1) + atom(1, -1)) is None


def test_threshold_multi_atom_dominant():
    # 2^i - 100 vanishes nowhere from 7 on
    s = atom(1, 2) + atom(-100)
    n0 = seq_nonvanishing_threshold(s)
    assert n0 is not None and all(s(k) for k in range(n0, n0 + 100))
    assert s(n0 - 1) < 0 or n0 == 1


def test_pole_raises():
    s = atom(1 / (i - 2))
    with pytest.raises(PoleAtIndex):
        s(2)
    assert s.poles() == {2}
    assert s.min_start(1) == 3


def test_ratfunc_canonical():
    q = RatFunc.from_coeffs([2, 2], [4])
    assert q.numer_coeffs() == [Fraction(1, 2), Fraction(1, 2)]
    assert q.denom_coeffs() == [1]
    assert (i * i - 1) / (i - 1) == i + 1
    assert RatFunc.from_coeffs([-6, 1, 1]).integer_roots() == {2, -3}


def test_json_roundtrip():
    s = atom((i + 1) / (i + 3), Fraction(-2, 3), 1) + atom(5)
    assert CoeffSeq.from_json(s.to_json()) == s


def _defined(a, k):
    try:
        a(k)
        return True
    except PoleAtIndex:
        return False


@settings(max_examples=60, deadline=None)
@given(seqs(), seqs())
def test_pointwise_homomorphism(a, b):
    s, p = a + b, a * b
    for k in range(1, 51):
        if _defined(a, k) and _defined(b, k):
            assert s(k) == a(k) + b(k)
            assert p(k) == a(k) * b(k)


@settings(max_examples=60, deadline=None)
@given(seqs(), st.integers(-5, 5))
def test_shift_inverse(a, k):
    assert a.shift(k).shift(-k) == a
    for n in range(8, 20):
        assert a.shift(k)(n) == a(n + k)


@settings(max_examples=40, deadline=None)
@given(seqs())
def test_negation_is_zero(a):
    z = a - a
    assert seq_is_zero(z)
    assert all(z(k) == 0 for k in range(1, 20))


@settings(max_examples=60, deadline=None)
@given(seqs(max_atoms=3))
def test_threshold_certificate(a):
    assume(not a.is_zero())
    n0 = a.nonvanishing_threshold()
    if n0 is not None:
        assert all(a(k) != 0 for k in range(n0, n0 + 101))


@settings(max_examples=40, deadline=None)
@given(seqs(), seqs(), seqs())
def test_ring_laws(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a
