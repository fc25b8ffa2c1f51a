import random
from fractions import Fraction
from math import factorial

import pytest

from rcfm.bpfmatrix import D2, factorial_diag, from_finite, geometric_diag, identity, make_shift, make_T, make_unit
from rcfm.errors import (
    DependentMonomials,
    DuplicateExponents,
    NotCosetInverse,
    NotDirectlyInfinite,
    NotInvertibleWitness,
    NotRightInverse,
)
from rcfm.extensions import (
    LaurentPoly,
    classify_trivial,
    conjugation_is_exact,
    diag_independence,
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
from rcfm.verify import random_pullback

I = identity()
S = make_shift


@pytest.fixture(scope="module")
def s_units():
    return matrix_units(S(-1), S(1), 8)


@pytest.fixture(scope="module")
def t_units():
    return matrix_units(make_T(-1), make_T(1), 8)


def test_units_examples(s_units, t_units):
    assert s_units.unit(1, 1) == make_unit(1, 1)
    assert s_units.unit(1, 2) == make_unit(1, 2)
    assert t_units.unit(1, 1) == make_unit(1, 1)
    assert s_units.unit(1, 2) * s_units.unit(2, 3) == s_units.unit(1, 3)
    assert (s_units.unit(1, 2) * s_units.unit(3, 3)).is_zero()


def test_units_relations(s_units, t_units):
    for units in (s_units, t_units):
        for (i, j), a in units.cache.items():
            for (k, l), b in units.cache.items():
                want = units.unit(i, l) if j == k else from_finite({})
                assert a * b == want


def test_t_units_are_scaled_matrix_units(t_units):
    # E_ij in the weighted system is (i!/j!) e_ij
    for (i, j), e in t_units.cache.items():
        assert e == make_unit(i, j).scale(Fraction(factorial(i), factorial(j)))


def test_units_errors():
    with pytest.raises(NotRightInverse):
        matrix_units(S(1), S(-1), 2)
    with pytest.raises(NotDirectlyInfinite):
        matrix_units(D2, geometric_diag(2, -1), 2)


def test_embed_examples(s_units):
    assert embed(S(-1), s_units, 3) == S(-1).truncate(3, 3)
    assert embed(I, s_units, 4) == I.truncate(4, 4)
    assert embed(make_unit(2, 1), s_units, 3) == [[0, 0, 0], [1, 0, 0], [0, 0, 0]]


def test_embed_fixes_finite(s_units, t_units):
    rng = random.Random(3)
    for _ in range(10):
        m = from_finite({(rng.randint(1, 6), rng.randint(1, 6)): rng.randint(-5, 5) for _ in range(4)})
        assert embed(m, s_units, 6) == m.truncate(6, 6)
        # the weighted units are rescaled, so the embedding conjugates by Diag(i!)
        conj = (factorial_diag(-1) * m * factorial_diag(1)).truncate(6, 6)
        assert embed(m, t_units, 6) == conj


def test_make_extension_examples():
    make_extension(S(-1), S(1), "T_1", 4)
    make_extension(D2, geometric_diag(2, -1), "T_0", 4)
    with pytest.raises(DependentMonomials) as err:
        make_extension(I, I, "bad", 2)
    assert err.value.witness
    with pytest.raises(NotCosetInverse):
        make_extension(S(-1), S(2), "bad")


def test_dependency_witness_is_finite():
    x = I + make_unit(1, 2)
    with pytest.raises(DependentMonomials) as err:
        make_extension(x, I - make_unit(1, 2), "nearly identity", 3)
    w = err.value.witness
    total = from_finite({})
    for n, c in w.items():
        total = total + (x**n if n >= 0 else (I - make_unit(1, 2)) ** (-n)).scale(c)
    assert total.is_finite_rank()


def test_family_examples():
    t1 = family_Tn(1)
    assert t1.x_image == S(-1) and t1.y_image == S(1)
    t2 = family_Tn(2)
    assert t2.x_image == S(-2) and t2.y_image == S(2)
    t0 = family_Tn(0)
    assert t0.x_image == D2 and t0.y_image == geometric_diag(2, -1)
    with pytest.raises(ValueError):
        family_Tn(-1)


def test_ext_mul_examples():
    t1 = family_Tn(1)
    x, y = t1.element({1: 1}), t1.element({-1: 1})
    xy = ext_mul(x, y)
    assert xy.poly == LaurentPoly({0: 1}) and xy.correction.is_zero()
    yx = ext_mul(y, x)
    assert yx.poly == LaurentPoly({0: 1}) and yx.correction == make_unit(1, 1).scale(-1)
    t0 = family_Tn(0)
    p = ext_mul(t0.element({1: 1}), t0.element({-1: 1}))
    assert p.poly == LaurentPoly({0: 1}) and p.correction.is_zero()


def test_pullback_ring_laws():
    rng = random.Random(7)
    for n in (0, 1, 2):
        ext = family_Tn(n)
        for _ in range(8):
            a, b, c = (random_pullback(rng, ext) for _ in range(3))
            assert (a * b) * c == a * (b * c)
            assert a * (b + c) == a * b + a * c
            assert (a + b) * c == a * c + b * c


def test_faithfulness():
    rng = random.Random(8)
    for n in range(4):
        ext = family_Tn(n)
        for _ in range(10):
            p = random_pullback(rng, ext)
            if p.is_zero():
                continue
            w = faithfulness_witness(p)
            assert w is not None
            i, j = w
            assert not (p * ext.element(correction={(i, j): 1})).is_zero()


def test_classify_examples():
    v = classify_trivial(family_Tn(1))
    assert not v.trivial and v.index == 1 and v.splitting is None
    v = classify_trivial(family_Tn(0))
    assert v.trivial and v.splitting[0] == D2
    assert v.splitting[1] == geometric_diag(2, -1)
    v = classify_trivial(family_Tn(3))
    assert not v.trivial and v.index == 3


def test_classify_index_zero_with_kernel():
    # D2 - e11 kills e1, so the splitting has to repair a kernel
    x = D2 - make_unit(1, 1)
    ext = make_extension(x, geometric_diag(2, -1), "D2 minus e11", 3)
    v = classify_trivial(ext)
    assert v.trivial and v.index == 0
    sx, sx_inv = v.splitting
    assert sx * sx_inv == I and sx_inv * sx == I and sx.coset_equals(x)


def test_classification_consistency():
    for n in range(6):
        assert classify_trivial(family_Tn(n)).index == n


def test_equivalence_examples():
    e1 = make_extension(S(-1), S(1), "S")
    e2 = make_extension(make_T(-1), make_T(1), "T")
    u, ui = factorial_diag(-1), factorial_diag(1)
    assert equivalence_check(e1, e2, u, ui)
    assert conjugation_is_exact(e1, e2, u, ui)
    t1 = family_Tn(1)
    assert equivalence_check(t1, t1, I, I)
    t2 = family_Tn(2)
    for u, ui in invertible_catalog().values():
        assert not equivalence_check(t1, t2, u, ui)


def test_equivalence_obstruction():
    fams = {n: family_Tn(n) for n in range(4)}
    for m in fams:
        for n in fams:
            if m == n:
                assert equivalence_check(fams[m], fams[n], I, I)
                continue
            for u, ui in invertible_catalog().values():
                assert not equivalence_check(fams[m], fams[n], u, ui)


def test_equivalence_bad_witness():
    t1 = family_Tn(1)
    with pytest.raises(NotInvertibleWitness):
        equivalence_check(t1, t1, D2, D2)


def test_independence_examples():
    assert diag_independence({0, 1, 2}, 5)
    assert diag_independence({3}, 17)
    assert diag_independence({-1, 0, 1, 2}, 10)
    rep = diag_independence_report(range(-4, 5))
    assert rep.symbolic and rep.numeric
    with pytest.raises(DuplicateExponents):
        diag_independence([1, 1], 1)
