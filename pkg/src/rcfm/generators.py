"""Seeded random instances used by the test suite and ``rcfm verify``.

The generator set is: shifts ``S(i)`` with ``|i| <= 3``, weighted shifts
``T(1)``, ``T(-1)``, diagonals ``Dgeo(2)^(+-1)`` and ``Dfact(+-1)``, products
of up to three of these, optional conjugation by a catalog invertible, and
an optional finite perturbation with entries in ``[-5, 5]`` supported in
``[1, 10]^2``.  Every instance is returned as an expression tree so that
``fredholm_inverse`` can use its structure.
"""

from __future__ import annotations

import random
from fractions import Fraction

from . import expr as ex

ATOMS: tuple[tuple[ex.Expr, int], ...] = tuple(
    [(ex.Shift(i), -i) for i in range(-3, 4)]
    + [
        (ex.TShift(1), -1),
        (ex.TShift(-1), 1),
        (ex.Dgeo(Fraction(2)), 0),
        (ex.Dgeo(Fraction(1, 2)), 0),
        (ex.Dfact(1), 0),
        (ex.Dfact(-1), 0),
    ]
)
"""Atoms paired with their known index."""

CONJUGATORS: tuple[ex.Expr, ...] = (
    ex.Dgeo(Fraction(2)),
    ex.Dfact(-1),
    ex.Add(ex.Ident(), ex.Unit(1, 2)),
)


def random_finite(rng: random.Random, size: int = 10, lo: int = -5, hi: int = 5, max_terms: int = 4) -> ex.Expr | None:
    """A sum of ``c*E(i,j)`` terms, or None for the empty sum."""
    terms = []
    for _ in range(rng.randint(0, max_terms)):
        c = rng.randint(lo, hi)
        if c:
            terms.append((c, rng.randint(1, size), rng.randint(1, size)))
    node = None
    for c, i, j in terms:
        t = ex.Mul(ex.Num(Fraction(c)), ex.Unit(i, j))
        node = t if node is None else ex.Add(node, t)
    return node


def random_product(rng: random.Random, max_len: int = 3) -> tuple[ex.Expr, int]:
    node, idx = rng.choice(ATOMS)
    for _ in range(rng.randint(0, max_len - 1)):
        other, k = rng.choice(ATOMS)
        node = ex.Mul(node, other)
        idx += k
    return node, idx


def random_instance(rng: random.Random, conj: bool = True, perturb: bool = True) -> tuple[ex.Expr, int]:
    """A Fredholm expression and its expected index."""
    node, idx = random_product(rng)
    if conj and rng.random() < 0.3:
        node = ex.Conj(rng.choice(CONJUGATORS), node)
    if perturb and rng.random() < 0.5:
        t = random_finite(rng)
        if t is not None:
            node = ex.Add(node, t)
    return node, idx


def random_index_zero(rng: random.Random) -> ex.Expr:
    """A product balanced to index zero by a trailing shift, plus a finite part."""
    node, idx = random_product(rng)
    if idx:
        node = ex.Mul(node, ex.Shift(idx))
    t = random_finite(rng, max_terms=5)
    if t is not None:
        node = ex.Add(node, t)
    return node
