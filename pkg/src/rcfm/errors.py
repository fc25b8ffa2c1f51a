"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class RcfmError(Exception):
    """Base class for all errors raised by :mod:`rcfm`."""


# sequences
class PoleAtIndex(RcfmError):
    def __init__(self, index: int):
        super().__init__(f"coefficient sequence has a pole at index {index}")
        self.index = index


class ZeroSequence(RcfmError):
    pass


# matrices
class PoleOnDomain(RcfmError):
    pass


class BadStart(RcfmError):
    pass


# fredholm
class NotFredholmEvidence(RcfmError):
    """Raised when a kernel or cokernel cannot be shown finite dimensional."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class NotFredholm(RcfmError):
    pass


class UnsupportedExpression(RcfmError):
    pass


class NotIndexZero(RcfmError):
    pass


class UncertifiedInput(RcfmError):
    pass


class NotInvertible(RcfmError):
    pass


# extensions
class NotRightInverse(RcfmError):
    pass


class NotDirectlyInfinite(RcfmError):
    pass


class InconsistentScalar(RcfmError):
    pass


class NotCosetInverse(RcfmError):
    pass


class DependentMonomials(RcfmError):
    """The monomials of an extension are dependent modulo finite matrices.

    ``witness`` maps exponents to the coefficients of a combination that is
    finite; exponent ``n < 0`` stands for the ``-n``-th power of the image
    of ``x^-1``.
    """

    def __init__(self, witness: dict):
        super().__init__(f"monomials are dependent modulo M_inf: {witness}")
        self.witness = witness


class CanonicalizationFailure(RcfmError):
    pass


class UncertifiedIndex(RcfmError):
    pass


class SplittingNotRepresentable(RcfmError):
    pass


class NotInvertibleWitness(RcfmError):
    pass


class DuplicateExponents(RcfmError):
    pass


# expressions
class ParseError(RcfmError):
    def __init__(self, offset: int, expected: set[str] | frozenset[str], found: str = ""):
        exp = ", ".join(sorted(expected))
        where = f"found {found!r}" if found else "found end of input"
        super().__init__(f"parse error at offset {offset}: expected one of {{{exp}}}, {where}")
        self.offset = offset
        self.expected = frozenset(expected)
        self.found = found


class NonInvertiblePower(RcfmError):
    pass


class EvalError(RcfmError):
    pass
