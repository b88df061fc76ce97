"""Exact arithmetic in the real free *-algebra on noncommuting variables.

The algebra has n base variables together with their formal adjoints.
Letters are the integers 1..2n, where letter j+n stands for the adjoint
of letter j (1 <= j <= n).  A word (monomial) is a tuple of letters; the
empty tuple is the unit.  Polynomials are finite maps from words to
rational coefficients, so symmetry, commutation and coefficient identities
are decided exactly.  Only evaluation on matrix tuples uses floating point.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence, Union

import numpy as np

Word = tuple[int, ...]
Coeff = Union[Fraction, float]

_ONE = Fraction(1)
_ZERO = Fraction(0)


def validate_word(word: Iterable[int], n: int) -> Word:
    word = tuple(word)
    for letter in word:
        if not 1 <= letter <= 2 * n:
            raise ValueError(f"letter {letter} outside the alphabet 1..{2 * n}")
    return word


def word_adjoint(word: Word, n: int) -> Word:
    """Reverse the word and toggle the star on every letter."""
    return tuple(l + n if l <= n else l - n for l in reversed(word))


def graded_lex_key(word: Word) -> tuple[int, Word]:
    """Sort key for graded lexicographic order: shorter words first, ties by letter index."""
    return len(word), word


def graded_lex_compare(u: Word, v: Word) -> int:
    """Three-way comparison in graded lex order (-1, 0, or 1)."""
    ku, kv = graded_lex_key(u), graded_lex_key(v)
    return (ku > kv) - (ku < kv)


def words_of_degree(n: int, degree: int) -> Iterator[Word]:
    """All (2n)^degree words of exactly the given degree, in lex order."""
    return itertools.product(range(1, 2 * n + 1), repeat=degree)


def _coerce(value) -> Coeff:
    if isinstance(value, float):
        return value
    return Fraction(value)


@dataclass(frozen=True, eq=False)
class NcPoly:
    """A polynomial over the 2n-letter free *-alphabet.

    ``terms`` maps words to nonzero coefficients (Fractions for the exact
    paths; extracted sum-of-squares factors carry floats).  Instances are
    immutable by convention; every operation returns a new polynomial, so
    values can be shared freely across threads.
    """

    n: int
    terms: dict[Word, Coeff]

    # -- construction ----------------------------------------------------

    @classmethod
    def zero(cls, n: int) -> "NcPoly":
        return cls(n, {})

    @classmethod
    def scalar(cls, n: int, value) -> "NcPoly":
        c = _coerce(value)
        return cls(n, {(): c} if c else {})

    @classmethod
    def one(cls, n: int) -> "NcPoly":
        return cls.scalar(n, 1)

    @classmethod
    def variable(cls, n: int, j: int, star: bool = False) -> "NcPoly":
        if not 1 <= j <= n:
            raise ValueError(f"variable index {j} outside 1..{n}")
        return cls(n, {(j + n if star else j,): _ONE})

    @classmethod
    def monomial(cls, n: int, word: Iterable[int], coeff=1) -> "NcPoly":
        c = _coerce(coeff)
        return cls(n, {validate_word(word, n): c} if c else {})

    @classmethod
    def from_terms(cls, n: int, terms: Mapping[Word, Coeff] | Iterable[tuple[Word, Coeff]]) -> "NcPoly":
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Word, Coeff] = {}
        for word, coeff in items:
            word = validate_word(word, n)
            c = acc.get(word, _ZERO) + _coerce(coeff)
            if c:
                acc[word] = c
            else:
                acc.pop(word, None)
        return cls(n, acc)

    # -- equality ----------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, NcPoly):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    __hash__ = None  # mutable-dict payload; polynomials are not hashable

    # -- queries -----------------------------------------------------------

    @property
    def degree(self) -> int | None:
        """Maximal word length, or None for the zero polynomial."""
        if not self.terms:
            return None
        return max(len(w) for w in self.terms)

    def coeff(self, word: Iterable[int]) -> Coeff:
        return self.terms.get(tuple(word), _ZERO)

    def is_zero(self) -> bool:
        return not self.terms

    def is_symmetric(self) -> bool:
        """True iff the polynomial equals its adjoint, coefficient by coefficient."""
        for word, c in self.terms.items():
            if self.terms.get(word_adjoint(word, self.n), _ZERO) != c:
                return False
        return True

    def leading_word(self) -> Word | None:
        """Graded-lex maximal word of the support, or None for zero."""
        if not self.terms:
            return None
        return max(self.terms, key=graded_lex_key)

    def sorted_terms(self) -> list[tuple[Word, Coeff]]:
        return sorted(self.terms.items(), key=lambda kv: graded_lex_key(kv[0]))

    # -- arithmetic ----------------------------------------------------------

    def _check_same_algebra(self, other: "NcPoly") -> None:
        if self.n != other.n:
            raise ValueError(f"mixed alphabets: {self.n} vs {other.n} variables")

    def __add__(self, other) -> "NcPoly":
        if not isinstance(other, NcPoly):
            return self + NcPoly.scalar(self.n, other)
        self._check_same_algebra(other)
        acc = dict(self.terms)
        for word, c in other.terms.items():
            s = acc.get(word, _ZERO) + c
            if s:
                acc[word] = s
            else:
                acc.pop(word, None)
        return NcPoly(self.n, acc)

    def __radd__(self, other) -> "NcPoly":
        return self + other

    def __neg__(self) -> "NcPoly":
        return NcPoly(self.n, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other) -> "NcPoly":
        return self + (-other if isinstance(other, NcPoly) else NcPoly.scalar(self.n, other).__neg__())

    def __rsub__(self, other) -> "NcPoly":
        return (-self) + other

    def __mul__(self, other) -> "NcPoly":
        if not isinstance(other, NcPoly):
            c = _coerce(other)
            if not c:
                return NcPoly.zero(self.n)
            return NcPoly(self.n, {w: v * c for w, v in self.terms.items()})
        self._check_same_algebra(other)
        acc: dict[Word, Coeff] = {}
        for wa, ca in self.terms.items():
            for wb, cb in other.terms.items():
                word = wa + wb
                s = acc.get(word, _ZERO) + ca * cb
                if s:
                    acc[word] = s
                else:
                    acc.pop(word, None)
        return NcPoly(self.n, acc)

    def __rmul__(self, other) -> "NcPoly":
        # scalars commute with everything, so left/right scaling agree
        return self * other

    def __pow__(self, k: int) -> "NcPoly":
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a nonnegative integer")
        out = NcPoly.one(self.n)
        for _ in range(k):
            out = out * self
        return out

    def adjoint(self) -> "NcPoly":
        return NcPoly(self.n, {word_adjoint(w, self.n): c for w, c in self.terms.items()})

    # -- evaluation ------------------------------------------------------------

    def evaluate(self, matrices) -> np.ndarray:
        """Evaluate on a tuple of real square matrices.

        Base variables map to the given matrices, adjoint letters to their
        transposes, and the empty word to the identity.
        """
        tup = matrices if isinstance(matrices, MatrixTuple) else MatrixTuple.of(matrices)
        if tup.n != self.n:
            raise ValueError(f"polynomial has {self.n} variables, tuple has {tup.n}")
        k = tup.size
        out = np.zeros((k, k))
        eye = np.eye(k)
        for word, c in self.terms.items():
            prod = eye
            for letter in word:
                prod = prod @ tup.letter(letter)
            out += float(c) * prod
        return out

    # -- printing -----------------------------------------------------------------

    def __str__(self) -> str:
        from .parsing import format_poly

        return format_poly(self)

    def __repr__(self) -> str:
        return f"NcPoly(n={self.n}, {str(self)!r})"


@dataclass(frozen=True)
class MatrixTuple:
    """A tuple of n real square matrices of equal size, one per base variable."""

    matrices: tuple[np.ndarray, ...]

    @classmethod
    def of(cls, matrices: Sequence) -> "MatrixTuple":
        mats = tuple(np.asarray(m, dtype=float) for m in matrices)
        if not mats:
            raise ValueError("need at least one matrix")
        k = mats[0].shape[0] if mats[0].ndim == 2 else -1
        for m in mats:
            if m.ndim != 2 or m.shape != (k, k) or k < 1:
                raise ValueError("all matrices must be square and of equal size >= 1")
        return cls(mats)

    @property
    def n(self) -> int:
        return len(self.matrices)

    @property
    def size(self) -> int:
        return self.matrices[0].shape[0]

    def letter(self, letter: int) -> np.ndarray:
        """Matrix for a letter: base variables as given, starred letters transposed."""
        if letter <= self.n:
            return self.matrices[letter - 1]
        return self.matrices[letter - self.n - 1].T


def evaluate(p: NcPoly, matrices) -> np.ndarray:
    return p.evaluate(matrices)


def commutes(p: NcPoly, q: NcPoly) -> bool:
    """Exact test of pq == qp in the free algebra."""
    return (p * q - q * p).is_zero()
