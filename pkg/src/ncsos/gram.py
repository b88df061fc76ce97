"""Gram-matrix spaces for symmetric free-*-algebra polynomials.

For a monomial basis (w_0, ..., w_{N-1}) of all words up to degree D, a
symmetric matrix M represents p when

    sum_{a,b} M[a,b] * (w_a)* w_b  ==  p ,

matching coefficients word by word.  The unknowns are the upper-triangle
entries, and each unknown occurs in exactly one coefficient equation: the
pair (a, b) contributes only to the word (w_a)* w_b and its adjoint, which
form a single equation once M is symmetric.  The constraint system is
therefore a disjoint union of single-equation blocks, and both the
minimum-norm representative and an exact kernel basis fall out block by
block, in rational arithmetic.

Because a degree-2D word factors uniquely into two degree-D halves, the
equations that pin the lower-right top-degree block each involve a single
unknown.  Every kernel element hence vanishes on that block, the block is
the same for all representatives, and its exact rank is a certified lower
bound for the rank of any Gram matrix of p.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .exact_linalg import exact_rank
from .ncpoly import (
    NcPoly,
    Word,
    graded_lex_key,
    word_adjoint,
    words_of_degree,
)

_ZERO = Fraction(0)

FracMatrix = tuple[tuple[Fraction, ...], ...]


class NotSymmetricError(ValueError):
    """The polynomial is not equal to its adjoint."""


class InfeasibleSystemError(ValueError):
    """No Gram matrix exists over the requested basis."""


@dataclass(frozen=True)
class MonomialBasis:
    """All words of degree <= degree, in graded lexicographic order."""

    n: int
    degree: int
    words: tuple[Word, ...]
    index: dict[Word, int]

    @classmethod
    def build(cls, n: int, degree: int) -> "MonomialBasis":
        if n < 1 or degree < 0:
            raise ValueError("need n >= 1 and degree >= 0")
        words: list[Word] = []
        for k in range(degree + 1):
            words.extend(words_of_degree(n, k))
        return cls(n, degree, tuple(words), {w: i for i, w in enumerate(words)})

    def __len__(self) -> int:
        return len(self.words)

    @property
    def top_size(self) -> int:
        """Number of degree-D words, i.e. the side of the top-degree block."""
        return (2 * self.n) ** self.degree


@dataclass(frozen=True)
class GramConstraint:
    """One coefficient equation: sum of count * M[i,j] over entries == value.

    ``word`` is the graded-lex smaller of the word/adjoint pair the equation
    matches; entries hold upper-triangle positions (i <= j).
    """

    word: Word
    entries: tuple[tuple[int, int, int], ...]
    value: Fraction


@dataclass(frozen=True)
class GramSpace:
    """The affine space of symmetric Gram matrices representing ``target``.

    ``representative`` is the minimum-Frobenius-norm solution; adding any
    rational combination of ``kernel_basis`` stays inside the space.
    """

    basis: MonomialBasis
    representative: FracMatrix
    kernel_basis: tuple[FracMatrix, ...]
    constraints: tuple[GramConstraint, ...]
    target: NcPoly

    @property
    def affine_dimension(self) -> int:
        return len(self.kernel_basis)


def _pair_groups(basis: MonomialBasis) -> dict[Word, list[tuple[int, int, int]]]:
    """Group upper-triangle pairs by the word equation they contribute to."""
    n = basis.n
    words = basis.words
    adjoints = [word_adjoint(w, n) for w in words]
    groups: dict[Word, list[tuple[int, int, int]]] = {}
    for i in range(len(words)):
        wi_adj = adjoints[i]
        for j in range(i, len(words)):
            w = wi_adj + words[j]
            wadj = word_adjoint(w, n)
            if graded_lex_key(wadj) < graded_lex_key(w):
                rep = wadj
            else:
                rep = w
            # (i, j) and (j, i) land in the same equation exactly when the
            # product word is self-adjoint; off-diagonal pairs then count twice
            count = 2 if (i != j and w == wadj) else 1
            groups.setdefault(rep, []).append((i, j, count))
    return groups


def build_gram_space(p: NcPoly, degree: int | None = None) -> GramSpace:
    """Set up the Gram space of a symmetric polynomial.

    The basis degree defaults to ceil(deg(p)/2) and may be raised (never
    lowered) with ``degree``.  Raises NotSymmetricError for nonsymmetric
    input and InfeasibleSystemError if some coefficient of p cannot be
    matched over the basis.
    """
    if not p.is_symmetric():
        raise NotSymmetricError("polynomial is not *-symmetric")
    pdeg = p.degree or 0
    d_min = (pdeg + 1) // 2
    d_basis = max(d_min, degree) if degree is not None else d_min
    basis = MonomialBasis.build(p.n, d_basis)
    groups = _pair_groups(basis)

    n = p.n
    for word in p.terms:
        rep = word
        wadj = word_adjoint(word, n)
        if graded_lex_key(wadj) < graded_lex_key(word):
            rep = wadj
        if rep not in groups:
            raise InfeasibleSystemError(f"coefficient of word {word} cannot be matched at degree {d_basis}")

    size = len(basis)
    m0 = [[_ZERO] * size for _ in range(size)]
    kernel: list[FracMatrix] = []
    constraints: list[GramConstraint] = []
    for rep in sorted(groups, key=graded_lex_key):
        entries = groups[rep]
        value = Fraction(p.coeff(rep))
        constraints.append(GramConstraint(rep, tuple(entries), value))
        # minimize sum of squared matrix entries subject to this equation:
        # the off-diagonal unknowns appear twice in the Frobenius norm
        denom = sum(Fraction(c * c, 1 if i == j else 2) for i, j, c in entries)
        t = value / denom
        for i, j, c in entries:
            u = t * Fraction(c, 1 if i == j else 2)
            m0[i][j] = u
            m0[j][i] = u
        i0, j0, c0 = entries[0]
        for i, j, c in entries[1:]:
            vec = [[_ZERO] * size for _ in range(size)]
            vec[i0][j0] = Fraction(-c)
            vec[j0][i0] = Fraction(-c)
            vec[i][j] = Fraction(c0)
            vec[j][i] = Fraction(c0)
            kernel.append(tuple(tuple(row) for row in vec))

    representative = tuple(tuple(row) for row in m0)
    return GramSpace(basis, representative, tuple(kernel), tuple(constraints), p)


def top_block(space: GramSpace) -> FracMatrix:
    """Lower-right top-degree block of the representative.

    The same block appears in every member of the space, since kernel
    elements vanish there.
    """
    size = len(space.basis)
    t = space.basis.top_size
    rows = space.representative[size - t:]
    return tuple(row[size - t:] for row in rows)


def rank_lower_bound(space: GramSpace) -> int:
    """Exact rank of the top-degree block: a lower bound on the rank of
    every Gram matrix of the target, PSD or not."""
    return exact_rank(top_block(space))


def top_degree_block(p: NcPoly, degree: int) -> FracMatrix:
    """Top-degree block read directly off the coefficients of p.

    Entry (a, b) is the coefficient of (w_a)* w_b for degree-``degree``
    words w_a, w_b; the factorization of a degree-2D word into two degree-D
    halves is unique, so this is the block shared by all Gram matrices of p
    over the degree-``degree`` basis, without materializing the space.
    """
    if p.degree is not None and p.degree > 2 * degree:
        raise ValueError(f"degree-{p.degree} polynomial has no Gram matrix over a degree-{degree} basis")
    n = p.n
    top_words = list(words_of_degree(n, degree))
    index = {w: i for i, w in enumerate(top_words)}
    t = len(top_words)
    block = [[_ZERO] * t for _ in range(t)]
    for word, c in p.terms.items():
        if len(word) != 2 * degree:
            continue
        alpha = word_adjoint(word[:degree], n)
        beta = word[degree:]
        block[index[alpha]][index[beta]] = Fraction(c)
    return tuple(tuple(row) for row in block)


def top_block_rank(p: NcPoly, degree: int) -> int:
    """Certified rank lower bound of p over the degree-``degree`` basis."""
    return exact_rank(top_degree_block(p, degree))


def gram_polynomial(basis: MonomialBasis, matrix) -> NcPoly:
    """Expand sum_{a,b} M[a,b] (w_a)* w_b back into a polynomial."""
    n = basis.n
    terms: dict[Word, Fraction] = {}
    for i, wi in enumerate(basis.words):
        wi_adj = word_adjoint(wi, n)
        row = matrix[i]
        for j, wj in enumerate(basis.words):
            c = row[j]
            if not c:
                continue
            word = wi_adj + wj
            s = terms.get(word, _ZERO) + c
            if s:
                terms[word] = s
            else:
                del terms[word]
    return NcPoly(n, terms)


def fraction_matrix_to_float(matrix) -> np.ndarray:
    return np.array([[float(x) for x in row] for row in matrix])


def _matrix_to_strings(matrix) -> list[list[str]]:
    return [[str(x) for x in row] for row in matrix]


def gram_space_to_json(space: GramSpace) -> dict:
    """JSON-ready dump: word lists plus dense rational matrices as fraction strings."""
    return {
        "n": space.basis.n,
        "degree": space.basis.degree,
        "basis": [list(w) for w in space.basis.words],
        "representative": _matrix_to_strings(space.representative),
        "kernel_basis": [_matrix_to_strings(k) for k in space.kernel_basis],
        "affine_dimension": space.affine_dimension,
        "top_block": _matrix_to_strings(top_block(space)),
        "rank_lower": rank_lower_bound(space),
    }
