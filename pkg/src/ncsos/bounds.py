"""Certified rank lower bounds for structured polynomial families.

The families are built around the degree-2d polynomial that sums the
adjoint-square of every degree-d monomial.  For two-sided multiples q*Sq
(and odd powers of S in particular) the exact top-block rank is computed
and compared against the (2n)^d target; one-sided products q*qS are only
symmetric when q*q commutes with S, so the commutation check runs first
and failures come back as a first-class NotApplicable result with the
leading commutator term as a witness.

All verification here is floating-point free: polynomials are expanded in
rational arithmetic and ranks come from exact elimination.  The
semidefinite machinery is deliberately not involved.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .gram import top_block_rank
from .ncpoly import NcPoly, Word, graded_lex_key, word_adjoint, words_of_degree

MAX_S_TERMS = 4096
MAX_BASIS = 1000


class SizeCapError(ValueError):
    """The requested instance exceeds the configured size cap."""


@dataclass(frozen=True)
class SPolynomial:
    """Sum of (X^a)* X^a over all (2n)^d degree-d monomials a."""

    n: int
    d: int
    poly: NcPoly


@dataclass(frozen=True)
class BoundReport:
    """Outcome of one certified-bound check: lower >= (2n)^d must hold."""

    family: str
    n: int
    d: int
    q: NcPoly
    basis_degree: int
    lower: int
    bound: int

    @property
    def satisfied(self) -> bool:
        return self.lower >= self.bound


@dataclass(frozen=True)
class NotApplicable:
    """q*q does not commute with the square-sum, so q*qS is not symmetric.

    ``witness_word``/``witness_coeff`` give the leading term of the nonzero
    commutator q*q S - S q*q.
    """

    family: str
    n: int
    d: int
    q: NcPoly
    witness_word: Word
    witness_coeff: Fraction


def make_s(n: int, d: int, max_terms: int = MAX_S_TERMS) -> SPolynomial:
    """Expand the sum of adjoint-squares of all degree-d monomials."""
    if n < 1 or d < 1:
        raise ValueError("need n >= 1 and d >= 1")
    count = (2 * n) ** d
    if count > max_terms:
        raise SizeCapError(f"(2n)^d = {count} exceeds the {max_terms}-term cap")
    terms = {word_adjoint(alpha, n) + alpha: Fraction(1) for alpha in words_of_degree(n, d)}
    return SPolynomial(n, d, NcPoly(n, terms))


def _check_basis_cap(n: int, degree: int, max_basis: int) -> None:
    size = sum((2 * n) ** k for k in range(degree + 1))
    if size > max_basis:
        raise SizeCapError(
            f"basis of degree {degree} has {size} monomials, over the {max_basis} cap"
        )


def verify_qsq_bound(q: NcPoly, d: int, max_basis: int = MAX_BASIS) -> BoundReport:
    """Certified lower bound for q*Sq over the degree d + deg(q) basis."""
    if q.is_zero():
        raise ValueError("q must be nonzero")
    n = q.n
    s = make_s(n, d)
    basis_degree = d + (q.degree or 0)
    _check_basis_cap(n, basis_degree, max_basis)
    p = q.adjoint() * s.poly * q
    lower = top_block_rank(p, basis_degree)
    return BoundReport("qsq", n, d, q, basis_degree, lower, (2 * n) ** d)


def verify_qqs_bound(q: NcPoly, d: int, max_basis: int = MAX_BASIS) -> BoundReport | NotApplicable:
    """Certified lower bound for q*qS, after checking the symmetry hypothesis.

    q*qS is symmetric exactly when q*q and the square-sum commute; when they
    do not, the leading commutator term is returned as evidence instead of a
    report.
    """
    if q.is_zero():
        raise ValueError("q must be nonzero")
    n = q.n
    s = make_s(n, d)
    qq = q.adjoint() * q
    commutator = qq * s.poly - s.poly * qq
    if not commutator.is_zero():
        lead = commutator.leading_word()
        return NotApplicable("qqs", n, d, q, lead, Fraction(commutator.coeff(lead)))
    basis_degree = d + (q.degree or 0)
    _check_basis_cap(n, basis_degree, max_basis)
    p = qq * s.poly
    lower = top_block_rank(p, basis_degree)
    return BoundReport("qqs", n, d, q, basis_degree, lower, (2 * n) ** d)


def verify_power_bound(k: int, n: int, d: int, max_basis: int = MAX_BASIS) -> BoundReport:
    """Certified lower bound for the k-th power of the square-sum, k odd.

    Writes the power as q*Sq with q the ((k-1)/2)-th power and reuses the
    two-sided check; the basis degree comes out as k*d.
    """
    if k < 1 or k % 2 == 0:
        raise ValueError("k must be an odd positive integer")
    s = make_s(n, d)
    q = s.poly ** ((k - 1) // 2)
    report = verify_qsq_bound(q, d, max_basis)
    return BoundReport("power", n, d, q, report.basis_degree, report.lower, report.bound)


def random_ncpoly(
    rng: random.Random,
    n: int,
    max_degree: int,
    max_terms: int = 4,
    coeff_bound: int = 3,
) -> NcPoly:
    """A nonzero polynomial with small integer coefficients, for randomized checks."""
    while True:
        terms: dict[Word, Fraction] = {}
        for _ in range(rng.randint(1, max_terms)):
            deg = rng.randint(0, max_degree)
            word = tuple(rng.randint(1, 2 * n) for _ in range(deg))
            coeff = rng.randint(-coeff_bound, coeff_bound)
            if coeff:
                c = terms.get(word, Fraction(0)) + coeff
                if c:
                    terms[word] = c
                else:
                    terms.pop(word, None)
        if terms:
            return NcPoly(n, terms)
