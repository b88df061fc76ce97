"""Sum-of-squares decomposition via the trace heuristic.

Pipeline: build the Gram space of a symmetric polynomial, minimize the
trace over its PSD slice with the interior-point solver, walk along kernel
directions to the PSD boundary to shed rank, then factor the final Gram
matrix and read one square off each retained eigenvector.

Before calling the solver, diagonal entries that the constraints pin to
zero are eliminated exactly: a PSD matrix with a zero diagonal entry has a
zero row and column, so those unknowns drop out of every equation.  The
elimination runs to a fixed point in rational arithmetic and occasionally
proves on its own that no PSD Gram matrix exists.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import sdp
from .gram import GramSpace, build_gram_space, fraction_matrix_to_float, rank_lower_bound
from .ncpoly import NcPoly, Word, graded_lex_key

RANK_TOL = 1e-7
# residual level below which a non-converged interior-point iterate is still
# usable: the exact affine re-projection removes the residual afterwards and
# the reconstruction check gates the final answer
_USABLE_RESIDUAL = 1e-7
_REWEIGHT_ROUNDS = 5


class SosInfeasibleError(Exception):
    """No PSD Gram matrix exists: the polynomial is (numerically) not a sum of squares."""

    def __init__(self, message: str, rank_lower: int):
        super().__init__(message)
        self.rank_lower = rank_lower


class SosSolverError(RuntimeError):
    """The semidefinite solver failed to reach its tolerance contract."""


@dataclass(frozen=True)
class RankCertificate:
    """Exact lower bound from the top-degree block vs. the PSD rank achieved."""

    lower: int
    upper: int | None

    @property
    def certified(self) -> bool:
        return self.upper is not None and self.lower == self.upper


@dataclass
class SosDecomposition:
    squares: list[NcPoly]
    gram: np.ndarray
    space: GramSpace
    certificate: RankCertificate
    reconstruction_error: float
    # solver artifacts, kept for debugging dumps; None for the zero polynomial
    sdp_problem: sdp.SdpProblem | None = None
    sdp_solution: sdp.SdpSolution | None = None


class DecompositionCheck(NamedTuple):
    coefficient_error: float
    positivity_floor: float


def numerical_rank(X: np.ndarray, rank_tol: float = RANK_TOL) -> int:
    """Eigenvalue count above rank_tol relative to the largest eigenvalue."""
    if X.size == 0:
        return 0
    w = np.linalg.eigvalsh(0.5 * (X + X.T))
    top = w.max()
    if top <= 0.0:
        return 0
    return int((w > rank_tol * top).sum())


class _StructurallyInfeasible(Exception):
    pass


def _forced_zero_indices(space: GramSpace) -> set[int]:
    """Basis indices whose diagonal Gram entry every PSD member must set to zero.

    An equation whose surviving unknowns are all diagonal forces them all to
    zero (value 0) or is unsatisfiable (value < 0, or no unknowns left with a
    nonzero value).  Killing an index deletes its row and column from every
    other equation, so iterate to a fixed point.
    """
    dead: set[int] = set()
    changed = True
    while changed:
        changed = False
        for con in space.constraints:
            live = [(i, j) for i, j, _ in con.entries if i not in dead and j not in dead]
            if not live:
                if con.value != 0:
                    raise _StructurallyInfeasible(f"equation for word {con.word} has no unknowns left")
                continue
            if all(i == j for i, j in live):
                if con.value < 0:
                    raise _StructurallyInfeasible(f"diagonal sum for word {con.word} must be negative")
                if con.value == 0:
                    for i, _ in live:
                        dead.add(i)
                    changed = True
    return dead


def _reduced_sdp(space: GramSpace, active: list[int]) -> sdp.SdpProblem:
    pos = {orig: k for k, orig in enumerate(active)}
    size = len(active)
    constraints = []
    for con in space.constraints:
        a = np.zeros((size, size))
        touched = False
        for i, j, count in con.entries:
            if i in pos and j in pos:
                touched = True
                if i == j:
                    a[pos[i], pos[i]] += count
                else:
                    a[pos[i], pos[j]] += count / 2.0
                    a[pos[j], pos[i]] += count / 2.0
        if touched:
            constraints.append((a, float(con.value)))
    return sdp.SdpProblem.of(np.eye(size), constraints)


def project_to_affine(X: np.ndarray, space: GramSpace) -> np.ndarray:
    """Minimum-Frobenius-norm correction of X back onto the Gram affine space.

    The coefficient equations have disjoint unknowns, so the projection
    decouples equation by equation and restores feasibility to machine
    precision.  The perturbation is on the order of the residual.
    """
    X = X.copy()
    for con in space.constraints:
        r = -float(con.value)
        den = 0.0
        for i, j, c in con.entries:
            r += c * X[i, j]
            den += c * c / (1.0 if i == j else 2.0)
        if r == 0.0:
            continue
        t = r / den
        for i, j, c in con.entries:
            u = t * c / (1.0 if i == j else 2.0)
            X[i, j] -= u
            if i != j:
                X[j, i] -= u
    return X


def reduce_rank_on_boundary(
    X: np.ndarray,
    space: GramSpace,
    rank_tol: float = RANK_TOL,
    psd_tol: float = 1e-9,
) -> np.ndarray:
    """Walk along kernel directions to the PSD boundary while the rank drops.

    Each kernel direction is tried with both signs; a step is taken only if
    it stays PSD within psd_tol and strictly lowers the numerical rank.
    Stops at a local minimum of the rank.  A no-op when the kernel is empty.
    """
    X = 0.5 * (X + X.T)
    dirs = [fraction_matrix_to_float(k) for k in space.kernel_basis]
    if not dirs:
        return X
    current = numerical_rank(X, rank_tol)
    improved = True
    while improved and current > 0:
        improved = False
        for k in dirs:
            for direction in (k, -k):
                t = sdp.max_step_to_boundary(X, direction, psd_tol)
                if not np.isfinite(t) or t <= 0.0:
                    continue
                cand = X + t * direction
                scale = max(1.0, np.abs(cand).max())
                if np.linalg.eigvalsh(cand).min() < -psd_tol * scale:
                    continue
                r = numerical_rank(cand, rank_tol)
                if r < current:
                    X = 0.5 * (cand + cand.T)
                    current = r
                    improved = True
    return X


def _grid_refine(
    X: np.ndarray,
    space: GramSpace,
    target_rank: int,
    rank_tol: float,
    psd_tol: float,
    rounds: int = 20,
) -> np.ndarray:
    """Deterministic halving search over small kernels when a rank gap remains."""
    dirs = [fraction_matrix_to_float(k) for k in space.kernel_basis]
    best = X
    best_rank = numerical_rank(X, rank_tol)
    step = max(1.0, np.abs(X).max())
    for _ in range(rounds):
        if best_rank <= target_rank:
            break
        for k in dirs:
            for sign in (1.0, -1.0):
                cand = best + sign * step * k
                scale = max(1.0, np.abs(cand).max())
                if np.linalg.eigvalsh(cand).min() < -psd_tol * scale:
                    continue
                r = numerical_rank(cand, rank_tol)
                if r < best_rank:
                    best = 0.5 * (cand + cand.T)
                    best_rank = r
        step *= 0.5
    return best


def _constraint_residual(G: np.ndarray, space: GramSpace) -> np.ndarray:
    XX = G.T @ G
    return np.array(
        [sum(c * XX[i, j] for i, j, c in con.entries) - float(con.value) for con in space.constraints]
    )


def _lm_fit(G: np.ndarray, space: GramSpace, iters: int = 120) -> tuple[np.ndarray, float]:
    rank, size = G.shape
    f = _constraint_residual(G, space)
    lam = 1e-8
    for _ in range(iters):
        norm_f = np.linalg.norm(f)
        if np.linalg.norm(f, np.inf) < 1e-12:
            break
        jac = np.zeros((len(space.constraints), rank * size))
        for ci, con in enumerate(space.constraints):
            for i, j, c in con.entries:
                for r in range(rank):
                    if i == j:
                        jac[ci, r * size + i] += 2.0 * c * G[r, i]
                    else:
                        jac[ci, r * size + i] += c * G[r, j]
                        jac[ci, r * size + j] += c * G[r, i]
        jtj = jac.T @ jac
        jtf = jac.T @ f
        for _ in range(30):
            try:
                step = np.linalg.solve(jtj + lam * np.eye(jtj.shape[0]), -jtf)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            cand = G + step.reshape(rank, size)
            f_cand = _constraint_residual(cand, space)
            if np.linalg.norm(f_cand) < norm_f:
                G, f = cand, f_cand
                lam = max(lam * 0.3, 1e-12)
                break
            lam *= 10.0
        else:
            break
    return G, float(np.linalg.norm(f, np.inf))


def _factor_polish(X: np.ndarray, space: GramSpace, rank: int, restarts: int = 6) -> tuple[np.ndarray, float]:
    """Levenberg-Marquardt fit of a rank-``rank`` factor G with V*(G^T G)V = p.

    Initialized from the leading eigenpairs of X, plus a few deterministic
    perturbed restarts: the plain initialization regularly sits on a saddle
    of the residual.  The factored form is PSD with the target rank by
    construction, so a small residual directly gives a low-rank Gram matrix
    that the convex phases could not reach.  Returns the best factor and its
    max constraint residual.
    """
    w, u = np.linalg.eigh(X)
    order = np.argsort(w)[::-1][:rank]
    base = (u[:, order] * np.sqrt(np.clip(w[order], 0.0, None))).T
    scale = max(np.abs(base).max(), 1e-6)
    best: tuple[np.ndarray, float] | None = None
    for attempt in range(restarts):
        if attempt == 0:
            init = base
        else:
            rng = np.random.default_rng(attempt)
            init = base + 0.05 * attempt * scale * rng.standard_normal(base.shape)
        G, res = _lm_fit(init, space)
        if best is None or res < best[1]:
            best = (G, res)
        if best[1] <= 1e-12:
            break
    return best


def _extract_squares(X: np.ndarray, space: GramSpace, rank_tol: float) -> list[NcPoly]:
    n = space.basis.n
    words = space.basis.words
    vals, vecs = np.linalg.eigh(0.5 * (X + X.T))
    top = vals.max() if vals.size else 0.0
    squares: list[NcPoly] = []
    if top <= 0.0:
        return squares
    for lam, vec in zip(vals, vecs.T):
        if lam <= rank_tol * top:
            continue
        coeffs = np.sqrt(lam) * vec
        terms: dict[Word, float] = {w: float(c) for w, c in zip(words, coeffs) if c != 0.0}
        if not terms:
            continue
        peak = max(abs(c) for c in terms.values())
        lead = max((w for w, c in terms.items() if abs(c) > 1e-12 * peak), key=graded_lex_key)
        if terms[lead] < 0.0:
            terms = {w: -c for w, c in terms.items()}
        squares.append(NcPoly(n, terms))
    squares.sort(key=lambda f: (graded_lex_key(f.leading_word()), f.sorted_terms()))
    return squares


def reconstruction_error(p: NcPoly, squares: list[NcPoly]) -> float:
    """Largest coefficient deviation of sum f*f from p."""
    total = NcPoly.zero(p.n)
    for f in squares:
        total = total + f.adjoint() * f
    words = set(total.terms) | set(p.terms)
    if not words:
        return 0.0
    return max(abs(float(total.coeff(w)) - float(p.coeff(w))) for w in words)


def verify_decomposition(p: NcPoly, dec: SosDecomposition, samples: int = 20, seed: int = 0) -> DecompositionCheck:
    """Re-expand the squares against p and sample matrix positivity.

    Returns the worst coefficient deviation together with the smallest
    eigenvalue of p evaluated at ``samples`` random tuples of sizes 1..3.
    """
    err = reconstruction_error(p, dec.squares)
    rng = np.random.default_rng(seed)
    floor = np.inf
    for i in range(samples):
        k = 1 + i % 3
        mats = [rng.uniform(-1.0, 1.0, size=(k, k)) for _ in range(p.n)]
        value = p.evaluate(mats)
        floor = min(floor, float(np.linalg.eigvalsh(0.5 * (value + value.T)).min()))
    return DecompositionCheck(err, floor)


def sos_decompose(
    p: NcPoly,
    degree: int | None = None,
    feas_tol: float = 1e-9,
    psd_tol: float = 1e-9,
    rank_tol: float = RANK_TOL,
    max_iter: int = 200,
) -> SosDecomposition:
    """Decompose a symmetric polynomial as a sum of squares, or prove it is not one.

    Raises SosInfeasibleError when no PSD Gram matrix exists and
    SosSolverError when the interior-point iteration stalls.  The returned
    certificate pairs the exact top-block lower bound with the rank achieved;
    when the two agree the square count is minimal.
    """
    space = build_gram_space(p, degree)
    size = len(space.basis)
    lower = rank_lower_bound(space)

    if p.is_zero():
        return SosDecomposition([], np.zeros((size, size)), space, RankCertificate(0, 0), 0.0)

    try:
        dead = _forced_zero_indices(space)
    except _StructurallyInfeasible as exc:
        raise SosInfeasibleError(f"no PSD Gram matrix exists: {exc}", lower) from exc

    active = [i for i in range(size) if i not in dead]
    if not active:
        raise SosInfeasibleError("no PSD Gram matrix exists: every diagonal entry is forced to zero", lower)

    problem = _reduced_sdp(space, active)
    solution = sdp.solve(problem, feas_tol=feas_tol, psd_tol=psd_tol, max_iter=max_iter)
    if solution.status is sdp.SdpStatus.INFEASIBLE:
        raise SosInfeasibleError("the semidefinite program is primal infeasible", lower)
    usable = solution.status is sdp.SdpStatus.OPTIMAL or solution.primal_residual <= _USABLE_RESIDUAL
    if not usable:
        raise SosSolverError(
            f"interior-point iteration stopped after {solution.iterations} iterations "
            f"(residual {solution.primal_residual:.2e}, gap {solution.duality_gap:.2e})"
        )

    def embed(reduced: np.ndarray) -> np.ndarray:
        full = np.zeros((size, size))
        full[np.ix_(active, active)] = reduced
        full = project_to_affine(full, space)
        return reduce_rank_on_boundary(full, space, rank_tol, psd_tol)

    X = embed(solution.X)
    upper = numerical_rank(X, rank_tol)

    # trace minimization lands in the relative interior of its optimal face;
    # when that face still has surplus rank, a few log-det reweighting rounds
    # (trace of delta*(X+delta I)^{-1} X as the new objective) pull the
    # iterate toward an extreme low-rank point
    reduced = solution.X
    for round_index in range(_REWEIGHT_ROUNDS):
        if upper <= lower:
            break
        top = float(np.linalg.eigvalsh(reduced).max())
        delta = max(top, 1e-8) * 10.0 ** (-round_index)
        weight = np.linalg.inv(reduced + delta * np.eye(len(active)))
        weight = 0.5 * (weight + weight.T) * delta
        reweighted = sdp.SdpProblem.of(weight, problem.constraints)
        trial = sdp.solve(reweighted, feas_tol=feas_tol, psd_tol=psd_tol, max_iter=max_iter)
        if trial.status is not sdp.SdpStatus.OPTIMAL and trial.primal_residual > _USABLE_RESIDUAL:
            continue
        reduced = trial.X
        candidate = embed(reduced)
        r = numerical_rank(candidate, rank_tol)
        if r < upper:
            X = candidate
            upper = r

    if upper > lower and 0 < space.affine_dimension <= 3:
        X = _grid_refine(X, space, lower, rank_tol, psd_tol)
        upper = numerical_rank(X, rank_tol)

    # when a gap survives the convex phases, look for a lower-rank point on a
    # different face by fitting the factor directly at each candidate rank
    if upper > lower:
        for target in range(lower, upper):
            if target == 0:
                continue
            factor, res = _factor_polish(X, space, target)
            if res <= _USABLE_RESIDUAL:
                X = factor.T @ factor
                upper = numerical_rank(X, rank_tol)
                break

    squares = _extract_squares(X, space, rank_tol)
    err = reconstruction_error(p, squares)
    if err > 1e-6:
        raise SosSolverError(f"reconstruction error {err:.2e} exceeds 1e-6; solution rejected")
    return SosDecomposition(
        squares, X, space, RankCertificate(lower, len(squares)), err, problem, solution
    )
