"""Dense primal-dual interior-point solver for small semidefinite programs.

Solves   min <C, X>   s.t.   <A_i, X> = b_i  (i = 1..p),   X PSD

by infeasible-start path following with Nesterov-Todd scaling and
Mehrotra-style adaptive centering.  Everything is dense numpy, aimed at
matrix sides up to a couple hundred.  Runs are deterministic: fixed
starting point, no randomized pivoting.

Primal infeasibility is reported through an improving-ray certificate: if
some multiplier vector y has b.y > 0 while sum_i y_i A_i is negative
semidefinite (numerically), no PSD matrix can satisfy the constraints.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

_STEP_FRACTION = 0.98
_CENTERING = 0.5
_REL_GAP_TOL = 1e-10
_RAY_TOL = 1e-9
_MIN_STEP = 1e-13


class SdpStatus(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    MAX_ITERATIONS = "max_iterations"


@dataclass(frozen=True)
class SdpProblem:
    """min <objective, X> subject to <A_i, X> = b_i and X PSD."""

    objective: np.ndarray
    constraints: tuple[tuple[np.ndarray, float], ...]

    @classmethod
    def of(cls, objective, constraints) -> "SdpProblem":
        c = _symmetrize_checked(np.asarray(objective, dtype=float), "objective")
        m = c.shape[0]
        pairs = []
        for idx, (a, b) in enumerate(constraints):
            a = _symmetrize_checked(np.asarray(a, dtype=float), f"constraint {idx}")
            if a.shape != (m, m):
                raise ValueError(f"constraint {idx} has shape {a.shape}, expected {(m, m)}")
            pairs.append((a, float(b)))
        return cls(c, tuple(pairs))

    @property
    def dimension(self) -> int:
        return self.objective.shape[0]


@dataclass
class SdpSolution:
    X: np.ndarray
    y: np.ndarray
    S: np.ndarray
    status: SdpStatus
    objective: float
    dual_objective: float
    primal_residual: float
    dual_residual: float
    duality_gap: float
    min_eigenvalue: float
    iterations: int


def _symmetrize_checked(a: np.ndarray, what: str) -> np.ndarray:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{what} must be a square matrix")
    skew = np.abs(a - a.T).max() if a.size else 0.0
    if skew > 1e-9 * (1.0 + np.abs(a).max()):
        raise ValueError(f"{what} is not symmetric")
    return 0.5 * (a + a.T)


def _chol(X: np.ndarray) -> np.ndarray:
    """Cholesky with a deterministic eigenvalue-clip fallback for near-PSD input."""
    try:
        return np.linalg.cholesky(X)
    except np.linalg.LinAlgError:
        w, u = np.linalg.eigh(X)
        floor = 1e-14 * max(1.0, w.max() if w.size else 1.0)
        w = np.maximum(w, floor)
        return np.linalg.cholesky((u * w) @ u.T)


def _solve_spd(m: np.ndarray, h: np.ndarray) -> np.ndarray:
    if m.shape[0] == 0:
        return np.zeros(0)
    jitter = 0.0
    base = np.trace(m) / m.shape[0] if m.shape[0] else 1.0
    for attempt in range(6):
        try:
            l = np.linalg.cholesky(m + jitter * np.eye(m.shape[0]))
            z = np.linalg.solve(l, h)
            return np.linalg.solve(l.T, z)
        except np.linalg.LinAlgError:
            jitter = max(1e-14 * base, jitter * 100.0) if jitter else 1e-14 * max(base, 1.0)
    return np.linalg.lstsq(m, h, rcond=None)[0]


def _nt_scaling(X: np.ndarray, S: np.ndarray) -> np.ndarray:
    """The scaling matrix W with W S W = X (and W symmetric positive definite)."""
    lx = _chol(X)
    ls = _chol(S)
    u, sig, vt = np.linalg.svd(ls.T @ lx)
    g = lx @ vt.T * (sig ** -0.5)
    w = g @ g.T
    return 0.5 * (w + w.T)


def _psd_line_step(X: np.ndarray, D: np.ndarray) -> float:
    """sup{alpha >= 0 : X + alpha D PSD} for X positive definite (inf if unbounded)."""
    l = _chol(X)
    t = np.linalg.solve(l, D)
    g = np.linalg.solve(l, t.T)
    lmin = np.linalg.eigvalsh(0.5 * (g + g.T)).min()
    if lmin >= 0.0:
        return np.inf
    return -1.0 / lmin


def max_step_to_boundary(X: np.ndarray, N: np.ndarray, psd_tol: float = 1e-9) -> float:
    """Largest t >= 0 with X + t N PSD, judged on the range of X.

    X is eigendecomposed and directions are restricted to eigenvectors with
    eigenvalues above psd_tol (relative); if N restricted to that range is
    PSD the step is unbounded and inf is returned.
    """
    X = np.asarray(X, dtype=float)
    N = np.asarray(N, dtype=float)
    w, u = np.linalg.eigh(0.5 * (X + X.T))
    scale = max(1.0, w.max() if w.size else 0.0)
    keep = w > psd_tol * scale
    if not keep.any():
        return np.inf
    ur = u[:, keep] * (w[keep] ** -0.5)
    g = ur.T @ N @ ur
    lmin = np.linalg.eigvalsh(0.5 * (g + g.T)).min()
    if lmin >= -psd_tol:
        return np.inf
    return -1.0 / lmin


def solve(prob: SdpProblem, feas_tol: float = 1e-9, psd_tol: float = 1e-9, max_iter: int = 200) -> SdpSolution:
    """Run the interior-point iteration until the tolerance contract holds.

    Returns a solution whose status is OPTIMAL only when the primal residual
    is at most feas_tol and the smallest eigenvalue of X is above -psd_tol;
    INFEASIBLE carries the final iterate after a ray certificate is found.
    On MAX_ITERATIONS the best iterate seen is returned, which for problems
    whose feasible set has empty interior may still be accurate to ~1e-7.

    The iteration is deliberately conservative: a fixed centering weight of
    one half, no predictor step.  Gram feasible sets here routinely have
    empty interior, and aggressive adaptive steps push the iterate against
    such degenerate faces and stall; plain centering keeps the directions
    well conditioned at the cost of a few dozen extra (cheap) iterations.
    """
    m = prob.dimension
    a_list = [a for a, _ in prob.constraints]
    b = np.array([v for _, v in prob.constraints])
    c = prob.objective
    p = len(a_list)
    avec = np.stack([a.ravel() for a in a_list]) if p else np.zeros((0, m * m))

    def op(mat: np.ndarray) -> np.ndarray:
        return avec @ mat.ravel()

    def adjoint(y: np.ndarray) -> np.ndarray:
        if not p:
            return np.zeros((m, m))
        return (avec.T @ y).reshape(m, m)

    # deterministic "big" start scaled to the data, invariant under joint
    # rescaling of (A_i, b_i)
    if p:
        norms = np.array([np.linalg.norm(a) for a in a_list])
        xscale = max(1.0, np.sqrt(m), (np.abs(b) / (1.0 + norms)).max() * np.sqrt(m))
    else:
        xscale = max(1.0, np.sqrt(m))
    sscale = max(1.0, np.sqrt(m), np.linalg.norm(c) / np.sqrt(m))
    X = xscale * np.eye(m)
    S = sscale * np.eye(m)
    y = np.zeros(p)

    c_scale = 1.0 + (np.abs(c).max() if c.size else 0.0)
    status = SdpStatus.MAX_ITERATIONS
    iterations = 0

    def stats(X, y, S):
        rp = b - op(X)
        rd = c - S - adjoint(y)
        pobj = float(np.vdot(c, X))
        dobj = float(b @ y) if p else 0.0
        gap = float(np.vdot(X, S))
        pinf = float(np.abs(rp).max()) if p else 0.0
        dinf = float(np.abs(rd).max())
        return rp, rd, pobj, dobj, gap, pinf, dinf

    def score(pinf, dinf, gap, pobj, dobj):
        return max(pinf, dinf / c_scale, gap / max(1.0, abs(pobj), abs(dobj)))

    best = (X, y, S)
    best_score = np.inf

    for it in range(1, max_iter + 1):
        iterations = it
        rp, rd, pobj, dobj, gap, pinf, dinf = stats(X, y, S)

        current = score(pinf, dinf, gap, pobj, dobj)
        if current < best_score:
            best, best_score = (X, y, S), current

        if (
            pinf <= feas_tol
            and dinf <= max(feas_tol, 1e-9) * c_scale
            and gap <= _REL_GAP_TOL * max(1.0, abs(pobj), abs(dobj))
        ):
            status = SdpStatus.OPTIMAL
            best = (X, y, S)
            break

        if p:
            by = float(b @ y)
            if by > 0.0:
                z = adjoint(y / by)
                znorm = np.linalg.norm(z)
                if np.linalg.eigvalsh(z).max() <= _RAY_TOL * max(1.0, znorm):
                    status = SdpStatus.INFEASIBLE
                    best = (X, y, S)
                    break

        mu = gap / m
        w = _nt_scaling(X, S)
        ls = _chol(S)
        s_inv = np.linalg.solve(ls.T, np.linalg.solve(ls, np.eye(m)))
        s_inv = 0.5 * (s_inv + s_inv.T)

        def direction(rc: np.ndarray):
            tvec = np.stack([(w @ a @ w).ravel() for a in a_list]) if p else np.zeros((0, m * m))
            schur = avec @ tvec.T
            h = avec @ (w @ rd @ w).ravel() - avec @ rc.ravel() + rp
            dy = _solve_spd(0.5 * (schur + schur.T), h)
            ds = rd - adjoint(dy)
            dx = rc - w @ ds @ w
            return 0.5 * (dx + dx.T), dy, 0.5 * (ds + ds.T)

        rc = _CENTERING * mu * s_inv - X
        dx, dy, ds = direction(rc)
        ap = min(1.0, _STEP_FRACTION * _psd_line_step(X, dx))
        ad = min(1.0, _STEP_FRACTION * _psd_line_step(S, ds))
        if max(ap, ad) < _MIN_STEP:
            break

        X = 0.5 * ((X + ap * dx) + (X + ap * dx).T)
        y = y + ad * dy
        S = 0.5 * ((S + ad * ds) + (S + ad * ds).T)

    X, y, S = best
    rp, rd, pobj, dobj, gap, pinf, dinf = stats(X, y, S)
    return SdpSolution(
        X=X,
        y=y,
        S=S,
        status=status,
        objective=pobj,
        dual_objective=dobj,
        primal_residual=pinf,
        dual_residual=dinf,
        duality_gap=gap,
        min_eigenvalue=float(np.linalg.eigvalsh(X).min()),
        iterations=iterations,
    )


def problem_to_json(prob: SdpProblem) -> dict:
    return {
        "dimension": prob.dimension,
        "objective": prob.objective.tolist(),
        "constraints": [{"matrix": a.tolist(), "value": b} for a, b in prob.constraints],
    }


def solution_to_json(sol: SdpSolution) -> dict:
    return {
        "status": sol.status.value,
        "X": sol.X.tolist(),
        "y": sol.y.tolist(),
        "objective": sol.objective,
        "dual_objective": sol.dual_objective,
        "primal_residual": sol.primal_residual,
        "dual_residual": sol.dual_residual,
        "duality_gap": sol.duality_gap,
        "min_eigenvalue": sol.min_eigenvalue,
        "iterations": sol.iterations,
    }
