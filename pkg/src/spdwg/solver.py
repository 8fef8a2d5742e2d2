"""Direct solution of the saddle-point system and condition estimates."""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sps
import scipy.sparse.linalg as spla

from .projection import WeakFunction


class SolverError(RuntimeError):
    """Raised when the saddle system cannot be solved to tolerance."""


RESIDUAL_TOL = 1e-10
REFINE_TOL = 1e-11
CONSTRAINT_TOL = 1e-9


@dataclass
class SolutionPair:
    """Dual and primal parts of a discrete solution.

    Attributes
    ----------
    rho : WeakFunction
        Dual solution, boundary trace values included (they are zero).
    u : ndarray, shape (NT, dim P_s)
        Per-element coefficients of u_h in the element's scaled monomials.
    diagnostics : dict
        Residual norms and refinement information.
    """

    rho: WeakFunction
    u: np.ndarray
    rho_vector: np.ndarray
    diagnostics: dict = field(default_factory=dict)


def _factorize(A):
    try:
        with np.errstate(all="ignore"):
            lu = spla.splu(A, permc_spec="COLAMD")
    except RuntimeError as exc:  # "Factor is exactly singular"
        raise SolverError(f"saddle matrix is singular: {exc}") from exc
    diag = np.abs(lu.U.diagonal())
    if not np.all(np.isfinite(diag)) or diag.min() <= 1e-14 * diag.max():
        raise SolverError(
            f"saddle matrix is numerically singular (pivot ratio {diag.min() / diag.max():.2e})")
    return lu


def solve_saddle(system, check_constraint=True):
    """Solve [[S, B^T], [B, 0]] [rho; u] = [F; G] by sparse LU.

    One step of iterative refinement is applied when the relative residual
    exceeds 1e-11; a residual above 1e-10 afterwards raises
    :class:`SolverError`, as does a constraint residual
    ``|B rho| > 1e-9 (1 + |rho|)``.
    """
    A = system.matrix()
    b = system.rhs()
    lu = _factorize(A)
    x = lu.solve(b)
    bnorm = max(np.linalg.norm(b), np.finfo(float).tiny)
    res = np.linalg.norm(A @ x - b) / bnorm if np.any(b) else np.linalg.norm(A @ x)
    refined = False
    if res > REFINE_TOL:
        x = x + lu.solve(b - A @ x)
        res = np.linalg.norm(A @ x - b) / bnorm if np.any(b) else np.linalg.norm(A @ x)
        refined = True
    if not np.all(np.isfinite(x)) or res > RESIDUAL_TOL:
        raise SolverError(f"relative residual {res:.3e} exceeds {RESIDUAL_TOL:g}")
    nd = system.n_dual
    rho_free, u = x[:nd], x[nd:]
    constraint = float(np.linalg.norm(system.B @ rho_free))
    rho_norm = float(np.linalg.norm(rho_free))
    if check_constraint and constraint > CONSTRAINT_TOL * (1.0 + rho_norm):
        raise SolverError(f"constraint residual |B rho| = {constraint:.3e} too large")
    dm = system.dofmap
    rho_full = system.expand_dual(rho_free)
    rho = WeakFunction.from_vector(rho_full, system.mesh, dm.k) if system.mesh is not None else None
    diagnostics = {
        "relative_residual": float(res),
        "refined": refined,
        "constraint_residual": constraint,
        "rho_norm": rho_norm,
        "n_unknowns": int(A.shape[0]),
        "nnz_factor": int(lu.L.nnz + lu.U.nnz),
    }
    return SolutionPair(rho, u.reshape(dm.n_elements, dm.ns), rho_full, diagnostics)


def _power(apply, n, iters, tol, seed):
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    lam = 0.0
    converged = False
    for _ in range(iters):
        w = apply(v)
        new = np.linalg.norm(w)
        if new == 0:
            return 0.0, True
        v = w / new
        if abs(new - lam) <= tol * new:
            lam, converged = new, True
            break
        lam = new
    return lam, converged


def estimate_condition(system_or_matrix, iters=500, tol=1e-8, seed=0, dense_limit=1500):
    """Estimate the 2-norm condition number of the saddle matrix.

    Small matrices use dense singular values.  Larger ones use power
    iteration on A^T A and on its inverse (through the LU factors).
    Returns ``(estimate, exact_or_converged)``; an unconverged power
    iteration gives a lower bound.
    """
    A = system_or_matrix.matrix() if hasattr(system_or_matrix, "matrix") else system_or_matrix
    A = sps.csc_matrix(A, dtype=float)
    n = A.shape[0]
    if n <= dense_limit:
        sv = np.linalg.svd(A.toarray(), compute_uv=False)
        if sv[-1] == 0:
            return np.inf, True
        return float(sv[0] / sv[-1]), True
    lu = _factorize(A)
    At = A.T.tocsc()
    big, ok1 = _power(lambda v: At @ (A @ v), n, iters, tol, seed)
    inv, ok2 = _power(lambda v: lu.solve(lu.solve(v, trans="T")), n, iters, tol, seed + 1)
    return float(np.sqrt(big * inv)), ok1 and ok2
