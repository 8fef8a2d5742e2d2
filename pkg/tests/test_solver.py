from types import SimpleNamespace

import numpy as np
import pytest
import scipy.sparse as sps

from spdwg.analysis import solve_problem
from spdwg.mesh import build_mesh
from spdwg.assembly import assemble_system
from spdwg.problems import get_problem
from spdwg.solver import CONSTRAINT_TOL, SolverError, estimate_condition, solve_saddle


def test_condition_examples():
    assert estimate_condition(sps.identity(5))[0] == pytest.approx(1.0)
    assert estimate_condition(sps.diags([1.0, 10.0]))[0] == pytest.approx(10.0)


def test_power_iteration_branch_matches_dense(rng):
    A = sps.random(60, 60, density=0.2, random_state=1) + 5 * sps.identity(60)
    exact, _ = estimate_condition(A)
    est, converged = estimate_condition(A, dense_limit=0, iters=5000, tol=1e-12)
    assert converged
    assert est == pytest.approx(exact, rel=1e-4)


def test_singular_matrix_raises():
    fake = SimpleNamespace(matrix=lambda: sps.csc_matrix(np.zeros((3, 3))),
                           rhs=lambda: np.ones(3))
    with pytest.raises(SolverError):
        solve_saddle(fake)


def test_diagnostics_and_constraint():
    mesh, system, sol = solve_problem(get_problem("t3"), 1)
    d = sol.diagnostics
    assert d["relative_residual"] < 1e-10
    assert d["constraint_residual"] <= CONSTRAINT_TOL * (1 + d["rho_norm"])
    assert d["n_unknowns"] == system.n_dual + system.n_primal
    assert sol.u.shape == (mesh.n_elements, 3)
    # boundary traces of the dual variable are zero
    assert not np.any(sol.rho.vb[mesh.boundary])


@pytest.mark.parametrize("gammas", [(1, 1, 1), (0, 1, 0), (0, 0, 1)])
def test_homogeneous_problem_has_trivial_solution(gammas):
    problem = get_problem("t3")
    mesh = build_mesh("omega1", "tri", 1)
    system = assemble_system(mesh, problem, 2, 1, gammas)
    system.F[:] = 0
    sol = solve_saddle(system)
    assert np.linalg.norm(sol.u) + np.linalg.norm(sol.rho_vector) < 1e-12
