"""Simplified primal-dual weak Galerkin solver for Fokker-Planck type equations.

Typical use::

    from spdwg import SPDWGSolver, build_mesh, get_problem
    problem = get_problem("t3")
    mesh = build_mesh(problem.domain, problem.family, 2)
    est = SPDWGSolver(k=2, s=1).fit(mesh, problem)
    est.errors()
"""

__version__ = "0.1.0"

from .analysis import (ErrorNorms, ErrorReport, convergence_rates, convergence_study,
                       dof_count, dof_formula, error_norms, max_principle_report,
                       solve_problem)
from .assembly import DofMap, SaddleSystem, assemble_system
from .estimator import SPDWGSolver
from .mesh import Mesh, build_mesh
from .problems import catalog, get_problem
from .projection import WeakFunction, project_Qh, project_Qs
from .solver import SolutionPair, SolverError, solve_saddle

__all__ = [
    "DofMap", "ErrorNorms", "ErrorReport", "Mesh", "SPDWGSolver", "SaddleSystem",
    "SolutionPair", "SolverError", "WeakFunction", "assemble_system", "build_mesh",
    "catalog", "convergence_rates", "convergence_study", "dof_count", "dof_formula",
    "error_norms", "get_problem", "max_principle_report", "project_Qh", "project_Qs",
    "solve_problem", "solve_saddle",
]
