import math

import numpy as np
import pytest

from spdwg.analysis import (CSV_HEADER, ErrorReport, convergence_rates, dof_count,
                            dof_count_3d, dof_formula, error_norms, max_principle_report,
                            solve_problem)
from spdwg.mesh import build_mesh
from spdwg.problems import get_problem
from spdwg.projection import WeakFunction, project_Qs
from spdwg.solver import SolutionPair

T3_EH = [4.073e-2, 9.947e-3, 2.450e-3, 6.083e-4, 1.517e-4]


def test_rate_examples():
    assert convergence_rates([4e-2, 1e-2]) == [pytest.approx(2.0)]
    assert convergence_rates([1e-3, 1e-3]) == [pytest.approx(0.0)]
    rates = convergence_rates(T3_EH, [1 / 2, 1 / 4, 1 / 8, 1 / 16, 1 / 32])
    assert [round(r, 2) for r in rates] == [2.03, 2.02, 2.01, 2.00]


def test_rate_edge_cases():
    assert convergence_rates([1e-3, 0.0, 0.0]) == [None, None]
    with pytest.raises(ValueError, match="halve"):
        convergence_rates([1, 2], [0.5, 0.3])


def test_dof_examples():
    assert dof_formula(2, 5, 2) == 37 and dof_formula(2, 5, 2, "general") == 47
    mesh = build_mesh("omega1", "rect", 1)
    assert dof_count(mesh, 1, "general") - dof_count(mesh, 1) == mesh.n_edges
    assert dof_count_3d(1, 4, 1) == 4 + 4 * 4
    with pytest.raises(ValueError):
        dof_formula(2, 5, 0)
    with pytest.raises(ValueError):
        dof_formula(2, 5, 2, "fancy")


def _exact_solution(problem, mesh, s, k=2):
    u = project_Qs(lambda x, y: problem.pieces[0].u(x, y), mesh, s, order=2 * s + 6)
    return SolutionPair(WeakFunction.zeros(mesh, k), u, None)


def test_norms_vanish_for_projected_solution():
    problem = get_problem("t3")
    mesh = build_mesh("omega1", "tri", 1)
    assert max(error_norms(_exact_solution(problem, mesh, 1), problem, mesh)) < 1e-14


def test_error_report_formats():
    report = ErrorReport("t3", 2, 1, (1, 1, 1))
    for i, e in enumerate(T3_EH[:3]):
        report.add(i, 0.5 ** (i + 1), (e / 4, e / 3, e / 2, e))
    csv = report.to_csv().splitlines()
    assert csv[0] == CSV_HEADER and len(csv) == 4
    first = csv[1].split(",")
    assert first[:8] == ["t3", "2", "1", "1", "1", "1", "0", "2"]
    assert first[9] == ""  # no rate on the coarsest level
    assert csv[2].split(",")[-1] == "2.0338"
    md = report.to_markdown()
    assert "| 4 | " in md and "2.03" in md
    assert report.rates("eh")[0] is None


def test_extrema_at_eighth():
    problem = get_problem("t14")
    mesh, _, sol = solve_problem(problem, 2)
    assert mesh.spacing == 1 / 8
    rep = max_principle_report(sol, mesh)
    assert rep.interior_min["v"] == pytest.approx(-6.418e-2, rel=0.1)
    assert rep.boundary_max["v"] == pytest.approx(3.042e-3, rel=0.1)
    for kind in "vce":
        assert rep.interior_min[kind] <= rep.interior_max[kind] < 0
    assert "max_boundary u_h|e" in rep.to_text()


@pytest.mark.xfail(strict=True, reason=(
    "the reference interior vertex maximum (-3.342e-3 at h=1/8) is not reproduced; "
    "our element-wise vertex samples give about -9.7e-3 while the minima agree"))
def test_extrema_interior_vertex_max_at_eighth():
    mesh, _, sol = solve_problem(get_problem("t14"), 2)
    assert max_principle_report(sol, mesh).interior_max["v"] == pytest.approx(-3.342e-3, rel=0.1)


@pytest.mark.xfail(strict=True, reason=(
    "coarsest-level e_h is about 3.4 times below the reference value 4.073e-2; the original "
    "coarse mesh and norm weights are not fully determined"))
def test_t3_coarsest_error_matches_reference():
    problem = get_problem("t3")
    mesh, _, sol = solve_problem(problem, 0)
    assert error_norms(sol, problem, mesh).eh == pytest.approx(4.073e-2, rel=0.2)
