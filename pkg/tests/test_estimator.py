import numpy as np
import pytest
from sklearn.base import clone

from spdwg import SPDWGSolver, build_mesh, get_problem
from spdwg._validation import ConfigError, parse_gammas, parse_levels


def test_params_roundtrip():
    est = SPDWGSolver(k=1, s=0, gamma2=0.0)
    assert est.get_params()["k"] == 1
    twin = clone(est)
    assert twin.get_params() == est.get_params() and twin is not est
    est.set_params(meshsize="diameter")
    assert est.meshsize == "diameter"


def test_fit_predict_and_errors():
    problem = get_problem("t3")
    mesh = build_mesh("omega1", "tri", 2)
    est = SPDWGSolver().fit(mesh, problem)
    pts = np.array([[0.3, 0.4], [0.8, 0.1], [2.0, 2.0]])
    pred = est.predict(pts)
    exact = problem.pieces[0].u(pts[:2, 0], pts[:2, 1])
    assert np.allclose(pred[:2], exact, atol=5e-3)
    assert np.isnan(pred[2])
    assert est.errors().eh < 1e-3
    assert est.locate(pts).tolist()[-1] == -1


def test_unfitted_raises():
    with pytest.raises(RuntimeError, match="fit"):
        SPDWGSolver().predict([[0.5, 0.5]])


@pytest.mark.parametrize("params", [dict(k=2, s=2), dict(gamma1=-1.0), dict(meshsize="perimeter"),
                                    dict(element_order=0)])
def test_bad_params_rejected_at_fit(params):
    mesh = build_mesh("omega1", "tri", 0)
    with pytest.raises(ConfigError):
        SPDWGSolver(**params).fit(mesh, get_problem("t3"))


def test_parsers():
    assert parse_levels("0..3") == (0, 1, 2, 3)
    assert parse_levels("1, 2,4") == (1, 2, 4)
    assert parse_gammas("1,0.5, 2") == (1.0, 0.5, 2.0)
    for bad in ["", "3..1", "2,1", "a"]:
        with pytest.raises(ConfigError):
            parse_levels(bad)
    with pytest.raises(ConfigError):
        parse_gammas("1,1")
