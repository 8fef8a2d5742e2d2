import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spdwg.basis import dim_poly, exponents, lagrange_1d
from spdwg.mesh import build_mesh
from spdwg.projection import (SingularGramError, WeakFunction, element_basis, project_edge,
                              project_element, project_Qh, project_Qs, solve_gram)
from tests.conftest import UNIT_SQUARE, UNIT_TRIANGLE, single_element


def _poly(coeffs, degree):
    exps = exponents(degree)

    def f(x, y):
        return sum(c * x ** a * y ** b for c, (a, b) in zip(coeffs, exps))
    return f


def test_sin_mean_on_unit_square():
    mesh = single_element(UNIT_SQUARE)
    c = project_element(lambda x, y: np.sin(x), mesh, 0, 0, order=12)
    assert c[0] == pytest.approx(1 - math.cos(1), abs=1e-13)


def test_x_mean_on_unit_triangle():
    mesh = single_element(UNIT_TRIANGLE)
    c = project_element(lambda x, y: x, mesh, 0, 0)
    assert c[0] == pytest.approx(1 / 3, abs=1e-14)


def test_edge_projection_of_x_squared():
    mesh = single_element(UNIT_TRIANGLE)
    e = next(i for i, (a, b) in enumerate(mesh.edges) if {a, b} == {0, 1})
    c = project_edge(lambda x, y: x ** 2, mesh, e, 1)
    # nodal values of x - 1/6 at x = 0 and x = 1
    assert np.allclose(c, [-1 / 6, 5 / 6], atol=1e-13)


def test_edge_projection_of_constant(unit_square):
    for e in range(unit_square.n_edges):
        assert np.allclose(project_edge(lambda x, y: 2.5 + 0 * x, unit_square, e, 3), 2.5)


@settings(max_examples=25, deadline=None)
@given(degree=st.integers(0, 3), seed=st.integers(0, 10_000))
def test_element_projection_reproduces_polynomials(degree, seed):
    rng = np.random.default_rng(seed)
    mesh = build_mesh("omega1", "tri", 0)
    coeffs = rng.standard_normal(dim_poly(degree))
    f = _poly(coeffs, degree)
    for t in (0, 5):
        c = project_element(f, mesh, t, degree)
        pts = mesh.element_vertices(t)
        vals = element_basis(mesh, t, degree).values(pts) @ c
        assert np.allclose(vals, f(pts[:, 0], pts[:, 1]), atol=1e-11)


def test_edge_projection_reproduces_polynomials(unit_square):
    f = lambda x, y: 1 + 2 * x - x ** 2 + 3 * y ** 2
    for e in range(unit_square.n_edges):
        c = project_edge(f, unit_square, e, 2)
        a, b = unit_square.vertices[unit_square.edges[e]]
        t = np.array([0.1, 0.6, 0.9])
        pts = a + t[:, None] * (b - a)
        assert np.allclose(lagrange_1d(2, t)[0] @ c, f(*pts.T), atol=1e-12)


def test_Qh_of_global_polynomial_is_exact():
    mesh = build_mesh("omega1", "tri", 1)
    w = lambda x, y: x ** 2 - 2 * x * y + 0.5 * y
    grad = lambda x, y: (2 * x - 2 * y, -2 * x + 0.5)
    Q = project_Qh(w, grad, mesh, 2)
    for t in range(mesh.n_elements):
        pts = mesh.element_vertices(t)
        assert np.allclose(element_basis(mesh, t, 2).values(pts) @ Q.v0[t], w(*pts.T), atol=1e-11)
    ends = mesh.vertices[mesh.edges]
    assert np.allclose(Q.vb[:, 0], w(*ends[:, 0].T), atol=1e-11)
    assert np.allclose(Q.vb[:, -1], w(*ends[:, 1].T), atol=1e-11)
    gx, gy = grad(*ends[:, 0].T)
    assert np.allclose(Q.vn[:, 0], gx * mesh.normals[:, 0] + gy * mesh.normals[:, 1], atol=1e-11)


def test_Qh_of_zero(unit_triangle):
    Q = project_Qh(lambda x, y: 0 * x, lambda x, y: (0 * x, 0 * y), unit_triangle, 2)
    assert not np.any(Q.to_vector())


def test_weak_function_vector_roundtrip(rng):
    mesh = build_mesh("omega1", "square", 0)
    n = mesh.n_elements * dim_poly(2) + mesh.n_edges * 5
    vec = rng.standard_normal(n)
    assert np.array_equal(WeakFunction.from_vector(vec, mesh, 2).to_vector(), vec)
    with pytest.raises(ValueError):
        WeakFunction.from_vector(vec[:-1], mesh, 2)


def test_Qs_shape():
    mesh = build_mesh("omega1", "tri", 0)
    assert project_Qs(lambda x, y: x * y, mesh, 1).shape == (8, 3)


def test_singular_gram_rejected():
    with pytest.raises(SingularGramError):
        solve_gram(np.array([[1.0, 1.0], [1.0, 1.0]]), np.ones(2))
