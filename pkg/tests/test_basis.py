import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spdwg.basis import (EdgeBasis, ElementBasis, dim_poly, exponents, lagrange_1d,
                         tangential_derivative)


def test_constant_basis():
    vals, grads, hess = ElementBasis(0).evaluate([[0.3, -0.2]])
    assert vals.tolist() == [[1.0]]
    assert np.all(grads == 0) and np.all(hess == 0)


def test_unscaled_square_monomial():
    basis = ElementBasis(2)
    idx = exponents(2).index((2, 0))
    vals, _, hess = basis.evaluate([[0.5, 0.0]])
    assert vals[0, idx] == pytest.approx(0.25)
    assert hess[0, idx, 0, 0] == pytest.approx(2.0)
    assert hess[0, idx, 1, 1] == 0


@pytest.mark.parametrize("r", range(5))
def test_dimension(r):
    assert ElementBasis(r).size == dim_poly(r) == (r + 1) * (r + 2) // 2


def test_scaled_derivatives_match_finite_differences(rng):
    basis = ElementBasis(3, center=(0.2, -0.1), h=0.37)
    p = rng.uniform(-0.5, 0.5, size=(1, 2))
    eps = 1e-6
    _, g, H = basis.evaluate(p)
    for d in range(2):
        step = np.zeros(2)
        step[d] = eps
        fd = (basis.values(p + step) - basis.values(p - step)) / (2 * eps)
        assert np.allclose(fd, g[:, :, d], atol=1e-7)
        fd2 = (basis.gradients(p + step) - basis.gradients(p - step)) / (2 * eps)
        assert np.allclose(fd2, H[:, :, :, d], atol=1e-6)


def test_edge_basis_midpoint_and_endpoint():
    vals = EdgeBasis(2, (0, 0), (1, 0)).values([0.5])
    assert np.allclose(vals, [[0, 1, 0]])
    assert np.allclose(EdgeBasis(1, (0, 0), (2, 1)).values([0.0]), [[1, 0]])


def test_tangential_derivative_of_constant_and_ramp():
    edge = EdgeBasis(2, (0, 0), (1, 0))
    _, d = tangential_derivative([3.0, 3.0, 3.0], edge)
    assert np.allclose(d, 0)
    _, d = tangential_derivative([0.0, 0.5, 1.0], edge)
    assert np.allclose(d, 1.0)


@pytest.mark.parametrize("length", [1.0, 0.25, 3.0])
def test_tangential_derivative_at_start(length):
    edge = EdgeBasis(2, (0, 0), (0, length))
    der = edge.tangential_derivatives([0.0]) @ np.array([1.0, 0.0, 0.0])
    assert der[0] == pytest.approx(-3.0 / length)


@settings(max_examples=40, deadline=None)
@given(m=st.integers(0, 5), t=st.floats(0, 1))
def test_lagrange_partition_of_unity(m, t):
    vals, ders = lagrange_1d(m, [t])
    assert vals.sum() == pytest.approx(1.0)
    assert ders.sum() == pytest.approx(0.0, abs=1e-9)


def test_lagrange_is_nodal():
    for m in range(1, 5):
        vals, _ = lagrange_1d(m, np.linspace(0, 1, m + 1))
        assert np.allclose(vals, np.eye(m + 1), atol=1e-13)


def test_degenerate_edge_rejected():
    with pytest.raises(ValueError):
        EdgeBasis(1, (1, 1), (1, 1))
