"""Scaled monomial bases on elements and nodal Lagrange bases on edges."""

from functools import lru_cache

import numpy as np


def dim_poly(r):
    """Dimension of P_r in two variables (0 for r < 0)."""
    return (r + 1) * (r + 2) // 2 if r >= 0 else 0


@lru_cache(maxsize=None)
def exponents(r):
    """Monomial exponents (a, b) of x^a y^b ordered by total degree."""
    return tuple((d - b, b) for d in range(r + 1) for b in range(d + 1))


def _powers(t, a):
    # t**a with the convention t**negative == 0 (used by derivative factors)
    return np.where(a >= 0, t ** np.maximum(a, 0), 0.0)


class ElementBasis:
    """Monomials ((x - xc) / h)^a ((y - yc) / h)^b of total degree <= ``degree``.

    With ``center=(0, 0)`` and ``h=1`` this is the plain monomial basis.
    """

    def __init__(self, degree, center=(0.0, 0.0), h=1.0):
        self.degree = int(degree)
        self.center = np.asarray(center, dtype=float)
        self.h = float(h)
        exps = np.array(exponents(self.degree), dtype=np.int64).reshape(-1, 2)
        self._a = exps[:, 0]
        self._b = exps[:, 1]

    @property
    def size(self):
        return dim_poly(self.degree)

    def _local(self, points):
        p = (np.atleast_2d(np.asarray(points, dtype=float)) - self.center) / self.h
        return p[:, :1], p[:, 1:]

    def values(self, points):
        """Basis values, shape (npts, size)."""
        xi, eta = self._local(points)
        return _powers(xi, self._a) * _powers(eta, self._b)

    def gradients(self, points):
        """Basis gradients, shape (npts, size, 2)."""
        xi, eta = self._local(points)
        a, b, h = self._a, self._b, self.h
        dx = a * _powers(xi, a - 1) * _powers(eta, b) / h
        dy = b * _powers(xi, a) * _powers(eta, b - 1) / h
        return np.stack([dx, dy], axis=-1)

    def hessians(self, points):
        """Basis Hessians, shape (npts, size, 2, 2)."""
        xi, eta = self._local(points)
        a, b, h2 = self._a, self._b, self.h ** 2
        dxx = a * (a - 1) * _powers(xi, a - 2) * _powers(eta, b) / h2
        dxy = a * b * _powers(xi, a - 1) * _powers(eta, b - 1) / h2
        dyy = b * (b - 1) * _powers(xi, a) * _powers(eta, b - 2) / h2
        return np.stack([np.stack([dxx, dxy], axis=-1),
                         np.stack([dxy, dyy], axis=-1)], axis=-2)

    def evaluate(self, points):
        """Values, gradients and Hessians at ``points``."""
        return self.values(points), self.gradients(points), self.hessians(points)


def eval_element_basis(basis, point):
    return basis.evaluate(point)


def lagrange_nodes(m):
    """Equally spaced nodes on [0, 1]; the single node of P_0 is the midpoint."""
    if m < 0:
        raise ValueError(f"edge polynomial degree must be non-negative, got {m}")
    if m == 0:
        return np.array([0.5])
    return np.linspace(0.0, 1.0, m + 1)


def lagrange_1d(m, t):
    """Lagrange shape functions of degree ``m`` and their t-derivatives.

    Returns arrays of shape (len(t), m + 1).
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    nodes = lagrange_nodes(m)
    n = len(nodes)
    vals = np.ones((len(t), n))
    ders = np.zeros((len(t), n))
    for i in range(n):
        others = [nodes[j] for j in range(n) if j != i]
        denom = np.prod([nodes[i] - o for o in others]) if others else 1.0
        factors = [t - o for o in others]
        vals[:, i] = np.prod(factors, axis=0) / denom if others else 1.0
        for skip in range(len(others)):
            prod = np.ones_like(t)
            for j, f in enumerate(factors):
                if j != skip:
                    prod = prod * f
            ders[:, i] += prod / denom
    return vals, ders


class EdgeBasis:
    """Nodal Lagrange basis of degree ``m`` on the segment A_i -> A_j.

    The parameter ``t`` runs from 0 at ``start`` to 1 at ``end``; the hat
    functions are chi_1 = 1 - t and chi_2 = t.
    """

    def __init__(self, m, start, end):
        if m < 0:
            raise ValueError(f"edge polynomial degree must be non-negative, got {m}")
        self.degree = int(m)
        self.start = np.asarray(start, dtype=float)
        self.end = np.asarray(end, dtype=float)
        d = self.end - self.start
        self.length = float(np.hypot(*d))
        if self.length == 0:
            raise ValueError("degenerate edge")
        self.tangent = d / self.length

    @property
    def size(self):
        return self.degree + 1

    def parameter(self, points):
        p = np.atleast_2d(np.asarray(points, dtype=float))
        return (p - self.start) @ self.tangent / self.length

    def values(self, t):
        return lagrange_1d(self.degree, t)[0]

    def tangential_derivatives(self, t):
        """d/ds of each shape function, s the arc length along the tangent."""
        return lagrange_1d(self.degree, t)[1] / self.length


def edge_lagrange_basis(m, start, end):
    return EdgeBasis(m, start, end)


def tangential_derivative(vb_coeffs, edge):
    """D_tau of the edge polynomial with nodal coefficients ``vb_coeffs``.

    Returns the nodal coefficients (degree m - 1) of the derivative on
    the same edge, as an ``(EdgeBasis, coefficients)`` pair.
    """
    vb_coeffs = np.asarray(vb_coeffs, dtype=float)
    m = edge.degree
    if len(vb_coeffs) != m + 1:
        raise ValueError(f"expected {m + 1} coefficients, got {len(vb_coeffs)}")
    target = EdgeBasis(max(m - 1, 0), edge.start, edge.end)
    if m == 0:
        return target, np.zeros(1)
    nodes = lagrange_nodes(m - 1)
    coeffs = edge.tangential_derivatives(nodes) @ vb_coeffs
    return target, coeffs


def edge_polynomial(basis, coeffs, t):
    return basis.values(t) @ np.asarray(coeffs, dtype=float)
