"""Gaussian quadrature on triangles, parallelograms, polygons and segments.

Triangle rules above order 2 are conical (collapsed) products of a
Gauss-Jacobi rule and a Gauss-Legendre rule, so every shipped rule has
positive weights and is exact for polynomials up to its nominal order.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

MAX_ORDER = 61


class QuadratureError(ValueError):
    pass


@dataclass(frozen=True)
class QuadratureRule:
    """Physical quadrature points and weights.

    Attributes
    ----------
    points : ndarray, shape (n, d)
        Quadrature nodes (``d = 2`` for elements, ``d = 2`` for edges too,
        the edge nodes are the physical coordinates along the segment).
    weights : ndarray, shape (n,)
        Weights already scaled by the element area or edge length.
    order : int
        Polynomial degree integrated exactly.
    """

    points: np.ndarray
    weights: np.ndarray
    order: int

    def integrate(self, values):
        return np.tensordot(self.weights, values, axes=(0, 0))


def _check_order(order):
    if order < 0:
        raise QuadratureError(f"quadrature order must be non-negative, got {order}")
    if order > MAX_ORDER:
        raise QuadratureError(
            f"quadrature order {order} exceeds the shipped maximum {MAX_ORDER}")


def _npoints(order):
    return max(1, (order + 2) // 2)


@lru_cache(maxsize=None)
def gauss_legendre_01(npts):
    """Gauss-Legendre nodes and weights on [0, 1]."""
    x, w = roots_legendre(npts)
    return 0.5 * (x + 1.0), 0.5 * w


@lru_cache(maxsize=None)
def reference_triangle_rule(order):
    """Rule on the triangle (0,0), (1,0), (0,1); weights sum to 1/2."""
    _check_order(order)
    if order <= 1:
        return np.array([[1.0 / 3.0, 1.0 / 3.0]]), np.array([0.5])
    if order == 2:
        pts = np.array([[1 / 6, 1 / 6], [2 / 3, 1 / 6], [1 / 6, 2 / 3]])
        return pts, np.full(3, 1.0 / 6.0)
    n = _npoints(order)
    # Duffy map x = u, y = v (1 - u); the Jacobian (1 - u) is absorbed
    # into the Gauss-Jacobi weight.
    t, wt = roots_jacobi(n, 1.0, 0.0)
    u = 0.5 * (t + 1.0)
    wu = wt / 4.0
    v, wv = gauss_legendre_01(n)
    U, V = np.meshgrid(u, v, indexing="ij")
    W = np.outer(wu, wv)
    pts = np.column_stack([U.ravel(), (V * (1.0 - U)).ravel()])
    return pts, W.ravel()


@lru_cache(maxsize=None)
def reference_square_rule(order):
    """Tensor Gauss-Legendre rule on [0, 1]^2."""
    _check_order(order)
    x, w = gauss_legendre_01(_npoints(order))
    X, Y = np.meshgrid(x, x, indexing="ij")
    return np.column_stack([X.ravel(), Y.ravel()]), np.outer(w, w).ravel()


def triangle_rule(vertices, order):
    vertices = np.asarray(vertices, dtype=float)
    ref, w = reference_triangle_rule(order)
    e1 = vertices[1] - vertices[0]
    e2 = vertices[2] - vertices[0]
    det = abs(e1[0] * e2[1] - e1[1] * e2[0])
    pts = vertices[0] + ref[:, :1] * e1 + ref[:, 1:] * e2
    return QuadratureRule(pts, w * det, order)


def _is_parallelogram(vertices, rtol=1e-12):
    if len(vertices) != 4:
        return False
    gap = vertices[0] + vertices[2] - vertices[1] - vertices[3]
    scale = np.max(np.abs(vertices - vertices.mean(axis=0)))
    return np.max(np.abs(gap)) <= rtol * scale


def element_rule(vertices, order):
    """Quadrature rule on a polygon given by its counter-clockwise vertices.

    Triangles and parallelograms (rectangles included) are mapped from a
    reference rule; other polygons are fan-triangulated from the centroid.
    """
    vertices = np.asarray(vertices, dtype=float)
    _check_order(order)
    nv = len(vertices)
    if nv < 3:
        raise QuadratureError("an element needs at least three vertices")
    if nv == 3:
        return triangle_rule(vertices, order)
    if _is_parallelogram(vertices):
        ref, w = reference_square_rule(order)
        e1 = vertices[1] - vertices[0]
        e2 = vertices[3] - vertices[0]
        det = abs(e1[0] * e2[1] - e1[1] * e2[0])
        pts = vertices[0] + ref[:, :1] * e1 + ref[:, 1:] * e2
        return QuadratureRule(pts, w * det, order)
    center = vertices.mean(axis=0)
    parts = [triangle_rule([center, vertices[i], vertices[(i + 1) % nv]], order)
             for i in range(nv)]
    return QuadratureRule(np.vstack([p.points for p in parts]),
                          np.concatenate([p.weights for p in parts]), order)


def edge_parameters(npts):
    """Gauss-Legendre parameters ``t`` in (0, 1) and unit-length weights."""
    if npts < 1:
        raise QuadratureError(f"need at least one Gauss point, got {npts}")
    if 2 * npts - 1 > MAX_ORDER:
        raise QuadratureError(
            f"{npts} Gauss points exceed the shipped maximum order {MAX_ORDER}")
    return gauss_legendre_01(npts)


def edge_rule(start, end, npts):
    """Gauss-Legendre rule with ``npts`` points on the segment start -> end.

    The returned rule is exact for polynomials of degree ``2 * npts - 1``.
    """
    start = np.asarray(start, dtype=float)
    end = np.asarray(end, dtype=float)
    t, w = edge_parameters(npts)
    length = np.hypot(*(end - start))
    pts = start + t[:, None] * (end - start)
    return QuadratureRule(pts, w * length, 2 * npts - 1)
