"""L2 projections onto element and edge polynomial spaces.

Callables passed here are vectorized: ``f(x, y)`` receives coordinate
arrays of equal shape and returns an array of that shape.
"""

from dataclasses import dataclass

import numpy as np

from .basis import ElementBasis, dim_poly, lagrange_1d
from .quadrature import edge_parameters, element_rule


class SingularGramError(np.linalg.LinAlgError):
    pass


def solve_gram(gram, rhs, rtol=1e-13):
    """Solve a small symmetric positive definite Gram system by Cholesky.

    A pivot below ``rtol`` times the leading pivot is reported as singular.
    """
    try:
        L = np.linalg.cholesky(gram)
    except np.linalg.LinAlgError as exc:
        raise SingularGramError(f"Gram matrix is not positive definite: {exc}") from exc
    pivots = np.diag(L) ** 2
    if pivots.min() < rtol * pivots.max():
        raise SingularGramError(
            f"Gram matrix is numerically singular (pivot ratio {pivots.min() / pivots.max():.2e})")
    y = np.linalg.solve(L, rhs)
    return np.linalg.solve(L.T, y)


def element_basis(mesh, t, degree):
    """The scaled monomial basis used for element ``t`` of ``mesh``."""
    return ElementBasis(degree, mesh.centroids[t], mesh.diameters[t])


def default_element_order(k):
    return 2 * k + 4


def default_edge_points(k):
    return k + 4


def project_element(f, mesh, t, degree, order=None):
    """Coefficients of the L2 projection of ``f`` onto P_degree(T)."""
    rule = element_rule(mesh.element_vertices(t), order or default_element_order(max(degree, 1)))
    phi = element_basis(mesh, t, degree).values(rule.points)
    fq = np.asarray(f(rule.points[:, 0], rule.points[:, 1]), dtype=float)
    fq = np.broadcast_to(fq, rule.weights.shape)
    gram = phi.T @ (rule.weights[:, None] * phi)
    return solve_gram(gram, phi.T @ (rule.weights * fq))


def _edge_points(mesh, e, npts):
    t, w = edge_parameters(npts)
    a, b = mesh.vertices[mesh.edges[e]]
    return t, a + t[:, None] * (b - a), w * mesh.edge_lengths[e]


def project_edge(f, mesh, e, degree, npts=None):
    """Nodal Lagrange coefficients of the L2 projection onto P_degree(e).

    ``f`` is evaluated at physical points of the edge; the nodes follow the
    edge's stored orientation (lower vertex index first).
    """
    t, pts, w = _edge_points(mesh, e, npts or default_edge_points(max(degree, 1)))
    phi = lagrange_1d(degree, t)[0]
    fq = np.broadcast_to(np.asarray(f(pts[:, 0], pts[:, 1]), dtype=float), w.shape)
    return solve_gram(phi.T @ (w[:, None] * phi), phi.T @ (w * fq))


@dataclass
class WeakFunction:
    """Coefficients of a member of the global weak space.

    ``v0`` holds per-element scaled-monomial coefficients of degree k,
    ``vb`` per-edge nodal coefficients of degree k and ``vn`` per-edge nodal
    coefficients of degree k - 1 for the component along the assigned
    normal.  The tangential part of the edge gradient is D_tau vb.
    """

    k: int
    v0: np.ndarray  # (NT, dim P_k)
    vb: np.ndarray  # (NE, k + 1)
    vn: np.ndarray  # (NE, k)

    @classmethod
    def zeros(cls, mesh, k):
        return cls(k, np.zeros((mesh.n_elements, dim_poly(k))),
                   np.zeros((mesh.n_edges, k + 1)), np.zeros((mesh.n_edges, k)))

    @classmethod
    def from_vector(cls, vector, mesh, k):
        vector = np.asarray(vector, dtype=float)
        n0 = mesh.n_elements * dim_poly(k)
        nb = mesh.n_edges * (k + 1)
        nn = mesh.n_edges * k
        if len(vector) != n0 + nb + nn:
            raise ValueError(f"expected a vector of length {n0 + nb + nn}, got {len(vector)}")
        return cls(k, vector[:n0].reshape(mesh.n_elements, -1),
                   vector[n0:n0 + nb].reshape(mesh.n_edges, k + 1),
                   vector[n0 + nb:].reshape(mesh.n_edges, k))

    def to_vector(self):
        return np.concatenate([self.v0.ravel(), self.vb.ravel(), self.vn.ravel()])

    def __mul__(self, scale):
        return WeakFunction(self.k, scale * self.v0, scale * self.vb, scale * self.vn)

    __rmul__ = __mul__


def project_Qh(w, grad_w, mesh, k, element_order=None, edge_points=None):
    """Q_h w = {Q_0 w, Q_b w, Q_g(grad w . n_e)} as a :class:`WeakFunction`.

    Only the normal component of the edge gradient is projected; the
    tangential component is carried by D_tau of the projected trace.
    """
    out = WeakFunction.zeros(mesh, k)
    for t in range(mesh.n_elements):
        out.v0[t] = project_element(w, mesh, t, k, element_order)
    for e in range(mesh.n_edges):
        out.vb[e] = project_edge(w, mesh, e, k, edge_points)
        n = mesh.normals[e]

        def normal_derivative(x, y, n=n):
            gx, gy = grad_w(x, y)
            return gx * n[0] + gy * n[1]

        out.vn[e] = project_edge(normal_derivative, mesh, e, k - 1, edge_points)
    return out


def project_Qs(f, mesh, degree, order=None):
    """Element-wise projection onto P_degree, shape (NT, dim P_degree)."""
    return np.array([project_element(f, mesh, t, degree, order)
                     for t in range(mesh.n_elements)])
