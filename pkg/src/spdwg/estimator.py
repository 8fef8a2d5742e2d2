"""Estimator-style front end: configure, fit on a mesh, evaluate u_h."""

import numpy as np
from sklearn.base import BaseEstimator

from ._validation import validate_degrees, validate_gammas, validate_meshsize, validate_order
from .analysis import error_norms
from .assembly import assemble_system
from .projection import element_basis
from .solver import solve_saddle


class SPDWGSolver(BaseEstimator):
    """Primal-dual weak Galerkin solver for one mesh and one problem.

    Parameters
    ----------
    k : int
        Degree of the weak functions (v0, vb of degree k, vn of degree k-1).
    s : int
        Degree of the primal variable, ``k - 1`` or ``k - 2``.
    gamma1, gamma2, gamma3 : float
        Stabilization weights.
    element_order : int, optional
        Exactness of the element quadrature (default 2k + 4).
    edge_points : int, optional
        Gauss points per edge (default k + 4).
    meshsize : {"area", "diameter"}
        Element size convention used in the stabilizer.

    Attributes
    ----------
    mesh_, system_, solution_ :
        Set by :meth:`fit`.
    """

    def __init__(self, k=2, s=1, gamma1=1.0, gamma2=1.0, gamma3=1.0,
                 element_order=None, edge_points=None, meshsize="area"):
        self.k = k
        self.s = s
        self.gamma1 = gamma1
        self.gamma2 = gamma2
        self.gamma3 = gamma3
        self.element_order = element_order
        self.edge_points = edge_points
        self.meshsize = meshsize

    def fit(self, mesh, problem):
        """Assemble and solve on ``mesh`` for ``problem``; returns self."""
        k, s = validate_degrees(self.k, self.s)
        gammas = validate_gammas((self.gamma1, self.gamma2, self.gamma3))
        validate_meshsize(self.meshsize)
        if hasattr(problem, "check_alignment"):
            problem.check_alignment(mesh)
        self.mesh_ = mesh
        self.problem_ = problem
        self.system_ = assemble_system(
            mesh, problem, k, s, gammas,
            element_order=validate_order(self.element_order),
            edge_points=validate_order(self.edge_points, "edge points"),
            meshsize=self.meshsize)
        self.solution_ = solve_saddle(self.system_)
        return self

    def _check_fitted(self):
        if not hasattr(self, "solution_"):
            raise RuntimeError("call fit(mesh, problem) first")

    def locate(self, points):
        """Index of an element containing each point (-1 if outside)."""
        self._check_fitted()
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        mesh = self.mesh_
        xy = mesh.vertices[mesh.elements]            # (NT, nv, 2)
        edge = np.roll(xy, -1, axis=1) - xy
        out = np.full(len(pts), -1)
        tol = 1e-12 * max(1.0, float(np.max(mesh.diameters)))
        for start in range(0, len(pts), 256):
            p = pts[start:start + 256]
            rel = p[:, None, None, :] - xy[None]     # (np, NT, nv, 2)
            cross = edge[None, ..., 0] * rel[..., 1] - edge[None, ..., 1] * rel[..., 0]
            inside = np.all(cross >= -tol, axis=2)
            hit = inside.any(axis=1)
            out[start:start + 256] = np.where(hit, inside.argmax(axis=1), -1)
        return out

    def predict(self, points):
        """Evaluate u_h at ``points`` (NaN outside the mesh)."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        owner = self.locate(pts)
        values = np.full(len(pts), np.nan)
        for t in np.unique(owner[owner >= 0]):
            mask = owner == t
            basis = element_basis(self.mesh_, t, int(self.s))
            values[mask] = basis.values(pts[mask]) @ self.solution_.u[t]
        return values

    def errors(self, problem=None, order=None):
        """Error norms against the exact solution of ``problem``."""
        self._check_fitted()
        return error_norms(self.solution_, problem or self.problem_, self.mesh_, order,
                           self.meshsize)
