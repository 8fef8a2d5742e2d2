"""Global assembly of the primal-dual saddle-point system.

Global dual numbering is ``[v0 | vb | vn]``: element blocks of size
dim P_k, then ``k + 1`` nodal values per edge, then ``k`` nodal values per
edge.  The primal unknown u_h has ``dim P_s`` coefficients per element.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse as sps

from .basis import dim_poly
from .weak_ops import LocalElement, check_degrees


@dataclass(frozen=True)
class DofMap:
    """Index layout of the dual families (v0, vb, vn) and the primal u."""

    n_elements: int
    n_edges: int
    k: int
    s: int
    boundary_edges: np.ndarray

    @classmethod
    def build(cls, mesh, k, s):
        check_degrees(k, s)
        return cls(mesh.n_elements, mesh.n_edges, k, s,
                   np.flatnonzero(mesh.boundary))

    @property
    def nk(self):
        return dim_poly(self.k)

    @property
    def ns(self):
        return dim_poly(self.s)

    @property
    def offset_vb(self):
        return self.n_elements * self.nk

    @property
    def offset_vn(self):
        return self.offset_vb + self.n_edges * (self.k + 1)

    @property
    def n_dual(self):
        return self.offset_vn + self.n_edges * self.k

    @property
    def n_primal(self):
        return self.n_elements * self.ns

    def v0_dofs(self, t):
        return np.arange(t * self.nk, (t + 1) * self.nk)

    def vb_dofs(self, e):
        return self.offset_vb + np.arange(e * (self.k + 1), (e + 1) * (self.k + 1))

    def vn_dofs(self, e):
        return self.offset_vn + np.arange(e * self.k, (e + 1) * self.k)

    def element_dofs(self, t, mesh):
        """Global dual indices in the local order used by LocalElement."""
        edges = mesh.element_edges[t]
        return np.concatenate([self.v0_dofs(t)]
                              + [self.vb_dofs(e) for e in edges]
                              + [self.vn_dofs(e) for e in edges])

    def primal_dofs(self, t):
        return np.arange(t * self.ns, (t + 1) * self.ns)

    @property
    def boundary_dofs(self):
        """vb indices on boundary edges (both sides of a slit included)."""
        if len(self.boundary_edges) == 0:
            return np.zeros(0, dtype=int)
        return np.concatenate([self.vb_dofs(e) for e in self.boundary_edges])

    @property
    def free_dofs(self):
        mask = np.ones(self.n_dual, dtype=bool)
        mask[self.boundary_dofs] = False
        return np.flatnonzero(mask)


@dataclass
class SaddleSystem:
    """Blocks of [[S, B^T], [B, 0]] [rho; u] = [F; G].

    After :func:`apply_dirichlet` the dual blocks are restricted to the
    indices in ``free``; ``free`` is None for the unreduced system.
    """

    S: sps.csr_matrix
    B: sps.csr_matrix
    F: np.ndarray
    G: np.ndarray
    dofmap: DofMap
    mesh: object = None
    s_part: sps.csr_matrix = None
    c_part: sps.csr_matrix = None
    free: np.ndarray = None

    @property
    def n_dual(self):
        return self.S.shape[0]

    @property
    def n_primal(self):
        return self.B.shape[0]

    def matrix(self):
        """The full symmetric indefinite saddle matrix in CSC format."""
        return sps.bmat([[self.S, self.B.T], [self.B, None]], format="csc")

    def rhs(self):
        return np.concatenate([self.F, self.G])

    def expand_dual(self, rho):
        """Re-insert eliminated boundary values (zeros) into a dual vector."""
        if self.free is None:
            return np.asarray(rho, dtype=float)
        full = np.zeros(self.dofmap.n_dual)
        full[self.free] = rho
        return full


def _threads(threads):
    if threads is None:
        threads = int(os.environ.get("SPDWG_THREADS", "1") or 1)
    return max(1, threads)


def _ordered_map(fn, items, threads=None):
    # results come back in input order, so reductions are reproducible
    n = _threads(threads)
    if n == 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def _coefficient_source(a, mu=None):
    """Return a per-element resolver ``t -> (a, mu)``.

    ``a`` may be a problem object with ``piece_for_element`` or a plain
    callable; in the latter case ``mu`` must also be a callable.
    """
    if hasattr(a, "piece_for_element"):
        problem = a

        def resolve(mesh, t):
            piece = problem.piece_for_element(mesh, t)
            return piece.a, piece.mu
        return resolve
    return lambda mesh, t: (a, mu)


def _accumulate(rows, cols, vals, shape):
    # COO -> CSR sums duplicates in a fixed order
    if rows:
        rows, cols, vals = np.concatenate(rows), np.concatenate(cols), np.concatenate(vals)
    else:
        rows = cols = np.zeros(0, dtype=int)
        vals = np.zeros(0)
    M = sps.coo_matrix((vals, (rows, cols)), shape=shape).tocsr()
    M.sum_duplicates()
    M.sort_indices()
    return M


def _square_triplets(block, idx):
    r = np.repeat(idx, len(idx))
    c = np.tile(idx, len(idx))
    return r, c, block.ravel()


def assemble_stabilizer_s(mesh, k, s, a, mu, gamma1, element_order=None, edge_points=None,
                          threads=None, meshsize="area"):
    """Global matrix of s(rho, sigma) = sum_T s_T(rho, sigma)."""
    if gamma1 < 0:
        raise ValueError(f"gamma1 must be non-negative, got {gamma1}")
    dm = DofMap.build(mesh, k, s)
    coeff = _coefficient_source(a, mu)

    def local(t):
        le = LocalElement(mesh, t, k, s, element_order, edge_points, meshsize)
        at, mt = coeff(mesh, t)
        return _square_triplets(le.stabilizer_s(gamma1, at, mt), dm.element_dofs(t, mesh))

    parts = _ordered_map(local, range(mesh.n_elements), threads)
    return _accumulate(*zip(*parts), (dm.n_dual, dm.n_dual))


def assemble_stabilizer_c(mesh, k, gamma2, gamma3, element_order=None, edge_points=None,
                          threads=None):
    """Global matrix of c(rho, sigma); block diagonal on the v0 family."""
    if gamma2 < 0 or gamma3 < 0:
        raise ValueError("gamma2 and gamma3 must be non-negative")
    s = k - 1
    dm = DofMap.build(mesh, k, s)

    def local(t):
        le = LocalElement(mesh, t, k, s, element_order, edge_points)
        idx = dm.v0_dofs(t)
        return _square_triplets(le.stabilizer_c(gamma2, gamma3)[:le.nk, :le.nk], idx)

    parts = _ordered_map(local, range(mesh.n_elements), threads)
    return _accumulate(*zip(*parts), (dm.n_dual, dm.n_dual))


def assemble_constraint_b(mesh, k, s, a, mu, element_order=None, edge_points=None,
                          threads=None):
    """B with rows indexed by primal basis functions and columns by dual dofs."""
    dm = DofMap.build(mesh, k, s)
    coeff = _coefficient_source(a, mu)

    def local(t):
        le = LocalElement(mesh, t, k, s, element_order, edge_points)
        at, mt = coeff(mesh, t)
        block = le.b_block(at, mt)
        rows, cols = dm.primal_dofs(t), dm.element_dofs(t, mesh)
        return np.repeat(rows, len(cols)), np.tile(cols, len(rows)), block.ravel()

    parts = _ordered_map(local, range(mesh.n_elements), threads)
    return _accumulate(*zip(*parts), (dm.n_primal, dm.n_dual))


def assemble_rhs(mesh, f, k, s=None, boundary=None, element_order=None, edge_points=None):
    """Dual right-hand side -(f, sigma0), plus the Dirichlet data term.

    ``f`` is a callable or a problem object (whose pieces supply f, and
    unless ``problem.homogeneous`` is set, the boundary values of u).
    ``boundary`` may be given explicitly as ``(g, a)`` callables.
    """
    s = k - 1 if s is None else s
    dm = DofMap.build(mesh, k, s)
    F = np.zeros(dm.n_dual)
    problem = f if hasattr(f, "piece_for_element") else None
    for t in range(mesh.n_elements):
        le = LocalElement(mesh, t, k, s, element_order, edge_points)
        idx = dm.element_dofs(t, mesh)
        if problem is not None:
            piece = problem.piece_for_element(mesh, t)
            F[idx] += le.load(piece.f)
            if not getattr(problem, "homogeneous", True) and mesh.boundary[mesh.element_edges[t]].any():
                F[idx] += le.boundary_load(piece.g, piece.a)
        else:
            F[idx] += le.load(f)
            if boundary is not None and mesh.boundary[mesh.element_edges[t]].any():
                F[idx] += le.boundary_load(*boundary)
    return F


def assemble_system(mesh, problem, k, s, gammas, element_order=None, edge_points=None,
                    threads=None, eliminate=True, meshsize="area"):
    """Assemble S = s + c, B and F in one pass over the elements.

    Parameters
    ----------
    mesh : Mesh
    problem : TestProblem or Coefficients
        Supplies per-element ``a``, ``mu``, ``f`` and, for problems that are
        not flagged homogeneous, the Dirichlet values ``g``.
    k, s : int
    gammas : tuple of float
        (gamma1, gamma2, gamma3), all non-negative.
    eliminate : bool
        Remove the boundary vb unknowns (default).
    meshsize : {"area", "diameter"}
        Element size convention h_T in the stabilizer.
    """
    g1, g2, g3 = (float(g) for g in gammas)
    if min(g1, g2, g3) < 0:
        raise ValueError(f"stabilization parameters must be non-negative, got {gammas}")
    dm = DofMap.build(mesh, k, s)
    with_boundary = not getattr(problem, "homogeneous", True)

    def local(t):
        le = LocalElement(mesh, t, k, s, element_order, edge_points, meshsize)
        piece = problem.piece_for_element(mesh, t)
        idx = dm.element_dofs(t, mesh)
        Sl = le.stabilizer_s(g1, piece.a, piece.mu)
        Cl = le.stabilizer_c(g2, g3)[:le.nk, :le.nk]
        Bl = le.b_block(piece.a, piece.mu)
        Fl = le.load(piece.f) if piece.f is not None else np.zeros(le.n_local)
        if with_boundary and any(ed.boundary for ed in le.edges):
            Fl = Fl + le.boundary_load(piece.g, piece.a)
        return idx, Sl, Cl, Bl, Fl

    parts = _ordered_map(local, range(mesh.n_elements), threads)
    s_trip, c_trip, b_trip = [], [], []
    F = np.zeros(dm.n_dual)
    for t, (idx, Sl, Cl, Bl, Fl) in enumerate(parts):
        s_trip.append(_square_triplets(Sl, idx))
        c_trip.append(_square_triplets(Cl, dm.v0_dofs(t)))
        rows = dm.primal_dofs(t)
        b_trip.append((np.repeat(rows, len(idx)), np.tile(idx, len(rows)), Bl.ravel()))
        np.add.at(F, idx, Fl)
    shape = (dm.n_dual, dm.n_dual)
    s_part = _accumulate(*zip(*s_trip), shape)
    c_part = _accumulate(*zip(*c_trip), shape)
    B = _accumulate(*zip(*b_trip), (dm.n_primal, dm.n_dual))
    system = SaddleSystem((s_part + c_part).tocsr(), B, F, np.zeros(dm.n_primal), dm, mesh,
                          s_part, c_part)
    return apply_dirichlet(system, dm) if eliminate else system


def apply_dirichlet(system, dofmap=None):
    """Delete the rows and columns of boundary vb unknowns."""
    if system.free is not None:
        return system
    dm = dofmap or system.dofmap
    free = dm.free_dofs
    sub = lambda M: None if M is None else M[free][:, free].tocsr()
    return replace(system, S=sub(system.S), B=system.B[:, free].tocsr(), F=system.F[free],
                   s_part=sub(system.s_part), c_part=sub(system.c_part), free=free)


def export_coordinates(matrix, stream):
    """Write a sparse matrix as ``row col value`` lines (0-based indices)."""
    M = sps.coo_matrix(matrix)
    order = np.lexsort((M.col, M.row))
    stream.write(f"% {M.shape[0]} {M.shape[1]} {M.nnz}\n")
    for r, c, v in zip(M.row[order], M.col[order], M.data[order]):
        stream.write(f"{r} {c} {float(v)!r}\n")
