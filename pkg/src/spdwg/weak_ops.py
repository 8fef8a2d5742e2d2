"""Element-local discrete weak gradient and weak second partial derivatives.

Local degrees of freedom of an element with ``m`` edges are ordered as

    [ v0 (dim P_k) | vb on edge 0..m-1 (k+1 each) | vn on edge 0..m-1 (k each) ]

where the edges follow the element's counter-clockwise vertex order.  Edge
coefficients are nodal values in the edge's stored orientation, so both
neighbours of an interior edge see identical edge functions.  On each edge
the gradient surrogate is ``v_g = vn * n_e + (D_tau vb) * tau`` with the
assigned normal ``n_e``; the outward normal ``n`` enters only through the
boundary integrals of the defining identities.
"""

import numpy as np

from .basis import dim_poly, lagrange_1d
from .projection import default_edge_points, default_element_order, element_basis, solve_gram
from .quadrature import edge_parameters, element_rule

FORMS = ("moment", "ibp")


def check_degrees(k, s):
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    allowed = {k - 1, k - 2} if k > 1 else {0}
    if s not in allowed or s < 0:
        raise ValueError(f"s must be one of {sorted(x for x in allowed if x >= 0)} for k={k}, got {s}")


MESHSIZES = ("area", "diameter")


def element_size(mesh, t, meshsize="area"):
    if meshsize == "diameter":
        return float(mesh.diameters[t])
    if meshsize == "area":
        return float(np.sqrt(mesh.areas[t]))
    raise ValueError(f"meshsize must be one of {MESHSIZES}, got {meshsize!r}")


class _Edge:
    __slots__ = ("index", "sign", "points", "weights", "normal", "n_e", "tau", "length",
                 "boundary", "vb", "vn", "lag_b", "dlag_b", "lag_n",
                 "phi_k", "dphi_k", "phi_g", "phi_s", "dphi_s")


class LocalElement:
    """Quadrature data and local operators of one element.

    Parameters
    ----------
    mesh : Mesh
    t : int
        Element index.
    k, s : int
        Weak-function degree and primal (test) degree.
    element_order : int, optional
        Polynomial exactness of the element rule (default ``2k + 4``).
    edge_points : int, optional
        Gauss points per edge (default ``k + 4``).
    meshsize : {"area", "diameter"}
        Element size h_T used by the stabilizer: the square root of the
        area (default) or the diameter.
    """

    def __init__(self, mesh, t, k, s, element_order=None, edge_points=None,
                 meshsize="area"):
        self.mesh, self.t, self.k, self.s = mesh, t, k, s
        self.h = element_size(mesh, t, meshsize)
        self.area = float(mesh.areas[t])
        self.rule = element_rule(mesh.element_vertices(t), element_order or default_element_order(k))
        pts = self.rule.points
        self.basis_k = element_basis(mesh, t, k)
        self.basis_g = element_basis(mesh, t, k - 1)
        self.basis_s = element_basis(mesh, t, s)
        self.phi_k, self.dphi_k, self.hphi_k = self.basis_k.evaluate(pts)
        self.phi_g = self.basis_g.values(pts)
        self.dphi_g = self.basis_g.gradients(pts)
        self.phi_s, self.dphi_s, self.hphi_s = self.basis_s.evaluate(pts)

        self.nk = dim_poly(k)
        self.ng = dim_poly(k - 1)
        self.ns = dim_poly(s)
        nedge = mesh.elements.shape[1]
        self.n_local = self.nk + nedge * (2 * k + 1)

        tq, wq = edge_parameters(edge_points or default_edge_points(k))
        lag_b, dlag_b = lagrange_1d(k, tq)
        lag_n = lagrange_1d(k - 1, tq)[0]
        self.edges = []
        for loc in range(nedge):
            e = int(mesh.element_edges[t, loc])
            ed = _Edge()
            ed.index = e
            ed.sign = int(mesh.element_edge_signs[t, loc])
            a, b = mesh.vertices[mesh.edges[e]]
            ed.length = float(mesh.edge_lengths[e])
            ed.points = a + tq[:, None] * (b - a)
            ed.weights = wq * ed.length
            ed.n_e = mesh.normals[e]
            ed.tau = mesh.tangents[e]
            # outward normal from geometry, whatever orientation n_e was given
            ed.normal = ed.sign * np.array([ed.tau[1], -ed.tau[0]])
            ed.boundary = bool(mesh.boundary[e])
            ed.vb = slice(self.nk + loc * (k + 1), self.nk + (loc + 1) * (k + 1))
            off = self.nk + nedge * (k + 1)
            ed.vn = slice(off + loc * k, off + (loc + 1) * k)
            ed.lag_b, ed.dlag_b, ed.lag_n = lag_b, dlag_b / ed.length, lag_n
            ed.phi_k = self.basis_k.values(ed.points)
            ed.dphi_k = self.basis_k.gradients(ed.points)
            ed.phi_g = self.basis_g.values(ed.points)
            ed.phi_s = self.basis_s.values(ed.points)
            ed.dphi_s = self.basis_s.gradients(ed.points)
            self.edges.append(ed)
        self._gradient = {}
        self._second = {}

    # -- global numbering -------------------------------------------------
    def global_dofs(self, dofmap):
        return dofmap.element_dofs(self.t, self.mesh)

    def primal_dofs(self, dofmap):
        return dofmap.primal_dofs(self.t)

    # -- Gram matrices ----------------------------------------------------
    def gram(self, phi):
        return phi.T @ (self.rule.weights[:, None] * phi)

    # -- weak gradient ----------------------------------------------------
    def weak_gradient_matrix(self, form="moment"):
        """Matrix G of shape (2, dim P_{k-1}, n_local) mapping local dofs to
        the coefficients of the two components of the weak gradient."""
        if form not in FORMS:
            raise ValueError(f"form must be one of {FORMS}")
        if form in self._gradient:
            return self._gradient[form]
        w = self.rule.weights
        rhs = np.zeros((2, self.ng, self.n_local))
        for d in range(2):
            if form == "moment":
                rhs[d, :, :self.nk] = -(self.dphi_g[:, :, d].T * w) @ self.phi_k
            else:
                rhs[d, :, :self.nk] = (self.phi_g.T * w) @ self.dphi_k[:, :, d]
            for ed in self.edges:
                test = ed.phi_g.T * (ed.weights * ed.normal[d])
                rhs[d, :, ed.vb] += test @ ed.lag_b
                if form == "ibp":
                    rhs[d, :, :self.nk] -= test @ ed.phi_k
        gram = self.gram(self.phi_g)
        G = np.stack([solve_gram(gram, rhs[d]) for d in range(2)])
        self._gradient[form] = G
        return G

    # -- weak second partial derivatives --------------------------------
    def weak_second_matrix(self, i, j, form="moment"):
        """Matrix of shape (dim P_s, n_local) for the weak derivative d2_ij."""
        if form not in FORMS:
            raise ValueError(f"form must be one of {FORMS}")
        key = (i, j, form)
        if key in self._second:
            return self._second[key]
        w = self.rule.weights
        rhs = np.zeros((self.ns, self.n_local))
        if form == "moment":
            rhs[:, :self.nk] = (self.hphi_s[:, :, j, i].T * w) @ self.phi_k
        else:
            rhs[:, :self.nk] = (self.phi_s.T * w) @ self.hphi_k[:, :, i, j]
        for ed in self.edges:
            n = ed.normal
            phi_nj = ed.phi_s.T * (ed.weights * n[j])
            dphi_ni = ed.dphi_s[:, :, j].T * (ed.weights * n[i])
            rhs[:, ed.vb] += -dphi_ni @ ed.lag_b + ed.tau[i] * (phi_nj @ ed.dlag_b)
            rhs[:, ed.vn] += ed.n_e[i] * (phi_nj @ ed.lag_n)
            if form == "ibp":
                rhs[:, :self.nk] += dphi_ni @ ed.phi_k - phi_nj @ ed.dphi_k[:, :, i]
        D = solve_gram(self.gram(self.phi_s), rhs)
        self._second[key] = D
        return D

    def weak_second_matrices(self, form="moment"):
        """All four weak second partials, shape (2, 2, dim P_s, n_local)."""
        return np.array([[self.weak_second_matrix(i, j, form) for j in range(2)]
                         for i in range(2)])

    # -- discretized operator L_w -------------------------------------------
    def weak_operator_at_quadrature(self, a, mu):
        """Values of L_w(sigma_q) = mu . grad_w sigma_q + 1/2 sum a_ij d2_ji,w sigma_q
        at the element quadrature points, shape (nq, n_local)."""
        x, y = self.rule.points.T
        A = np.broadcast_to(a(x, y), (len(x), 2, 2))
        M = np.broadcast_to(mu(x, y), (len(x), 2))
        G = self.weak_gradient_matrix()
        D = self.weak_second_matrices()
        out = M[:, :1] * (self.phi_g @ G[0]) + M[:, 1:] * (self.phi_g @ G[1])
        for i in range(2):
            for j in range(2):
                out += 0.5 * A[:, i, j, None] * (self.phi_s @ D[j, i])
        return out

    def b_block(self, a, mu):
        """Local constraint block, shape (dim P_s, n_local): (phi_p, L_w sigma_q)_T."""
        Lw = self.weak_operator_at_quadrature(a, mu)
        return (self.phi_s.T * self.rule.weights) @ Lw

    # -- stabilizers --------------------------------------------------------
    def strong_operator_at_quadrature(self, a, mu):
        """L phi for the v0 basis at the element quadrature points, (nq, dim P_k)."""
        x, y = self.rule.points.T
        A = np.broadcast_to(a(x, y), (len(x), 2, 2))
        M = np.broadcast_to(mu(x, y), (len(x), 2))
        out = M[:, :1] * self.dphi_k[:, :, 0] + M[:, 1:] * self.dphi_k[:, :, 1]
        for i in range(2):
            for j in range(2):
                out += 0.5 * A[:, i, j, None] * self.hphi_k[:, :, j, i]
        return out

    def stabilizer_s(self, gamma1, a=None, mu=None):
        """Local matrix of s_T: jump penalties plus gamma1 (L rho0, L sigma0)_T."""
        S = np.zeros((self.n_local, self.n_local))
        for ed in self.edges:
            jump0 = np.zeros((len(ed.weights), self.n_local))
            jump0[:, :self.nk] = ed.phi_k
            jump0[:, ed.vb] = -ed.lag_b
            jumpn = np.zeros_like(jump0)
            jumpn[:, :self.nk] = ed.dphi_k @ ed.n_e
            jumpn[:, ed.vn] = -ed.lag_n
            S += self.h ** -3 * (jump0.T * ed.weights) @ jump0
            S += self.h ** -1 * (jumpn.T * ed.weights) @ jumpn
        if gamma1:
            L0 = self.strong_operator_at_quadrature(a, mu)
            S[:self.nk, :self.nk] += gamma1 * (L0.T * self.rule.weights) @ L0
        return S

    def stabilizer_c(self, gamma2, gamma3):
        """Local matrix of c_T, nonzero on the v0 block only."""
        C = np.zeros((self.n_local, self.n_local))
        w = self.rule.weights
        block = np.zeros((self.nk, self.nk))
        if gamma2:
            for d in range(2):
                block += gamma2 * (self.dphi_k[:, :, d].T * w) @ self.dphi_k[:, :, d]
        if gamma3:
            for i in range(2):
                for j in range(2):
                    H = self.hphi_k[:, :, i, j]
                    block += gamma3 * (H.T * w) @ H
        C[:self.nk, :self.nk] = block
        return C

    # -- load vector ----------------------------------------------------------
    def load(self, f):
        """-(f, phi)_T on the v0 block, shape (n_local,)."""
        x, y = self.rule.points.T
        fq = np.broadcast_to(f(x, y), x.shape)
        F = np.zeros(self.n_local)
        F[:self.nk] = -(self.phi_k.T @ (self.rule.weights * fq))
        return F

    def boundary_load(self, g, a):
        """1/2 <g (n_e . a n), sigma_n> over this element's boundary edges.

        This is the data term produced by non-zero Dirichlet values ``g`` of
        the primal solution; it vanishes when ``g = 0`` on the boundary.
        """
        F = np.zeros(self.n_local)
        for ed in self.edges:
            if not ed.boundary:
                continue
            x, y = ed.points.T
            A = np.broadcast_to(a(x, y), (len(x), 2, 2))
            flux = np.einsum("i,qij,j->q", ed.n_e, A, ed.normal)
            gq = np.broadcast_to(g(x, y), x.shape)
            F[ed.vn] += 0.5 * ed.lag_n.T @ (ed.weights * gq * flux)
        return F


# -- single-shot helpers operating on local dof vectors -----------------------

def discrete_weak_gradient(local, dofs, form="moment"):
    """Coefficients (2, dim P_{k-1}) of the weak gradient of local dofs."""
    return local.weak_gradient_matrix(form) @ np.asarray(dofs, dtype=float)


def discrete_weak_second_partial(local, dofs, i, j, form="moment"):
    """Coefficients (dim P_s,) of the weak second partial d2_ij."""
    return local.weak_second_matrix(i, j, form) @ np.asarray(dofs, dtype=float)


def local_b_block(mesh, t, k, s, a, mu, **orders):
    return LocalElement(mesh, t, k, s, **orders).b_block(a, mu)


def gather_local(weak, mesh, t):
    """Local dof vector of element ``t`` extracted from a WeakFunction."""
    parts = [weak.v0[t]]
    es = mesh.element_edges[t]
    parts += [weak.vb[e] for e in es]
    parts += [weak.vn[e] for e in es]
    return np.concatenate(parts)
