"""Polygonal meshes of the benchmark domains and their uniform refinements.

Every mesh stores its edges once, with endpoints in ascending global vertex
order.  The assigned unit normal of an edge is the clockwise rotation of
the unit direction from the lower-indexed to the higher-indexed endpoint,
so it depends only on vertex numbering and never on the element that
looks at the edge.

Domains
-------
``omega1``  the unit square (0, 1)^2
``omega2``  the square (-1, 1)^2
``omega3``  the L-shaped domain (0, 1)^2 minus [0.5, 1)^2
``omega4``  the diamond |x| + |y| < 1 cut along the slit (0, 1) x {0}

The slit of ``omega4`` is represented by duplicated vertices: elements
above the slit use one copy, elements below the other, so both sides of
the slit are boundary edges with a single incident element.
"""

from dataclasses import dataclass, field

import numpy as np

DOMAINS = ("omega1", "omega2", "omega3", "omega4")
FAMILIES = ("tri", "rect", "square")

_DOMAIN_ALIASES = {
    "omega1": "omega1", "1": "omega1", "unit_square": "omega1",
    "omega2": "omega2", "2": "omega2",
    "omega3": "omega3", "3": "omega3", "lshape": "omega3", "l-shape": "omega3",
    "omega4": "omega4", "4": "omega4", "crack": "omega4", "cracked": "omega4",
}


class MeshError(ValueError):
    pass


def domain_id(name):
    try:
        return _DOMAIN_ALIASES[str(name).lower()]
    except KeyError:
        raise MeshError(f"unknown domain {name!r}; expected one of {DOMAINS}") from None


def contains(domain, points, tol=1e-12):
    """Closed-domain membership test for points of shape (n, 2)."""
    domain = domain_id(domain)
    x, y = np.asarray(points, dtype=float).T
    if domain == "omega1":
        return (x >= -tol) & (x <= 1 + tol) & (y >= -tol) & (y <= 1 + tol)
    if domain == "omega2":
        return (np.abs(x) <= 1 + tol) & (np.abs(y) <= 1 + tol)
    if domain == "omega3":
        in_square = (x >= -tol) & (x <= 1 + tol) & (y >= -tol) & (y <= 1 + tol)
        notch = (x > 0.5 + tol) & (y > 0.5 + tol)
        return in_square & ~notch
    return np.abs(x) + np.abs(y) <= 1 + tol


@dataclass(frozen=True, eq=False)
class Mesh:
    """Immutable polygonal mesh with edge connectivity.

    Build meshes with :meth:`Mesh.from_elements` or the ``build_uniform_*``
    functions; the derived arrays are computed there.
    """

    vertices: np.ndarray            # (NV, 2)
    elements: np.ndarray            # (NT, nv) counter-clockwise
    edges: np.ndarray               # (NE, 2) ascending vertex indices
    normals: np.ndarray             # (NE, 2) assigned unit normals n_e
    tangents: np.ndarray            # (NE, 2) unit direction edges[:,0] -> edges[:,1]
    edge_lengths: np.ndarray        # (NE,)
    edge_elements: np.ndarray       # (NE, 2), -1 where absent
    element_edges: np.ndarray       # (NT, nv) local edge i joins vertex i and i+1
    element_edge_signs: np.ndarray  # (NT, nv) +1 if local direction is ascending
    boundary: np.ndarray            # (NE,) bool
    areas: np.ndarray               # (NT,)
    diameters: np.ndarray           # (NT,)
    centroids: np.ndarray           # (NT, 2)
    domain: str = "custom"
    family: str = "custom"
    level: int = 0
    spacing: float = float("nan")
    meta: dict = field(default_factory=dict)

    @classmethod
    def from_elements(cls, vertices, elements, domain="custom", family="custom",
                      level=0, spacing=float("nan"), meta=None):
        vertices = np.ascontiguousarray(vertices, dtype=float)
        elements = np.ascontiguousarray(elements, dtype=np.int64)
        if elements.ndim != 2 or elements.shape[1] < 3:
            raise MeshError("elements must be an (NT, nv) array with nv >= 3")
        nt, nv = elements.shape

        xy = vertices[elements]
        nxt = np.roll(xy, -1, axis=1)
        areas = 0.5 * np.sum(xy[..., 0] * nxt[..., 1] - nxt[..., 0] * xy[..., 1], axis=1)
        if np.any(areas <= 0):
            bad = np.flatnonzero(areas <= 0)[:5]
            raise MeshError(f"elements {bad.tolist()} are not counter-clockwise")
        diff = xy[:, :, None, :] - xy[:, None, :, :]
        diameters = np.sqrt(np.max(np.sum(diff ** 2, axis=-1), axis=(1, 2)))
        centroids = xy.mean(axis=1)

        a = elements
        b = np.roll(elements, -1, axis=1)
        lo = np.minimum(a, b).ravel()
        hi = np.maximum(a, b).ravel()
        keys = np.column_stack([lo, hi])
        edges, inverse = np.unique(keys, axis=0, return_inverse=True)
        inverse = inverse.ravel()
        element_edges = inverse.reshape(nt, nv)
        element_edge_signs = np.where(a < b, 1, -1).astype(np.int64)

        ne = len(edges)
        counts = np.bincount(inverse, minlength=ne)
        if np.any(counts > 2):
            raise MeshError("an edge is shared by more than two elements")
        edge_elements = np.full((ne, 2), -1, dtype=np.int64)
        owner = np.repeat(np.arange(nt), nv)
        order = np.argsort(inverse, kind="stable")
        first = np.ones(len(order), dtype=bool)
        first[1:] = inverse[order][1:] != inverse[order][:-1]
        edge_elements[inverse[order][first], 0] = owner[order][first]
        edge_elements[inverse[order][~first], 1] = owner[order][~first]
        boundary = counts == 1

        d = vertices[edges[:, 1]] - vertices[edges[:, 0]]
        lengths = np.hypot(d[:, 0], d[:, 1])
        if np.any(lengths == 0):
            raise MeshError("degenerate zero-length edge")
        tangents = d / lengths[:, None]
        normals = np.column_stack([tangents[:, 1], -tangents[:, 0]])

        return cls(vertices, elements, edges, normals, tangents, lengths,
                   edge_elements, element_edges, element_edge_signs, boundary,
                   areas, diameters, centroids, domain, family, level,
                   float(spacing), dict(meta or {}))

    @property
    def n_elements(self):
        return len(self.elements)

    @property
    def n_edges(self):
        return len(self.edges)

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def h(self):
        return float(self.diameters.max())

    @property
    def boundary_vertices(self):
        flags = np.zeros(self.n_vertices, dtype=bool)
        flags[self.edges[self.boundary].ravel()] = True
        return flags

    def element_vertices(self, t):
        return self.vertices[self.elements[t]]

    def outward_normal(self, t, local_edge):
        e = self.element_edges[t, local_edge]
        tx, ty = self.tangents[e]
        return self.element_edge_signs[t, local_edge] * np.array([ty, -tx])

    def edge_midpoints(self):
        return 0.5 * (self.vertices[self.edges[:, 0]] + self.vertices[self.edges[:, 1]])

    def permuted(self, perm):
        """The same mesh with elements listed in the order ``perm``."""
        perm = np.asarray(perm)
        return Mesh.from_elements(self.vertices, self.elements[perm], self.domain,
                                  self.family, self.level, self.spacing, self.meta)

    def dump(self, stream):
        """Write the plain-text dump: ``v x y``, ``e i1 i2 ...``, ``g i1 i2 nx ny b``."""
        for x, y in self.vertices.tolist():
            stream.write(f"v {x!r} {y!r}\n")
        for elem in self.elements.tolist():
            stream.write("e " + " ".join(str(i) for i in elem) + "\n")
        for (i, j), (nx, ny), b in zip(self.edges.tolist(), self.normals.tolist(),
                                       self.boundary.tolist()):
            stream.write(f"g {i} {j} {nx!r} {ny!r} {int(b)}\n")


def assign_edge_normals(vertices, edges):
    """Assigned unit normals for edges given as vertex-index pairs.

    Endpoints are put in ascending index order, and the normal is the
    clockwise rotation of the unit direction between them.
    """
    vertices = np.asarray(vertices, dtype=float)
    edges = np.sort(np.asarray(edges, dtype=np.int64), axis=1)
    d = vertices[edges[:, 1]] - vertices[edges[:, 0]]
    lengths = np.hypot(d[:, 0], d[:, 1])
    if np.any(lengths == 0):
        raise MeshError("degenerate zero-length edge")
    d /= lengths[:, None]
    return np.column_stack([d[:, 1], -d[:, 0]])


def refine(mesh):
    """Uniform refinement by edge midpoints (and centers for quadrilaterals)."""
    nv0 = mesh.n_vertices
    nvert = mesh.elements.shape[1]
    if nvert not in (3, 4):
        raise MeshError("uniform refinement supports triangles and quadrilaterals")
    mids = nv0 + mesh.element_edges
    vertices = [mesh.vertices, mesh.edge_midpoints()]
    v = mesh.elements
    if nvert == 3:
        m01, m12, m20 = mids[:, 0], mids[:, 1], mids[:, 2]
        children = np.stack([
            np.column_stack([v[:, 0], m01, m20]),
            np.column_stack([m01, v[:, 1], m12]),
            np.column_stack([m20, m12, v[:, 2]]),
            np.column_stack([m01, m12, m20]),
        ], axis=1)
    else:
        c = nv0 + mesh.n_edges + np.arange(mesh.n_elements)
        vertices.append(mesh.centroids)
        m01, m12, m23, m30 = (mids[:, i] for i in range(4))
        children = np.stack([
            np.column_stack([v[:, 0], m01, c, m30]),
            np.column_stack([m01, v[:, 1], m12, c]),
            np.column_stack([c, m12, v[:, 2], m23]),
            np.column_stack([m30, c, m23, v[:, 3]]),
        ], axis=1)
    elements = children.reshape(-1, nvert)
    return Mesh.from_elements(np.vstack(vertices), elements, mesh.domain, mesh.family,
                              mesh.level + 1, mesh.spacing / 2, mesh.meta)


def _grid(x0, x1, y0, y1, nx, ny):
    xs = np.linspace(x0, x1, nx + 1)
    ys = np.linspace(y0, y1, ny + 1)
    X, Y = np.meshgrid(xs, ys, indexing="xy")
    vertices = np.column_stack([X.ravel(), Y.ravel()])

    def vid(i, j):
        return j * (nx + 1) + i

    return vertices, vid


def _split_squares(cells, vid, diagonal):
    tris = []
    for i, j in cells:
        ll, lr, ur, ul = vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)
        if diagonal == "main":
            tris += [(ll, lr, ur), (ll, ur, ul)]
        elif diagonal == "anti":
            tris += [(ll, lr, ul), (lr, ur, ul)]
        else:
            raise MeshError(f"diagonal must be 'main' or 'anti', got {diagonal!r}")
    return np.array(tris)


def _compact(vertices, elements):
    used = np.unique(elements)
    remap = np.full(len(vertices), -1)
    remap[used] = np.arange(len(used))
    return vertices[used], remap[elements]


def _coarse_triangular(domain, diagonal):
    if domain in ("omega1", "omega2", "omega3"):
        lo, hi = (-1.0, 1.0) if domain == "omega2" else (0.0, 1.0)
        vertices, vid = _grid(lo, hi, lo, hi, 2, 2)
        cells = [(i, j) for j in range(2) for i in range(2)]
        if domain == "omega3":
            cells.remove((1, 1))
        vertices, elements = _compact(vertices, _split_squares(cells, vid, diagonal))
        return vertices, elements, (hi - lo) / 2
    # cracked diamond: vertex 5 duplicates (1, 0) for the elements below the slit
    vertices = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [-1.0, 0.0],
                         [0.0, -1.0], [1.0, 0.0]])
    elements = np.array([[0, 1, 2], [0, 2, 3], [0, 3, 4], [0, 4, 5]])
    return vertices, elements, 1.0


def _rectangle_extent(domain, kind):
    domain = domain_id(domain)
    if domain == "omega1":
        return 0.0, 1.0
    if domain == "omega2":
        return -1.0, 1.0
    raise MeshError(f"{kind} partitions are only available on omega1 and omega2, "
                    f"not {domain}")


def _refined(mesh, level):
    if level < 0:
        raise MeshError(f"refinement level must be non-negative, got {level}")
    for _ in range(level):
        mesh = refine(mesh)
    return mesh


def build_uniform_triangular(domain, level, diagonal="main"):
    """Triangular partition refined ``level`` times by edge midpoints.

    Level 0 splits axis-aligned squares (side 1/2 on the unit-size domains,
    side 1 on ``omega2``) along one diagonal; ``diagonal="main"`` joins the
    lower-left and upper-right corners, ``"anti"`` the other two.  The
    cracked diamond starts from its four quadrant triangles.
    """
    domain = domain_id(domain)
    vertices, elements, spacing = _coarse_triangular(domain, diagonal)
    mesh = Mesh.from_elements(vertices, elements, domain, "tri", 0, spacing,
                              {"diagonal": diagonal})
    return _refined(mesh, level)


def _build_quads(domain, level, nx, ny, family):
    lo, hi = _rectangle_extent(domain, family)
    vertices, vid = _grid(lo, hi, lo, hi, nx, ny)
    quads = [(vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1))
             for j in range(ny) for i in range(nx)]
    mesh = Mesh.from_elements(vertices, np.array(quads), domain_id(domain), family, 0,
                              (hi - lo) / ny)
    return _refined(mesh, level)


def build_uniform_rectangular(domain, level):
    """Rectangular partition starting from a 3 x 2 grid of rectangles."""
    return _build_quads(domain, level, 3, 2, "rect")


def build_uniform_square(domain, level):
    """Square partition starting from a 2 x 2 grid of squares."""
    return _build_quads(domain, level, 2, 2, "square")


def build_mesh(domain, family, level, **options):
    if family == "tri":
        return build_uniform_triangular(domain, level, **options)
    if family == "rect":
        return build_uniform_rectangular(domain, level)
    if family == "square":
        return build_uniform_square(domain, level)
    raise MeshError(f"unknown partition family {family!r}; expected one of {FAMILIES}")
