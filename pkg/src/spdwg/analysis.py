"""Error norms, convergence rates, DOF accounting and extrema reports."""

import io
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .assembly import assemble_system
from .basis import dim_poly, lagrange_1d
from .mesh import build_mesh
from .projection import element_basis, project_element
from .quadrature import edge_parameters, element_rule
from .solver import solve_saddle
from .weak_ops import element_size

CSV_HEADER = ("problem,k,s,gamma1,gamma2,gamma3,level,inv_h,"
              "eps0,rate0,epsb,rateb,epsn,raten,eh,rateh")
UNDEFINED = None  # rate marker for zero or missing errors


class ErrorNorms(NamedTuple):
    eps0: float
    epsb: float
    epsn: float
    eh: float


def _edge_sum_sq(mesh, coeffs, degree, npts, meshsize):
    """sum_T h_T int_{dT} |q|^2 for per-edge nodal polynomials ``coeffs``."""
    t, w = edge_parameters(npts)
    phi = lagrange_1d(degree, t)[0]
    per_edge = ((coeffs @ phi.T) ** 2) @ w * mesh.edge_lengths
    h = np.array([element_size(mesh, t, meshsize) for t in range(mesh.n_elements)])
    total = 0.0
    for loc in range(mesh.element_edges.shape[1]):
        total += np.sum(h * per_edge[mesh.element_edges[:, loc]])
    return float(total)


def dual_norms(rho, mesh, order=None, meshsize="area"):
    """(||eps0||, ||epsb||, |||epsn|||) of a dual WeakFunction.

    The edge norms are weighted by the same element size h_T as the
    stabilizer.
    """
    k = rho.k
    order = order or 2 * k + 2
    s0 = 0.0
    for t in range(mesh.n_elements):
        rule = element_rule(mesh.element_vertices(t), order)
        vals = element_basis(mesh, t, k).values(rule.points) @ rho.v0[t]
        s0 += rule.integrate(vals ** 2)
    npts = k + 2
    sb = _edge_sum_sq(mesh, rho.vb, k, npts, meshsize)
    sn = _edge_sum_sq(mesh, rho.vn, k - 1, npts, meshsize)
    return math.sqrt(s0), math.sqrt(sb), math.sqrt(sn)


def primal_error(u_coeffs, problem, mesh, s, order=None):
    """||u_h - Q_h^(s) u|| with the projection taken element by element."""
    order = order or 2 * s + 6
    total = 0.0
    for t in range(mesh.n_elements):
        piece = problem.piece_for_element(mesh, t)
        q = project_element(piece.u, mesh, t, s, order)
        rule = element_rule(mesh.element_vertices(t), order)
        diff = element_basis(mesh, t, s).values(rule.points) @ (u_coeffs[t] - q)
        total += rule.integrate(diff ** 2)
    return math.sqrt(total)


def error_norms(solution, problem, mesh, order=None, meshsize="area"):
    """The four error norms of a solved benchmark.

    The exact dual variable is zero, so the dual components of the
    solution are the errors themselves.
    """
    s = dim_to_degree(solution.u.shape[1])
    e0, eb, en = dual_norms(solution.rho, mesh, order, meshsize)
    return ErrorNorms(e0, eb, en, primal_error(solution.u, problem, mesh, s, order))


def dim_to_degree(n):
    s = 0
    while dim_poly(s) < n:
        s += 1
    if dim_poly(s) != n:
        raise ValueError(f"{n} is not the dimension of a polynomial space")
    return s


def convergence_rates(errors, h=None, rtol=1e-6):
    """log2(err_{i-1} / err_i) for consecutive entries.

    Zero or non-finite errors give ``UNDEFINED`` (None).  When ``h`` is
    given it must halve from one entry to the next.
    """
    errors = list(errors)
    if h is not None:
        h = list(h)
        if len(h) != len(errors):
            raise ValueError("errors and h must have equal length")
        for a, b in zip(h, h[1:]):
            if not math.isclose(a / b, 2.0, rel_tol=rtol):
                raise ValueError(f"mesh sizes must halve between levels, got {a} -> {b}")
    rates = []
    for a, b in zip(errors, errors[1:]):
        if a is None or b is None or not (a > 0 and b > 0) or not math.isfinite(a / b):
            rates.append(UNDEFINED)
        else:
            rates.append(math.log2(a / b))
    return rates


@dataclass
class ErrorRow:
    level: int
    h: float
    norms: ErrorNorms
    diagnostics: dict = field(default_factory=dict)

    @property
    def inv_h(self):
        return 1.0 / self.h


@dataclass
class ErrorReport:
    """Per-level error norms of one refinement study."""

    problem: str
    k: int
    s: int
    gammas: tuple
    rows: list = field(default_factory=list)

    def add(self, level, h, norms, diagnostics=None):
        self.rows.append(ErrorRow(level, h, ErrorNorms(*norms), dict(diagnostics or {})))

    def column(self, name):
        return [getattr(r.norms, name) for r in self.rows]

    def rates(self, name):
        """Rates for norm ``name``; the first level has no rate."""
        return [UNDEFINED] + convergence_rates(self.column(name), [r.h for r in self.rows])

    def _table(self):
        names = ErrorNorms._fields
        rates = {n: self.rates(n) for n in names}
        for i, row in enumerate(self.rows):
            yield row, [(getattr(row.norms, n), rates[n][i]) for n in names]

    def to_csv(self):
        out = io.StringIO()
        out.write(CSV_HEADER + "\n")
        g1, g2, g3 = self.gammas
        for row, cols in self._table():
            fields = [self.problem, str(self.k), str(self.s), _num(g1), _num(g2), _num(g3),
                      str(row.level), _num(row.inv_h)]
            for err, rate in cols:
                fields += [f"{err:.6e}", "" if rate is None else f"{rate:.4f}"]
            out.write(",".join(fields) + "\n")
        return out.getvalue()

    def to_markdown(self):
        head = "| 1/h | eps0 | Rate | epsb | Rate | epsn | Rate | e_h | Rate |"
        lines = [f"**{self.problem}**: k={self.k}, s={self.s}, "
                 f"gamma=({', '.join(_num(g) for g in self.gammas)})", "",
                 head, "|" + "---|" * 9]
        for row, cols in self._table():
            cells = [_num(row.inv_h)]
            for err, rate in cols:
                cells += [f"{err:.3e}", "" if rate is None else f"{rate:.2f}"]
            lines.append("| " + " | ".join(cells) + " |")
        return "\n".join(lines) + "\n"


def _num(x):
    x = float(x)
    return str(int(x)) if x.is_integer() else repr(x)


# -- degrees of freedom -------------------------------------------------------

SCHEMES = ("simplified", "general")


def dof_formula(n_elements, n_edges, k, scheme="simplified"):
    """Dual dimension on a polygonal mesh from the element counts."""
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    interior = (k + 1) * (k + 2) // 2 * n_elements
    if scheme == "simplified":
        return interior + (2 * k + 1) * n_edges
    if scheme == "general":
        return interior + (3 * k + 1) * n_edges
    raise ValueError(f"scheme must be one of {SCHEMES}, got {scheme!r}")


def dof_count(mesh, k, scheme="simplified"):
    return dof_formula(mesh.n_elements, mesh.n_edges, k, scheme)


def dof_count_3d(n_elements, n_faces, k, scheme="simplified"):
    """Dual dimension on a polyhedral mesh (arithmetic only)."""
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    interior = (k + 1) * (k + 2) * (k + 3) // 6 * n_elements
    if scheme == "simplified":
        return interior + (k + 1) ** 2 * n_faces
    if scheme == "general":
        return interior + (k + 1) * (3 * k + 2) * n_faces // 2
    raise ValueError(f"scheme must be one of {SCHEMES}, got {scheme!r}")


# -- maximum principle ----------------------------------------------------------

@dataclass
class ExtremaReport:
    """Extrema of u_h sampled at vertices (v), centers (c), edge midpoints (e).

    ``interior`` samples avoid the boundary; ``boundary`` samples lie on it.
    Values are evaluated element by element, so a vertex shared by several
    elements contributes one value per element.
    """

    interior_max: dict
    interior_min: dict
    boundary_max: dict
    boundary_min: dict

    def rows(self):
        out = []
        for kind in ("v", "c", "e"):
            out.append((f"max_interior u_h|{kind}", self.interior_max[kind]))
            out.append((f"min_interior u_h|{kind}", self.interior_min[kind]))
        for kind in ("v", "e"):
            out.append((f"max_boundary u_h|{kind}", self.boundary_max[kind]))
        return out

    def to_text(self):
        return "".join(f"{name:24s} {value: .3e}\n" for name, value in self.rows())


def max_principle_report(solution, mesh):
    """Sample u_h exactly at element vertices, centers and edge midpoints."""
    s = dim_to_degree(solution.u.shape[1])
    bverts = np.zeros(mesh.n_vertices, dtype=bool)
    bverts[mesh.boundary_vertices] = True
    samples = {"v": ([], []), "c": ([], []), "e": ([], [])}
    for t in range(mesh.n_elements):
        basis = element_basis(mesh, t, s)
        verts = mesh.elements[t]
        xy = mesh.vertices[verts]
        vals = basis.values(xy) @ solution.u[t]
        for val, on in zip(vals, bverts[verts]):
            samples["v"][bool(on)].append(val)
        samples["c"][0].append(float((basis.values(mesh.centroids[t]) @ solution.u[t])[0]))
        mids = 0.5 * (xy + np.roll(xy, -1, axis=0))
        vals = basis.values(mids) @ solution.u[t]
        for val, e in zip(vals, mesh.element_edges[t]):
            samples["e"][bool(mesh.boundary[e])].append(val)

    def pick(fn, kind, side):
        vals = samples[kind][side]
        return float(fn(vals)) if vals else float("nan")

    return ExtremaReport(
        {k: pick(np.max, k, 0) for k in "vce"},
        {k: pick(np.min, k, 0) for k in "vce"},
        {k: pick(np.max, k, 1) for k in "ve"},
        {k: pick(np.min, k, 1) for k in "ve"})


# -- refinement studies ---------------------------------------------------------

def solve_problem(problem, level, k=None, s=None, gammas=None, **options):
    """Build the mesh of ``level``, assemble and solve.

    Returns ``(mesh, system, solution)``.  Extra keyword options are passed
    to :func:`assemble_system` (quadrature orders, meshsize, threads).
    """
    k = problem.k if k is None else k
    s = problem.s if s is None else s
    gammas = problem.gammas if gammas is None else gammas
    mesh = build_mesh(problem.domain, problem.family, level, **problem.mesh_options)
    problem.check_alignment(mesh)
    system = assemble_system(mesh, problem, k, s, gammas, **options)
    return mesh, system, solve_saddle(system)


def convergence_study(problem, levels=None, k=None, s=None, gammas=None, order=None,
                      **options):
    """Solve on each level and collect an :class:`ErrorReport`."""
    k = problem.k if k is None else k
    s = problem.s if s is None else s
    gammas = tuple(problem.gammas if gammas is None else gammas)
    report = ErrorReport(problem.name, k, s, gammas)
    for level in (problem.levels if levels is None else levels):
        mesh, system, sol = solve_problem(problem, level, k, s, gammas, **options)
        report.add(level, mesh.spacing,
                   error_norms(sol, problem, mesh, order, options.get("meshsize", "area")),
                   sol.diagnostics)
    return report
