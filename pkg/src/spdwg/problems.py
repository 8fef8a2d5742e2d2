"""Benchmark problems with closed-form solutions.

Each problem is a set of smooth *pieces* (one per coefficient region)
defined symbolically.  The numeric callbacks for u, its derivatives, the
diffusion tensor a, the drift mu and their derivatives are generated with
sympy, and the source term is assembled from them with the product rule

    f = mu . grad u + u div mu
        - 1/2 sum_ij [a_ij d_ij u + (d_i a_ij) d_j u + (d_j a_ij) d_i u + u d_ij a_ij].
"""

from dataclasses import dataclass, field

import numpy as np
import sympy as sp

X, Y = sp.symbols("x y", real=True)


def _lambdify(expr):
    fn = sp.lambdify((X, Y), expr, modules="numpy")

    def call(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return np.asarray(fn(x, y), dtype=float) + np.zeros(np.broadcast(x, y).shape)

    return call


def _stack(fns, shape):
    def call(x, y):
        x = np.asarray(x, dtype=float)
        vals = np.stack([fn(x, y) for fn in fns], axis=-1)
        return vals.reshape(vals.shape[:-1] + shape)

    return call


class Piece:
    """One smooth region of a problem, built from sympy expressions."""

    def __init__(self, u, a, mu):
        self.u_expr = sp.sympify(u)
        self.a_expr = sp.Matrix(a)
        self.mu_expr = sp.Matrix(mu)
        if self.a_expr != self.a_expr.T:
            raise ValueError("the diffusion tensor must be symmetric")
        u, A, M, v = self.u_expr, self.a_expr, self.mu_expr, (X, Y)
        self.u = _lambdify(u)
        self.g = self.u
        self.grad_u = _stack([_lambdify(sp.diff(u, s)) for s in v], (2,))
        self.hess_u = _stack([_lambdify(sp.diff(u, s, r)) for s in v for r in v], (2, 2))
        self.a = _stack([_lambdify(A[i, j]) for i in range(2) for j in range(2)], (2, 2))
        self.mu = _stack([_lambdify(M[i]) for i in range(2)], (2,))
        self.div_mu = _lambdify(sp.diff(M[0], X) + sp.diff(M[1], Y))
        # column divergence (sum_i d_i a_ij)_j; equals the row divergence by symmetry
        self.div_a = _stack([_lambdify(sum(sp.diff(A[i, j], v[i]) for i in range(2)))
                             for j in range(2)], (2,))
        self.hess_trace_a = _lambdify(
            sum(sp.diff(A[i, j], v[i], v[j]) for i in range(2) for j in range(2)))

    def grad(self, x, y):
        g = self.grad_u(x, y)
        return g[..., 0], g[..., 1]

    def f(self, x, y):
        """Source term from the product-rule expansion of the callbacks."""
        u = self.u(x, y)
        gu = self.grad_u(x, y)
        hu = self.hess_u(x, y)
        A = self.a(x, y)
        M = self.mu(x, y)
        da = self.div_a(x, y)
        drift = np.sum(M * gu, axis=-1) + u * self.div_mu(x, y)
        diffusion = (np.einsum("...ij,...ij->...", A, hu)
                     + 2.0 * np.sum(da * gu, axis=-1)
                     + u * self.hess_trace_a(x, y))
        return drift - 0.5 * diffusion


@dataclass(frozen=True)
class Coefficients:
    """Plain coefficient callbacks for problems without regions."""

    a: object
    mu: object
    f: object = None
    u: object = None

    def piece_for_element(self, mesh, t):
        return self

    @property
    def g(self):
        return self.u


def constant_tensor(matrix):
    matrix = np.asarray(matrix, dtype=float)
    return lambda x, y: np.broadcast_to(matrix, np.shape(x) + matrix.shape)


def constant_vector(vector):
    return constant_tensor(vector)


@dataclass
class TestProblem:
    """A benchmark: domain, default discretization and exact solution.

    ``pieces`` holds the smooth regions and ``region`` maps coordinate
    arrays to piece indices.  Elements are assigned to a region through
    their centroid, so the mandated meshes must resolve every interface.
    """

    __test__ = False  # not a pytest class

    name: str
    description: str
    domain: str
    family: str
    pieces: list
    region: object = None
    k: int = 2
    s: int = 1
    gammas: tuple = (1.0, 1.0, 1.0)
    levels: tuple = (0, 1, 2, 3, 4)
    mesh_options: dict = field(default_factory=dict)
    homogeneous: bool = False
    variants: dict = field(default_factory=dict)

    def region_of(self, x, y):
        if self.region is None:
            return np.zeros(np.shape(x), dtype=int)
        return np.asarray(self.region(np.asarray(x, float), np.asarray(y, float)), dtype=int)

    def piece_for_element(self, mesh, t):
        cx, cy = mesh.centroids[t]
        return self.pieces[int(self.region_of(cx, cy))]

    def piece_at(self, x, y):
        return self.pieces[int(self.region_of(x, y))]

    def source_at(self, point):
        x, y = point
        return float(self.piece_at(x, y).f(np.array(x), np.array(y)))

    def check_alignment(self, mesh):
        """Raise if a coefficient interface cuts through an element."""
        if len(self.pieces) == 1:
            return
        xy = mesh.vertices[mesh.elements]
        c = mesh.centroids[:, None, :]
        probes = np.concatenate([0.999 * xy + 0.001 * c, 0.5 * (xy + c)], axis=1)
        regions = self.region_of(probes[..., 0], probes[..., 1])
        bad = np.flatnonzero(np.any(regions != regions[:, :1], axis=1))
        if len(bad):
            raise ValueError(
                f"problem {self.name!r}: coefficient interface crosses {len(bad)} "
                f"element(s) of the {mesh.family} mesh at level {mesh.level}")

    def check_positive_definite(self, points):
        x, y = np.asarray(points, dtype=float).T
        for r, piece in enumerate(self.pieces):
            mask = self.region_of(x, y) == r
            if not np.any(mask):
                continue
            eig = np.linalg.eigvalsh(piece.a(x[mask], y[mask]))
            if eig.min() <= 0:
                raise ValueError(f"problem {self.name!r}: diffusion tensor not positive "
                                 f"definite (min eigenvalue {eig.min():.3e})")

    def with_config(self, **changes):
        kw = dict(self.__dict__)
        kw.update(changes)
        return TestProblem(**{k: v for k, v in kw.items() if k in self.__dataclass_fields__})


def _quadrant(x, y):
    # 0..3 for the first..fourth quadrant
    return np.where(y > 0, np.where(x > 0, 0, 1), np.where(x < 0, 2, 3))


def _build_catalog():
    sin, cos, pi, exp = sp.sin, sp.cos, sp.pi, sp.exp
    x, y = X, Y
    a_const = [[3, 1], [1, 2]]
    a_var = [[1 + x ** 2, sp.Rational(1, 4) * x * y], [sp.Rational(1, 4) * x * y, 1 + y ** 2]]
    zero = [0, 0]
    eye = [[1, 0], [0, 1]]
    problems = []

    problems.append(TestProblem(
        "t3", "u = sin(x)cos(y), constant anisotropic a, mu = (1, 1), unit square",
        "omega1", "tri", [Piece(sin(x) * cos(y), a_const, [1, 1])],
        k=2, s=1, gammas=(1, 1, 1), levels=(0, 1, 2, 3, 4),
        variants={"s0": dict(s=0)}))
    problems.append(TestProblem(
        "t4", "u = cos(pi x)cos(pi y), constant anisotropic a, rectangles",
        "omega1", "rect", [Piece(cos(pi * x) * cos(pi * y), a_const, [1, 1])],
        k=2, s=0, gammas=(1, 1, 1), levels=(1, 2, 3, 4, 5),
        variants={"k1": dict(k=1, s=0, gammas=(0, 1, 1))}))
    problems.append(TestProblem(
        "t5", "u = sin(x)cos(y), variable a, mu = (x, y), unit square",
        "omega1", "tri", [Piece(sin(x) * cos(y), a_var, [x, y])],
        k=2, s=1, gammas=(1, 1, 1), levels=(0, 1, 2, 3, 4),
        variants={"k1": dict(k=1, s=0)}))
    problems.append(TestProblem(
        "t6", "u = sin(x)cos(y), variable a, mu = (x, y), L-shaped domain",
        "omega3", "tri", [Piece(sin(x) * cos(y), a_var, [x, y])],
        k=2, s=1, gammas=(10000, 1, 1), levels=(0, 1, 2, 3),
        variants={"s0": dict(s=0, gammas=(0.1, 1, 1))}))
    problems.append(TestProblem(
        "t7", "u = sin(x)cos(y), variable a, mu = (x, y), cracked diamond",
        "omega4", "tri", [Piece(sin(x) * cos(y), a_var, [x, y])],
        k=2, s=1, gammas=(0, 1, 1), levels=(0, 1, 2, 3),
        variants={"gamma1": dict(gammas=(1, 1, 1))}))
    problems.append(TestProblem(
        "t8", "a = I, u = 2 sin(2x)cos(3y) below y = 1 - x; a = 2I, u = sin(2x)cos(3y) above",
        "omega1", "tri",
        [Piece(2 * sin(2 * x) * cos(3 * y), eye, zero),
         Piece(sin(2 * x) * cos(3 * y), [[2, 0], [0, 2]], zero)],
        region=lambda x, y: (y >= 1 - x).astype(int),
        k=2, s=1, gammas=(1, 1, 1), levels=(0, 1, 2, 3, 4),
        mesh_options={"diagonal": "anti"}))
    alpha9 = [sp.Rational(1, 100), 100, sp.Rational(1, 10), 10]
    a9 = [(1000, 100), (sp.Rational(1, 10), sp.Rational(1, 100)), (100, 10), (1, sp.Rational(1, 10))]
    problems.append(TestProblem(
        "t9", "quadrant-wise constant a, u = alpha_i sin(pi x)sin(pi y) on (-1, 1)^2",
        "omega2", "rect",
        [Piece(al * sin(pi * x) * sin(pi * y), [[a11, 0], [0, a22]], zero)
         for al, (a11, a22) in zip(alpha9, a9)],
        region=_quadrant, k=2, s=0, gammas=(1, 1, 1), levels=(1, 2, 3, 4),
        homogeneous=True))
    a11 = [[2 + x ** 2, 2 + y ** 2], [2 * (2 + x ** 2), 2 * (2 - y ** 2)],
           [3 * (2 - x ** 2), 3 * (2 - y ** 2)], [4 * (2 - x ** 2), 4 * (2 + y ** 2)]]
    problems.append(TestProblem(
        "t11", "quadrant-wise variable a, u = cos(x)cos(y)/alpha_i on (-1, 1)^2",
        "omega2", "tri",
        [Piece(cos(x) * cos(y) / (i + 1), [[d1, 0], [0, d2]], zero)
         for i, (d1, d2) in enumerate(a11)],
        region=_quadrant, k=2, s=1, gammas=(1, 1, 1), levels=(0, 1, 2, 3, 4),
        variants={"gamma0": dict(gammas=(0, 1, 1))}))
    r2 = x ** 2 + y ** 2
    problems.append(TestProblem(
        "t12", "u = (x^2 + y^2)^0.8, a discontinuous at the origin, rectangles",
        "omega1", "rect",
        [Piece(r2 ** sp.Rational(4, 5), [[1 + x ** 2 / r2, x * y / r2], [x * y / r2, 1 + y ** 2 / r2]],
               zero)],
        k=2, s=0, gammas=(1, 1, 1), levels=(1, 2, 3, 4, 5)))
    c13 = sp.Rational(1, 2) * sp.cbrt(x) * sp.cbrt(y)
    problems.append(TestProblem(
        "t13", "u = cos(x)sin(y), a12 = 0.5 x^(1/3) y^(1/3), mu = (e^(1-x), e^(xy))",
        "omega1", "tri",
        [Piece(cos(x) * sin(y), [[1 + x, c13], [c13, 1 + y]], [exp(1 - x), exp(x * y)])],
        k=2, s=1, gammas=(1, 1, 1), levels=(0, 1, 2, 3, 4),
        variants={"k1": dict(k=1, s=0)}))
    problems.append(TestProblem(
        "t14", "u = -x(x-1)y(y-1), a = I, mu = 0 (maximum principle)",
        "omega1", "tri", [Piece(-x * (x - 1) * y * (y - 1), eye, zero)],
        k=2, s=1, gammas=(0, 0, 0), levels=(2, 3, 4),
        homogeneous=True,
        variants={"square": dict(family="square", s=0, levels=(2, 3, 4, 5)),
                  "gamma2": dict(gammas=(0, 1, 0))}))
    return {p.name: p for p in problems}


_CATALOG = None


def _catalog_map():
    global _CATALOG
    if _CATALOG is None:
        _CATALOG = _build_catalog()
    return _CATALOG


def catalog():
    """All benchmark problems, in id order (``t3``, ``t4``, ...)."""
    return list(_catalog_map().values())


def problem_ids():
    return list(_catalog_map())


def get_problem(name, variant=None):
    try:
        problem = _catalog_map()[name.lower()]
    except KeyError:
        raise KeyError(f"unknown problem {name!r}; available: {', '.join(problem_ids())}") from None
    if variant:
        try:
            problem = problem.with_config(**problem.variants[variant])
        except KeyError:
            raise KeyError(f"problem {name!r} has no variant {variant!r}; "
                           f"available: {', '.join(problem.variants) or 'none'}") from None
    return problem


def source_at(problem, point):
    return problem.source_at(point)
