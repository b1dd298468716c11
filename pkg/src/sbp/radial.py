"""Radial grids, fields and the basic calculus on [0, r_max].

Everything downstream works with radial profiles u(r) sampled on a fixed
grid.  3D integrals of radial integrands reduce to weighted 1D sums through
the measure 4*pi*r^2 dr; the r^2 factor also removes the coordinate
singularity at the origin, so a node at r = 0 is first class.

Conventions:
- grids carry composite-trapezoid weights for integration in dr,
- derivatives are second-order finite differences (centered in the
  interior, one-sided 3-point at the endpoints),
- the variational rescaling u -> t^2 u(t r) resamples with shape-preserving
  (monotone cubic) interpolation and truncates to zero beyond r_max.

All containers are immutable after construction; the operations are pure
functions, so everything here is safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import sparse
from scipy.interpolate import PchipInterpolator

__all__ = [
    "RadialGrid",
    "RadialField",
    "ModelParams",
    "build_grid",
    "radial_integral",
    "lp_norm",
    "dirichlet_energy",
    "radial_gradient",
    "radial_laplacian",
    "rescale_field",
    "field_to_csv",
    "field_from_csv",
]

FOUR_PI = 4.0 * np.pi


def _trapezoid_weights(nodes: np.ndarray) -> np.ndarray:
    """Composite trapezoid weights for an arbitrary increasing grid."""
    w = np.zeros_like(nodes)
    w[0] = 0.5 * (nodes[1] - nodes[0])
    w[-1] = 0.5 * (nodes[-1] - nodes[-2])
    if nodes.size > 2:
        w[1:-1] = 0.5 * (nodes[2:] - nodes[:-2])
    return w


@dataclass(frozen=True)
class RadialGrid:
    """Discrete radial mesh with positive quadrature weights.

    Attributes
    ----------
    nodes : np.ndarray
        Strictly increasing radii, nodes[0] >= 0 and nodes[-1] == r_max.
    weights : np.ndarray
        Trapezoid weights for integrals in dr; they sum to r_max.
    r_max : float
        Truncation radius of the computational domain.
    n : int
        Node count (>= 16).
    """

    nodes: np.ndarray
    weights: np.ndarray
    r_max: float
    n: int

    def __post_init__(self):
        nodes = np.ascontiguousarray(self.nodes, dtype=float)
        weights = np.ascontiguousarray(self.weights, dtype=float)
        if self.n < 16:
            raise ValueError(f"grid needs n >= 16, got n={self.n}")
        if nodes.shape != (self.n,) or weights.shape != (self.n,):
            raise ValueError("nodes/weights must both have length n")
        if nodes[0] < 0.0:
            raise ValueError("nodes must start at a nonnegative radius")
        if not np.all(np.diff(nodes) > 0.0):
            raise ValueError("nodes must be strictly increasing")
        if abs(nodes[-1] - self.r_max) > 1e-12 * max(1.0, self.r_max):
            raise ValueError("last node must equal r_max")
        if not np.all(weights > 0.0):
            raise ValueError("quadrature weights must be positive")
        total = float(np.sum(weights))
        if abs(total - self.r_max) > 1e-12 * self.r_max:
            raise ValueError(
                f"weights sum to {total!r}, expected r_max={self.r_max!r}"
            )
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    @property
    def uniform(self) -> bool:
        d = np.diff(self.nodes)
        return bool(np.ptp(d) <= 1e-10 * d[0])

    def key(self) -> bytes:
        """Hashable identity of the mesh (used for operator caches)."""
        return self.nodes.tobytes()


@dataclass(frozen=True)
class RadialField:
    """Samples of a radial function on a grid."""

    grid: RadialGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.ascontiguousarray(self.values, dtype=float)
        if values.shape != (self.grid.n,):
            raise ValueError("field length must match grid node count")
        if not np.all(np.isfinite(values)):
            raise ValueError("field values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_function(cls, grid: RadialGrid, fn) -> "RadialField":
        return cls(grid, np.asarray(fn(grid.nodes), dtype=float))

    def is_zero(self) -> bool:
        return bool(np.all(self.values == 0.0))


@dataclass(frozen=True)
class ModelParams:
    """System instance (a, q, p); a = 0 selects the Poisson limit."""

    a: float
    q: float
    p: float

    def __post_init__(self):
        if self.q == 0.0:
            raise ValueError("coupling q must be nonzero")
        if self.a < 0.0:
            raise ValueError("screening parameter a must be >= 0")
        if self.p <= 1.0:
            raise ValueError("nonlinearity exponent p must exceed 1")

    def require_solver_range(self, experimental: bool = False) -> None:
        """Solvers only accept p in (4, 6); p >= 6 and p <= 2 have no
        nontrivial states, and p in (3, 4] comes with no guarantee."""
        if 4.0 < self.p < 6.0:
            return
        if experimental and 3.0 < self.p <= 4.0:
            return
        raise ValueError(
            f"p={self.p} is outside the supported range (4, 6); "
            "p >= 6 and p < 12/7 (any p <= 2 radially) admit no nontrivial "
            "solution, and p in (3, 4] is exploratory only"
        )


def build_grid(n: int, r_max: float, spacing: str = "uniform") -> RadialGrid:
    """Build a radial mesh on [0, r_max].

    spacing="uniform" gives equispaced nodes; spacing="graded" clusters
    nodes near the origin through the power-law map r = r_max * x^2, which
    resolves tightly peaked profiles without shrinking the domain.
    """
    if n < 16:
        raise ValueError(f"need n >= 16 nodes, got {n}")
    if r_max <= 0.0:
        raise ValueError(f"r_max must be positive, got {r_max}")
    x = np.linspace(0.0, 1.0, n)
    if spacing == "uniform":
        nodes = r_max * x
    elif spacing == "graded":
        nodes = r_max * x * x
    else:
        raise ValueError(f"unknown spacing {spacing!r}")
    nodes[-1] = r_max
    return RadialGrid(nodes=nodes, weights=_trapezoid_weights(nodes), r_max=float(r_max), n=int(n))


def radial_integral(f: RadialField) -> float:
    """4*pi * sum w_i r_i^2 f_i, the 3D integral of a radial integrand."""
    g = f.grid
    return float(FOUR_PI * np.dot(g.weights * g.nodes**2, f.values))


def lp_norm(u: RadialField, p: float) -> float:
    """L^p norm over R^3 of a radial profile."""
    if p < 1.0:
        raise ValueError(f"lp_norm needs p >= 1, got {p}")
    g = u.grid
    s = float(np.dot(g.weights * g.nodes**2, np.abs(u.values) ** p))
    return float((FOUR_PI * s) ** (1.0 / p))


# ---------------------------------------------------------------------------
# finite-difference derivative operators (second order)
# ---------------------------------------------------------------------------

_DERIV_CACHE: dict[bytes, sparse.csr_matrix] = {}
_LAP_CACHE: dict[bytes, sparse.csr_matrix] = {}


def fd_weights(x: np.ndarray, x0: float, m: int) -> np.ndarray:
    """Finite-difference weights for the m-th derivative at x0 on the
    stencil x (Fornberg's recursion)."""
    n = x.size
    c = np.zeros((n, m + 1))
    c1 = 1.0
    c4 = x[0] - x0
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, m)
        c2 = 1.0
        c5 = c4
        c4 = x[i] - x0
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, m]


def derivative_matrix(grid: RadialGrid) -> sparse.csr_matrix:
    """Sparse matrix D with (D f)_i ~ f'(r_i).

    Five-point stencils (centered in the interior, biased near the ends)
    give fourth-order accuracy; the discrete dilation identities of the
    solver need the extra consistency order at desk-scale node counts.
    """
    key = grid.key()
    cached = _DERIV_CACHE.get(key)
    if cached is not None:
        return cached
    x = grid.nodes
    n = grid.n
    width = 5 if n >= 5 else 3
    rows, cols, vals = [], [], []
    for i in range(n):
        j0 = min(max(i - width // 2, 0), n - width)
        sten = np.arange(j0, j0 + width)
        w = fd_weights(x[sten], x[i], 1)
        rows.extend([i] * width)
        cols.extend(sten.tolist())
        vals.extend(w.tolist())
    mat = sparse.csr_matrix(
        (np.asarray(vals, dtype=float), (rows, cols)), shape=(n, n)
    )
    _DERIV_CACHE[key] = mat
    return mat


def _second_derivative_coeffs(x0, x1, x2):
    """f''(anywhere) of the interpolating quadratic through three nodes."""
    c0 = 2.0 / ((x1 - x0) * (x2 - x0))
    c1 = -2.0 / ((x1 - x0) * (x2 - x1))
    c2 = 2.0 / ((x2 - x0) * (x2 - x1))
    return c0, c1, c2


def laplacian_matrix(grid: RadialGrid) -> sparse.csr_matrix:
    """Sparse matrix L with (L f)_i ~ f''(r_i) + (2/r_i) f'(r_i).

    At a node on the axis the regular limit 3 f''(0) is used, with f''(0)
    approximated through the even extension of the profile; at r_max the
    stencil is one-sided.
    """
    key = grid.key()
    cached = _LAP_CACHE.get(key)
    if cached is not None:
        return cached
    x = grid.nodes
    n = grid.n
    rows, cols, vals = [], [], []

    # origin row
    if x[0] == 0.0:
        # 3 f''(0) with f even in r:  f''(0) ~ 2 (f1 - f0) / r1^2
        rows.extend([0, 0])
        cols.extend([0, 1])
        vals.extend([-6.0 / x[1] ** 2, 6.0 / x[1] ** 2])
    else:
        c0, c1, c2 = _second_derivative_coeffs(x[0], x[1], x[2])
        b = (x[2] - x[0]) / ((x[1] - x[0]) * (x[2] - x[1]))
        c = -(x[1] - x[0]) / ((x[2] - x[0]) * (x[2] - x[1]))
        a = -b - c
        fac = 2.0 / x[0]
        rows.extend([0, 0, 0])
        cols.extend([0, 1, 2])
        vals.extend([c0 + fac * a, c1 + fac * b, c2 + fac * c])

    hm = x[1:-1] - x[:-2]
    hp = x[2:] - x[1:-1]
    i = np.arange(1, n - 1)
    d2m = 2.0 / (hm * (hm + hp))
    d20 = -2.0 / (hm * hp)
    d2p = 2.0 / (hp * (hm + hp))
    fac = 2.0 / x[1:-1]
    d1m = -hp / (hm * (hm + hp))
    d10 = (hp - hm) / (hm * hp)
    d1p = hm / (hp * (hm + hp))
    rows.extend(np.repeat(i, 3))
    cols.extend(np.stack([i - 1, i, i + 1], axis=1).ravel())
    vals.extend(
        np.stack([d2m + fac * d1m, d20 + fac * d10, d2p + fac * d1p], axis=1).ravel()
    )

    # far end, one-sided
    c0, c1, c2 = _second_derivative_coeffs(x[-3], x[-2], x[-1])
    x0, x1, x2 = x[-1], x[-2], x[-3]
    b = (x2 - x0) / ((x1 - x0) * (x2 - x1))
    c = -(x1 - x0) / ((x2 - x0) * (x2 - x1))
    a = -b - c
    fac = 2.0 / x[-1]
    rows.extend([n - 1] * 3)
    cols.extend([n - 3, n - 2, n - 1])
    vals.extend([c0 + fac * c, c1 + fac * b, c2 + fac * a])

    mat = sparse.csr_matrix(
        (np.asarray(vals, dtype=float), (rows, cols)), shape=(n, n)
    )
    _LAP_CACHE[key] = mat
    return mat


def radial_gradient(f: RadialField) -> RadialField:
    """f'(r) by centered differences (one-sided at the endpoints)."""
    return RadialField(f.grid, derivative_matrix(f.grid) @ f.values)


def dirichlet_energy(u: RadialField) -> float:
    """|grad u|_{L^2(R^3)}^2 = 4*pi * sum w_i r_i^2 u'(r_i)^2."""
    if u.grid.n < 3:
        raise ValueError("dirichlet_energy needs at least 3 nodes")
    g = u.grid
    du = derivative_matrix(g) @ u.values
    return float(FOUR_PI * np.dot(g.weights * g.nodes**2, du * du))


def radial_laplacian(f: RadialField) -> RadialField:
    """Field of f'' + (2/r) f', the 3D Laplacian of a radial function."""
    if f.grid.n < 5:
        raise ValueError("radial_laplacian needs at least 5 nodes")
    return RadialField(f.grid, laplacian_matrix(f.grid) @ f.values)


def rescale_field(u: RadialField, t: float) -> RadialField:
    """The dilation u -> t^2 u(t r), truncated to zero past r_max.

    Resampling uses monotone cubic interpolation, which preserves the sign
    structure of ground-state candidates.  t = 1 returns the field
    unchanged.
    """
    if t <= 0.0:
        raise ValueError(f"rescale factor must be positive, got {t}")
    if t == 1.0:
        return RadialField(u.grid, u.values)
    g = u.grid
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        # pchip's harmonic-mean slopes overflow harmlessly on flat data
        interp = PchipInterpolator(g.nodes, u.values, extrapolate=False)
        vals = interp(t * g.nodes)
    vals = np.where(np.isnan(vals), 0.0, vals)
    return RadialField(g, t * t * vals)


# ---------------------------------------------------------------------------
# serialization: two-column CSV, full double precision
# ---------------------------------------------------------------------------

def field_to_csv(f: RadialField, path, label: str = "value") -> None:
    """Write a field as `r,<label>` rows with 17 significant digits."""
    data = np.column_stack([f.grid.nodes, f.values])
    np.savetxt(path, data, fmt="%.17g", delimiter=",", header=f"r,{label}", comments="")


def field_from_csv(path) -> RadialField:
    """Load a field written by field_to_csv; the grid is rebuilt with
    trapezoid weights on the stored nodes."""
    data = np.loadtxt(Path(path), delimiter=",", skiprows=1, ndmin=2)
    nodes = data[:, 0]
    grid = RadialGrid(
        nodes=nodes,
        weights=_trapezoid_weights(nodes),
        r_max=float(nodes[-1]),
        n=int(nodes.size),
    )
    return RadialField(grid, data[:, 1])
