"""Concrete boundary models.

Four constructors turn a geometric description into a :class:`WeylSystem`:

* :func:`interval_weyl` -- the second-derivative operator on (0, a) restricted
  below its Dirichlet realisation; boundary space C^2 of endpoint data.
* :func:`graph_weyl` -- the edgewise direct sum of intervals (a metric graph
  before any vertex identification); boundary space C^{2K}.
* :func:`point_weyl` -- the 3-D Laplacian restricted off n centres; boundary
  space C^n of point charges, Weyl matrix with sqrt(z)/(4 pi) diagonal.
* :func:`spin_weyl` -- the vector-valued point model with an internal
  Hermitian term, block diagonal over its eigenchannels at shifted energies.

Spectral-parameter conventions: the free operator is the second derivative
(respectively the 3-D Laplacian), not its negative, so interval Dirichlet
spectra sit at -(n pi / a)^2 and point models exclude the half line
(-inf, 0]. The principal branch of the square root is used throughout,
applied to -z for interval kernels and to z for point kernels.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .krein import (
    DirichletExclusions,
    ExcludedPointError,
    ExtensionParams,
    HalfLineExclusions,
    SmoothFunction,
    TraceMaps,
    WeylSystem,
)
from .quad import cumulative_simpson, simpson

__all__ = [
    "IntervalModel",
    "GraphModel",
    "PointModel",
    "SpinPointModel",
    "VertexGroup",
    "interval_weyl",
    "interval_traces",
    "interval_green",
    "graph_weyl",
    "graph_traces",
    "vertex_params",
    "point_weyl",
    "point_gamma",
    "point_renormalized_trace",
    "point_green_regular_part",
    "spin_weyl",
    "sine_mode",
    "cosine_mode",
    "poly_bump",
    "zero_function",
]

FOUR_PI = 4.0 * np.pi
MIN_CENTER_DISTANCE = 1e-9


# ---------------------------------------------------------------------------
# model descriptors


@dataclass(frozen=True)
class IntervalModel:
    """The operator d^2/dx^2 on (0, a) with Dirichlet free realisation."""

    a: float

    def __post_init__(self):
        if not (np.isfinite(self.a) and self.a > 0):
            raise ValueError(f"interval length must be positive, got {self.a}")


@dataclass(frozen=True)
class GraphModel:
    """Edgewise second derivative on K segments [0, a_k]."""

    lengths: tuple

    def __post_init__(self):
        lengths = tuple(float(a) for a in self.lengths)
        if not lengths or any(not np.isfinite(a) or a <= 0 for a in lengths):
            raise ValueError("all edge lengths must be positive")
        object.__setattr__(self, "lengths", lengths)

    @property
    def n_edges(self) -> int:
        return len(self.lengths)


@dataclass(frozen=True)
class PointModel:
    """3-D Laplacian restricted off n pairwise distinct centres."""

    centers: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.centers, dtype=float)
        if c.ndim != 2 or c.shape[1] != 3 or c.shape[0] < 1:
            raise ValueError("centers must be an (n, 3) array of points")
        object.__setattr__(self, "centers", c)
        d = _pairwise_distances(c)
        off = d[~np.eye(c.shape[0], dtype=bool)]
        if off.size and off.min() <= MIN_CENTER_DISTANCE:
            raise ValueError(
                f"centers must be pairwise separated by more than {MIN_CENTER_DISTANCE}"
            )

    @property
    def n_centers(self) -> int:
        return self.centers.shape[0]


@dataclass(frozen=True)
class SpinPointModel:
    """Point model with an internal Hermitian term, given by its eigenvalues b."""

    centers: np.ndarray
    b: tuple

    def __post_init__(self):
        object.__setattr__(self, "centers", PointModel(self.centers).centers)
        b = tuple(float(x) for x in self.b)
        if not b:
            raise ValueError("need at least one internal eigenvalue")
        object.__setattr__(self, "b", b)

    @property
    def n_centers(self) -> int:
        return self.centers.shape[0]

    @property
    def dim_internal(self) -> int:
        return len(self.b)


# ---------------------------------------------------------------------------
# closed-form building blocks (shared by tests and presets)


def sine_mode(freq: float) -> SmoothFunction:
    freq = float(freq)
    return SmoothFunction(
        lambda x: np.sin(freq * x) + 0j,
        lambda x: freq * np.cos(freq * x) + 0j,
        lambda x: -(freq**2) * np.sin(freq * x) + 0j,
    )


def cosine_mode(freq: float) -> SmoothFunction:
    freq = float(freq)
    return SmoothFunction(
        lambda x: np.cos(freq * x) + 0j,
        lambda x: -freq * np.sin(freq * x) + 0j,
        lambda x: -(freq**2) * np.cos(freq * x) + 0j,
    )


def poly_bump(length: float) -> SmoothFunction:
    """x (length - x): vanishes at both endpoints, curvature -2."""
    length = float(length)
    return SmoothFunction(
        lambda x: x * (length - x) + 0j,
        lambda x: length - 2.0 * x + 0j,
        lambda x: -2.0 * np.ones_like(np.asarray(x, dtype=float)) + 0j,
    )


def zero_function() -> SmoothFunction:
    zero = lambda x: np.zeros_like(np.asarray(x, dtype=float)) + 0j
    return SmoothFunction(zero, zero, zero)


# ---------------------------------------------------------------------------
# interval model


def _sqrt_minus(z: complex) -> complex:
    return complex(np.sqrt(complex(-z)))


def _interval_gamma(a: float, z: complex) -> np.ndarray:
    if z == 0:
        return np.array([[1.0, -1.0], [-1.0, 1.0]], dtype=complex) / a
    k = _sqrt_minus(z)
    c, s = np.cos(k * a), np.sin(k * a)
    return (k / s) * np.array([[c, -1.0], [-1.0, c]], dtype=complex)


def interval_green(model: IntervalModel, z: complex, zeta) -> SmoothFunction:
    """Closed form of the deficiency element G(z) zeta on the interval.

    Solves u'' = z u with boundary values u(0) = zeta_1, u(a) = zeta_2; the
    z = 0 case uses the explicit linear interpolant rather than a limit.
    """
    a = model.a
    z1, z2 = complex(zeta[0]), complex(zeta[1])
    if z == 0:
        return SmoothFunction(
            lambda x: (z1 * (a - x) + z2 * x) / a,
            lambda x: np.full(np.shape(x), (z2 - z1) / a, dtype=complex),
            lambda x: np.zeros(np.shape(x), dtype=complex),
        )
    k = _sqrt_minus(z)
    s = np.sin(k * a)
    value = lambda x: (z1 * np.sin(k * (a - x)) + z2 * np.sin(k * x)) / s
    return SmoothFunction(
        value,
        lambda x: k * (-z1 * np.cos(k * (a - x)) + z2 * np.cos(k * x)) / s,
        lambda x: complex(z) * value(x),
    )


def _interval_g_columns(a: float, z: complex, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if z == 0:
        return np.stack([(a - x) / a, x / a], axis=1).astype(complex)
    k = _sqrt_minus(z)
    s = np.sin(k * a)
    return np.stack([np.sin(k * (a - x)) / s, np.sin(k * x) / s], axis=1)


def _interval_r_apply(a, z, psi, x):
    psi = np.asarray(psi)
    x = np.asarray(x, dtype=float)
    dx = x[1] - x[0]
    if z == 0:
        left = cumulative_simpson(x * psi, dx)
        f2 = (a - x) * psi
        right = simpson(f2, dx) - cumulative_simpson(f2, dx)
        return (a - x) / a * left + x / a * right
    k = _sqrt_minus(z)
    s = np.sin(k * a)
    f1 = np.sin(k * x) * psi
    f2 = np.sin(k * (a - x)) * psi
    left = cumulative_simpson(f1, dx)
    right = simpson(f2, dx) - cumulative_simpson(f2, dx)
    return (np.sin(k * (a - x)) * left + np.sin(k * x) * right) / (k * s)


def _interval_g_adjoint(a, z, psi, x):
    # integrals of the z-kernel against psi: the adjoint at conj(z)
    x = np.asarray(x, dtype=float)
    dx = x[1] - x[0]
    cols = _interval_g_columns(a, z, x)
    return np.array(
        [simpson(cols[:, 0] * psi, dx), simpson(cols[:, 1] * psi, dx)]
    )


def _one_sided_derivative(samples: np.ndarray, h: float, left: bool) -> complex:
    if samples.shape[0] < 5:
        raise ValueError("sampled traces need at least 5 nodes next to each endpoint")
    f = samples[:5] if left else samples[-1:-6:-1]
    d = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * h)
    return d if left else -d


def interval_traces(model: IntervalModel, psi, grid=None):
    """Boundary value and boundary derivative traces (rho, tau).

    rho psi = (psi(0+), psi(a-)); tau psi = (psi'(0+), -psi'(a-)), i.e. the
    derivatives pointing into the interval. Accepts a closed-form
    :class:`SmoothFunction` or uniform samples with their grid; sampled
    derivatives use one-sided fourth-order stencils.
    """
    if isinstance(psi, SmoothFunction):
        ends = np.array([0.0, model.a])
        vals = psi.f(ends)
        ders = psi.df(ends)
        rho = np.array([vals[0], vals[1]], dtype=complex)
        tau = np.array([ders[0], -ders[1]], dtype=complex)
        return rho, tau
    samples = np.asarray(psi)
    if grid is None:
        raise ValueError("sampled traces need the sample grid")
    x = np.asarray(grid, dtype=float)
    h = x[1] - x[0]
    rho = np.array([samples[0], samples[-1]], dtype=complex)
    tau = np.array(
        [
            _one_sided_derivative(samples, h, left=True),
            _one_sided_derivative(samples, h, left=False),
        ],
        dtype=complex,
    )
    return rho, tau


def _default_gram_nodes(length: float) -> int:
    n = max(501, int(round(2001 * length)))
    return n if n % 2 == 1 else n + 1


def interval_weyl(model: IntervalModel, gram_nodes: int | None = None) -> WeylSystem:
    """Weyl system of the interval model.

    ``gram_nodes`` sets the Simpson grid used for the Gram matrix of
    deficiency elements (default 2001 nodes per unit length, at least 501).
    """
    a = model.a
    nodes = gram_nodes or _default_gram_nodes(a)
    xq = np.linspace(0.0, a, nodes)
    dxq = xq[1] - xq[0]
    excluded = DirichletExclusions([a])

    def excl_guard(z):
        if excluded.contains(complex(z)):
            raise_excluded(excluded, z)

    def gamma(z):
        excl_guard(z)
        return _interval_gamma(a, z)

    def gram(z, w):
        excl_guard(z)
        excl_guard(w)
        gz = _interval_g_columns(a, z, xq)
        gw = _interval_g_columns(a, w, xq)
        out = np.empty((2, 2), dtype=complex)
        for i in range(2):
            for j in range(2):
                out[i, j] = simpson(gw[:, i] * gz[:, j], dxq)
        return out

    def g_apply(z, zeta, grid):
        excl_guard(z)
        return _interval_g_columns(a, z, np.asarray(grid, dtype=float)) @ np.asarray(
            zeta, dtype=complex
        )

    def r_apply(z, psi, grid):
        excl_guard(z)
        return _interval_r_apply(a, z, psi, grid)

    def g_adjoint(z, psi, grid):
        excl_guard(z)
        return _interval_g_adjoint(a, z, psi, grid)

    def g_closed(z, zeta):
        excl_guard(z)
        return [interval_green(model, z, np.asarray(zeta, dtype=complex))]

    traces = TraceMaps(
        rho=lambda fn: interval_traces(model, fn)[0],
        tau=lambda fn: interval_traces(model, fn)[1],
    )
    return WeylSystem(
        n=2,
        kind="interval",
        excluded=excluded,
        gamma=gamma,
        gram=gram,
        g_apply=g_apply,
        r_apply=r_apply,
        g_adjoint_apply=g_adjoint,
        trace_maps=traces,
        g_closed=g_closed,
        edge_lengths=(a,),
    )


def raise_excluded(excluded, z):
    raise ExcludedPointError(
        f"z={complex(z)} lies in the excluded spectral set: {excluded.describe()}"
    )


# ---------------------------------------------------------------------------
# graph model


def graph_traces(model: GraphModel, parts, grids=None):
    """Edgewise traces: concatenated (rho_k, tau_k) in edge order."""
    rho = np.empty(2 * model.n_edges, dtype=complex)
    tau = np.empty(2 * model.n_edges, dtype=complex)
    for k, a in enumerate(model.lengths):
        edge = IntervalModel(a)
        grid = None if grids is None else grids[k]
        r, t = interval_traces(edge, parts[k], grid)
        rho[2 * k : 2 * k + 2] = r
        tau[2 * k : 2 * k + 2] = t
    return rho, tau


def graph_weyl(model: GraphModel, gram_nodes: int | None = None) -> WeylSystem:
    """Weyl system of the edgewise model: every map acts block by block.

    Sampled functions are lists with one uniform sample array per edge, in
    the same edge order as the boundary indexing (edge k owns boundary
    coordinates 2k and 2k+1 for its left and right endpoints).
    """
    lengths = model.lengths
    K = model.n_edges
    excluded = DirichletExclusions(lengths)
    edge_gram_nodes = [gram_nodes or _default_gram_nodes(a) for a in lengths]

    def guard(z):
        if excluded.contains(complex(z)):
            raise_excluded(excluded, z)

    def gamma(z):
        guard(z)
        out = np.zeros((2 * K, 2 * K), dtype=complex)
        for k, a in enumerate(lengths):
            out[2 * k : 2 * k + 2, 2 * k : 2 * k + 2] = _interval_gamma(a, z)
        return out

    def gram(z, w):
        guard(z)
        guard(w)
        out = np.zeros((2 * K, 2 * K), dtype=complex)
        for k, a in enumerate(lengths):
            xq = np.linspace(0.0, a, edge_gram_nodes[k])
            dxq = xq[1] - xq[0]
            gz = _interval_g_columns(a, z, xq)
            gw = _interval_g_columns(a, w, xq)
            for i in range(2):
                for j in range(2):
                    out[2 * k + i, 2 * k + j] = simpson(gw[:, i] * gz[:, j], dxq)
        return out

    def g_apply(z, zeta, grids):
        guard(z)
        zeta = np.asarray(zeta, dtype=complex)
        return [
            _interval_g_columns(a, z, np.asarray(grids[k], dtype=float))
            @ zeta[2 * k : 2 * k + 2]
            for k, a in enumerate(lengths)
        ]

    def r_apply(z, psis, grids):
        guard(z)
        return [
            _interval_r_apply(a, z, psis[k], grids[k]) for k, a in enumerate(lengths)
        ]

    def g_adjoint(z, psis, grids):
        guard(z)
        out = np.empty(2 * K, dtype=complex)
        for k, a in enumerate(lengths):
            out[2 * k : 2 * k + 2] = _interval_g_adjoint(a, z, psis[k], grids[k])
        return out

    def g_closed(z, zeta):
        guard(z)
        zeta = np.asarray(zeta, dtype=complex)
        return [
            interval_green(IntervalModel(a), z, zeta[2 * k : 2 * k + 2])
            for k, a in enumerate(lengths)
        ]

    traces = TraceMaps(
        rho=lambda parts: graph_traces(model, parts)[0],
        tau=lambda parts: graph_traces(model, parts)[1],
    )
    return WeylSystem(
        n=2 * K,
        kind="graph",
        excluded=excluded,
        gamma=gamma,
        gram=gram,
        g_apply=g_apply,
        r_apply=r_apply,
        g_adjoint_apply=g_adjoint,
        trace_maps=traces,
        g_closed=g_closed,
        edge_lengths=lengths,
    )


@dataclass(frozen=True)
class VertexGroup:
    """One vertex of a glued graph: its endpoints and a delta coupling strength.

    ``endpoints`` are (edge index, side) pairs with side "left" or "right";
    coupling 0 is the Kirchhoff condition (continuity plus vanishing sum of
    inward derivatives), a single free endpoint with coupling theta is the
    Robin condition psi' = theta psi at that end.
    """

    endpoints: tuple
    coupling: float = 0.0


def _endpoint_index(model: GraphModel, edge: int, side: str) -> int:
    if not (0 <= edge < model.n_edges):
        raise ValueError(f"edge index {edge} out of range")
    if side not in ("left", "right"):
        raise ValueError(f"endpoint side must be 'left' or 'right', got {side!r}")
    return 2 * edge + (0 if side == "left" else 1)


def vertex_params(model: GraphModel, groups: Sequence[VertexGroup]) -> ExtensionParams:
    """Extension parameters encoding vertex gluing with delta couplings.

    The projector range consists of boundary vectors constant on each
    vertex group (value continuity); the operator acts on each group's
    constant direction as coupling/(group size), which makes the coupled
    condition read "sum of inward derivatives = coupling * common value".
    Every endpoint must belong to exactly one group.
    """
    n = 2 * model.n_edges
    seen: set = set()
    pi = np.zeros((n, n), dtype=complex)
    theta = np.zeros((n, n), dtype=complex)
    for group in groups:
        idx = [_endpoint_index(model, e, s) for e, s in group.endpoints]
        for i in idx:
            if i in seen:
                raise ValueError(f"endpoint {i} assigned to more than one vertex group")
            seen.add(i)
        m = len(idx)
        if m == 0:
            raise ValueError("empty vertex group")
        indicator = np.zeros(n, dtype=complex)
        indicator[idx] = 1.0
        proj = np.outer(indicator, indicator) / m
        pi += proj
        theta += (float(group.coupling) / m) * proj
    if len(seen) != n:
        missing = sorted(set(range(n)) - seen)
        raise ValueError(f"endpoints {missing} not assigned to any vertex group")
    return ExtensionParams(pi, theta)


# ---------------------------------------------------------------------------
# point-interaction model


def _pairwise_distances(centers: np.ndarray) -> np.ndarray:
    diff = centers[:, None, :] - centers[None, :, :]
    return np.sqrt(np.sum(diff * diff, axis=-1))


def point_gamma(model: PointModel, z: complex) -> np.ndarray:
    """Weyl matrix of the point model: sqrt(z)/(4 pi) on the diagonal,
    -exp(-sqrt(z) d)/(4 pi d) off it, principal branch Re sqrt(z) > 0."""
    z = complex(z)
    if z.imag == 0.0 and z.real <= 0.0:
        raise_excluded(HalfLineExclusions(0.0), z)
    sq = np.sqrt(z)
    d = _pairwise_distances(model.centers)
    n = model.n_centers
    out = np.full((n, n), 0.0, dtype=complex)
    mask = ~np.eye(n, dtype=bool)
    out[mask] = -np.exp(-sq * d[mask]) / (FOUR_PI * d[mask])
    np.fill_diagonal(out, sq / FOUR_PI)
    return out


def _point_gram(model: PointModel, z: complex, w: complex) -> np.ndarray:
    z, w = complex(z), complex(w)
    if z != w:
        return (point_gamma(model, z) - point_gamma(model, w)) / (z - w)
    sq = np.sqrt(z)
    d = _pairwise_distances(model.centers)
    n = model.n_centers
    out = np.zeros((n, n), dtype=complex)
    mask = ~np.eye(n, dtype=bool)
    out[mask] = np.exp(-sq * d[mask]) / (8.0 * np.pi * sq)
    np.fill_diagonal(out, 1.0 / (8.0 * np.pi * sq))
    return out


def _point_g_values(model: PointModel, z: complex, zeta, points) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    zeta = np.asarray(zeta, dtype=complex)
    sq = np.sqrt(complex(z))
    r = np.sqrt(
        np.sum((pts[:, None, :] - model.centers[None, :, :]) ** 2, axis=-1)
    )
    if np.any(r <= MIN_CENTER_DISTANCE):
        raise ValueError("evaluation points must stay away from the centers")
    return (np.exp(-sq * r) / (FOUR_PI * r)) @ zeta


def point_renormalized_trace(model: PointModel, part, zeta) -> np.ndarray:
    """Renormalised trace of psi = part + G(0) zeta at the centers.

    ``part`` is the continuous component: a callable on (m, 3) point arrays
    or a vector of its values at the centers. Component k is the limit of
    psi(x) - zeta_k / (4 pi |x - y_k|) as x -> y_k, which evaluates to
    part(y_k) plus the cross terms zeta_j / (4 pi |y_k - y_j|), j != k.
    """
    zeta = np.asarray(zeta, dtype=complex)
    if callable(part):
        vals = np.asarray(part(model.centers), dtype=complex)
    else:
        vals = np.asarray(part, dtype=complex)
    if vals.shape != (model.n_centers,):
        raise ValueError("continuous part must give one value per center")
    d = _pairwise_distances(model.centers)
    cross = np.zeros_like(vals)
    mask = ~np.eye(model.n_centers, dtype=bool)
    coeff = np.zeros_like(d, dtype=complex)
    coeff[mask] = 1.0 / (FOUR_PI * d[mask])
    return vals + coeff @ zeta


def point_green_regular_part(model: PointModel, lam, coeff):
    """Callable for G(lam) c - G(0) c, continuous across the centers.

    Away from the centers this is the plain kernel difference; at a center
    y_k it takes the limit value -sqrt(lam) c_k / (4 pi) plus the smooth
    cross terms, so it can feed :func:`point_renormalized_trace` directly.
    """
    lam = complex(lam)
    coeff = np.asarray(coeff, dtype=complex)
    sq = np.sqrt(lam)

    def evaluate(points):
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        r = np.sqrt(
            np.sum((pts[:, None, :] - model.centers[None, :, :]) ** 2, axis=-1)
        )
        near = r <= MIN_CENTER_DISTANCE
        smooth = np.where(near, 1.0, r)
        term = (np.exp(-sq * smooth) - 1.0) / (FOUR_PI * smooth)
        term = np.where(near, -sq / FOUR_PI, term)
        return term @ coeff

    return evaluate


def point_weyl(model: PointModel) -> WeylSystem:
    """Weyl system of the point-interaction model.

    No volume quadrature is carried: the resolvent acts on Green-function
    combinations through the Gram matrix (closed forms), sampled deficiency
    elements are available through ``g_apply`` on (m, 3) point grids, and
    the renormalised trace realises the boundary condition.
    """
    excluded = HalfLineExclusions(0.0)

    def guard(z):
        if excluded.contains(complex(z)):
            raise_excluded(excluded, z)

    def gamma(z):
        guard(z)
        return point_gamma(model, z)

    def gram(z, w):
        guard(z)
        guard(w)
        return _point_gram(model, z, w)

    def g_apply(z, zeta, grid):
        guard(z)
        return _point_g_values(model, z, zeta, grid)

    return WeylSystem(
        n=model.n_centers,
        kind="points",
        excluded=excluded,
        gamma=gamma,
        gram=gram,
        g_apply=g_apply,
        renorm_trace=lambda part, zeta: point_renormalized_trace(model, part, zeta),
    )


# ---------------------------------------------------------------------------
# spin (vector-valued) point model


def spin_weyl(model: SpinPointModel) -> WeylSystem:
    """Weyl system of the vector-valued point model.

    The boundary space is the direct sum over internal eigenchannels of one
    C^n charge block per channel (channel-major ordering: block i covers
    indices i*n .. i*n + n - 1); channel i evaluates the scalar point model
    at the shifted parameter z - b_i, and z is admissible only when every
    shift avoids (-inf, 0].
    """
    point = PointModel(model.centers)
    n, d = model.n_centers, model.dim_internal
    excluded = HalfLineExclusions(max(model.b))

    def guard(z):
        if excluded.contains(complex(z)):
            raise_excluded(excluded, z)

    def gamma(z):
        guard(z)
        out = np.zeros((n * d, n * d), dtype=complex)
        for i, b in enumerate(model.b):
            out[i * n : (i + 1) * n, i * n : (i + 1) * n] = point_gamma(point, z - b)
        return out

    def gram(z, w):
        guard(z)
        guard(w)
        out = np.zeros((n * d, n * d), dtype=complex)
        for i, b in enumerate(model.b):
            out[i * n : (i + 1) * n, i * n : (i + 1) * n] = _point_gram(
                point, z - b, w - b
            )
        return out

    def g_apply(z, zeta, grid):
        guard(z)
        zeta = np.asarray(zeta, dtype=complex)
        pts = np.atleast_2d(np.asarray(grid, dtype=float))
        out = np.empty((d, pts.shape[0]), dtype=complex)
        for i, b in enumerate(model.b):
            out[i] = _point_g_values(point, z - b, zeta[i * n : (i + 1) * n], pts)
        return out

    def renorm_trace(part, zeta):
        zeta = np.asarray(zeta, dtype=complex)
        if callable(part):
            vals = np.asarray(part(model.centers), dtype=complex)
        else:
            vals = np.asarray(part, dtype=complex)
        if vals.shape != (d, n):
            raise ValueError("continuous part must give a (channels, centers) array")
        out = np.empty(n * d, dtype=complex)
        for i in range(d):
            out[i * n : (i + 1) * n] = point_renormalized_trace(
                point, vals[i], zeta[i * n : (i + 1) * n]
            )
        return out

    return WeylSystem(
        n=n * d,
        kind="spin_points",
        excluded=excluded,
        gamma=gamma,
        gram=gram,
        g_apply=g_apply,
        renorm_trace=renorm_trace,
    )
