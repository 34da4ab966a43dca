"""4x4 discrete operators on the interior nodes of a tensor grid.

Two discretizations of the pulled-back operator are provided on the reference
square with homogeneous Dirichlet conditions:

* ``fd`` -- classical centered finite differences on the uniform grid with
  step 1/3 (the 4x4 stencil matrices are hard constants);
* ``sp`` -- collocation with polynomials of degree 3 per variable on the node
  family (0, kappa, 1-kappa, 1), 0 < kappa < 1/2. The basis consists of the
  two one-dimensional Lagrange cubics vanishing at both endpoints, so the
  boundary condition is built in and only the four interior values remain.

Interior nodes are ordered x-fastest: (k, k), (1-k, k), (k, 1-k), (1-k, 1-k).
With that ordering the kappa = 1/3 collocation second-derivative matrices
coincide entrywise with the finite-difference ones.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import geometry
from .errors import KappaOutOfRange
from .geometry import Quadrilateral

#: kappa value reproducing the uniform grid with step 1/3
UNIFORM_KAPPA = 1.0 / 3.0

#: kappa for which the interior nodes are the interior extrema of the degree-3
#: Legendre polynomial mapped to (0, 1)
LEGENDRE_KAPPA = 0.5 - 0.5 / np.sqrt(5.0)


@dataclass(frozen=True)
class Grid:
    """Tensor collocation grid on the closed reference square."""

    kappa: float
    coords: np.ndarray    # (4,) one-dimensional node coordinates
    interior: np.ndarray  # (4, 2) interior nodes, x-fastest ordering


def _check_kappa(kappa: float) -> None:
    if not 0.0 < kappa < 0.5:
        raise KappaOutOfRange(f"kappa must lie in (0, 1/2), got {kappa!r}")


def build_grid(kappa: float) -> Grid:
    _check_kappa(kappa)
    coords = np.array([0.0, kappa, 1.0 - kappa, 1.0])
    k, mk = kappa, 1.0 - kappa
    interior = np.array([[k, k], [mk, k], [k, mk], [mk, mk]])
    return Grid(kappa=kappa, coords=coords, interior=interior)


@dataclass(frozen=True)
class DiffMatrices:
    """4x4 differentiation matrices acting on interior nodal values."""

    dxx: np.ndarray
    dxy: np.ndarray
    dyy: np.ndarray
    dx: np.ndarray
    dy: np.ndarray


def fd_matrices() -> DiffMatrices:
    """Centered finite-difference matrices for step h = 1/3 with zero
    boundary values."""
    dxx = 9.0 * np.array(
        [[-2, 1, 0, 0], [1, -2, 0, 0], [0, 0, -2, 1], [0, 0, 1, -2]], dtype=float
    )
    dyy = 9.0 * np.array(
        [[-2, 0, 1, 0], [0, -2, 0, 1], [1, 0, -2, 0], [0, 1, 0, -2]], dtype=float
    )
    dxy = 2.25 * np.array(
        [[0, 0, 0, 1], [0, 0, -1, 0], [0, -1, 0, 0], [1, 0, 0, 0]], dtype=float
    )
    dx = 1.5 * np.array(
        [[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]], dtype=float
    )
    dy = 1.5 * np.array(
        [[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]], dtype=float
    )
    return DiffMatrices(dxx=dxx, dxy=dxy, dyy=dyy, dx=dx, dy=dy)


def lagrange_derivatives(kappa: float) -> tuple[np.ndarray, np.ndarray]:
    """First/second derivatives of the interior Lagrange cubics at the
    interior nodes.

    The basis over nodes (0, kappa, 1-kappa, 1) restricted to functions
    vanishing at 0 and 1 is

        l1(x) = x (x - 1) (x + kappa - 1) / d
        l2(x) = -x (x - 1) (x - kappa) / d,     d = kappa (kappa - 1) (2 kappa - 1).

    Returns (D1, D2) with D1[i, j] = l'_{j+1}(node_i), D2[i, j] = l''_{j+1}(node_i)
    for nodes (kappa, 1 - kappa).
    """
    _check_kappa(kappa)
    den = kappa * (kappa - 1.0) * (2.0 * kappa - 1.0)
    nodes = (kappa, 1.0 - kappa)
    d1 = np.empty((2, 2))
    d2 = np.empty((2, 2))
    for i, t in enumerate(nodes):
        d1[i, 0] = (3.0 * t * t + 2.0 * (kappa - 2.0) * t + (1.0 - kappa)) / den
        d1[i, 1] = (-3.0 * t * t + 2.0 * (1.0 + kappa) * t - kappa) / den
        d2[i, 0] = (6.0 * t + 2.0 * (kappa - 2.0)) / den
        d2[i, 1] = (-6.0 * t + 2.0 * (1.0 + kappa)) / den
    return d1, d2


def spectral_matrices(kappa: float) -> DiffMatrices:
    """Collocation differentiation matrices, lifted to the four interior
    nodes as tensor products (x index fastest)."""
    d1, d2 = lagrange_derivatives(kappa)
    eye = np.eye(2)
    return DiffMatrices(
        dxx=np.kron(eye, d2),
        dxy=np.kron(d1, d1),
        dyy=np.kron(d2, eye),
        dx=np.kron(eye, d1),
        dy=np.kron(d1, eye),
    )


@dataclass(frozen=True)
class DiscreteOperator:
    """Assembled 4x4 operator together with its provenance."""

    entries: np.ndarray
    scheme: str
    kappa: float
    source: Quadrilateral


def matrices_and_nodes(scheme: str, kappa: float) -> tuple[DiffMatrices, np.ndarray]:
    """Differentiation matrices plus matching interior nodes for a scheme."""
    if scheme == "fd":
        if abs(kappa - UNIFORM_KAPPA) > 1e-14:
            raise KappaOutOfRange(
                f"the finite-difference stencil is only defined on the uniform "
                f"grid (kappa = 1/3); got kappa = {kappa!r}"
            )
        return fd_matrices(), build_grid(UNIFORM_KAPPA).interior
    if scheme == "sp":
        return spectral_matrices(kappa), build_grid(kappa).interior
    raise ValueError(f"unknown scheme {scheme!r}; expected 'fd' or 'sp'")


def operator_entries(alpha, beta, gamma, delta, mats: DiffMatrices, nodes):
    """Assemble the 4x4 operator entries for arbitrary scalar types.

    Row r collocates at interior node r:

        L[r, :] = f1 Dxx[r, :] + f2 Dxy[r, :] + f3 Dyy[r, :]
                  - f4 Dx[r, :] - f5 Dy[r, :]

    with the coefficients evaluated at node r. The first-derivative blocks
    enter with a minus sign; that is the convention under which this package's
    frozen reference spectra were generated, and it is spectrum-neutral on any
    domain with constant Jacobian (f4 = f5 = 0 there).

    Runs unchanged on floats or DualScalar parameters; returns a nested list.
    """
    rows = []
    for r, (xv, yv) in enumerate(nodes):
        f1, f2, f3, f4, f5 = geometry.coefficient_values(alpha, beta, gamma, delta, xv, yv)
        rows.append(
            [
                f1 * mats.dxx[r, c]
                + f2 * mats.dxy[r, c]
                + f3 * mats.dyy[r, c]
                - f4 * mats.dx[r, c]
                - f5 * mats.dy[r, c]
                for c in range(4)
            ]
        )
    return rows


def assemble(q: Quadrilateral, scheme: str = "sp", kappa: float = UNIFORM_KAPPA) -> DiscreteOperator:
    """Validate the quadrilateral and assemble its discrete operator.

    The operator approximates the pullback of minus the Laplacian, so valid
    domains near the tested corpus yield four positive eigenvalues; the unit
    square gives a symmetric matrix with spectrum (18, 36, 36, 54) under both
    schemes at kappa = 1/3.
    """
    geometry.validate(q)
    mats, nodes = matrices_and_nodes(scheme, kappa)
    rows = operator_entries(q.alpha, q.beta, q.gamma, q.delta, mats, nodes)
    return DiscreteOperator(
        entries=np.array(rows, dtype=float), scheme=scheme, kappa=kappa, source=q
    )


def operator_from_vertices(vertices, scheme: str = "sp", kappa: float = UNIFORM_KAPPA) -> np.ndarray:
    """Operator entries for an arbitrary bilinear image of the reference
    square, given its four vertices (in V1, V2, V3, V4 order).

    Generalizes :func:`assemble` beyond the nailed-edge family; used for
    homothety-scaled vertex sets. Only the entries are returned.
    """
    v = np.asarray(vertices, dtype=float)
    mats, nodes = matrices_and_nodes(scheme, kappa)
    rows = []
    # bilinear map theta(x, y) = V1 + (V2-V1) x + (V3-V1) y + (V4-V3-V2+V1) xy
    ex = v[1] - v[0]
    ey = v[2] - v[0]
    exy = v[3] - v[2] - v[1] + v[0]
    for r, (xv, yv) in enumerate(nodes):
        t1x = ex[0] + exy[0] * yv
        t1y = ey[0] + exy[0] * xv
        t2x = ex[1] + exy[1] * yv
        t2y = ey[1] + exy[1] * xv
        sigma = t1x * t2y - t1y * t2x
        inv_s2 = 1.0 / (sigma * sigma)
        f1 = -(t1y * t1y + t2y * t2y) * inv_s2
        f2 = 2.0 * (t1x * t1y + t2x * t2y) * inv_s2
        f3 = -(t1x * t1x + t2x * t2x) * inv_s2
        f2_over_s = f2 / sigma
        f4 = f2_over_s * (t1y * exy[1] - t2y * exy[0])
        f5 = f2_over_s * (t2x * exy[0] - t1x * exy[1])
        rows.append(
            f1 * mats.dxx[r] + f2 * mats.dxy[r] + f3 * mats.dyy[r]
            - f4 * mats.dx[r] - f5 * mats.dy[r]
        )
    return np.array(rows)
