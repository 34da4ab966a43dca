"""Five-parameter quadrilateral family and the bilinear pullback geometry.

A family member has vertices V1 = (0, 0), V2 = (1, 0), V3 = (alpha, beta),
V4 = (gamma, delta); the first side is nailed to the x-axis. The degree-one
tensor map ``theta`` sends the closed unit reference square onto the closed
quadrilateral (corner to corner, in that vertex order). Pulling the Dirichlet
Laplacian back through theta produces a variable-coefficient second-order
operator on the reference square whose five coefficients are evaluated here.

Sign convention: the coefficient formulas describe the pullback of minus the
Laplacian, so the resulting operators have positive spectra (the identity map
gives f1 = f3 = -1, i.e. the operator -d2/dx2 - d2/dy2).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .dual import value_of
from .errors import DegenerateJacobian, InvalidQuadrilateral, NonPositiveFactor

#: below this |sigma| the map is treated as singular
SIGMA_TOL = 1e-12

#: corners of the reference square, in vertex order
REFERENCE_CORNERS = ((0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0))


@dataclass(frozen=True)
class Quadrilateral:
    """Shape parameters of one family member.

    Validity (checked by :func:`validate`) requires the Jacobian determinant
    of the bilinear map to be positive at all four reference corners; since
    that determinant is affine in (x, y), positivity at the corners gives
    positivity on the whole closed square and rules out reflected, degenerate
    and self-intersecting configurations.
    """

    alpha: float
    beta: float
    gamma: float
    delta: float

    @property
    def vertices(self) -> np.ndarray:
        """4x2 vertex array in the order (V1, V2, V3, V4)."""
        return np.array(
            [[0.0, 0.0], [1.0, 0.0], [self.alpha, self.beta], [self.gamma, self.delta]]
        )

    def params(self) -> tuple[float, float, float, float]:
        return (self.alpha, self.beta, self.gamma, self.delta)


UNIT_SQUARE = Quadrilateral(0.0, 1.0, 1.0, 1.0)


class CoefficientBundle(NamedTuple):
    """Values of the five pullback-operator coefficients at one point."""

    f1: float
    f2: float
    f3: float
    f4: float
    f5: float


# ---------------------------------------------------------------------------
# generic scalar kernels: work on floats, numpy arrays and DualScalar alike
# ---------------------------------------------------------------------------

def theta_partials(alpha, beta, gamma, delta, x, y):
    """First and mixed-second partials of the bilinear map at (x, y).

    Returns (t1x, t1y, t2x, t2y, t1xy, t2xy); the pure second derivatives of a
    degree-one tensor map vanish identically.
    """
    axy = gamma - 1.0 - alpha
    bxy = delta - beta
    t1x = 1.0 + axy * y
    t1y = alpha + axy * x
    t2x = bxy * y
    t2y = beta + bxy * x
    return t1x, t1y, t2x, t2y, axy, bxy


def sigma_value(alpha, beta, gamma, delta, x, y):
    """Jacobian determinant of the map at (x, y); affine in (x, y)."""
    t1x, t1y, t2x, t2y, _, _ = theta_partials(alpha, beta, gamma, delta, x, y)
    return t1x * t2y - t1y * t2x


def corner_sigmas(alpha, beta, gamma, delta):
    """Jacobian determinant at the four reference corners (vectorizable)."""
    return tuple(
        sigma_value(alpha, beta, gamma, delta, x, y) for (x, y) in REFERENCE_CORNERS
    )


def coefficient_values(alpha, beta, gamma, delta, x, y):
    """The five operator coefficients at (x, y), term for term:

        f1 = -(t1y^2 + t2y^2) / sigma^2
        f2 = 2 (t1x t1y + t2x t2y) / sigma^2
        f3 = -(t1x^2 + t2x^2) / sigma^2
        f4 = (f2 / sigma) (t1y t2xy - t2y t1xy)
        f5 = (f2 / sigma) (t2x t1xy - t1x t2xy)

    Raises DegenerateJacobian when |sigma| < SIGMA_TOL at the point.
    """
    t1x, t1y, t2x, t2y, t1xy, t2xy = theta_partials(alpha, beta, gamma, delta, x, y)
    sigma = t1x * t2y - t1y * t2x
    if abs(value_of(sigma)) < SIGMA_TOL:
        raise DegenerateJacobian(
            f"Jacobian determinant {value_of(sigma):g} at ({value_of(x):g}, {value_of(y):g}) "
            "is below tolerance; the mapping is singular there"
        )
    inv_s2 = 1.0 / (sigma * sigma)
    f1 = -(t1y * t1y + t2y * t2y) * inv_s2
    f2 = 2.0 * (t1x * t1y + t2x * t2y) * inv_s2
    f3 = -(t1x * t1x + t2x * t2x) * inv_s2
    f2_over_s = f2 / sigma
    f4 = f2_over_s * (t1y * t2xy - t2y * t1xy)
    f5 = f2_over_s * (t2x * t1xy - t1x * t2xy)
    return f1, f2, f3, f4, f5


# ---------------------------------------------------------------------------
# family operations
# ---------------------------------------------------------------------------

def map_point(q: Quadrilateral, p) -> tuple[float, float]:
    """Image of a reference-square point under the bilinear map."""
    x, y = p
    return (
        x + q.alpha * y + (q.gamma - 1.0 - q.alpha) * x * y,
        q.beta * y + (q.delta - q.beta) * x * y,
    )


def jacobian_det(q: Quadrilateral, p) -> float:
    """Jacobian determinant (area distortion) of the map at a point."""
    x, y = p
    return sigma_value(q.alpha, q.beta, q.gamma, q.delta, x, y)


def validate(q: Quadrilateral) -> None:
    """Raise InvalidQuadrilateral unless the map is orientation preserving.

    The test is strict positivity of the Jacobian determinant at the four
    reference corners, reported with the first offending corner.
    """
    sigmas = corner_sigmas(q.alpha, q.beta, q.gamma, q.delta)
    for corner, s in zip(REFERENCE_CORNERS, sigmas):
        if not s > 0.0:
            raise InvalidQuadrilateral(
                f"Jacobian determinant {s:g} at reference corner {corner} is not "
                f"positive for parameters {q.params()}"
            )


def is_valid(q: Quadrilateral) -> bool:
    try:
        validate(q)
    except InvalidQuadrilateral:
        return False
    return True


def coefficients(q: Quadrilateral, p) -> CoefficientBundle:
    """Operator coefficients at one reference point (see coefficient_values)."""
    x, y = p
    return CoefficientBundle(
        *coefficient_values(q.alpha, q.beta, q.gamma, q.delta, x, y)
    )


def polygon_area(vertices) -> float:
    """Shoelace area of a simple polygon given as an (n, 2) array."""
    v = np.asarray(vertices, dtype=float)
    x, y = v[:, 0], v[:, 1]
    return 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def polygon_perimeter(vertices) -> float:
    v = np.asarray(vertices, dtype=float)
    return float(np.linalg.norm(v - np.roll(v, -1, axis=0), axis=1).sum())


def boundary_vertices(q: Quadrilateral) -> np.ndarray:
    """Vertices in boundary order (V1, V2, V4, V3): bottom side first, then
    up the right side, across the top, and back down the left."""
    return q.vertices[[0, 1, 3, 2]]


def area(q: Quadrilateral) -> float:
    """Shoelace area over the boundary polygon (V1, V2, V4, V3)."""
    return polygon_area(boundary_vertices(q))


def perimeter(q: Quadrilateral) -> float:
    """Total side length of the boundary polygon (V1, V2, V4, V3)."""
    return polygon_perimeter(boundary_vertices(q))


def scale(q: Quadrilateral, c: float) -> np.ndarray:
    """Vertices of the homothety image sqrt(c) * Q, centered at the origin.

    The result leaves the nailed-V2 family whenever c != 1 (V2 moves to
    (sqrt(c), 0)), so a plain 4x2 vertex array is returned rather than a
    Quadrilateral. Spectra scale as lambda -> lambda / c under this map.
    """
    if not c > 0.0:
        raise NonPositiveFactor(f"homothety factor must be positive, got {c!r}")
    return float(np.sqrt(c)) * q.vertices
