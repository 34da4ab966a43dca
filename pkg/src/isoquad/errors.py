"""Exception types shared across the package."""


class IsoquadError(Exception):
    """Base class for all isoquad errors."""


class InvalidQuadrilateral(IsoquadError):
    """The four shape parameters describe a degenerate or self-intersecting
    quadrilateral (the bilinear map is not orientation preserving on the
    closed reference square)."""


class DegenerateJacobian(IsoquadError):
    """The Jacobian determinant of the bilinear map vanishes (to tolerance)
    at the requested point, so the transformed coefficients are undefined."""


class KappaOutOfRange(IsoquadError):
    """Grid parameter outside the open interval (0, 1/2), or a scheme that
    pins kappa was requested with a different value."""


class NonPositiveFactor(IsoquadError):
    """Homothety factor must be strictly positive."""


class InvalidStep(IsoquadError):
    """Search grid step must satisfy 0 < h <= l."""


class ComplexSpectrum(IsoquadError):
    """The discrete operator has eigenvalues with imaginary parts above
    tolerance; the domain is outside the regime where the method applies."""


class BifurcationDetected(IsoquadError):
    """The tangent system of the isospectrality residuals is numerically
    singular; several solution branches meet and the implicit-function
    construction does not apply."""

    def __init__(self, message, determinant=None, threshold=None):
        super().__init__(message)
        self.determinant = determinant
        self.threshold = threshold
