"""One-parameter curves of isospectral quadrilaterals.

A point on a curve is Phi = (alpha, beta, gamma, delta, c). Isospectrality to
a reference domain with invariants xi* is encoded by the four residuals

    F_k(Phi) = xi_k(alpha, beta, gamma, delta) - c^(4-k) xi*_k = 0,  k = 0..3,

where c > 0 is the homothety spectral factor (the domain scaled by sqrt(c)
has spectrum lambda / c). One shape parameter is advanced explicitly with
unit rate; the rates of the remaining three parameters and of c solve the
4x4 linearized system, giving the curve tangent wherever that system is
nonsingular. Curves are traced with a fixed-step first-order predictor.

Two tangent constructions are provided: ``exact`` differentiates the
invariants with dual numbers; ``fd`` works on the eigenvalues themselves with
one-sided difference quotients.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .discretization import UNIFORM_KAPPA, assemble
from .errors import BifurcationDetected, IsoquadError
from .geometry import Quadrilateral
from .spectra import charpoly_invariants, charpoly_with_gradient, eigenvalues

PARAM_NAMES = ("alpha", "beta", "gamma", "delta")


@dataclass(frozen=True)
class CurvePoint:
    """A point in the five-dimensional curve space."""

    alpha: float
    beta: float
    gamma: float
    delta: float
    c: float = 1.0

    def quad(self) -> Quadrilateral:
        return Quadrilateral(self.alpha, self.beta, self.gamma, self.delta)

    def as_array(self) -> np.ndarray:
        return np.array([self.alpha, self.beta, self.gamma, self.delta, self.c])

    @classmethod
    def from_array(cls, arr) -> "CurvePoint":
        a, b, g, d, c = (float(v) for v in arr)
        return cls(a, b, g, d, c)

    @classmethod
    def from_quad(cls, q: Quadrilateral, c: float = 1.0) -> "CurvePoint":
        return cls(q.alpha, q.beta, q.gamma, q.delta, c)


@dataclass
class TraceConfig:
    """Knobs of a curve trace."""

    explicit_param: str = "beta"
    T: float = 0.06
    M: int = 100
    method: str = "exact"        # "exact" | "fd"
    fd_increment: float = 1e-6
    singular_tol: float = 1e-10  # relative determinant threshold
    scheme: str = "sp"
    kappa: float = UNIFORM_KAPPA

    def __post_init__(self):
        if self.explicit_param not in PARAM_NAMES:
            raise ValueError(f"explicit_param must be one of {PARAM_NAMES}")
        if self.method not in ("exact", "fd"):
            raise ValueError("method must be 'exact' or 'fd'")
        if not self.T > 0:
            raise ValueError("T must be positive")
        if self.M < 1:
            raise ValueError("M must be at least 1")


def residuals(p: CurvePoint, xi_star) -> np.ndarray:
    """The four isospectrality residuals F_k at a curve point."""
    xi = np.array(charpoly_invariants(assemble(p.quad())))
    return _residuals_from_xi(xi, p.c, np.asarray(xi_star, dtype=float))


def residuals_for(p: CurvePoint, xi_star, scheme="sp", kappa=UNIFORM_KAPPA) -> np.ndarray:
    xi = np.array(charpoly_invariants(assemble(p.quad(), scheme, kappa)))
    return _residuals_from_xi(xi, p.c, np.asarray(xi_star, dtype=float))


def _residuals_from_xi(xi, c, xi_star):
    k = np.arange(4)
    return xi - c ** (4 - k) * xi_star


def _dF_dc(c, xi_star):
    """Analytic column dF_k/dc = -(4-k) c^(3-k) xi*_k."""
    k = np.arange(4)
    return -(4 - k) * c ** (3 - k) * xi_star


def _exact_system(p, xi_star, explicit_param, scheme, kappa):
    """Linearized residual system for the exact method.

    Returns (matrix, rhs, free_params): 4x4 matrix with one column per
    non-explicit shape parameter (canonical order) plus the c column, and the
    right-hand side -dF/d(explicit).
    """
    xi_star = np.asarray(xi_star, dtype=float)
    _, grad = charpoly_with_gradient(p.quad(), scheme, kappa)
    free = [name for name in PARAM_NAMES if name != explicit_param]
    cols = [grad[:, PARAM_NAMES.index(name)] for name in free]
    cols.append(_dF_dc(p.c, xi_star))
    matrix = np.column_stack(cols)
    rhs = -grad[:, PARAM_NAMES.index(explicit_param)]
    return matrix, rhs, free


def _fd_system(p, lambdas_star, explicit_param, scheme, kappa, increment):
    """Linearized system for the fd method, rows c*dlambda_i/dp, last column
    -lambda_i, right side -c*dlambda_i/d(explicit)."""
    dlam = eigen_derivatives_fd(p, increment, scheme=scheme, kappa=kappa)
    lam = eigenvalues(assemble(p.quad(), scheme, kappa))
    free = [name for name in PARAM_NAMES if name != explicit_param]
    cols = [p.c * dlam[:, PARAM_NAMES.index(name)] for name in free]
    cols.append(-lam)
    matrix = np.column_stack(cols)
    rhs = -p.c * dlam[:, PARAM_NAMES.index(explicit_param)]
    return matrix, rhs, free


def _det_and_scale(matrix):
    det = float(np.linalg.det(matrix))
    scale = float(np.prod(np.linalg.norm(matrix, axis=1)))
    return det, scale


def tangent_exact(
    p: CurvePoint,
    xi_star,
    explicit_param: str = "beta",
    scheme: str = "sp",
    kappa: float = UNIFORM_KAPPA,
    singular_tol: float = 1e-10,
) -> np.ndarray:
    """Rates of the three free shape parameters and of c, for a unit rate of
    the explicit parameter. Solved by LU elimination with partial pivoting.

    Raises BifurcationDetected when |det| falls below singular_tol times the
    row-norm product (the Hadamard scale of the matrix).
    """
    matrix, rhs, _ = _exact_system(p, xi_star, explicit_param, scheme, kappa)
    det, scale = _det_and_scale(matrix)
    if abs(det) < singular_tol * scale:
        raise BifurcationDetected(
            f"tangent system is singular at {p} (|det| = {abs(det):.3g}, "
            f"threshold {singular_tol * scale:.3g})",
            determinant=det,
            threshold=singular_tol * scale,
        )
    return np.linalg.solve(matrix, rhs)


def eigen_derivatives_fd(
    p: CurvePoint,
    increment: float = 1e-6,
    scheme: str = "sp",
    kappa: float = UNIFORM_KAPPA,
    central: bool = False,
) -> np.ndarray:
    """Difference-quotient eigenvalue derivatives, rows = eigenvalue index,
    columns = (alpha, beta, gamma, delta).

    One-sided quotients by default; ``central`` switches to centered ones
    (used by the property tests)."""
    if not increment > 0.0:
        raise ValueError(f"increment must be positive, got {increment!r}")
    quad = p.quad()
    base = eigenvalues(assemble(quad, scheme, kappa))
    out = np.empty((4, 4))
    params = np.array(quad.params())
    for j in range(4):
        bumped = params.copy()
        bumped[j] += increment
        lam_plus = eigenvalues(assemble(Quadrilateral(*bumped), scheme, kappa))
        if central:
            bumped[j] = params[j] - increment
            lam_minus = eigenvalues(assemble(Quadrilateral(*bumped), scheme, kappa))
            out[:, j] = (lam_plus - lam_minus) / (2.0 * increment)
        else:
            out[:, j] = (lam_plus - base) / increment
    return out


# ---------------------------------------------------------------------------
# tracing
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TracePoint:
    t: float
    point: CurvePoint
    residual_norm: float
    det: float


@dataclass
class TraceBranch:
    sign: int
    points: list[TracePoint] = field(default_factory=list)
    truncated: bool = False
    reason: Optional[str] = None

    @property
    def last_valid_index(self) -> int:
        return len(self.points) - 1


@dataclass
class TraceResult:
    start: CurvePoint
    xi_star: np.ndarray
    negative: TraceBranch
    positive: TraceBranch
    config: TraceConfig

    def rows(self) -> list[TracePoint]:
        """Both branches merged in ascending t (the start appears once)."""
        return list(reversed(self.negative.points))[:-1] + self.positive.points

    @property
    def truncated(self) -> bool:
        return self.negative.truncated or self.positive.truncated


def _advance(phi, rates, free, explicit_param, dt, explicit_exact):
    psi = np.empty(5)
    psi[PARAM_NAMES.index(explicit_param)] = 1.0
    for value, name in zip(rates[:3], free):
        psi[PARAM_NAMES.index(name)] = value
    psi[4] = rates[3]
    phi = phi + dt * psi
    # keep the explicit coordinate on its exact linear schedule
    phi[PARAM_NAMES.index(explicit_param)] = explicit_exact
    return phi


def _trace(start: CurvePoint, cfg: TraceConfig, system, residual_fn) -> TraceResult:
    dt = cfg.T / cfg.M
    explicit_start = getattr(start, cfg.explicit_param)
    branches = {}
    for sign in (-1, 1):
        branch = TraceBranch(sign=sign)
        phi = start.as_array()
        for m in range(cfg.M + 1):
            point = CurvePoint.from_array(phi)
            t = sign * m * dt
            try:
                matrix, rhs, free = system(point)
                det, scale = _det_and_scale(matrix)
                res = float(np.linalg.norm(residual_fn(point)))
            except IsoquadError as exc:
                branch.truncated = True
                branch.reason = f"{type(exc).__name__}: {exc}"
                break
            branch.points.append(TracePoint(t=t, point=point, residual_norm=res, det=det))
            if m == cfg.M:
                break
            if abs(det) < cfg.singular_tol * scale:
                branch.truncated = True
                branch.reason = (
                    f"BifurcationDetected: |det| = {abs(det):.3g} below threshold "
                    f"{cfg.singular_tol * scale:.3g} at t = {t:.6g}"
                )
                break
            rates = np.linalg.solve(matrix, rhs)
            phi = _advance(
                phi, rates, free, cfg.explicit_param, sign * dt,
                explicit_start + sign * (m + 1) * dt,
            )
        branches[sign] = branch
    return branches[-1], branches[1]


def trace_exact(start: CurvePoint, xi_star, cfg: TraceConfig) -> TraceResult:
    """First-order predictor along the exact (dual-number) tangent field.

    Produces M+1 points per sign of t (fewer on truncation); the explicit
    parameter advances on the exact linear schedule, and every point carries
    its residual norm and the tangent-system determinant.
    """
    xi_star = np.asarray(xi_star, dtype=float)

    def system(point):
        return _exact_system(point, xi_star, cfg.explicit_param, cfg.scheme, cfg.kappa)

    def residual_fn(point):
        return residuals_for(point, xi_star, cfg.scheme, cfg.kappa)

    neg, pos = _trace(start, cfg, system, residual_fn)
    return TraceResult(start=start, xi_star=xi_star, negative=neg, positive=pos, config=cfg)


def trace_fd(start: CurvePoint, lambdas_star, cfg: TraceConfig) -> TraceResult:
    """Same predictor with difference-quotient eigenvalue derivatives.

    The residual norms reported along the curve use the invariants built from
    ``lambdas_star`` so that both methods are measured with one yardstick.
    """
    lam_star = np.asarray(lambdas_star, dtype=float)
    e1 = lam_star.sum()
    e2 = (lam_star[:, None] * lam_star[None, :])[np.triu_indices(4, 1)].sum()
    e3 = sum(
        lam_star[i] * lam_star[j] * lam_star[k]
        for i in range(4)
        for j in range(i + 1, 4)
        for k in range(j + 1, 4)
    )
    e4 = lam_star.prod()
    xi_star = np.array([e4, e3, e2, e1])

    def system(point):
        return _fd_system(
            point, lam_star, cfg.explicit_param, cfg.scheme, cfg.kappa, cfg.fd_increment
        )

    def residual_fn(point):
        return residuals_for(point, xi_star, cfg.scheme, cfg.kappa)

    neg, pos = _trace(start, cfg, system, residual_fn)
    return TraceResult(start=start, xi_star=xi_star, negative=neg, positive=pos, config=cfg)


def trace_curve(start: CurvePoint, cfg: TraceConfig) -> TraceResult:
    """Dispatch on cfg.method, deriving the reference data from the start."""
    if cfg.method == "exact":
        xi_star = np.array(
            charpoly_invariants(assemble(start.quad(), cfg.scheme, cfg.kappa))
        )
        xi_star = xi_star / np.array([start.c**4, start.c**3, start.c**2, start.c])
        return trace_exact(start, xi_star, cfg)
    lam_star = eigenvalues(assemble(start.quad(), cfg.scheme, cfg.kappa)) / start.c
    return trace_fd(start, lam_star, cfg)


# ---------------------------------------------------------------------------
# singularity diagnostics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SingularityReport:
    determinant: float
    rank: int
    singular_values: np.ndarray
    scale: float


def diagnose_singularity(
    p: CurvePoint,
    xi_star,
    explicit_param: str = "beta",
    scheme: str = "sp",
    kappa: float = UNIFORM_KAPPA,
    rank_rtol: float = 1e-10,
) -> SingularityReport:
    """Determinant and numerical rank of the exact tangent system.

    Rank counts singular values above rank_rtol times the largest one. The
    unit square (and every gamma = delta mirror-symmetric domain with
    alpha = 0, beta = 1) is singular; asymmetric reference domains such as
    the bundled star are full rank.
    """
    matrix, _, _ = _exact_system(p, xi_star, explicit_param, scheme, kappa)
    det, scale = _det_and_scale(matrix)
    svals = np.linalg.svd(matrix, compute_uv=False)
    rank = int(np.count_nonzero(svals > rank_rtol * svals[0]))
    return SingularityReport(
        determinant=det, rank=rank, singular_values=svals, scale=scale
    )


# ---------------------------------------------------------------------------
# deformation schedule toward the unit square
# ---------------------------------------------------------------------------

@dataclass
class DeformationStep:
    j: int
    s: float
    quad: Quadrilateral
    T: float
    trace: Optional[TraceResult]
    error: Optional[str]


def deformation_quads(q_star: Quadrilateral, S: int) -> list[Quadrilateral]:
    """Linear vertex interpolation toward the unit square, s_j = j/S.

    Index j = 0 is the start domain, j = S would be the square itself.
    """
    out = []
    v3_star = np.array([q_star.alpha, q_star.beta])
    v4_star = np.array([q_star.gamma, q_star.delta])
    v3_end = np.array([0.0, 1.0])
    v4_end = np.array([1.0, 1.0])
    for j in range(S + 1):
        s = j / S
        v3 = (1.0 - s) * v3_star + s * v3_end
        v4 = (1.0 - s) * v4_star + s * v4_end
        out.append(Quadrilateral(v3[0], v3[1], v4[0], v4[1]))
    return out


def deformation_study(
    q_star: Quadrilateral, S: int, T0: float, cfg: TraceConfig
) -> list[DeformationStep]:
    """Trace the local isospectral curve of each intermediate domain.

    Half-ranges shrink as T_j = T0 / (1 + 2 s_j) since the tangent system
    degenerates at the square; j = S (the square itself) is excluded. Errors
    at a step are recorded and the study continues.
    """
    if S <= 1:
        raise ValueError("S must exceed 1")
    if not T0 > 0:
        raise ValueError("T0 must be positive")
    steps = []
    quads = deformation_quads(q_star, S)
    for j in range(S):
        s = j / S
        t_j = T0 / (1.0 + 2.0 * s)
        step_cfg = replace(cfg, T=t_j)
        quad = quads[j]
        try:
            result = trace_curve(CurvePoint.from_quad(quad), step_cfg)
            steps.append(DeformationStep(j=j, s=s, quad=quad, T=t_j, trace=result, error=None))
        except IsoquadError as exc:
            steps.append(
                DeformationStep(
                    j=j, s=s, quad=quad, T=t_j, trace=None,
                    error=f"{type(exc).__name__}: {exc}",
                )
            )
    return steps
