"""Exhaustive neighborhood enumeration and epsilon-isospectral selection.

The two movable vertices V3 and V4 sweep step-h grids inside side-l boxes
centered at their reference positions; every combination is a candidate
quadrilateral. A candidate is accepted when its four eigenvalues match the
reference spectrum after the optimal homothety rescaling c = lambda_1 /
lambda*_1, with combined relative error at most epsilon.

Candidate evaluation is vectorized in chunks (assembly, trace recursion and
quartic roots all broadcast), so the half-million-candidate reference run
takes seconds; chunks can additionally be spread over threads via the
ISOQUAD_THREADS environment variable (0 or unset = sequential). Accepted
candidates are emitted in enumeration order regardless of scheduling.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from . import geometry
from .discretization import UNIFORM_KAPPA, matrices_and_nodes
from .errors import InvalidStep
from .geometry import Quadrilateral
from .spectra import charpoly_batch, quartic_roots, real_spectrum

CHUNK = 65536


@dataclass
class SearchConfig:
    """Box sides, grid step, tolerance and the discretization choice."""

    l: float = 0.1
    h: float = 0.0036
    epsilon: float = 1e-4
    scheme: str = "sp"
    kappa: float = UNIFORM_KAPPA
    area_prefilter: bool = False
    area_tol: float = 1e-3

    def __post_init__(self):
        if not (0.0 < self.h <= self.l):
            raise InvalidStep(f"need 0 < h <= l, got h = {self.h!r}, l = {self.l!r}")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")


@dataclass(frozen=True)
class Candidate:
    """An accepted epsilon-isospectral domain.

    ``lambdas`` are the raw eigenvalues of the candidate quadrilateral; the
    actual isospectral domain is the sqrt(c)-scaled copy, whose area and
    perimeter are stored here (c * area, sqrt(c) * perimeter of the raw
    polygon).
    """

    quad: Quadrilateral
    c: float
    lambdas: np.ndarray
    err: float
    area: float
    perimeter: float

    def scaled_vertices(self) -> np.ndarray:
        return geometry.scale(self.quad, self.c)


@dataclass
class SearchStats:
    n_enumerated: int = 0
    n_invalid: int = 0
    n_prefiltered: int = 0
    n_complex: int = 0
    n_accepted: int = 0
    n_distinct_spectra: int = 0
    n_same_area: int = 0
    n_same_perimeter: int = 0
    area_star: float = 0.0
    perimeter_star: float = 0.0
    lambdas_star: np.ndarray = field(default_factory=lambda: np.zeros(4))


def offsets(l: float, h: float) -> np.ndarray:
    """Symmetric offsets k*h with |k*h| <= l/2; always includes 0."""
    if not (0.0 < h <= l):
        raise InvalidStep(f"need 0 < h <= l, got h = {h!r}, l = {l!r}")
    k = int(np.floor(l / (2.0 * h) + 1e-12))
    return h * np.arange(-k, k + 1)


def _param_grid(q_star: Quadrilateral, l: float, h: float) -> np.ndarray:
    """All candidate parameter tuples, shape (n, 4), in enumeration order:
    V3 offsets outer, V4 inner; within each vertex y outer, x inner."""
    off = offsets(l, h)
    n = len(off)
    dy3, dx3, dy4, dx4 = np.meshgrid(off, off, off, off, indexing="ij")
    params = np.empty((n**4, 4))
    params[:, 0] = q_star.alpha + dx3.ravel()
    params[:, 1] = q_star.beta + dy3.ravel()
    params[:, 2] = q_star.gamma + dx4.ravel()
    params[:, 3] = q_star.delta + dy4.ravel()
    return params


def enumerate_hrange(q_star: Quadrilateral, l: float, h: float) -> Iterator[Quadrilateral]:
    """Stream the h-range in deterministic enumeration order.

    The zero offset is always a grid point, so q_star itself appears exactly
    once, at the center of the stream.
    """
    for row in _param_grid(q_star, l, h):
        yield Quadrilateral(*row)


def epsilon_error(lambdas, lambdas_star) -> tuple[float, float]:
    """Homothety factor and the scaled spectral mismatch.

    c = lambda_1 / lambda*_1 and
    err = sqrt( sum_k (lambda_k - c lambda*_k)^2 / sum_k (lambda*_k)^2 ).
    """
    lam = np.asarray(lambdas, dtype=float)
    lam_star = np.asarray(lambdas_star, dtype=float)
    c = float(lam[0] / lam_star[0])
    err = float(
        np.sqrt(((lam - c * lam_star) ** 2).sum() / (lam_star**2).sum())
    )
    return c, err


# ---------------------------------------------------------------------------
# vectorized candidate evaluation
# ---------------------------------------------------------------------------

def _batch_areas(params: np.ndarray) -> np.ndarray:
    a, b, g, d = params.T
    return 0.5 * (d + g * b - a * d)


def _batch_perimeters(params: np.ndarray) -> np.ndarray:
    a, b, g, d = params.T
    s1 = 1.0
    s2 = np.hypot(g - 1.0, d)
    s3 = np.hypot(g - a, d - b)
    s4 = np.hypot(a, b)
    return s1 + s2 + s3 + s4


def _batch_entries(params: np.ndarray, mats, nodes) -> np.ndarray:
    """Vectorized operator assembly, shape (n, 4, 4)."""
    a = params[:, 0:1]
    b = params[:, 1:2]
    g = params[:, 2:3]
    d = params[:, 3:4]
    x = nodes[:, 0][None, :]
    y = nodes[:, 1][None, :]
    axy = g - 1.0 - a
    bxy = d - b
    t1x = 1.0 + axy * y
    t1y = a + axy * x
    t2x = bxy * y
    t2y = b + bxy * x
    sigma = t1x * t2y - t1y * t2x
    inv_s2 = 1.0 / (sigma * sigma)
    f1 = -(t1y * t1y + t2y * t2y) * inv_s2
    f2 = 2.0 * (t1x * t1y + t2x * t2y) * inv_s2
    f3 = -(t1x * t1x + t2x * t2x) * inv_s2
    f2_over_s = f2 / sigma
    f4 = f2_over_s * (t1y * bxy - t2y * axy)
    f5 = f2_over_s * (t2x * axy - t1x * bxy)
    return (
        f1[:, :, None] * mats.dxx[None, :, :]
        + f2[:, :, None] * mats.dxy[None, :, :]
        + f3[:, :, None] * mats.dyy[None, :, :]
        - f4[:, :, None] * mats.dx[None, :, :]
        - f5[:, :, None] * mats.dy[None, :, :]
    )


def _evaluate_chunk(params, lam_star, cfg, area_star, mats, nodes):
    """Evaluate one chunk of candidates; returns per-candidate accept data
    plus counters. Invalid or complex-spectrum candidates are skipped and
    counted, never accepted."""
    n = len(params)
    a, b, g, d = params.T
    sig = geometry.corner_sigmas(a, b, g, d)
    valid = (sig[0] > 0.0) & (sig[1] > 0.0) & (sig[2] > 0.0) & (sig[3] > 0.0)
    n_invalid = int(n - valid.sum())

    eligible = valid.copy()
    n_prefiltered = 0
    if cfg.area_prefilter:
        areas = _batch_areas(params)
        keep = np.abs(areas - area_star) <= cfg.area_tol * area_star
        n_prefiltered = int((eligible & ~keep).sum())
        eligible &= keep

    idx = np.nonzero(eligible)[0]
    out = {
        "n_invalid": n_invalid,
        "n_prefiltered": n_prefiltered,
        "n_complex": 0,
        "accepted_idx": np.empty(0, dtype=int),
        "accepted_lam": np.empty((0, 4)),
        "accepted_c": np.empty(0),
        "accepted_err": np.empty(0),
    }
    if len(idx) == 0:
        return out

    entries = _batch_entries(params[idx], mats, nodes)
    xi = charpoly_batch(entries)
    roots = quartic_roots(xi)
    lam, ok = real_spectrum(roots)
    out["n_complex"] = int((~ok).sum())

    c = lam[:, 0] / lam_star[0]
    err = np.sqrt(((lam - c[:, None] * lam_star[None, :]) ** 2).sum(axis=1) / (lam_star**2).sum())
    accept = ok & (err <= cfg.epsilon)
    sel = np.nonzero(accept)[0]
    out["accepted_idx"] = idx[sel]
    out["accepted_lam"] = lam[sel]
    out["accepted_c"] = c[sel]
    out["accepted_err"] = err[sel]
    return out


def _count_distinct_spectra(scaled_lambdas: np.ndarray, rtol: float = 1e-9) -> int:
    """Cluster scaled spectra agreeing to rtol (relative, per component)."""
    if len(scaled_lambdas) == 0:
        return 0
    order = np.lexsort(scaled_lambdas.T[::-1])
    lam = scaled_lambdas[order]
    distinct = 1
    rep = lam[0]
    for row in lam[1:]:
        if np.any(np.abs(row - rep) > rtol * np.abs(rep)):
            distinct += 1
            rep = row
    return distinct


def run_search(
    q_star: Quadrilateral, cfg: SearchConfig, n_workers: int | None = None
) -> tuple[list[Candidate], SearchStats]:
    """Evaluate the whole h-range around q_star and select accepted domains.

    q_star itself sits at the center of its h-range, so the output always
    contains it with c = 1 and err = 0. Results are deterministic and ordered
    by enumeration index, independent of the worker count.
    """
    geometry.validate(q_star)
    if n_workers is None:
        n_workers = int(os.environ.get("ISOQUAD_THREADS", "0") or 0)

    from .discretization import assemble
    from .spectra import eigenvalues

    lam_star = eigenvalues(assemble(q_star, cfg.scheme, cfg.kappa))
    area_star = geometry.area(q_star)
    perimeter_star = geometry.perimeter(q_star)
    mats, nodes = matrices_and_nodes(cfg.scheme, cfg.kappa)

    params = _param_grid(q_star, cfg.l, cfg.h)
    n = len(params)
    stats = SearchStats(
        n_enumerated=n,
        area_star=area_star,
        perimeter_star=perimeter_star,
        lambdas_star=lam_star,
    )

    starts = list(range(0, n, CHUNK))
    chunks = [params[s : s + CHUNK] for s in starts]
    work = lambda chunk: _evaluate_chunk(chunk, lam_star, cfg, area_star, mats, nodes)
    if n_workers and n_workers > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            results = list(pool.map(work, chunks))
    else:
        results = [work(chunk) for chunk in chunks]

    candidates: list[Candidate] = []
    for start, res in zip(starts, results):
        stats.n_invalid += res["n_invalid"]
        stats.n_prefiltered += res["n_prefiltered"]
        stats.n_complex += res["n_complex"]
        for j, k in enumerate(res["accepted_idx"]):
            row = params[start + k]
            quad = Quadrilateral(*row)
            c = float(res["accepted_c"][j])
            candidates.append(
                Candidate(
                    quad=quad,
                    c=c,
                    lambdas=res["accepted_lam"][j].copy(),
                    err=float(res["accepted_err"][j]),
                    area=c * geometry.area(quad),
                    perimeter=float(np.sqrt(c)) * geometry.perimeter(quad),
                )
            )

    stats.n_accepted = len(candidates)
    if candidates:
        areas = np.array([cand.area for cand in candidates])
        pers = np.array([cand.perimeter for cand in candidates])
        stats.n_same_area = int(
            (np.abs(areas - area_star) <= cfg.area_tol * area_star).sum()
        )
        stats.n_same_perimeter = int(
            (np.abs(pers - perimeter_star) <= cfg.area_tol * perimeter_star).sum()
        )
        scaled = np.array([cand.lambdas / cand.c for cand in candidates])
        stats.n_distinct_spectra = _count_distinct_spectra(scaled)
    return candidates, stats
