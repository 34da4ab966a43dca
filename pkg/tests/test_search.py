import numpy as np
import pytest

from isoquad import (
    InvalidStep,
    Quadrilateral,
    UNIT_SQUARE,
    assemble,
    eigenvalues,
    enumerate_hrange,
    epsilon_error,
    run_search,
)
from isoquad.search import SearchConfig, _param_grid, offsets


SMALL = dict(l=0.02, h=0.01, epsilon=2e-3)


def test_offsets_counts():
    assert np.allclose(offsets(0.02, 0.01), [-0.01, 0.0, 0.01])
    assert len(offsets(0.1, 0.0036)) == 27
    with pytest.raises(InvalidStep):
        offsets(0.1, 0.2)
    with pytest.raises(InvalidStep):
        offsets(0.1, 0.0)


def test_enumeration_counts_and_center(star):
    quads = list(enumerate_hrange(star, 0.02, 0.01))
    assert len(quads) == 81
    matches = [q for q in quads if q == star]
    assert len(matches) == 1
    assert quads[40] == star  # zero offsets sit at the middle of the stream


def test_enumeration_order_deterministic(star):
    a = list(enumerate_hrange(star, 0.02, 0.01))
    b = list(enumerate_hrange(star, 0.02, 0.01))
    assert a == b
    # V3 offsets are the outer loops: the first 9 entries share V4 sweeps
    assert a[0].alpha == pytest.approx(star.alpha - 0.01)
    assert a[0].beta == pytest.approx(star.beta - 0.01)
    assert a[1].gamma == pytest.approx(star.gamma)
    assert a[1].delta == pytest.approx(star.delta - 0.01)
    assert a[1].alpha == a[0].alpha and a[1].beta == a[0].beta


def test_param_grid_size(star):
    grid = _param_grid(star, 0.1, 0.0036)
    assert grid.shape == (531441, 4)


def test_epsilon_error_examples():
    lam = np.array([12.52, 24.63, 25.98, 38.05])
    c, err = epsilon_error(lam, lam)
    assert (c, err) == (1.0, 0.0)
    c, err = epsilon_error(2.0 * lam, lam)
    assert c == pytest.approx(2.0)
    assert err == pytest.approx(0.0, abs=1e-15)
    lam_star = np.array([12.52, 24.63, 26.0, 38.05])
    c, err = epsilon_error(lam, lam_star)
    assert c == 1.0
    assert err == pytest.approx(0.02 / np.linalg.norm(lam_star), rel=1e-12)


def test_run_search_self_inclusion(star):
    cands, stats = run_search(star, SearchConfig(**SMALL))
    self_cands = [c for c in cands if c.quad == star]
    assert len(self_cands) == 1
    assert self_cands[0].c == pytest.approx(1.0, abs=1e-12)
    assert self_cands[0].err <= 1e-12
    assert stats.n_enumerated == 81
    assert stats.n_accepted == len(cands)


def test_run_search_epsilon_monotonicity(star):
    small = run_search(star, SearchConfig(l=0.02, h=0.01, epsilon=5e-4))[0]
    large = run_search(star, SearchConfig(l=0.02, h=0.01, epsilon=5e-3))[0]
    small_set = {c.quad for c in small}
    large_set = {c.quad for c in large}
    assert small_set <= large_set


def test_run_search_determinism(star):
    a_cands, a_stats = run_search(star, SearchConfig(**SMALL))
    b_cands, b_stats = run_search(star, SearchConfig(**SMALL))
    assert len(a_cands) == len(b_cands)
    for ca, cb in zip(a_cands, b_cands):
        assert ca.quad == cb.quad
        assert ca.c == cb.c and ca.err == cb.err
        assert np.array_equal(ca.lambdas, cb.lambdas)
    assert a_stats.n_accepted == b_stats.n_accepted


def test_run_search_thread_pool_matches_sequential(star):
    cfg = SearchConfig(l=0.04, h=0.005, epsilon=2e-3)
    seq_cands, seq_stats = run_search(star, cfg, n_workers=0)
    par_cands, par_stats = run_search(star, cfg, n_workers=4)
    assert len(seq_cands) == len(par_cands)
    for ca, cb in zip(seq_cands, par_cands):
        assert ca.quad == cb.quad
        assert np.array_equal(ca.lambdas, cb.lambdas)
    assert seq_stats.n_accepted == par_stats.n_accepted


def test_prefilter_soundness(star):
    """Prefiltering drops exactly the candidates whose raw area is off."""
    base_cfg = SearchConfig(l=0.02, h=0.01, epsilon=5e-3, area_prefilter=False)
    pre_cfg = SearchConfig(l=0.02, h=0.01, epsilon=5e-3, area_prefilter=True)
    full, full_stats = run_search(star, base_cfg)
    filtered, pre_stats = run_search(star, pre_cfg)
    area_star = full_stats.area_star
    kept = {
        c.quad
        for c in full
        if abs(c.area / c.c - area_star) <= base_cfg.area_tol * area_star
    }
    assert {c.quad for c in filtered} == kept
    assert pre_stats.n_prefiltered > 0


def test_candidate_lambdas_match_scalar_path(star):
    cands, _ = run_search(star, SearchConfig(**SMALL))
    for cand in cands:
        lam = eigenvalues(assemble(cand.quad))
        assert np.allclose(lam, cand.lambdas, atol=1e-9)


def test_candidate_scaled_reporting(star):
    cands, _ = run_search(star, SearchConfig(**SMALL))
    from isoquad import area, perimeter

    for cand in cands:
        assert cand.area == pytest.approx(cand.c * area(cand.quad), rel=1e-12)
        assert cand.perimeter == pytest.approx(
            np.sqrt(cand.c) * perimeter(cand.quad), rel=1e-12
        )
        v = cand.scaled_vertices()
        assert v.shape == (4, 2)
        assert np.allclose(v[1], [np.sqrt(cand.c), 0.0])


def test_invalid_candidates_are_skipped():
    # a box reaching across beta = 0 produces invalid members
    edge = Quadrilateral(0.0, 0.055, 1.0, 1.0)
    cands, stats = run_search(edge, SearchConfig(l=0.2, h=0.1, epsilon=1e-6))
    assert stats.n_invalid > 0
    assert stats.n_enumerated == 81
    for cand in cands:
        assert cand.quad.beta > 0


def test_search_config_validation():
    with pytest.raises(InvalidStep):
        SearchConfig(l=0.1, h=0.2, epsilon=1e-4)
    with pytest.raises(ValueError):
        SearchConfig(l=0.1, h=0.01, epsilon=0.0)
