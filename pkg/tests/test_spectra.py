import numpy as np
import pytest

from isoquad import (
    ComplexSpectrum,
    LEGENDRE_KAPPA,
    Quadrilateral,
    UNIT_SQUARE,
    assemble,
    charpoly_invariants,
    charpoly_with_gradient,
    continuous_square_eigenvalues,
    eigenvalues,
    full_spectrum,
    operator_from_vertices,
    scale,
)
from isoquad.discretization import DiscreteOperator
from isoquad.spectra import charpoly_batch, charpoly_coefficients, quartic_roots

from conftest import sample_valid_quads

PI2 = np.pi**2


def esym(lam):
    e1 = lam.sum()
    e2 = sum(lam[i] * lam[j] for i in range(4) for j in range(i + 1, 4))
    e3 = sum(
        lam[i] * lam[j] * lam[k]
        for i in range(4)
        for j in range(i + 1, 4)
        for k in range(j + 1, 4)
    )
    e4 = lam.prod()
    return np.array([e4, e3, e2, e1])


# ---------------------------------------------------------------------------
# reference spectra
# ---------------------------------------------------------------------------

def test_square_fd_spectrum_exact():
    lam = eigenvalues(assemble(UNIT_SQUARE, "fd"))
    assert np.allclose(lam, [18.0, 36.0, 36.0, 54.0], atol=1e-9)


def test_square_sp_legendre_spectrum():
    lam = eigenvalues(assemble(UNIT_SQUARE, "sp", LEGENDRE_KAPPA))
    assert np.allclose(lam, [20.0, 40.0, 40.0, 60.0], atol=1e-6)


@pytest.mark.parametrize(
    "scheme,kappa,expected",
    [
        ("fd", 1 / 3, (12.54, 24.79, 25.43, 38.30)),
        ("sp", 1 / 3, (12.52, 24.63, 25.98, 38.05)),
        ("sp", LEGENDRE_KAPPA, (13.92, 27.30, 28.59, 43.11)),
    ],
)
def test_star_spectra(star, scheme, kappa, expected):
    lam = eigenvalues(assemble(star, scheme, kappa))
    assert np.allclose(lam, expected, atol=0.005)


def test_star_invariants(star):
    xi = charpoly_invariants(assemble(star))
    expected = (304819.78, 56468.45, 3675.65, 101.18)
    assert np.allclose(xi, expected, rtol=1e-4)


def test_square_fd_invariants():
    xi = charpoly_invariants(assemble(UNIT_SQUARE, "fd"))
    assert xi[3] == pytest.approx(144.0, abs=1e-9)
    assert xi[0] == pytest.approx(1259712.0, rel=1e-12)


def test_invariant_xi3_is_trace(random_quads):
    for q in random_quads[:20]:
        op = assemble(q)
        xi = charpoly_invariants(op)
        assert xi[3] == pytest.approx(np.trace(op.entries), rel=1e-13)


def test_eigenvalues_deterministic(star):
    op = assemble(star)
    a = eigenvalues(op)
    b = eigenvalues(op)
    assert np.array_equal(a, b)


def test_complex_spectrum_synthetic():
    rotation_like = np.array(
        [[0.0, -1.0, 0, 0], [1.0, 0.0, 0, 0], [0, 0, 2.0, 0], [0, 0, 0, 3.0]]
    )
    op = DiscreteOperator(entries=rotation_like, scheme="sp", kappa=1 / 3, source=UNIT_SQUARE)
    with pytest.raises(ComplexSpectrum):
        eigenvalues(op)


def test_complex_spectrum_extreme_quad():
    quad = Quadrilateral(
        0.34615533444376156, 0.9900100079416145, 2.491629807367633, 2.4530465800017636
    )
    op = assemble(quad)
    with pytest.raises(ComplexSpectrum):
        eigenvalues(op)


# ---------------------------------------------------------------------------
# invariants and round trips
# ---------------------------------------------------------------------------

def test_root_coefficient_round_trip(rng):
    for q in sample_valid_quads(rng, 200):
        op = assemble(q)
        xi0, xi1, xi2, xi3 = charpoly_invariants(op)
        lam = eigenvalues(op)
        for z in lam:
            qz = z**4 - xi3 * z**3 + xi2 * z**2 - xi1 * z + xi0
            assert abs(qz) <= 1e-6 * xi0


def test_spectrum_consistency(random_quads):
    for q in random_quads:
        s = full_spectrum(assemble(q))
        lam = np.array(s.lambdas)
        assert np.all(np.diff(lam) >= 0)
        assert lam[0] > 0
        assert np.allclose(esym(lam), s.xi, rtol=1e-8)


def test_homothety_law(random_quads):
    k = np.arange(4)
    for q in random_quads[:15]:
        xi = np.array(charpoly_invariants(assemble(q)))
        for c in (0.5, 2.0, 10.0):
            entries = operator_from_vertices(scale(q, c))
            xi_scaled = np.array(charpoly_coefficients(entries)).astype(float)
            assert np.allclose(xi_scaled, xi / c ** (4 - k), rtol=1e-10)


def test_operator_from_vertices_matches_family(random_quads):
    for q in random_quads[:10]:
        direct = assemble(q).entries
        general = operator_from_vertices(q.vertices)
        assert np.allclose(direct, general, rtol=1e-13, atol=1e-10)


def test_isometric_square_perturbations():
    s = 0.01
    variants = [
        Quadrilateral(-s, 1.0, 1.0, 1.0),
        Quadrilateral(0.0, 1.0 + s, 1.0, 1.0),
        Quadrilateral(0.0, 1.0, 1.0 + s, 1.0),
        Quadrilateral(0.0, 1.0, 1.0, 1.0 + s),
    ]
    spectra = [eigenvalues(assemble(v)) for v in variants]
    for lam in spectra[1:]:
        assert np.allclose(lam, spectra[0], atol=1e-9)


# ---------------------------------------------------------------------------
# quartic root extraction
# ---------------------------------------------------------------------------

def test_quartic_known_roots():
    # (z-1)(z-2)(z-3)(z-4): e-symmetric coefficients (24, 50, 35, 10)
    roots = quartic_roots(np.array([24.0, 50.0, 35.0, 10.0]))
    assert np.allclose(roots.real, [1, 2, 3, 4], atol=1e-12)
    assert np.allclose(roots.imag, 0.0, atol=1e-13)


def test_quartic_double_root_snapping():
    # (z-2)^2 (z-5) (z-9) with coefficients perturbed at rounding level
    lam = np.array([2.0, 2.0, 5.0, 9.0])
    xi = esym(lam)
    xi_noisy = xi * (1.0 + np.array([3e-16, -2e-16, 1e-16, -1e-16]))
    roots = quartic_roots(xi_noisy)
    assert np.allclose(np.sort(roots.real), lam, atol=1e-6)
    assert np.abs(roots.imag).max() <= 1e-8 * 9


def test_quartic_batch_matches_scalar(rng):
    quads = sample_valid_quads(rng, 64)
    mats = np.stack([assemble(q).entries for q in quads])
    xi_batch = charpoly_batch(mats)
    roots = quartic_roots(xi_batch)
    for i, q in enumerate(quads):
        lam_scalar = eigenvalues(assemble(q))
        assert np.allclose(np.sort(roots[i].real), lam_scalar, atol=1e-9)
        xi_scalar = np.array(charpoly_invariants(assemble(q)))
        assert np.allclose(xi_batch[i], xi_scalar, rtol=1e-11)


# ---------------------------------------------------------------------------
# dual-number gradients
# ---------------------------------------------------------------------------

def test_gradient_values_bitwise_equal(star):
    values, _ = charpoly_with_gradient(star)
    xi = np.array(charpoly_invariants(assemble(star)))
    assert np.array_equal(values, xi)


def test_gradient_matches_central_differences(random_quads):
    h = 1e-6
    for q in random_quads:
        values, grad = charpoly_with_gradient(q)
        fd = np.empty((4, 4))
        base = np.array(q.params())
        for j in range(4):
            hi = base.copy()
            hi[j] += h
            lo = base.copy()
            lo[j] -= h
            fd[:, j] = (
                np.array(charpoly_invariants(assemble(Quadrilateral(*hi))))
                - np.array(charpoly_invariants(assemble(Quadrilateral(*lo))))
            ) / (2 * h)
        assert np.abs(grad - fd).max() <= 1e-6 * np.abs(grad).max()


def test_gradient_rectangle_closed_form():
    """Eigenvalues of the height-beta rectangle are {9, 27} + {9, 27}/beta^2.

    Moving along the rectangle family changes beta and delta together, so the
    symbolic family derivative (frozen below, from the closed-form spectrum at
    beta = 1.3) must equal the sum of the beta and delta gradient columns.
    """
    rect = Quadrilateral(0.0, 1.3, 1.0, 1.3)
    values, grad = charpoly_with_gradient(rect)
    xi_expected = (497062.00558741612, 81541.916712262697, 4706.5194495991036, 114.60355029585799)
    dxi_dbeta = (-1183694.2210269487, -144241.2693833067, -5459.1495126490399, -65.54392353208921)
    assert np.allclose(values, xi_expected, rtol=1e-11)
    assert np.allclose(grad[:, 1] + grad[:, 3], dxi_dbeta, rtol=1e-9)
    # the rectangle is mirror symmetric, so the two columns agree
    assert np.allclose(grad[:, 1], grad[:, 3], rtol=1e-10)


def test_gradient_isometric_structure_at_square():
    """The four single-parameter deformations of the square are isometric,
    which pins the gradient columns to one ray: -d/d(alpha) = d/d(beta) =
    d/d(gamma) = d/d(delta). (Verified against central differences: the
    common trace derivative is 72, not zero.)"""
    _, grad = charpoly_with_gradient(UNIT_SQUARE)
    assert np.allclose(-grad[:, 0], grad[:, 1], rtol=1e-12)
    assert np.allclose(grad[:, 1], grad[:, 2], rtol=1e-12)
    assert np.allclose(grad[:, 2], grad[:, 3], rtol=1e-12)
    assert grad[3, 0] == pytest.approx(72.0, rel=1e-10)


# ---------------------------------------------------------------------------
# continuous reference values
# ---------------------------------------------------------------------------

def test_continuous_square_eigenvalues():
    assert np.allclose(continuous_square_eigenvalues(1), [2 * PI2])
    vals = continuous_square_eigenvalues(4)
    assert np.allclose(vals, [2 * PI2, 5 * PI2, 5 * PI2, 8 * PI2])
    vals5 = continuous_square_eigenvalues(5)
    assert vals5[4] == pytest.approx(10 * PI2)
    with pytest.raises(ValueError):
        continuous_square_eigenvalues(0)
