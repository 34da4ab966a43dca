"""Build the 4x4 discrete operators and inspect their spectra.

Walks through the two discretizations (finite differences on the uniform
grid, degree-3 collocation on the kappa grid), the reference quadrilateral,
and the characteristic-polynomial invariants that drive everything else.
"""

import numpy as np

from isoquad import (
    LEGENDRE_KAPPA,
    Quadrilateral,
    UNIT_SQUARE,
    area,
    assemble,
    charpoly_invariants,
    continuous_square_eigenvalues,
    eigenvalues,
    full_spectrum,
    perimeter,
)

np.set_printoptions(precision=4, suppress=True)

# --- the unit square ------------------------------------------------------
# Both schemes coincide on the square at kappa = 1/3; the 4x4 operator is a
# rough stand-in for minus the Laplacian, so compare with the first four
# continuous Dirichlet eigenvalues pi^2 (m^2 + n^2).
op = assemble(UNIT_SQUARE, "fd")
print("unit square, finite differences")
print(op.entries)
print("eigenvalues:", eigenvalues(op))
print("continuous :", continuous_square_eigenvalues(4))
print()

print("unit square, collocation at the Legendre kappa:")
print("eigenvalues:", eigenvalues(assemble(UNIT_SQUARE, "sp", LEGENDRE_KAPPA)))
print()

# --- the reference star ---------------------------------------------------
star = Quadrilateral(-0.2, 1.1, 1.2, 1.3)
print(f"reference star {star}")
print(f"area {area(star):.4f}, perimeter {perimeter(star):.4f}")
for scheme, kappa, label in (
    ("fd", 1 / 3, "finite differences"),
    ("sp", 1 / 3, "collocation kappa=1/3"),
    ("sp", LEGENDRE_KAPPA, "collocation Legendre kappa"),
):
    lam = eigenvalues(assemble(star, scheme, kappa))
    print(f"  {label:28s} ->", " ".join(f"{v:8.4f}" for v in lam))
print()

# --- invariants -----------------------------------------------------------
# xi_k is the (4-k)-th elementary symmetric function of the eigenvalues:
# xi3 = trace, xi0 = product. Isospectrality of two domains is exactly the
# equality of their invariant quadruples, which is what the curve tracing
# and the neighborhood search work with.
s = full_spectrum(assemble(star))
print("invariants (xi0..xi3):", np.array(s.xi))
print("trace of the matrix  :", np.trace(assemble(star).entries))
print()

# The homothety sqrt(c) * domain divides every eigenvalue by c, so the
# invariants scale as xi_k / c^(4-k); c is the fifth curve parameter.
for c in (0.5, 2.0):
    xi = np.array(charpoly_invariants(assemble(star)))
    print(f"c = {c}: xi_k / c^(4-k) =", xi / c ** (4 - np.arange(4)))
