"""Shells, moment matrices and the block factorization on the 2-torus.

Run with ``python demos/01_shells_and_factorization.py``.
"""

# %% Longilex shells
import numpy as np

from torus_olp import gaussborel, longilex, measure, moments
from torus_olp.acceptance import worked_example_weight

np.set_printoptions(precision=4, suppress=True, linewidth=120)

basis = longilex.LongilexBasis(2, 3)
for k, shell in enumerate(basis.shells):
    print(f"shell [{k}] ({len(shell)} indices):", shell)

# %% A Laurent weight and its moment matrix
# The weight z1 + 1/z1 + z2 + 1/z2 + 5 is real and positive on the torus,
# so its moment matrix is Hermitian positive definite.
L = worked_example_weight(2)
oracle = measure.polynomial_weight_oracle(measure.haar_oracle(2), L, claims_positive=True)
G = moments.moment_matrix(oracle, 3)
print("\nG^[2] (shells 0 and 1):")
print(G.truncation(2).real)
print("Hermitian residual:", moments.hermitian_residual(G))
print("reversal symmetry residual:", moments.persymmetry_residual(G))

# %% Block Gauss-Borel factorization
f = gaussborel.factorize(G)
print("\nquasi-tau blocks:")
for k in range(f.levels):
    print(f"H_{k} =\n{f.H_block(k).real}")
print("beta_1 =", f.beta(1).real.ravel())
print("reconstruction residual:", np.abs(f.reconstruct() - G.data).max())

# %% The same blocks as Schur complements of bordered truncations
for k in range(f.levels):
    gap = np.abs(gaussborel.quasi_tau_via_qd(G, k) - f.H_block(k)).max()
    print(f"H_{k} from the last quasi-determinant differs by {gap:.1e}")
