"""Christoffel-Darboux kernels, the shell recursion, and what everything
reduces to when there is a single variable.
"""

# %% A non-Hermitian weight on the 2-torus
import numpy as np

from torus_olp import gaussborel, measure, moments, opbasis
from torus_olp.acceptance import verblunsky_reduction
from torus_olp.laurent import parse_poly

L = parse_poly("0.3*z1 + 0.2i*z1^-1 + 0.4*z2^-1 + 0.1*z1*z2 + 3")
G = moments.moment_matrix(measure.polynomial_weight_oracle(measure.haar_oracle(2), L), 4)
f = gaussborel.factorize(G)
rng = np.random.default_rng(0)
z1, z2 = np.exp(2j * np.pi * rng.uniform(size=(2, 2)))

# %% Kernel three ways
n = np.array([1.0, 0.5j, -0.2, 0.7])
for k in (1, 2, 3):
    sum_form = opbasis.cd_kernel(f, k, z1, z2)
    inverse_form = opbasis.abc_kernel(G, k, z1, z2)
    two_shell = opbasis.cd_formula(f, n, k, z1, z2)
    print(f"level {k}: {sum_form:.6f}  |inverse - sum| = {abs(inverse_form - sum_form):.1e}"
          f"  |two-shell - sum| = {abs(two_shell - sum_form):.1e}")

# %% Shell recursion residuals
for k in range(f.levels - 1):
    print(f"shell {k}: recursion residual {opbasis.three_term_residual(f, n, k, z1):.1e}")

# %% One variable: 2x2 blocks carry the Verblunsky coefficients
# For the weight |1 - a e^{i theta}|^{-2} only the first coefficient is nonzero, equal to a.
a = 0.5
oracle = measure.bernstein_szego_oracle(a)
alpha, h = verblunsky_reduction(oracle, 5)
for k in range(1, len(alpha)):
    print(f"alpha_{k} = {alpha[k]:+.3e}   1 - |alpha|^2 = {1 - abs(alpha[k])**2:.6f}"
          f"   h_k / h_(k-1) = {(h[k] / h[k - 1]).real:.6f}")
