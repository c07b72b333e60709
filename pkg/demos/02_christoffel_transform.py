"""Multiply the Haar measure by a nice Laurent polynomial and recover the new
orthogonal family from the old one plus a few zeros of the polynomial.
"""

# %% Setup
import numpy as np

from torus_olp import darboux, gaussborel, longilex, measure, moments, opbasis
from torus_olp.acceptance import worked_example_weight
from torus_olp.laurent import is_nice

np.set_printoptions(precision=6, suppress=True, linewidth=120)

L = worked_example_weight(2)
print("L =", L)
print("nice:", is_nice(L).nice, " longitude:", L.longitude())

base = measure.haar_oracle(2)
basis = longilex.LongilexBasis(2, 3)
f = gaussborel.factorize(moments.build_moment(base, basis))

# %% Nodes on the zero set of L
# The shell [1] has four members, so four poised nodes are needed.
nodes = darboux.sample_nodes(L, f, 1, seed=0)
print("\nnodes (z1, z2):")
print(nodes.points)
print("max |L(node)|:", darboux.zero_set_residual(L, nodes.points))
print("poisedness score:", nodes.meta["poisedness"])

# %% Transformed polynomials in the monomial basis
coeffs, remainder = darboux.christoffel_coefficients(f, L, nodes, 1)
print("\ncolumns: 1, 1/z1, 1/z2, z2, z1")
print(coeffs.real)
print("division remainder:", remainder)

# %% Check against a direct factorization of L dmu
tf = darboux.perturbed_factorization(base, L, basis)
z = np.exp(1j * np.array([0.4, -1.7]))
for k in (0, 1, 2):
    nk = darboux.sample_nodes(L, f, k, seed=k)
    gap = np.abs(darboux.christoffel_transform(f, L, nk, k, z) - opbasis.eval_family(tf, k, z)).max()
    print(f"shell {k}: node formula vs direct factorization differ by {gap:.1e}")
