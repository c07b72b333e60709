"""Deform a measure by exponential times or by degree-one factors and watch
the quasi-tau blocks move according to Toda-type laws.
"""

# %% Continuous flow
import numpy as np

from torus_olp import longilex, toda
from torus_olp.acceptance import preset_oracle

base = preset_oracle("worked-example", 2)
times = {(1, 0): 0.15, (-1, 0): 0.15, (0, 1): 0.1 + 0.05j, (0, -1): 0.1 - 0.05j}
flow = toda.ContinuousFlow(base, longilex.LongilexBasis(2, 3), times, M=48)

for a in (1, 2):
    r = toda.first_order_residuals(flow, a, 1)
    print(f"t_{a}: first-order law residuals", {k: f"{v:.1e}" for k, v in r.items()})

# %% Second-order equation and the step size
for h in (4e-2, 2e-2, 1e-2):
    print(f"h = {h:.0e}: second-order residual {toda.toda_equation_residual(flow, 1, 2, 1, h):.2e}")
print("observed order:", round(toda.richardson_order(lambda h: toda.toda_equation_residual(flow, 1, 2, 1, h), 4e-2)[2], 3))

# %% Lax form
print("Lax residual:", toda.lax_residual(flow, (1, 0), (0, 1)))
print("zero curvature residual:", toda.zero_curvature_residual(flow, (1, 0), (0, 1)))

# %% Discrete flows
N = np.array([[0.3, 0.0, 0.2, 0.1], [0.1, 0.4, 0.0, 0.2j]])
lat = toda.DiscreteLattice(base, longilex.LongilexBasis(2, 4), toda.DegreeOneFlow(N, [-2.0, 1.5 + 0.5j]))
print("\ncompatibility of the two steps:", toda.zs_compatibility_residual(lat, 0, 1))
for k in (1, 2, 3):
    print(f"discrete Toda, shell {k}:", toda.discrete_toda_residual(lat, 0, 1, k))

# %% Polynomials from one-step perturbations at the evaluation point
z = np.array([0.9 * np.exp(0.7j), 1.1 * np.exp(-1.3j)])
print("\nphi_[2](z) from perturbed quasi-tau blocks:")
print(np.round(toda.miwa_polynomials(base, lat.basis, np.eye(4), z, 2), 6))
