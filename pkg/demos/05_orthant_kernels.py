"""Geometric series of monomials split by integer orthants, summed in closed form."""

# %% Orthant labels and rules in three variables
import numpy as np

from torus_olp import spectral

for sigma in spectral.all_orthant_labels(3):
    print(f"sigma = {sigma!s:10} rules = {spectral.axis_rules(sigma, 3)}")

# %% Truncated sums approach the closed form geometrically
sigma = (1, 3)
zeta = np.exp(1j * np.array([0.3, 1.9, -2.4]))
z = np.array([2.5, 0.4, 3.0]) * np.exp(1j * np.array([1.0, -0.5, 0.2]))
exact = spectral.cauchy_mohammed(sigma, z, zeta)
print("\nclosed form:", exact)
previous = None
for B in range(4, 41, 4):
    err = abs(spectral.cauchy_mohammed_partial(sigma, z, zeta, B) - exact)
    ratio = "" if previous is None else f"  ratio {err / previous:.3f}"
    print(f"B = {B:2d}: error {err:.2e}{ratio}")
    previous = err
