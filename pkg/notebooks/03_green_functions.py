"""Green functions of the Friedrichs Hamiltonian and of the point-interaction extensions."""

# %% Radial Green function and its symmetry
import numpy as np

from spec2d import spectral_core as spc

p = spc.SpectralParams(1.0)
z = -0.3 + 0.2j
print("G_0(0.5, 2.0) =", spc.green_radial(p, 0, z, 0.5, 2.0).value)
print("G_0(2.0, 0.5) =", spc.green_radial(p, 0, z, 2.0, 0.5).value)

# %% The Krein term: phi^kappa has poles exactly at the point levels
pk = spc.SpectralParams(1.0, 0.8)
e0 = spc.point_levels(pk, 1).energies[0]
for d in (1e-3, 1e-6, 1e-9):
    print(f"|phi(eps_0 + {d:g})| = {abs(spc.phi_kappa(pk, e0 + d)):.3e}")

# %% Boundary values of the extension Green function recover f1/f0 = kappa
bv = spc.boundary_values(lambda r: spc.green_kappa_radial(pk, -0.3, r, 1.0).value.real, tol=1e-4)
print("f1/f0 =", bv.f1 / bv.f0, " (kappa = 0.8)")

# %% Full-plane Green function from the partial-wave sum
x1, x2 = np.array([1.0, 0.0]), np.array([0.3, 1.2])
g = spc.green_full(pk, -0.5, x1, x2)
print("G^kappa(x1, x2; -1/2) =", g.value)
