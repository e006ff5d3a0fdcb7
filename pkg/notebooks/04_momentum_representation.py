"""Eigenfunction transform of the m = 0 channel and the momentum-side description of point levels."""

# %% Generalized eigenfunctions and their normalization factor
import numpy as np

from spec2d import momentum_rep as mr
from spec2d import spectral_core as spc

rho = np.linspace(0.1, 6, 4)
print("psi_0(k=0.8, rho) =", mr.gen_eigenfunction(1.0, 0, 0.8, rho))
print("N(k) at k = 1e-3, 1, 1e3:", mr.normalization_n(1.0, np.array([1e-3, 1.0, 1e3])))

# %% Unitarity diagnostics of the transform (takes about half a minute)
rep = mr.transform_report(1.0)
print(rep)

# %% Two summation identities used by the momentum equation
print("identity_sum(-1) =", mr.identity_sum(-1.0), " identity_sum(0) =", mr.identity_sum(0.0))
print("identity_int(1)  =", mr.identity_int(1.0))

# %% The same point levels from the momentum equation and from the coordinate equation
Z, kappa_hat = 2.0, 1.0
kappa = mr.kappa_map(kappa_hat, Z)
print("momentum  :", mr.momentum_point_levels(Z, kappa_hat, 4).energies)
print("coordinate:", spc.point_levels(spc.SpectralParams(Z, kappa), 4).energies)

# %% S functional on the deficiency element at z = i Z^2 / 2
f = mr.fz_deficiency(1.0, 0.5j)
print("S(1, f_z) =", mr.s_functional(1.0, 1.0, f), " closed form", mr.s_fz_closed_form(1.0, 0.5j))
