"""Discrete spectrum of the planar Coulomb Hamiltonian and the point levels of its extensions."""

# %% Friedrichs spectrum: lambda_{m,n} = -Z^2 / (2|m| + 2n + 1)^2 with multiplicity 2N - 1
import math

import numpy as np

from spec2d import spectral_core as spc

p = spc.SpectralParams(1.0)
for n in range(3):
    st = spc.eigenvalue(p, 0, n)
    print(f"N = {st.N}: lambda = {st.lam:.6f}, multiplicity {st.multiplicity}")

# %% Point levels for a few values of kappa; they interlace with the Coulomb eigenvalues
lam = -1.0 / (2 * np.arange(1, 5) - 1) ** 2
for kappa in (-2.0, 0.0, 2.0, 20.0):
    e = spc.point_levels(spc.SpectralParams(1.0, kappa), 4).energies
    print(f"kappa = {kappa:5.1f}:", np.array2string(e, precision=6))
print("Coulomb:       ", np.array2string(lam, precision=6))

# %% Scaling law: eps_j(Z; kappa) = Z^2 eps_j(1; kappa + ln Z)
Z, kappa = 3.0, 0.5
lhs = spc.point_levels(spc.SpectralParams(Z, kappa), 3).energies
rhs = Z * Z * spc.point_levels(spc.SpectralParams(1.0, kappa + math.log(Z)), 3).energies
print("scaling law defect:", np.max(np.abs(lhs - rhs) / np.abs(lhs)))

# %% Large-kappa and negative-kappa asymptotics of the ground level
for kappa in (40.0, -10.0):
    e0 = spc.point_levels(spc.SpectralParams(1.0, kappa), 1).energies[0]
    asy = spc.point_level_asymptotics(1.0, kappa, 0)
    print(f"kappa = {kappa}: eps_0 = {e0:.8g}, leading = {asy['leading']:.8g}")

# %% Level curves over kappa (the data behind a log-scale plot of -eps_j)
kappas = np.linspace(-5, 10, 7)
curves = np.array([spc.point_levels(spc.SpectralParams(1.0, k), 3).energies for k in kappas])
for k, row in zip(kappas, curves):
    print(f"{k:6.2f}", np.array2string(-row, precision=5))
