"""Thin-slab limit: slab Hamiltonian, effective planar Hamiltonian and the planar Coulomb Hamiltonian."""

# %% Effective potential and the profile W = 1 - rho V_eff^1
import numpy as np

from spec2d import slab_limit as sl

rho = np.array([0.01, 0.1, 1.0, 10.0])
print("V_eff^0.1(rho) =", sl.v_eff(0.1, rho))
print("1/rho          =", 1 / rho)
print("int W =", sl.w_integral(), " int_0^2 W =", sl.w_integral(2.0))

# %% Explicit constants and the admissible widths at eta = -1/2
c = sl.constants()
print(c, " Kato constant", sl.kato_constant())
print("a0(-1/2) =", sl.theorem_a0(-0.5), " d_C(-1/2) =", sl.coulomb_distance(-0.5))

# %% Discrete form inequality and sandwich norms against the analytic bounds
print("form gap:", sl.form_inequality_gap(sl.RadialGrid(0.01, 20.0), 0.1))
for a in (0.2, 0.1, 0.05):
    print(f"a = {a}: {sl.lemma_lower_bound(a):.4f} <= {sl.hs_sandwich_norm(a):.4f} <= {sl.lemma_upper_bound(a):.4f}")

# %% Resolvent differences on a coarse grid (the test suite uses h = 0.005, R = 20)
recs = sl.convergence_study(-0.5, [0.4, 0.2, 0.1, 1e-4], grid=sl.RadialGrid(0.02, 10.0), n_modes=3)
for r in recs:
    print(f"a = {r.a:g}: slab-vs-Coulomb {r.resolvent_diff:.4e}, admissible {r.admissible}, "
          f"theorem bound {r.theorem_rhs:.3e}")
print("fit: c1 =", recs[0].fit_c1, " c2 =", recs[0].fit_c2)
