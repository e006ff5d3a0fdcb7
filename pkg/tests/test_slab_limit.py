import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from spec2d import slab_limit as sl
from spec2d.errors import DomainError, ResourceError, SpectralPointError

from conftest import ETA

finite = dict(allow_nan=False, allow_infinity=False)
COARSE = sl.RadialGrid(0.02, 10.0)


# ---------------------------------------------------------------- transverse modes

def test_transverse_energy_and_orthonormality():
    a = 0.3
    assert sl.transverse_energy(a, 2) == pytest.approx(4 * math.pi ** 2 / a ** 2, rel=1e-15)
    eps = 1e-12
    for n in range(1, 5):
        for k in range(1, 5):
            val = integrate.quad(lambda z: sl.transverse_mode(a, n, z) * sl.transverse_mode(a, k, z),
                                 -a / 2 + eps, a / 2 - eps, epsabs=1e-13)[0]
            assert val == pytest.approx(1.0 if n == k else 0.0, abs=1e-10)


def test_transverse_mode_domain():
    with pytest.raises(DomainError):
        sl.transverse_mode(1.0, 1, 0.5)
    with pytest.raises(DomainError):
        sl.transverse_energy(1.0, 0)


def test_transverse_mode_solves_dirichlet_problem():
    a, h = 0.7, 1e-4
    for n in (1, 2, 3):
        for z in (-0.2, 0.05, 0.3):
            f = lambda t: sl.transverse_mode(a, n, t)
            d2 = (f(z + h) - 2 * f(z) + f(z - h)) / h ** 2
            assert abs(-d2 - sl.transverse_energy(a, n) * f(z)) < 1e-5 * sl.transverse_energy(a, n)


# ---------------------------------------------------------------- effective potential

@pytest.mark.parametrize("a", [0.05, 0.3, 1.0])
def test_v_eff_dual_paths(a):
    rho = np.array([1e-4, 0.01, 0.2, 1.0, 7.0]) * a
    fast = sl.v_eff(a, rho)
    slow = sl.v_eff(a, rho, method="quad")
    assert np.max(np.abs(fast - slow) / slow) < 1e-11


def test_v_eff_scaling_quad_route():
    rho = np.array([0.003, 0.04, 0.5])
    for a in (0.2, 2.5):
        assert np.allclose(sl.v_eff(a, rho, method="quad"), sl.v_eff(1.0, rho / a, method="quad") / a,
                           rtol=1e-11, atol=0)


def test_v_eff_small_rho_logarithm():
    a = 0.4
    r1, r2 = 1e-6, 1e-7
    slope = (sl.v_eff(a, r2) - sl.v_eff(a, r1)) / math.log(r1 / r2)
    assert slope == pytest.approx(4.0 / a, rel=1e-6)


def test_v_eff_domain():
    with pytest.raises(DomainError):
        sl.v_eff(0.1, 0.0)
    with pytest.raises(ValueError):
        sl.v_eff(0.1, 1.0, method="nope")


def test_w_profile_integral_and_tail():
    f = lambda r: sl.w_profile(r)
    total = (integrate.quad(f, 0, 1, limit=200, epsabs=1e-13)[0]
             + integrate.quad(f, 1, np.inf, limit=200, epsabs=1e-13)[0])
    assert total == pytest.approx(0.25 - 1 / math.pi ** 2, abs=1e-9)
    assert sl.w_integral() == pytest.approx(total, abs=1e-9)
    assert sl.w_integral(2.0) < sl.w_integral()
    # rho^2 W(rho) tends to the second moment of cos^2(pi z) on (-1/2, 1/2)
    mom = integrate.quad(lambda z: z * z * math.cos(math.pi * z) ** 2, -0.5, 0.5)[0]
    assert sl.w_tail_moment() == pytest.approx(mom, rel=1e-13)
    assert 50.0 ** 2 * sl.w_profile(50.0) == pytest.approx(mom, rel=1e-3)


def test_w_profile_scalar_and_array():
    assert isinstance(sl.w_profile(0.3), float)
    assert sl.w_profile(np.array([0.3, 0.4])).shape == (2,)


@settings(max_examples=40, deadline=None)
@given(st.floats(1e-4, 1e3, **finite))
def test_w_profile_bounds(rho):
    w = sl.w_profile(rho)
    assert 0.0 <= w <= 1.0
    assert rho * rho * w <= sl.w_tail_moment() * (1 + 1e-12)
    assert w == pytest.approx(1.0 - rho * sl.v_eff(1.0, rho), abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.01, 2.0, **finite), st.floats(1e-3, 50.0, **finite))
def test_v_eff_below_coulomb(a, rho):
    v = sl.v_eff(a, rho)
    assert 0 < v <= 1.0 / rho * (1 + 1e-13)


# ---------------------------------------------------------------- constants and bounds

def test_constants_against_extended_precision():
    mp.mp.dps = 40
    g4 = mp.gamma(mp.mpf(1) / 4) ** 4
    pi = mp.pi
    c1 = (g4 + mp.sqrt(g4 ** 2 + 64 * pi ** 4)) / (8 * pi ** 2)
    c2 = mp.sqrt(3) / 2 * (1 - 4 / pi ** 2) * mp.sqrt(1 + 32 * pi ** 2 / (3 * (pi ** 2 - 4) * mp.log(2) ** 2))
    c3 = c1 ** 2 * g4 / (6 * mp.sqrt(2) * pi ** 3)
    for method in ("loggamma", "agm"):
        c = sl.constants(method)
        assert c.C_I == pytest.approx(float(c1), rel=1e-13)
        assert c.C_II == pytest.approx(float(c2), rel=1e-13)
        assert c.C_III == pytest.approx(float(c3), rel=1e-13)
    # values frozen from the extended-precision evaluation
    c = sl.constants()
    assert (round(c.C_I, 9), round(c.C_II, 9), round(c.C_III, 9)) == (4.594529379, 3.188705056, 13.864062247)
    assert sl.kato_constant() == pytest.approx(float(g4 / (4 * pi ** 2)), rel=1e-13)


def test_constants_unknown_method():
    with pytest.raises(ValueError):
        sl.constants("nope")


def test_coulomb_distance():
    assert sl.coulomb_distance(-0.5) == pytest.approx(0.5 - 1 / 9, rel=1e-15)
    assert sl.coulomb_distance(-2.0) == pytest.approx(1.0)
    assert sl.coulomb_distance(-1e-4) == pytest.approx(1e-4 - 1 / 101 ** 2, rel=1e-9)
    assert sl.coulomb_distance(0.3) == 0.0


def test_admissibility_at_eta():
    a0 = sl.theorem_a0(ETA)
    d = sl.coulomb_distance(ETA)
    c = sl.constants()
    assert 2 * c.C_I ** 2 * c.C_II / d * a0 * abs(math.log(a0)) == pytest.approx(0.5, rel=1e-10)
    assert sl.theorem_admissible(1e-4, ETA)
    assert not any(sl.theorem_admissible(a, ETA) for a in (0.4, 0.2, 0.1, 0.05))
    assert not sl.theorem_admissible(1e-4, -4.0)


def test_lemma_bounds_ordering():
    for a in (0.2, 0.1, 0.05, 0.02):
        assert 0 < sl.lemma_lower_bound(a) < sl.lemma_upper_bound(a)
    assert sl.lemma_lower_bound(0.6) == 0.0
    with pytest.raises(DomainError):
        sl.lemma_lower_bound(0.1, R=0.5)


# ---------------------------------------------------------------- mode couplings

def test_coulomb_mode_matrix_parity_and_diagonal():
    rho = np.array([0.01, 0.3, 2.0])
    assert np.all(sl.coulomb_mode_matrix(0.4, 1, 2, rho) == 0)
    assert np.allclose(sl.coulomb_mode_matrix(0.4, 1, 1, rho), sl.v_eff(0.4, rho), rtol=1e-10)
    assert np.allclose(sl.coulomb_mode_matrix(0.4, 1, 3, rho), sl.coulomb_mode_matrix(0.4, 3, 1, rho), rtol=1e-12)


def test_cell_integrals_against_pointwise_couplings():
    a, grid = 0.3, sl.RadialGrid(0.05, 1.0)
    P = sl._cell_coulomb_integrals(a, grid, 1, 3)
    lo, hi = grid.cell_edges(1)
    x, w = np.polynomial.legendre.leggauss(24)
    for n, k in [(0, 0), (0, 2), (1, 1)]:
        for i in (0, 4, 15):
            r = 0.5 * (hi[i] + lo[i]) + 0.5 * (hi[i] - lo[i]) * x
            val = 0.5 * (hi[i] - lo[i]) * np.sum(w * r * sl.coulomb_mode_matrix(a, n + 1, k + 1, r))
            assert P[n, k, i] == pytest.approx(val, rel=1e-9)
    assert np.all(P[0, 1] == 0)


# ---------------------------------------------------------------- discrete operators

def test_grid_validation():
    with pytest.raises(DomainError):
        sl.RadialGrid(0.3, 1.0)
    g = sl.default_grid(0.05, R=5.0)
    assert g.h <= 0.05 / 8 and g.R == 5.0
    assert sl.default_grid(1e-6, R=40.0).n == 4000


def test_coulomb_ground_state_second_order():
    errs = []
    for h in (0.02, 0.01):
        op = sl.discretize("coulomb2d", sl.RadialGrid(h, 40.0))
        errs.append(abs(op.lowest_eigenvalues(1)[0] + 1.0))
    assert errs[1] < 5e-5
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.15)


def test_coulomb_excited_levels_and_sectors():
    op0 = sl.discretize("coulomb2d", sl.RadialGrid(0.01, 60.0))
    op1 = sl.discretize("coulomb2d", sl.RadialGrid(0.01, 60.0), m=1)
    assert np.allclose(op0.lowest_eigenvalues(2), [-1.0, -1 / 9], atol=2e-4)
    assert op1.lowest_eigenvalues(1)[0] == pytest.approx(-1 / 9, abs=2e-4)


def test_effective_above_coulomb_and_slab_modes():
    grid = COARSE
    hc = sl.discretize("coulomb2d", grid).lowest_eigenvalues(1)[0]
    he = sl.discretize("effective", grid, sl.SlabParams(0.1)).lowest_eigenvalues(1)[0]
    hs = sl.discretize("slab", grid, sl.SlabParams(0.1, 3))
    assert he >= hc
    assert hs.size == 3 * grid.nodes(0).size
    # coupling to higher modes can only lower the slab ground state
    assert hs.lowest_eigenvalues(1)[0] <= he + 1e-12


def test_discretize_errors():
    with pytest.raises(ResourceError):
        sl.discretize("coulomb2d", sl.RadialGrid(1e-4, 10.0))
    with pytest.raises(DomainError):
        sl.discretize("effective", COARSE)
    with pytest.raises(ValueError):
        sl.discretize("other", COARSE, sl.SlabParams(0.1))
    with pytest.raises(ResourceError):
        sl.discretize("coulomb2d", sl.RadialGrid(0.001, 5.0)).dense()


def test_form_inequality():
    assert sl.form_inequality_gap(sl.RadialGrid(0.005, 20.0), 0.1) >= -1e-10


@settings(max_examples=15, deadline=None)
@given(st.floats(0.02, 1.0, **finite), st.integers(0, 2))
def test_form_inequality_property(a, m):
    assert sl.form_inequality_gap(COARSE, a, m=m) >= -1e-10


# ---------------------------------------------------------------- norms

@pytest.mark.parametrize("a", [0.2, 0.1, 0.05, 0.02])
def test_sandwich_norm_between_lemma_bounds(a):
    val = sl.hs_sandwich_norm(a)
    assert sl.lemma_lower_bound(a) <= val <= sl.lemma_upper_bound(a)


def test_sandwich_norm_grid_refinement():
    a = 0.1
    coarse = sl.hs_sandwich_norm(a, sl.RadialGrid(0.01, 5.0))
    fine = sl.hs_sandwich_norm(a, sl.RadialGrid(0.005, 5.0))
    assert abs(coarse - fine) < 0.02 * fine


def test_sandwich_norm_domain():
    with pytest.raises(DomainError):
        sl.hs_sandwich_norm(0.7)


def test_kato_inequality_discrete():
    assert sl.kato_check(sl.RadialGrid(0.01, 20.0)) > 0


def test_resolvent_diff_properties():
    grid = COARSE
    hc = sl.discretize("coulomb2d", grid)
    hs = sl.discretize("slab", grid, sl.SlabParams(0.2, 2))
    d1 = sl.resolvent_diff(hs, hc, ETA)
    assert sl.resolvent_diff(hc, hs, ETA) == pytest.approx(d1, rel=1e-6)
    assert sl.resolvent_diff(hs, hc, ETA, seed=9) == pytest.approx(d1, rel=1e-6)
    assert sl.resolvent_diff(hc, hc, ETA) == 0.0
    other = sl.discretize("coulomb2d", sl.RadialGrid(0.04, 10.0))
    with pytest.raises(DomainError):
        sl.resolvent_diff(hc, other, ETA)


def test_resolvent_at_discrete_eigenvalue():
    op = sl.discretize("coulomb2d", COARSE)
    lam = op.lowest_eigenvalues(1)[0]
    with pytest.raises(SpectralPointError):
        op.factor(lam)


def test_resolvent_diff_against_dense():
    grid = sl.RadialGrid(0.05, 5.0)
    hc = sl.discretize("coulomb2d", grid)
    he = sl.discretize("effective", grid, sl.SlabParams(0.3))
    I = np.eye(hc.size)
    diff = np.linalg.inv(he.dense() - ETA * I) - np.linalg.inv(hc.dense() - ETA * I)
    assert sl.resolvent_diff(he, hc, ETA, tol=1e-12) == pytest.approx(np.max(np.abs(np.linalg.eigvalsh(diff))), rel=1e-8)


# ---------------------------------------------------------------- convergence study

def test_study_trend_and_bounds(slab_study):
    diffs = [r.resolvent_diff for r in slab_study[:4]]
    assert all(x > y for x, y in zip(diffs, diffs[1:]))
    for r in slab_study:
        assert r.respects_bounds
    adm = [r for r in slab_study if r.admissible]
    assert [r.a for r in adm] == [1e-4]
    assert adm[0].resolvent_diff <= adm[0].theorem_rhs
    assert adm[0].effective_diff <= adm[0].proposition_rhs


def test_study_slab_close_to_effective(slab_study):
    # the slab operator approaches the effective one faster than either approaches H_C
    for r in slab_study[:4]:
        assert r.slab_effective_diff < 0.05 * r.resolvent_diff


def test_study_rate_fit(slab_study):
    r = slab_study[0]
    assert math.isfinite(r.fit_c1) and math.isfinite(r.fit_c2)
    pred = [r.fit_c1 * x.a * abs(math.log(x.a)) + r.fit_c2 * x.a for x in slab_study]
    assert max(abs(p - x.resolvent_diff) for p, x in zip(pred, slab_study)) < 0.05


def test_fit_rate_recovers_coefficients():
    a = np.array([0.3, 0.1, 0.03, 0.01])
    y = 0.7 * a * np.abs(np.log(a)) + 1.9 * a
    c1, c2 = sl.fit_rate(a, y)
    assert (c1, c2) == pytest.approx((0.7, 1.9), rel=1e-12)


def test_study_domain_and_threads(monkeypatch):
    with pytest.raises(DomainError):
        sl.convergence_study(-4.0, [0.1])
    with pytest.raises(SpectralPointError):
        sl.convergence_study(-1.0, [0.1])
    monkeypatch.setenv("SPEC2D_THREADS", "3")
    assert sl.worker_count() == 3
    assert sl.worker_count(2) == 2


def test_study_thread_count_does_not_change_results():
    a = [0.3, 0.15]
    one = sl.convergence_study(ETA, a, grid=COARSE, n_modes=2, threads=1)
    two = sl.convergence_study(ETA, a, grid=COARSE, n_modes=2, threads=2)
    assert one == two
