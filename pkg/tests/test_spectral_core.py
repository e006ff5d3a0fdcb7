import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, optimize, special

from spec2d import spectral_core as spc
from spec2d.errors import DomainError, PoleError, SpectralPointError, TruncationError
from spec2d.specfun import EULER_GAMMA, digamma, gamma

finite = dict(allow_nan=False, allow_infinity=False)


def P(Z=1.0, kappa=spc.FRIEDRICHS):
    return spc.SpectralParams(Z, kappa)


# ---------------------------------------------------------------- parameters

def test_params_validation():
    with pytest.raises(DomainError):
        spc.SpectralParams(0.0)
    with pytest.raises(DomainError):
        spc.SpectralParams(1.0, math.inf)
    assert P(2.0, 1.0).kappa0 == pytest.approx(1.0 + math.log(2.0))
    with pytest.raises(DomainError):
        P().kappa0


# ---------------------------------------------------------------- bound states

@pytest.mark.parametrize("Z,m,n,lam,N,mult", [(1.0, 0, 0, -1.0, 1, 1), (2.0, 0, 0, -4.0, 1, 1),
                                             (1.0, 1, 1, -1 / 25, 3, 5)])
def test_eigenvalue_examples(Z, m, n, lam, N, mult):
    bs = spc.eigenvalue(P(Z), m, n)
    assert bs.lam == pytest.approx(lam, rel=1e-15)
    assert (bs.N, bs.multiplicity) == (N, mult)


def test_multiplicity_counts_states():
    # number of (m, n) with |m| + n + 1 = N is 2N - 1
    for N in range(1, 6):
        count = sum(1 for m in range(-N, N + 1) for n in range(N) if abs(m) + n + 1 == N)
        assert spc.eigenvalue(P(), 0, N - 1).multiplicity == count


def test_eigenfunction_normalized_and_orthogonal():
    p = P(1.3)
    f00 = lambda r: spc.eigenfunction(p, 0, 0, r, 0.0)
    f01 = lambda r: spc.eigenfunction(p, 0, 1, r, 0.0)
    norm = integrate.quad(lambda r: 2 * math.pi * abs(f00(r)) ** 2 * r, 0, np.inf, epsrel=1e-12)[0]
    assert abs(norm - 1) < 1e-8
    # Gauss-Laguerre oracle in x = 2 Z rho (the weight e^{-x} absorbs the exponentials)
    x, w = np.polynomial.laguerre.laggauss(60)
    rho = x / (2 * p.Z)
    prod = 2 * math.pi * (f00(rho) * np.conj(f01(rho))).real * rho * np.exp(x) / (2 * p.Z)
    assert abs(np.sum(w * prod)) < 1e-8


def test_eigenfunction_small_rho_power():
    p = P()
    r = np.array([1e-4, 2e-4])
    v = np.abs(spc.eigenfunction(p, 1, 0, r, 0.3))
    assert v[1] / v[0] == pytest.approx(2.0, rel=1e-3)


# ---------------------------------------------------------------- point-level equation

def test_point_level_equation_poles():
    for j in range(3):
        k = 1 / (2 * j + 1)
        with pytest.raises(PoleError):
            spc.point_level_equation(k, 0.0)
        lo = spc.point_level_equation(k * (1 - 1e-9), 0.0)
        hi = spc.point_level_equation(k * (1 + 1e-9), 0.0)
        assert lo > 1e6 and hi < -1e6


def test_point_level_equation_back_substitution():
    kappa0 = -(2 * EULER_GAMMA + 0.0 + float(np.real(digamma(-0.5))))
    assert abs(spc.point_level_equation(0.5, kappa0)) < 1e-14


def test_interlacing_example():
    tab = spc.point_levels(P(1.0, 0.0), 3)
    e = tab.energies
    assert e[0] < -1 < e[1] < -1 / 9 < e[2] < -1 / 25


def test_large_kappa_asymptotics():
    kappa = 40.0
    e0 = spc.point_levels(P(1.0, kappa), 1).energies[0]
    asy = spc.point_level_asymptotics(1.0, kappa, 0)
    assert abs(e0 - asy["leading"]) <= 5 * abs(asy["second_order"])
    assert abs(e0 - (-1 - 4 / kappa)) < 10 / kappa ** 2


def test_negative_kappa_ground_level():
    kappa = -10.0
    e0 = spc.point_levels(P(1.0, kappa), 1).energies[0]
    asy = spc.point_level_asymptotics(1.0, kappa, 0)
    # O(e^{-kappa}) allowance; expanding Psi(1/2 - 1/(2k)) at large k gives the
    # next term -pi^2 e^{-gamma-kappa} exactly, leaving an O(1) remainder
    assert abs(e0 - asy["leading"]) <= 2 * asy["next_order_scale"]
    assert abs(e0 - asy["leading"] + asy["next_order_scale"]) < 10.0


def test_friedrichs_has_no_levels():
    with pytest.raises(DomainError):
        spc.point_levels(P(), 2)


@settings(max_examples=30, deadline=None)
@given(st.floats(-8, 25, **finite), st.sampled_from([0.5, 2.0, 5.0]))
def test_scaling_law(kappa, Z):
    e1 = spc.point_levels(P(1.0, kappa + math.log(Z)), 4).energies
    eZ = spc.point_levels(P(Z, kappa), 4).energies
    assert np.allclose(eZ, Z * Z * e1, rtol=1e-10, atol=0)


@settings(max_examples=30, deadline=None)
@given(st.floats(-8, 25, **finite), st.floats(0.01, 5, **finite))
def test_monotone_in_kappa_and_interlacing(kappa, dk):
    a = spc.point_levels(P(1.0, kappa), 4)
    b = spc.point_levels(P(1.0, kappa + dk), 4)
    assert np.all(a.energies < b.energies)
    lam = -1.0 / (2 * np.arange(1, 5) - 1) ** 2
    e = a.energies
    assert e[0] < lam[0]
    for j in range(1, 4):
        assert lam[j - 1] < e[j] < lam[j]
    res = spc.point_level_equation(a.ks, kappa)
    assert np.max(np.abs(res)) < 1e-11


# ---------------------------------------------------------------- point eigenfunctions

def test_point_eigenfunction_normalized():
    for Z, kappa in [(1.0, 0.0), (2.0, 1.5)]:
        p = P(Z, kappa)
        f = lambda r: 2 * math.pi * spc.point_eigenfunction(p, 0, r) ** 2 * r
        val = integrate.quad(f, 0, 1, limit=200)[0] + integrate.quad(f, 1, np.inf, limit=200)[0]
        assert abs(val - 1) < 1e-6


def test_point_eigenfunction_log_singular():
    p = P(1.0, 0.5)
    bv = spc.boundary_values(lambda r: spc.point_eigenfunction(p, 0, r), tol=1e-4)
    assert abs(bv.f0) > 1e-3
    # the eigenfunction lies in the domain of H(kappa): f1 = kappa f0
    assert bv.f1 / bv.f0 == pytest.approx(0.5, abs=1e-6)


def test_point_eigenfunction_decay():
    p = P(1.0, 0.0)
    k0 = spc.point_levels(p, 1).ks[0]
    r = np.linspace(1, 20, 40)
    v = np.abs(spc.point_eigenfunction(p, 0, r)) * np.exp(k0 * r)
    assert np.all(v < 10 * v[0])


# ---------------------------------------------------------------- Green functions

def _radial_residual(Z, m, z, g, r, h=1e-4):
    d2 = (g(r + h) - 2 * g(r) + g(r - h)) / h ** 2
    d1 = (g(r + h) - g(r - h)) / (2 * h)
    return -d2 - d1 / r + (m * m / r ** 2 - Z / r - z) * g(r)


@pytest.mark.parametrize("m,z", [(0, -0.3 + 0.2j), (1, -2.0), (2, 0.5 + 1j)])
def test_green_radial_ode_residual(m, z):
    p = P(1.0)
    rp = 1.5
    g = lambda r: spc.green_radial(p, m, z, r, rp).value
    for r in (0.4, 0.9, 3.0):
        assert abs(_radial_residual(1.0, m, z, g, r)) < 1e-5


def test_green_radial_symmetry():
    rng = np.random.default_rng(1)
    p = P(1.0)
    for _ in range(10):
        r1, r2 = rng.uniform(0.05, 6, 2)
        z = complex(rng.uniform(-3, 2), rng.uniform(0.1, 2))
        m = int(rng.integers(0, 4))
        a = spc.green_radial(p, m, z, r1, r2).value
        b = spc.green_radial(p, m, z, r2, r1).value
        assert abs(a - b) <= 1e-13 * abs(a)


def test_green_radial_pole_residue():
    p = P(1.0)
    r1, r2 = 0.7, 1.9
    R = lambda r: spc.radial_eigenfunction(1.0, 0, 0, r)
    d = 1e-7
    g = spc.green_radial(p, 0, -1 + d, r1, r2).value
    assert abs(g * (-d) - R(r1) * R(r2)) < 1e-5
    with pytest.raises(SpectralPointError):
        spc.green_radial(p, 0, -1.0, r1, r2)


def test_phi_kappa_friedrichs_and_spectral_points():
    assert spc.phi_kappa(P(), -0.5) == 0
    with pytest.raises(SpectralPointError):
        spc.phi_kappa(P(1.0, 0.3), -1.0)


def test_phi_kappa_blows_up_at_level():
    p = P(1.0, 0.8)
    e0 = spc.point_levels(p, 1).energies[0]
    assert abs(spc.phi_kappa(p, e0 + 1e-9)) > 1e8


@pytest.mark.parametrize("kappa", [-2.0, 0.0, 3.0])
def test_phi_kappa_poles_collocate_with_levels(kappa):
    p = P(1.0, kappa)
    levels = spc.point_levels(p, 3).energies
    # independent route: zeros of 1/phi on the real axis between the Coulomb eigenvalues
    def inv(e):
        try:
            return 1.0 / spc.phi_kappa(p, e).real
        except SpectralPointError:
            return 0.0

    brackets = [(levels[0] * 4, -1 - 1e-9), (-1 + 1e-9, -1 / 9 - 1e-9), (-1 / 9 + 1e-9, -1 / 25 - 1e-9)]
    for lev, (a, b) in zip(levels, brackets):
        root = optimize.brentq(inv, a, b, xtol=1e-15, rtol=1e-15)
        assert abs(root - lev) < 1e-9 * abs(lev)


def test_green_kappa_reduces_to_friedrichs():
    a = spc.green_kappa_radial(P(), -0.4, 0.5, 1.2).value
    b = spc.green_radial(P(), 0, -0.4, 0.5, 1.2).value
    assert a == b


def test_green_kappa_boundary_condition():
    for Z, kappa in [(1.0, 0.7), (2.0, -1.3)]:
        p = P(Z, kappa)
        bv = spc.boundary_values(lambda r: spc.green_kappa_radial(p, -0.3, r, 1.0).value.real, tol=1e-4)
        assert abs(bv.f1 / bv.f0 - kappa) < 1e-4


def test_green_kappa_symmetry():
    p = P(1.0, 0.2)
    a = spc.green_kappa_radial(p, 0.3 + 0.5j, 0.4, 2.2).value
    b = spc.green_kappa_radial(p, 0.3 + 0.5j, 2.2, 0.4).value
    assert abs(a - b) <= 1e-13 * abs(a)


def test_green_full_covariance_and_symmetries():
    p = P(1.0, 0.4)
    z = -0.2 + 0.3j
    a = spc.green_full(p, z, (0.8, 0.3), (1.7, 1.4)).value
    b = spc.green_full(p, z, (0.8, 1.3), (1.7, 2.4)).value
    assert abs(a - b) < 1e-10 * abs(a)
    c = spc.green_full(p, np.conj(z), (0.8, 0.3), (1.7, 1.4)).value
    assert abs(c - np.conj(a)) < 1e-10 * abs(a)
    d = spc.green_full(p, z, (1.7, 1.4), (0.8, 0.3)).value
    assert abs(d - a) < 1e-10 * abs(a)


def test_green_full_free_limit():
    p = P(1e-6)
    z = -0.7
    p1, p2 = (0.6, 0.0), (1.1, 2.0)
    dist = math.sqrt(0.6 ** 2 + 1.1 ** 2 - 2 * 0.6 * 1.1 * math.cos(2.0))
    free = special.k0(math.sqrt(-z) * dist) / (2 * math.pi)
    assert abs(spc.green_full(p, z, p1, p2).value - free) < 1e-4


def test_green_full_rejects_diagonal_and_truncation():
    with pytest.raises(DomainError):
        spc.green_full(P(), -0.5, (1.0, 0.2), (1.0, 0.2))
    with pytest.raises(TruncationError):
        spc.green_full(P(), -0.5, (1.0, 0.0), (1.0, 0.05), m_max=4, tol=1e-12)


# ---------------------------------------------------------------- boundary values

def test_boundary_values_anchors():
    bv = spc.boundary_values(lambda r: -np.log(r))
    assert bv.f0 == pytest.approx(1.0, abs=1e-10) and abs(bv.f1) < 1e-9
    bv = spc.boundary_values(lambda r: np.full_like(r, 2.5))
    assert abs(bv.f0) < 1e-10 and bv.f1 == pytest.approx(2.5, abs=1e-9)


def test_boundary_values_whittaker_log_constant():
    # at z = -4, Z = 1 (s = 2): rho^{-1/2} W_{1/4,0}(4 rho) has
    # f1/f0 = -(2 gamma + ln 4 + Psi(1/4)), the point-level combination at k = s
    from spec2d.specfun import whittaker_w
    s = 2.0
    f = lambda r: np.real(whittaker_w(0.5 / s, 0.0, 2 * s * r)) / np.sqrt(r)
    bv = spc.boundary_values(f, tol=1e-4)
    expected = -(2 * EULER_GAMMA + math.log(2 * s) + float(np.real(digamma(0.5 - 0.5 / s))))
    assert abs(bv.f1 / bv.f0 - expected) < 1e-6
    assert bv.f0 == pytest.approx(math.sqrt(2 * s) / float(np.real(gamma(0.5 - 0.5 / s))), rel=1e-6)
