"""Invariant suites reported by ``spec2d verify``.

Each suite yields (name, measured, threshold, passed) tuples. Randomized
samples are drawn from a generator seeded by the caller, so reports are
reproducible.
"""

import math

import numpy as np

from . import momentum_rep as mr
from . import slab_limit as sl
from . import spectral_core as spc
from .specfun import digamma, gamma, kummer_m, tricomi_u


def _specfun(rng):
    # Wronskian of Kummer's functions: M U' - M' U = -Gamma(b) z^{-b} e^z / Gamma(a),
    # with M' = (a/b) M(a+1, b+1) and U' = -a U(a+1, b+1)
    a = rng.uniform(-3.5, 3.5, 40)
    b = rng.uniform(0.5, 4.0, 40)
    z = rng.uniform(0.2, 25.0, 40)
    M = kummer_m(a, b, z)
    Mp = a / b * kummer_m(a + 1, b + 1, z)
    U = tricomi_u(a, b, z)
    Up = -a * tricomi_u(a + 1, b + 1, z)
    rhs = -gamma(b) * z ** (-b) * np.exp(z) / gamma(a)
    drift = np.abs(M * Up - Mp * U - rhs) / np.abs(rhs)
    yield "kummer_wronskian_max_drift", float(np.max(drift)), 1e-9
    yield "kummer_wronskian_median_drift", float(np.median(drift)), 1e-11
    zc = rng.uniform(-6, 6, 40) + 1j * rng.uniform(-6, 6, 40)
    refl = np.abs(digamma(1 - zc) - digamma(zc) - math.pi / np.tan(math.pi * zc))
    yield "digamma_reflection_max", float(np.max(refl / np.maximum(1, np.abs(digamma(zc))))), 1e-12


def _spectral(rng):
    worst = 0.0
    for Z in (1.0, 2.0, 3.7):
        p = spc.SpectralParams(Z)
        for m in range(-5, 6):
            for n in range(6):
                lam = spc.eigenvalue(p, m, n).lam
                exact = -Z * Z / (2 * abs(m) + 2 * n + 1) ** 2
                worst = max(worst, abs(lam - exact) / abs(exact))
    yield "eigenvalue_rel_error", worst, 1e-14
    res, gap, scal = 0.0, math.inf, 0.0
    for kappa in (-5.0, -1.0, 0.0, 1.0, 5.0, 20.0):
        tab = spc.point_levels(spc.SpectralParams(1.0, kappa), 5)
        res = max(res, float(np.max(np.abs(spc.point_level_equation(tab.ks, kappa)))))
        for lv in tab.levels[1:]:
            j = lv.j
            gap = min(gap, lv.epsilon + 1 / (2 * j - 1) ** 2, -1 / (2 * j + 1) ** 2 - lv.epsilon)
        gap = min(gap, -1.0 - tab.levels[0].epsilon)
        for Z in (0.5, 2.0, 5.0):
            other = spc.point_levels(spc.SpectralParams(Z, kappa - math.log(Z)), 5).energies
            scal = max(scal, float(np.max(np.abs(other - Z * Z * tab.energies) / np.abs(other))))
    yield "point_level_residual", res, 1e-11
    yield "interlacing_min_gap", -gap, 0.0
    yield "scaling_law_rel_error", scal, 1e-10


def _momentum(rng):
    rep = mr.transform_report(1.0)
    yield "parseval_defect", rep.parseval_defect, 1e-5
    yield "bound_state_leakage", rep.bound_state_leakage, 1e-6
    yield "roundtrip_error", rep.roundtrip_error, 1e-6
    worst = 0.0
    for Z in (0.5, 1.0, 2.0):
        for kh in (-3.0, 0.0, 1.0, 5.0):
            mom = mr.momentum_point_levels(Z, kh, 4).energies
            coord = spc.point_levels(spc.SpectralParams(Z, mr.kappa_map(kh, Z)), 4).energies
            worst = max(worst, float(np.max(np.abs(mom - coord) / np.abs(coord))))
    yield "dual_solver_agreement", worst, 1e-9
    s = mr.s_functional(1.0, 0.5j, mr.fz_deficiency(1.0, 0.5j))
    yield "s_functional_closed_form", abs(s - mr.s_fz_closed_form(1.0, 0.5j)), 1e-8


def _slab(rng):
    c1, c2 = sl.constants("loggamma"), sl.constants("agm")
    yield "constants_dual_route", max(abs(c1.C_I - c2.C_I) / c1.C_I, abs(c1.C_III - c2.C_III) / c1.C_III), 1e-12
    grid = sl.RadialGrid(0.005, 20.0)
    yield "form_inequality_gap", -sl.form_inequality_gap(grid, 0.1), 1e-10
    yield "kato_min_eigenvalue", -sl.kato_check(sl.RadialGrid(0.01, 20.0)), 1e-8
    for a in (0.2, 0.1, 0.05, 0.02):
        val = sl.hs_sandwich_norm(a)
        yield f"sandwich_above_lower_a={a}", sl.lemma_lower_bound(a) - val, 0.0
        yield f"sandwich_below_upper_a={a}", val - sl.lemma_upper_bound(a), 0.0
    recs = sl.convergence_study(-0.5, [0.4, 0.2, 0.1, 0.05, 1e-4], grid=grid)
    for r in recs:
        yield f"resolvent_diff_a={r.a}", r.resolvent_diff, r.theorem_rhs if r.admissible else math.inf
    diffs = [r.resolvent_diff for r in recs[:4]]
    yield "resolvent_diff_monotone", float(max(np.diff(diffs))), 0.0


_SUITES = {"specfun": _specfun, "spectral": _spectral, "momentum": _momentum, "slab": _slab}


def run_suite(name: str, seed: int = 0):
    """List of (invariant, measured, threshold, passed); passed means measured <= threshold."""
    rng = np.random.default_rng(seed)
    out = []
    for inv, val, thr in _SUITES[name](rng):
        passed = bool(np.isfinite(val) and val <= thr) if thr != 0.0 else bool(val < 0)
        out.append((inv, float(val), float(thr), passed))
    return out
