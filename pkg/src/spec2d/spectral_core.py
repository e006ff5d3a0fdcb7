"""Coordinate-space spectral data of the planar Coulomb Hamiltonian.

The operator is -Delta - Z/rho on L^2(R^2). Its m = 0 channel admits a
one-parameter family of self-adjoint extensions labelled by kappa, with
kappa = infinity being the Friedrichs extension. This module provides the
exact bound states, the point levels created by finite kappa, their
eigenfunctions, and the radial and full-plane resolvent kernels.
"""

import enum
import functools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np
from scipy import special as sc
from scipy.optimize import brentq

from .errors import (
    BracketError,
    ConvergenceError,
    DomainError,
    PoleError,
    SpectralPointError,
    TruncationError,
)
from .specfun import (
    EULER_GAMMA,
    digamma,
    laguerre,
    log_gamma,
    sqrt_minus,
    trigamma,
    whittaker_m_logscaled,
    whittaker_w,
    whittaker_w_logscaled,
)
from .specfun._util import nonpositive_integer


class Extension(enum.Enum):
    """Distinguished extension parameter values."""

    FRIEDRICHS = "friedrichs"


FRIEDRICHS = Extension.FRIEDRICHS


@dataclass(frozen=True)
class SpectralParams:
    """Coupling Z > 0 and extension parameter kappa (real or FRIEDRICHS)."""

    Z: float
    kappa: Union[float, Extension] = FRIEDRICHS

    def __post_init__(self):
        if not (np.isfinite(self.Z) and self.Z > 0):
            raise DomainError("Z must be a positive finite number")
        if self.kappa is not FRIEDRICHS:
            k = float(self.kappa)
            if not np.isfinite(k):
                raise DomainError("kappa must be finite; use FRIEDRICHS for the Friedrichs extension")
            object.__setattr__(self, "kappa", k)

    @property
    def is_friedrichs(self) -> bool:
        return self.kappa is FRIEDRICHS

    @property
    def kappa0(self) -> float:
        """kappa + ln Z, the Z-free combination entering the level equation."""
        if self.is_friedrichs:
            raise DomainError("kappa0 is undefined for the Friedrichs extension")
        return self.kappa + math.log(self.Z)


@dataclass(frozen=True)
class BoundState:
    m: int
    n: int
    lam: float
    N: int

    @property
    def multiplicity(self) -> int:
        """Degeneracy 2N - 1 of lambda_N in the Friedrichs Hamiltonian."""
        return 2 * self.N - 1


@dataclass(frozen=True)
class PointLevel:
    j: int
    epsilon: float
    k: float


@dataclass(frozen=True)
class PointLevelTable:
    Z: float
    kappa: float
    levels: tuple
    solver_tol: float

    @property
    def energies(self) -> np.ndarray:
        return np.array([lv.epsilon for lv in self.levels])

    @property
    def ks(self) -> np.ndarray:
        return np.array([lv.k for lv in self.levels])


@dataclass(frozen=True)
class GreenEval:
    z: complex
    value: Union[complex, np.ndarray]
    tail_bound: float = 0.0
    m_truncation: Optional[int] = None


@dataclass(frozen=True)
class BoundaryValues:
    f0: float
    f1: float
    achieved_tol: float
    estimates: tuple = field(default=(), repr=False)


# ---------------------------------------------------------------- bound states

def eigenvalue(params: SpectralParams, m: int, n: int) -> BoundState:
    """Eigenvalue lambda_{m,n} = -Z^2 / (2|m| + 2n + 1)^2 of the channel m."""
    if n < 0:
        raise DomainError("n must be nonnegative")
    nu = 2 * abs(m) + 2 * n + 1
    return BoundState(m=int(m), n=int(n), lam=-params.Z ** 2 / nu ** 2, N=abs(m) + n + 1)


def radial_eigenfunction(Z: float, m: int, n: int, rho) -> np.ndarray:
    """Radial factor of psi_{m,n}, normalized in L^2(R+, rho d rho)."""
    am = abs(m)
    nu = 2 * am + 2 * n + 1
    x = 2.0 * Z * np.asarray(rho, dtype=float) / nu
    lognorm = 0.5 * (sc.gammaln(n + 1) - sc.gammaln(n + 2 * am + 1))
    pref = np.exp(lognorm) * 2.0 * Z / nu ** 1.5
    return pref * x ** am * laguerre(n, 2 * am, x) * np.exp(-0.5 * x)


def eigenfunction(params: SpectralParams, m: int, n: int, rho, phi) -> np.ndarray:
    """Normalized bound state psi_{m,n}(rho, phi), including e^{i m phi}."""
    rho = np.asarray(rho, dtype=float)
    if np.any(rho <= 0):
        raise DomainError("rho must be positive")
    radial = radial_eigenfunction(params.Z, m, n, rho) / math.sqrt(2 * math.pi)
    out = radial * np.exp(1j * m * np.asarray(phi, dtype=float))
    return out[()] if out.ndim == 0 else out


# ---------------------------------------------------------------- point levels

def point_level_equation(k, kappa0):
    """Residual 2 gamma + ln(2k) + Psi(1/2 - 1/(2k)) + kappa0."""
    k = np.asarray(k, dtype=float)
    if np.any(k <= 0):
        raise DomainError("k must be positive")
    x = 0.5 - 0.5 / k
    if nonpositive_integer(x).any():
        bad = float(np.atleast_1d(k)[np.atleast_1d(nonpositive_integer(x))][0])
        raise PoleError(f"point-level equation has a pole at k = {bad!r}", point=bad)
    out = 2 * EULER_GAMMA + np.log(2 * k) + np.real(digamma(x)) + kappa0
    return out[()] if np.ndim(out) == 0 else out


def _residual_ground(v, kappa0):
    """Level equation for j = 0 in the variable v = ln k in (0, inf)."""
    x = -0.5 * math.expm1(-v)
    psi = float(np.real(digamma(x + 1.0))) - 1.0 / x
    return 2 * EULER_GAMMA + math.log(2.0) + v + psi + kappa0


def _residual_excited(t, j, kappa0):
    """Level equation for j >= 1 with k = 1/(2j + 1 - 2t), t in (0, 1).

    Psi(t - j) is reduced to Psi(t + 1) exactly so that the pole at
    t = 0 is resolved in the variable t itself.
    """
    k = 1.0 / (2 * j + 1 - 2 * t)
    psi = float(np.real(digamma(t + 1.0))) - sum(1.0 / (t - i) for i in range(j + 1))
    return 2 * EULER_GAMMA + math.log(2 * k) + psi + kappa0


def _bracket(fun, lo, hi, toward_lo, toward_hi, tries=60):
    flo, fhi = fun(lo), fun(hi)
    for _ in range(tries):
        if flo < 0:
            break
        lo = toward_lo(lo)
        flo = fun(lo)
    for _ in range(tries):
        if fhi > 0:
            break
        hi = toward_hi(hi)
        fhi = fun(hi)
    if not (flo < 0 < fhi):
        raise BracketError("point-level residual shows no sign change on its interval")
    return lo, hi


def _solve_k(kappa0: float, j: int, xtol: float) -> float:
    if j == 0:
        f = functools.partial(_residual_ground, kappa0=kappa0)
        lo, hi = _bracket(f, 1e-3, 1.0, lambda v: v / 16.0, lambda v: v * 2.0)
        v = brentq(f, lo, hi, xtol=1e-300, rtol=xtol, maxiter=500)
        return math.exp(v)
    f = functools.partial(_residual_excited, j=j, kappa0=kappa0)
    if f(0.5) == 0:
        return 1.0 / (2 * j)
    lo, hi = _bracket(f, 0.5, 0.5, lambda t: t / 16.0, lambda t: 1.0 - (1.0 - t) / 16.0, tries=12)
    t = brentq(f, lo, hi, xtol=1e-300, rtol=xtol, maxiter=500)
    return 1.0 / (2 * j + 1 - 2 * t)


@functools.lru_cache(maxsize=256)
def _point_levels_cached(Z, kappa, j_max, solver_tol):
    kappa0 = kappa + math.log(Z)
    levels = []
    for j in range(j_max):
        k = _solve_k(kappa0, j, 4 * np.finfo(float).eps)
        levels.append(PointLevel(j=j, epsilon=-Z * Z * k * k, k=k))
    return PointLevelTable(Z=Z, kappa=kappa, levels=tuple(levels), solver_tol=solver_tol)


def point_levels(params: SpectralParams, j_max: int, solver_tol: float = 1e-12) -> PointLevelTable:
    """The lowest j_max point levels of H(kappa) in ascending order.

    The j-th root k_j lies in (1, inf) for j = 0 and in
    (1/(2j+1), 1/(2j-1)) for j >= 1, which is the interlacing with the
    Friedrichs eigenvalues written in the variable k.
    """
    if params.is_friedrichs:
        raise DomainError("the Friedrichs extension has no point levels")
    if j_max < 1:
        raise DomainError("j_max must be at least 1")
    return _point_levels_cached(float(params.Z), float(params.kappa), int(j_max), float(solver_tol))


def point_level_asymptotics(Z: float, kappa: float, j: int) -> dict:
    """Large-|kappa| approximations of epsilon_j used as consistency checks.

    Keys: 'leading' (the 1/kappa formula), 'second_order' (the kappa^-2
    correction to it) for kappa -> +inf, and for kappa -> -inf the
    'ground' exponential law (j = 0) or the 1/kappa formula around
    lambda_j (j >= 1).
    """
    out = {}
    if kappa > 0:
        n = 2 * j + 1
        out["leading"] = -Z ** 2 / n ** 2 - 4 * Z ** 2 / (n ** 3 * kappa)
        # expand the pole of Psi at -j: Psi(t - j) = -1/t + Psi(1) + H_j + O(t)
        c = EULER_GAMMA + math.log(2.0 / n) + sum(1.0 / i for i in range(1, j + 1))
        kappa0 = kappa + math.log(Z)
        t1, t2 = 1.0 / kappa0, -c / kappa0 ** 2
        second = -4 * Z ** 2 / n ** 3 * (t1 + t2 - 1.0 / kappa) - 12 * Z ** 2 / n ** 4 * t1 ** 2
        out["second_order"] = second
    else:
        if j == 0:
            out["leading"] = -4.0 * math.exp(-2 * EULER_GAMMA - 2 * kappa)
            out["next_order_scale"] = math.pi ** 2 * math.exp(-EULER_GAMMA - kappa)
        else:
            n = 2 * j - 1
            out["leading"] = -Z ** 2 / n ** 2 - 4 * Z ** 2 / (n ** 3 * kappa)
    return out


def point_eigenfunction(params: SpectralParams, j: int, rho) -> np.ndarray:
    """Normalized eigenfunction eta_j of the j-th point level (m = 0)."""
    table = point_levels(params, j + 1)
    k = table.levels[j].k
    Z = params.Z
    rho = np.asarray(rho, dtype=float)
    if np.any(rho <= 0):
        raise DomainError("rho must be positive")
    x = 0.5 - 0.5 / k
    norm = k * (k + 0.5 * float(np.real(trigamma(x)))) ** -0.5
    lg = float(np.real(log_gamma(x)))
    sign = 1.0 if sc.gammasgn(x) > 0 else -1.0
    w = np.real(whittaker_w(0.5 / k, 0.0, 2 * k * Z * rho))
    out = np.sqrt(Z / (2 * math.pi * rho)) * norm * sign * math.exp(lg) * w
    return out[()] if out.ndim == 0 else out


# ---------------------------------------------------------------- Green functions

def _coulomb_parameter(Z, z):
    s = complex(sqrt_minus(complex(z)))
    return s, Z / (2 * s)


def _green_m(Z, m_values, z, rho_lo, rho_hi):
    """G_m(z; rho_lo, rho_hi) for an array of |m| with rho_lo <= rho_hi."""
    s, kc = _coulomb_parameter(Z, z)
    mu = np.abs(np.asarray(m_values, dtype=float))
    a = 0.5 + mu - kc
    if nonpositive_integer(a, atol=1e-12).any():
        raise SpectralPointError(f"z = {z!r} is an eigenvalue of the partial Hamiltonian")
    mm, ml = whittaker_m_logscaled(kc, mu, 2 * s * rho_lo)
    wm, wl = whittaker_w_logscaled(kc, mu, 2 * s * rho_hi)
    logpref = (np.asarray(log_gamma(a)) - sc.gammaln(2 * mu + 1) - np.log(2 * s)
               - 0.5 * np.log(rho_lo * rho_hi))
    return np.exp(logpref + ml + wl) * mm * wm


def green_radial(params: SpectralParams, m: int, z, rho, rho2) -> GreenEval:
    """Radial resolvent kernel G_m(z; rho, rho2) of the Friedrichs channel m."""
    rho, rho2 = np.broadcast_arrays(np.asarray(rho, float), np.asarray(rho2, float))
    if np.any(rho <= 0) or np.any(rho2 <= 0):
        raise DomainError("radii must be positive")
    lo = np.minimum(rho, rho2).ravel()
    hi = np.maximum(rho, rho2).ravel()
    val = _green_m(params.Z, np.full(lo.shape, abs(m)), z, lo, hi).reshape(rho.shape)
    return GreenEval(z=complex(z), value=val[()] if val.ndim == 0 else val)


def phi_kappa(params: SpectralParams, z) -> complex:
    """Coefficient of the rank-one Krein term; zero for the Friedrichs case."""
    if params.is_friedrichs:
        return 0j
    s, kc = _coulomb_parameter(params.Z, z)
    a = 0.5 - kc
    if nonpositive_integer(a, atol=1e-12).any():
        raise SpectralPointError(f"z = {z!r} is an eigenvalue of the Friedrichs m = 0 channel")
    denom = 2 * EULER_GAMMA + np.log(2 * s) + complex(digamma(a)) + params.kappa
    if denom == 0:
        raise SpectralPointError(f"z = {z!r} is a point level")
    return complex(np.exp(2 * complex(log_gamma(a))) / (2 * s * denom))


def _w0(params, z, rho):
    s, kc = _coulomb_parameter(params.Z, z)
    man, lsc = whittaker_w_logscaled(kc, 0.0, 2 * s * np.asarray(rho, float))
    return man * np.exp(lsc)


def green_kappa_radial(params: SpectralParams, z, rho, rho2) -> GreenEval:
    """m = 0 kernel of H_0(kappa): Friedrichs kernel plus the Krein term."""
    base = green_radial(params, 0, z, rho, rho2)
    if params.is_friedrichs:
        return base
    rho, rho2 = np.broadcast_arrays(np.asarray(rho, float), np.asarray(rho2, float))
    extra = phi_kappa(params, z) * _w0(params, z, rho) * _w0(params, z, rho2) / np.sqrt(rho * rho2)
    val = base.value + extra
    return GreenEval(z=complex(z), value=val[()] if np.ndim(val) == 0 else val)


def _free_mode(m_values, s, rho_lo, rho_hi):
    """I_m(s rho_lo) K_m(s rho_hi) with exponential scaling."""
    w1, w2 = s * rho_lo, s * rho_hi
    return sc.ive(m_values, w1) * sc.kve(m_values, w2) * np.exp(abs(w1.real) - w2)


def green_full(params: SpectralParams, z, p1, p2, m_max: int = 64, tol: Optional[float] = None) -> GreenEval:
    """Full-plane kernel G^kappa(z; p1, p2) with p = (rho, phi).

    The free kernel K_0(sqrt(-z)|x1 - x2|)/(2 pi), whose angular modes are
    I_m K_m, is added in closed form and only the differences
    G_m - I_m K_m are summed, which decay faster in |m| than either term.
    """
    (r1, f1), (r2, f2) = p1, p2
    if r1 <= 0 or r2 <= 0:
        raise DomainError("radii must be positive")
    dphi = f1 - f2
    dist = math.sqrt(max(r1 * r1 + r2 * r2 - 2 * r1 * r2 * math.cos(dphi), 0.0))
    if dist <= 1e-14 * max(r1, r2):
        raise DomainError("green_full is singular on the diagonal p1 = p2")
    s, _ = _coulomb_parameter(params.Z, z)
    lo, hi = min(r1, r2), max(r1, r2)
    ratio = lo / hi
    total = complex(sc.kv(0, s * dist))
    ms = np.arange(0, m_max + 1)
    g = _green_m(params.Z, ms, z, np.full(ms.shape, lo), np.full(ms.shape, hi))
    free = _free_mode(ms, s, lo, hi)
    d = g - free
    weights = np.where(ms == 0, 1.0, 2.0) * np.cos(ms * dphi)
    # stop once the remaining modes are below double precision of the sum
    scale = np.abs(free) + np.abs(d)
    acc = total + np.cumsum(weights * d)
    used = m_max
    for m in range(1, m_max + 1):
        if scale[m] <= 1e-17 * abs(acc[m]) and (m == m_max or scale[m + 1] <= scale[m]):
            used = m
            break
    total = acc[used]
    if used < m_max:
        tail = 0.0
    else:
        last = np.abs(d[-4:])
        r = np.max(last[1:] / np.maximum(last[:-1], 1e-300))
        tail = 2 * abs(d[-1]) * (r / (1 - r) if r < 1 - 1.0 / m_max else m_max)
    value = total / (2 * math.pi)
    tail_bound = tail / (2 * math.pi)
    if not params.is_friedrichs:
        w1, w2 = _w0(params, z, r1), _w0(params, z, r2)
        value += phi_kappa(params, z) * complex(w1) * complex(w2) / (2 * math.pi * math.sqrt(r1 * r2))
    if tol is not None and tail_bound > tol:
        raise TruncationError(f"angular series not converged at m_max = {m_max}: tail {tail_bound:.3e} > {tol:.3e}")
    return GreenEval(z=complex(z), value=complex(value), tail_bound=float(tail_bound), m_truncation=int(used))


# ---------------------------------------------------------------- boundary values

_BV_BASIS = (
    lambda r: -np.log(r),
    lambda r: np.ones_like(r),
    lambda r: r * np.log(r),
    lambda r: r,
    lambda r: r * r * np.log(r),
    lambda r: r * r,
)


def boundary_values(f: Callable, tol: float = 1e-6, rho0: float = 1e-3, npts: int = 8) -> BoundaryValues:
    """Extract (f0, f1) of f(rho) = -f0 ln rho + f1 + o(1) at the origin.

    Samples rho_k = rho0 * 4^-k and fits the leading small-rho model
    {-ln rho, 1, rho ln rho, rho, rho^2 ln rho, rho^2} by least squares,
    which eliminates the correction terms in the manner of Richardson
    extrapolation. The achieved tolerance compares fits on the leading and
    trailing sub-sequences.
    """
    rho = rho0 * 4.0 ** -np.arange(npts)
    vals = np.asarray(f(rho))
    if not np.all(np.isfinite(vals)):
        raise ConvergenceError("boundary_values: f is not finite on the sample sequence")

    def fit(sel, nb):
        A = np.stack([b(rho[sel]) for b in _BV_BASIS[:nb]], axis=1)
        scale = np.max(np.abs(A), axis=0)
        coef, *_ = np.linalg.lstsq(A / scale, vals[sel], rcond=None)
        return coef[:2] / scale[:2]

    full = fit(slice(None), 6)
    estimates = (fit(slice(0, npts - 1), 5), fit(slice(1, npts), 5), full)
    spread = max(np.max(np.abs(e - full)) for e in estimates[:2])
    achieved = float(spread / max(1.0, np.max(np.abs(full))))
    if achieved > tol:
        raise ConvergenceError(f"boundary_values: extrapolants differ by {achieved:.2e} > {tol:.2e}")
    f0, f1 = full
    if np.iscomplexobj(vals):
        f0, f1 = complex(f0), complex(f1)
    else:
        f0, f1 = float(f0), float(f1)
    return BoundaryValues(f0=f0, f1=f1, achieved_tol=achieved, estimates=tuple(tuple(e) for e in estimates))
