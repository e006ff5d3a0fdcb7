"""Momentum (eigenfunction-expansion) representation of the planar Coulomb problem.

In the m-th partial wave the Friedrichs Hamiltonian is diagonalized by the
bound states psi_{m,n} together with the generalized eigenfunctions
psi_m(k, rho) of energy k^2. A radial function f is represented by the
pair (f_n, f(k)) in l^2 + L^2(R+, k dk); this module builds that
transform, its inverse, the self-adjoint family of the m = 0 channel in
this representation (labelled by kappa_hat) and the dictionary between
kappa_hat and the coordinate-space boundary parameter kappa.

Quadrature conventions: k integrals use composite Gauss-Legendre panels
that are geometrically graded towards k = 0 and uniform beyond; rho
integrals use panels whose width shrinks like 1/k so that every panel
spans a bounded phase of the oscillating kernel.
"""

import functools
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import special as sc
from scipy.optimize import brentq

from .errors import (
    BracketError,
    BranchCutError,
    ConvergenceError,
    DomainError,
    IntegrabilityError,
    PoleError,
    SpectralPointError,
)
from .specfun import EULER_GAMMA, digamma, log_gamma, whittaker_m_logscaled, whittaker_w_logscaled
from .spectral_core import PointLevel, PointLevelTable, radial_eigenfunction

_LN2 = math.log(2.0)
_GL_CACHE = {}


def _gauss_legendre(order):
    if order not in _GL_CACHE:
        _GL_CACHE[order] = np.polynomial.legendre.leggauss(order)
    return _GL_CACHE[order]


def _panel_rule(breaks, order):
    """Composite Gauss-Legendre nodes and weights (measure dx) on breakpoints."""
    x, w = _gauss_legendre(order)
    breaks = np.asarray(breaks, dtype=float)
    a, b = breaks[:-1, None], breaks[1:, None]
    half = 0.5 * (b - a)
    nodes = (a + half * (x + 1.0)).ravel()
    weights = (half * w).ravel()
    return nodes, weights


# ---------------------------------------------------------------- grids and vectors

@dataclass(frozen=True, eq=False)
class KGrid:
    """Quadrature rule on [0, K] for the measure k dk.

    ``weights`` already include the factor k, so sum(weights * g(nodes))
    approximates the integral of g(k) k dk over [0, K].
    """

    nodes: np.ndarray
    weights: np.ndarray
    breaks: np.ndarray
    order: int
    Z: float
    K: float

    def __post_init__(self):
        if self.nodes.ndim != 1 or self.nodes.shape != self.weights.shape:
            raise DomainError("KGrid nodes and weights must be 1-d arrays of equal length")
        if np.any(np.diff(self.nodes) <= 0):
            raise DomainError("KGrid nodes must be strictly increasing")
        if np.any(self.weights <= 0):
            raise DomainError("KGrid weights must be positive")

    @property
    def size(self) -> int:
        return self.nodes.size

    def spec(self) -> dict:
        return {"Z": self.Z, "K": self.K, "order": self.order, "panels": len(self.breaks) - 1}


def k_grid(Z: float = 1.0, K: Optional[float] = None, order: int = 16,
           width: Optional[float] = None, n_log: int = 10) -> KGrid:
    """Default momentum grid: n_log geometric panels on (0, Z/2], then uniform panels.

    K defaults to 40 Z and the uniform panel width to Z.
    """
    if not Z > 0:
        raise DomainError("Z must be positive")
    K = 40.0 * Z if K is None else float(K)
    width = float(Z) if width is None else float(width)
    if not (K > 0.5 * Z and width > 0):
        raise DomainError("need K > Z/2 and a positive panel width")
    geo = 0.5 * Z * 2.0 ** -np.arange(n_log - 1, -1, -1)
    npan = int(math.ceil((K - 0.5 * Z) / width))
    uni = np.linspace(0.5 * Z, K, npan + 1)[1:]
    breaks = np.concatenate([[0.0], geo, uni])
    nodes, w = _panel_rule(breaks, order)
    return KGrid(nodes=nodes, weights=w * nodes, breaks=breaks, order=order, Z=float(Z), K=K)


@dataclass(frozen=True, eq=False)
class MomentumVector:
    """Element (f_n, f(k)) of l^2 + L^2(R+, k dk) in one partial wave.

    ``coeffs`` holds f_0..f_{n_max}; ``samples`` holds f at ``grid.nodes``.
    Optional ``sample_fn`` evaluates f(k) beyond the grid (used for tails
    of k integrals); optional ``pole`` marks vectors whose l^2 part has
    the resolvent pattern c 2Z/((2n+1)^{3/2} (lambda_{0,n} - pole)), which
    allows the n-sums to be completed in closed form.
    """

    coeffs: np.ndarray
    samples: np.ndarray
    grid: KGrid
    Z: float
    m: int = 0
    sample_fn: Optional[Callable] = None
    pole: Optional[complex] = None

    def __post_init__(self):
        if self.samples.shape != self.grid.nodes.shape:
            raise DomainError("samples must match the grid nodes")
        if not (np.all(np.isfinite(self.coeffs)) and np.all(np.isfinite(self.samples))):
            raise DomainError("MomentumVector entries must be finite")

    @property
    def n_max(self) -> int:
        return self.coeffs.size - 1

    def norm_sq_parts(self):
        """(l^2 part, L^2(k dk) part) of the squared norm, tails included."""
        c2 = np.abs(self.coeffs) ** 2
        disc = float(c2.sum() + _zeta_tail(c2, 3.0))
        cont = float(np.sum(self.grid.weights * np.abs(self.samples) ** 2))
        if self.sample_fn is not None:
            cont += float(np.real(_k_tail(lambda k: np.abs(self.sample_fn(k)) ** 2, self.grid.K)))
        return disc, cont

    def norm(self) -> float:
        return math.sqrt(sum(self.norm_sq_parts()))


@dataclass(frozen=True)
class TransformReport:
    """Unitarity diagnostics of the m-th eigenfunction transform."""

    parseval_defect: float
    bound_state_leakage: float
    roundtrip_error: float

    def __post_init__(self):
        for name in ("parseval_defect", "bound_state_leakage", "roundtrip_error"):
            if not getattr(self, name) >= 0:
                raise DomainError(f"{name} must be nonnegative")


# ---------------------------------------------------------------- tails

def _zeta_tail(terms, p: float, nfit: int = 4, spacing: int = 4) -> complex:
    """Estimate sum_{n > N} t_n for t_n ~ sum_j c_j (2n+1)^{-(p+j)}.

    The c_j are fitted to nfit terms spaced ``spacing`` apart at the end of
    ``terms`` (n = 0..N); the sums of (2n+1)^{-s} come from the Hurwitz zeta.
    """
    terms = np.asarray(terms)
    N = terms.size - 1
    idx = N - spacing * np.arange(nfit)
    if idx[-1] < 1:
        return 0.0
    nu = 2.0 * idx + 1.0
    powers = p + np.arange(nfit)
    A = nu[:, None] ** -powers[None, :]
    c = np.linalg.solve(A, terms[idx])
    tails = np.array([2.0 ** -s * sc.zeta(s, N + 1.5) for s in powers])
    return c @ tails


def _k_tail(g: Callable, K: float, order: int = 32, n_panels: int = 4) -> complex:
    """Integral of g(k) k dk over [K, inf) for g decaying at least like k^{-3}.

    Substituting k = K/u maps the tail onto (0, 1], where the integrand
    g(K/u) K^2 / u^3 is smooth and vanishes at u = 0.
    """
    breaks = np.linspace(0.0, 1.0, n_panels + 1)
    u, w = _panel_rule(breaks, order)
    k = K / u
    return np.sum(w * g(k) * K * K / u ** 3)


# ---------------------------------------------------------------- eigenfunctions

def normalization_n(Z: float, k):
    """N(k) = (2 / (1 + exp(-pi Z / k)))^{1/2}."""
    k = np.asarray(k, dtype=float)
    if np.any(k <= 0):
        raise DomainError("k must be positive")
    out = np.sqrt(2.0 / (1.0 + np.exp(-math.pi * Z / k)))
    return out[()] if out.ndim == 0 else out


def _psi_grid(Z, m, k, rho):
    """psi_m(k, rho) on broadcast float arrays k, rho (complex output)."""
    mu = abs(int(m))
    k, rho = np.broadcast_arrays(np.asarray(k, float), np.asarray(rho, float))
    z = 2j * k * rho
    man, _ = whittaker_m_logscaled(Z / (2j * k), float(mu), z)
    # |i^m (2ikrho)^mu prod_s ((s+1/2)^2 + Z^2/4k^2)^{1/2}| = rho^mu prod_s ((2k(s+1/2))^2 + Z^2)^{1/2}
    logpref = np.log(normalization_n(Z, k)) - sc.gammaln(2 * mu + 1)
    for s in range(mu):
        logpref = logpref + 0.5 * np.log((2 * k * (s + 0.5)) ** 2 + Z * Z)
    if mu:
        logpref = logpref + mu * np.log(rho)
    phase = 1j ** ((int(m) + mu) % 4)
    return phase * np.exp(logpref - 1j * k * rho) * man


def gen_eigenfunction(Z: float, m: int, k, rho):
    """Generalized eigenfunction psi_m(k, rho) of energy k^2.

    psi_m = N(k) prod_{s<|m|} ((s+1/2)^2 + Z^2/(4k^2))^{1/2} / (2|m|)!
            * i^m (2ik rho)^{-1/2} M_{Z/(2ik), |m|}(2ik rho),
    normalized so that the transform with measures rho d rho and k dk is
    unitary on the continuous subspace. The value is real; it is returned
    as complex to expose rounding in the imaginary part.
    """
    if not Z > 0:
        raise DomainError("Z must be positive")
    k = np.asarray(k, dtype=float)
    rho = np.asarray(rho, dtype=float)
    if np.any(k <= 0) or np.any(rho <= 0):
        raise DomainError("gen_eigenfunction needs k > 0 and rho > 0")
    out = _psi_grid(Z, m, k, rho)
    return out[()] if out.ndim == 0 else out


def _bound_matrix(Z, m, n_max, rho):
    """Rows psi_{m,n}(rho) for n = 0..n_max."""
    return np.array([radial_eigenfunction(Z, m, n, rho) for n in range(n_max + 1)])


# ---------------------------------------------------------------- transforms

@functools.lru_cache(maxsize=64)
def _rho_rule(rho_max, width, order, n_log):
    first = min(width, rho_max)
    geo = first * 2.0 ** -np.arange(n_log, 0, -1)
    npan = max(1, int(math.ceil((rho_max - first) / width)))
    uni = np.linspace(first, rho_max, npan + 1) if rho_max > first else np.array([first])
    breaks = np.concatenate([[0.0], geo, uni])
    nodes, w = _panel_rule(breaks, order)
    return nodes, w * nodes


@functools.lru_cache(maxsize=48)
def _kernel_block(Z, m, ks, rho_max, width, order, n_log):
    rho, _ = _rho_rule(rho_max, width, order, n_log)
    ker = _psi_grid(Z, m, np.asarray(ks)[:, None], rho[None, :])
    return np.ascontiguousarray(ker.real)


def _check_f_values(fv, n):
    fv = np.asarray(fv)
    if fv.shape[0] != n:
        raise DomainError("f must return one value (or one row) per rho node")
    return fv


def transform_values(Z: float, m: int, f: Callable, k, rho_max: float, *, order: int = 16,
                     max_width: float = 0.5, phase_per_panel: float = 8.0, n_log: int = 4,
                     block: int = 32):
    """T_m[f](k) = int_0^rho_max psi_m(k, rho) f(rho) rho d rho at the given k.

    f is called with a 1-d array of rho nodes and may return shape (n,)
    or (n, q) to transform q functions at once. Panels have width
    min(max_width, phase_per_panel / k) for each block of similar k.
    """
    if not Z > 0 or not rho_max > 0:
        raise DomainError("need Z > 0 and rho_max > 0")
    k = np.asarray(k, dtype=float)
    shape = k.shape
    k = k.ravel()
    if np.any(k <= 0):
        raise DomainError("k must be positive")
    out = None
    multi = False
    order_idx = np.argsort(k, kind="stable")
    for chunk in np.array_split(order_idx, max(1, math.ceil(k.size / block))):
        if chunk.size == 0:
            continue
        kc = k[chunk]
        width = float(min(max_width, phase_per_panel / kc.max()))
        rho, wr = _rho_rule(float(rho_max), width, order, n_log)
        fv = _check_f_values(f(rho), rho.size)
        multi = fv.ndim == 2
        ker = _kernel_block(float(Z), int(m), tuple(kc.tolist()), float(rho_max), width, order, n_log)
        vals = ker @ (wr[:, None] * fv.reshape(rho.size, -1))
        if out is None:
            out = np.zeros((k.size, vals.shape[1]), dtype=vals.dtype)
        out[chunk] = vals
    return out.reshape(shape + ((out.shape[1],) if multi else ()))


def bound_coefficients(Z: float, m: int, f: Callable, n_max: int, rho_max: float, *,
                       order: int = 16, width: float = 0.25, n_log: int = 4):
    """f_n = <psi_{m,n}, f> for n = 0..n_max by panel quadrature on [0, rho_max]."""
    rho, wr = _rho_rule(float(rho_max), float(width), order, n_log)
    fv = _check_f_values(f(rho), rho.size)
    return _bound_matrix(Z, m, n_max, rho) @ (wr * fv)


def forward_transform(Z: float, m: int, f: Callable, grid: KGrid, rho_max: Optional[float] = None,
                      n_max: int = 64, check: bool = False, **quad) -> MomentumVector:
    """Full expansion of a radial function: bound coefficients plus T_m[f] on the grid.

    With ``check=True`` the largest-k value is recomputed on panels of half
    the width and ConvergenceError is raised if the two disagree.
    """
    rho_max = 40.0 / Z if rho_max is None else float(rho_max)
    samples = transform_values(Z, m, f, grid.nodes, rho_max, **quad)
    if check:
        kk = grid.nodes[-1:]
        q2 = dict(quad)
        q2["phase_per_panel"] = 0.5 * quad.get("phase_per_panel", 8.0)
        q2["max_width"] = 0.5 * quad.get("max_width", 0.5)
        fine = transform_values(Z, m, f, kk, rho_max, **q2)
        scale = max(np.max(np.abs(samples)), 1e-300)
        if abs(fine[0] - samples[-1]) > 1e-8 * scale:
            raise ConvergenceError("rho quadrature did not settle under panel refinement")
    coeffs = bound_coefficients(Z, m, f, n_max, rho_max)
    return MomentumVector(coeffs=np.asarray(coeffs), samples=np.asarray(samples), grid=grid, Z=float(Z), m=int(m))


def inverse_transform(Z: float, m: int, g, grid: KGrid, rho):
    """int_0^K psi_m(k, rho) g(k) k dk on the grid (continuous part only).

    g may be a MomentumVector on ``grid``, an array of samples at the grid
    nodes, or a callable of k.
    """
    if isinstance(g, MomentumVector):
        if g.grid is not grid and not np.array_equal(g.grid.nodes, grid.nodes):
            raise DomainError("MomentumVector lives on a different grid")
        gv = g.samples
    elif callable(g):
        gv = np.asarray(g(grid.nodes))
    else:
        gv = np.asarray(g)
    if gv.shape != grid.nodes.shape:
        raise DomainError("g samples must match the grid nodes")
    rho = np.asarray(rho, dtype=float)
    if np.any(rho <= 0):
        raise DomainError("rho must be positive")
    if not np.any(gv):
        return np.zeros(rho.shape, dtype=gv.dtype)
    ker = _psi_grid(Z, m, grid.nodes[:, None], rho.ravel()[None, :]).real
    out = (grid.weights * gv) @ ker
    return out.reshape(rho.shape)


def bound_sum(Z: float, m: int, coeffs, rho, tail_power: Optional[float] = 3.0):
    """sum_n f_n psi_{m,n}(rho), completed with a zeta-type tail fit when tail_power is set."""
    rho = np.atleast_1d(np.asarray(rho, dtype=float))
    coeffs = np.asarray(coeffs)
    terms = coeffs[:, None] * _bound_matrix(Z, m, coeffs.size - 1, rho)
    out = terms.sum(axis=0)
    if tail_power is not None:
        out = out + np.array([_zeta_tail(terms[:, i], tail_power) for i in range(rho.size)])
    return out


def gaussian_bump(center: float = 3.0, width: float = 0.5) -> Callable:
    """exp(-((rho - center)/width)^2): the default smooth test function.

    With the default parameters f and all its derivatives are below 1e-15
    at the origin, so T_0[f] decays like a Gaussian and the k grid
    truncation at K = 40 Z is invisible.
    """
    return lambda rho: np.exp(-((np.asarray(rho, dtype=float) - center) / width) ** 2)


def transform_report(Z: float, f: Optional[Callable] = None, grid: Optional[KGrid] = None,
                     rho_max: float = 12.0, m: int = 0, n_max: int = 64, n_leak: int = 5,
                     leak_stride: int = 8) -> TransformReport:
    """Parseval defect, bound-state leakage and roundtrip error for a test function f.

    parseval_defect = |(sum |f_n|^2 + int |T f|^2 k dk) - ||f||^2| / ||f||^2;
    roundtrip_error is the relative L^2(rho d rho) distance between
    T^{-1} T f and f_ac = f - sum_n f_n psi_{m,n} on [0, rho_max].
    Functions with f(0) != 0 have T_0 f ~ Z f(0) / k^3 and the roundtrip
    then carries a truncation error of order Z f(0) / K^2.
    """
    f = gaussian_bump(3.0 / Z, 0.5 / Z) if f is None else f
    grid = k_grid(Z) if grid is None else grid
    vec = forward_transform(Z, m, f, grid, rho_max, n_max=n_max)
    rho, wr = _rho_rule(float(rho_max), 0.25, 16, 4)
    fv = f(rho)
    fnorm = float(np.sum(wr * np.abs(fv) ** 2))
    parseval = abs(vec.norm() ** 2 - fnorm) / fnorm

    leak = bound_state_leakage(Z, m, n_leak, grid.nodes[::leak_stride])

    back = inverse_transform(Z, m, vec, grid, rho)
    f_ac = fv - bound_sum(Z, m, vec.coeffs, rho)
    roundtrip = math.sqrt(float(np.sum(wr * np.abs(back - f_ac) ** 2) / np.sum(wr * np.abs(f_ac) ** 2)))
    return TransformReport(parseval_defect=float(parseval), bound_state_leakage=float(leak),
                           roundtrip_error=roundtrip)


def bound_state_leakage(Z: float, m: int, n_leak: int, k, x_max: float = 80.0) -> float:
    """max over n <= n_leak and the given k of |T_m[psi_{m,n}](k)|."""
    nu_max = 2 * abs(m) + 2 * n_leak + 1
    rho_max = x_max * nu_max / (2.0 * Z)

    def stack(rho):
        return np.stack([radial_eigenfunction(Z, m, n, rho) for n in range(n_leak + 1)], axis=1)

    vals = transform_values(Z, m, stack, k, rho_max)
    return float(np.max(np.abs(vals)))


def diagonalization_residual(Z: float, m: int, f: Callable, hf: Callable, grid: Optional[KGrid] = None,
                             rho_max: float = 12.0) -> float:
    """||T_m[H_m f] - k^2 T_m[f]|| / ||f|| in L^2(k dk); hf is the action of H_m on f."""
    grid = k_grid(Z) if grid is None else grid

    def both(rho):
        return np.stack([f(rho), hf(rho)], axis=1)

    vals = transform_values(Z, m, both, grid.nodes, rho_max)
    diff = vals[:, 1] - grid.nodes ** 2 * vals[:, 0]
    rho, wr = _rho_rule(float(rho_max), 0.25, 16, 4)
    fnorm = math.sqrt(float(np.sum(wr * np.abs(f(rho)) ** 2)))
    return math.sqrt(float(np.sum(grid.weights * np.abs(diff) ** 2))) / fnorm


# ---------------------------------------------------------------- closed-form identities

def identity_sum(a):
    """sum_{n>=0} 1/((2n+1)(2n+1-a)) = (Psi(1/2) - Psi((1-a)/2)) / (2a).

    a = 0 gives pi^2/8; odd positive integers are poles. Complex a is
    accepted. Near a = 0 the power series sum_j a^j lambda(j+2), with
    lambda(s) = (1 - 2^-s) zeta(s), avoids the cancellation.
    """
    a = complex(a)
    if a.imag == 0 and a.real > 0 and abs(a.real - round(a.real)) == 0 and int(round(a.real)) % 2 == 1:
        raise PoleError(f"identity_sum has a pole at a = {int(round(a.real))}", point=int(round(a.real)))
    if abs(a) < 1e-3:
        j = np.arange(12)
        lam = (1.0 - 2.0 ** -(j + 2.0)) * sc.zeta(j + 2.0)
        val = complex(np.sum(lam * a ** j))
    else:
        val = complex((digamma(0.5) - digamma(0.5 * (1.0 - a))) / (2.0 * a))
    return val.real if a.imag == 0 else val


def identity_int(a):
    """int_0^inf y / ((1 + e^{pi y})(y^2 + a)) dy = -ln(4a)/4 + Psi(sqrt a) - Psi(sqrt a / 2)/2.

    Defined for a off the cut (-inf, 0].
    """
    a = complex(a)
    if a.imag == 0 and a.real <= 0:
        raise BranchCutError("identity_int: a lies on the cut (-inf, 0]")
    r = np.sqrt(a)
    val = complex(-0.25 * np.log(4.0 * a) + digamma(r) - 0.5 * digamma(0.5 * r))
    return val.real if a.imag == 0 else val


def _resolvent_pattern_sum(Z, z):
    """sum_n 4Z^2 / ((2n+1)^3 (lambda_{0,n} - z)) in closed form."""
    z = complex(z)
    a = Z / np.sqrt(-z)
    return -(4.0 * Z * Z / z) * (identity_sum(a) - identity_sum(-a)) / (2.0 * a)


# ---------------------------------------------------------------- deficiency elements and S

def _check_resolvent_point(Z, z):
    z = complex(z)
    if z.imag == 0:
        if z.real >= 0:
            raise DomainError("f_z is not square integrable for real z >= 0")
        x = Z / math.sqrt(-z.real)
        if abs(x - round(x)) < 1e-12 and int(round(x)) % 2 == 1:
            raise SpectralPointError(f"z = {z.real} is an eigenvalue lambda_(0,n)")
    return z


def fz_deficiency(Z: float, z, grid: Optional[KGrid] = None, n_max: int = 64) -> MomentumVector:
    """Deficiency element (f_z)_n = 2Z/((2n+1)^{3/2}(lambda_{0,n} - z)), f_z(k) = N(k)/(k^2 - z)."""
    z = _check_resolvent_point(Z, z)
    grid = k_grid(Z) if grid is None else grid
    nu = 2.0 * np.arange(n_max + 1) + 1.0
    lam = -Z * Z / nu ** 2
    coeffs = 2.0 * Z / (nu ** 1.5 * (lam - z))

    def fn(k):
        return normalization_n(Z, k) / (k * k - z)

    if z.imag == 0:
        coeffs = coeffs.real

        def fn(k):  # noqa: F811  (real version for real z)
            return normalization_n(Z, k) / (k * k - z.real)

    return MomentumVector(coeffs=coeffs, samples=fn(grid.nodes), grid=grid, Z=float(Z), m=0,
                          sample_fn=fn, pole=z)


def s_functional(Z: float, xi, f: MomentumVector) -> complex:
    """S(xi, f) = sum_n 2Z (2n+1)^{-3/2} f_n + int N(k) (f(k) - xi N(k)/(k^2+Z^2)) k dk.

    The n-sum is completed in closed form when f carries a resolvent pole,
    otherwise by a zeta-type tail fit. The k integral beyond the grid uses
    f.sample_fn when available; otherwise the decay of the integrand over
    the last two panels is extrapolated, and IntegrabilityError is raised
    when it is not integrable against k dk.
    """
    if f.m != 0:
        raise DomainError("S is defined on the m = 0 channel")
    nu = 2.0 * np.arange(f.n_max + 1) + 1.0
    terms = 2.0 * Z * nu ** -1.5 * f.coeffs
    total = terms.sum()
    if f.pole is not None:
        lam = -Z * Z / nu ** 2
        pattern = 4.0 * Z * Z / (nu ** 3 * (lam - f.pole))
        scale = f.coeffs[-1] * (nu[-1] ** 1.5 * (lam[-1] - f.pole)) / (2.0 * Z)
        total = total + scale * (_resolvent_pattern_sum(Z, f.pole) - pattern.sum())
    else:
        total = total + _zeta_tail(terms, 3.0)

    grid = f.grid
    nk = normalization_n(Z, grid.nodes)
    integrand = nk * (f.samples - xi * nk / (grid.nodes ** 2 + Z * Z))
    total = total + np.sum(grid.weights * integrand)
    if f.sample_fn is not None:
        def tail(k):
            nn = normalization_n(Z, k)
            return nn * (f.sample_fn(k) - xi * nn / (k * k + Z * Z))
        total = total + _k_tail(tail, grid.K)
    else:
        total = total + _extrapolated_tail(grid, integrand)
    total = complex(total)
    return total.real if total.imag == 0 else total


def _extrapolated_tail(grid, h):
    """Power-law extrapolation of int_K^inf h(k) k dk from the last two panels."""
    o = grid.order
    last, prev = np.abs(h[-o:]).max(), np.abs(h[-2 * o:-o]).max()
    if last <= 1e-15 * max(np.abs(h).max(), 1e-300):
        return 0.0
    k_last = grid.nodes[-o:].mean()
    k_prev = grid.nodes[-2 * o:-o].mean()
    if prev <= 0:
        raise IntegrabilityError("integrand of S is not decaying at the end of the grid")
    p = math.log(prev / last) / math.log(k_last / k_prev)
    # a k^-2 tail reads as p ~ 2.06 at K = 40Z, so the cut sits a little above 2
    if p <= 2.25:
        raise IntegrabilityError(
            f"f(k) - xi N(k)/(k^2+Z^2) decays like k^-{p:.2f}; not integrable against k dk")
    K = grid.K
    return h[-1] * (grid.nodes[-1] / K) ** p * K * K / (p - 2.0)


def s_fz_closed_form(Z: float, z) -> complex:
    """S(1, f_z) = -Psi(1/2 - Z/(2s)) - gamma - ln(s/Z) - 4 ln 2 with s = sqrt(-z).

    Follows from matching the small-rho behaviour of the expansion of f_z
    with the threshold asymptote of the continuous part.
    """
    z = _check_resolvent_point(Z, z)
    s = np.sqrt(-z)
    return complex(-digamma(0.5 - Z / (2 * s)) - EULER_GAMMA - np.log(s / Z) - 4 * _LN2)


# ---------------------------------------------------------------- kappa_hat family

def kappa_map(kappa_hat: float, Z: float) -> float:
    """Coordinate boundary parameter equivalent to kappa_hat: kappa_hat - ln Z - gamma + 3 ln 2."""
    if not Z > 0:
        raise DomainError("Z must be positive")
    return float(kappa_hat) - math.log(Z) - EULER_GAMMA + 3 * _LN2


def kappa_map_inverse(kappa: float, Z: float) -> float:
    """Inverse of kappa_map."""
    if not Z > 0:
        raise DomainError("Z must be positive")
    return float(kappa) + math.log(Z) + EULER_GAMMA - 3 * _LN2


def kappa_hat_from_alpha(alpha: float) -> float:
    """kappa_hat of the extension A_alpha defined with the resolvent point z = i Z^2 / 2.

    kappa_hat = Re S(1, f_z) + Im S(1, f_z) tan(alpha / 2).
    """
    s = s_fz_closed_form(1.0, 0.5j)
    return s.real + s.imag * math.tan(0.5 * alpha)


def momentum_level_equation(x, kappa_hat: float):
    """pi tan(pi x/2) + ln x - Psi((1+x)/2) - gamma - 4 ln 2 - kappa_hat for x > 0."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("x must be positive")
    odd = (np.abs(x - np.round(x)) == 0) & (np.round(x) % 2 == 1)
    if np.any(odd):
        bad = float(np.atleast_1d(x)[np.atleast_1d(odd)][0])
        raise PoleError(f"momentum level equation has a pole at x = {bad!r}", point=bad)
    out = (math.pi * np.tan(0.5 * math.pi * x) + np.log(x) - np.real(digamma(0.5 * (1 + x)))
           - EULER_GAMMA - 4 * _LN2 - kappa_hat)
    return out[()] if out.ndim == 0 else out


def _momentum_residual(t, j, kappa_hat):
    """Level equation on the j-th branch, x = 2j - 1 + 2t with t in (0, 1) (x = t for j = 0)."""
    if j == 0:
        x = t
        tan_part = math.tan(0.5 * math.pi * x)
    else:
        x = 2 * j - 1 + 2 * t
        tan_part = math.tan(math.pi * (t - 0.5))
    return (math.pi * tan_part + math.log(x) - float(np.real(digamma(0.5 * (1 + x))))
            - EULER_GAMMA - 4 * _LN2 - kappa_hat)


def _solve_x(kappa_hat, j):
    f = functools.partial(_momentum_residual, j=j, kappa_hat=kappa_hat)
    lo, hi = 0.5, 0.5
    flo = fhi = f(0.5)
    if flo == 0:
        return 0.5 if j == 0 else 2.0 * j
    for _ in range(1100):
        if flo < 0:
            break
        lo /= 2.0
        if lo == 0:
            break
        flo = f(lo)
    for _ in range(60):
        if fhi > 0:
            break
        hi = 1.0 - 0.5 * (1.0 - hi)
        fhi = f(hi)
    if not (flo < 0 < fhi):
        raise BracketError("momentum level residual shows no sign change on its branch")
    t = brentq(f, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
    return t if j == 0 else 2 * j - 1 + 2 * t


def momentum_point_levels(Z: float, kappa_hat: float, j_max: int) -> PointLevelTable:
    """Negative eigenvalues lambda_j = -Z^2/x_j^2 of the kappa_hat extension.

    x_0 lies in (0, 1) and x_j in (2j-1, 2j+1) for j >= 1, between the
    poles of tan at the odd integers. The returned table stores kappa_hat
    in its ``kappa`` field; PointLevel.k holds 1/x_j.
    """
    if not Z > 0:
        raise DomainError("Z must be positive")
    if not math.isfinite(kappa_hat):
        raise DomainError("kappa_hat must be finite")
    if j_max < 1:
        raise DomainError("j_max must be at least 1")
    levels = []
    for j in range(j_max):
        x = _solve_x(float(kappa_hat), j)
        levels.append(PointLevel(j=j, epsilon=-Z * Z / (x * x), k=1.0 / x))
    return PointLevelTable(Z=float(Z), kappa=float(kappa_hat), levels=tuple(levels),
                           solver_tol=4 * np.finfo(float).eps)


# ---------------------------------------------------------------- coordinate correspondence

def fz_coordinate_side(Z: float, z: float, rho):
    """(-z1)^{-1/4} Gamma(1/2 - 1/(2 s1)) (2 Z rho)^{-1/2} W_{1/(2 s1), 0}(2 s1 Z rho).

    Here z1 = z/Z^2 and s1 = sqrt(-z1); for Z = 1 this is the coordinate
    function that the expansion of f_z reproduces.
    """
    z = float(z)
    if z >= 0:
        raise DomainError("need z < 0")
    rho = np.asarray(rho, dtype=float)
    s1 = math.sqrt(-z) / Z
    kap = 0.5 / s1
    if abs(0.5 - kap - round(0.5 - kap)) < 1e-14 and 0.5 - kap <= 0:
        raise SpectralPointError("z is an eigenvalue lambda_(0,n)")
    man, lsc = whittaker_w_logscaled(kap, 0.0, 2 * s1 * Z * rho)
    lg = float(np.real(log_gamma(0.5 - kap)))
    sign = 1.0 if sc.gammasgn(0.5 - kap) > 0 else -1.0
    out = sign * np.real(man * np.exp(lsc + lg)) * s1 ** -0.5 / np.sqrt(2 * Z * rho)
    return out[()] if out.ndim == 0 else out


def continuum_resolvent_integral(Z: float, z, rho, K0: Optional[float] = None, tol: float = 1e-8,
                                 K_cap: Optional[float] = None):
    """int_0^inf psi_0(k, rho) N(k) / (k^2 - z) k dk for z off [0, inf).

    The free part int J0(k rho) k/(k^2 - z) dk = K0(sqrt(-z) rho) is taken
    in closed form; the remainder (psi_0 N - J0) k/(k^2 - z) is integrated
    over [0, K0] and then over doubling blocks until a block contributes
    less than tol. Raises ConvergenceError when K_cap is reached first.
    """
    z = complex(z)
    if z.imag == 0 and z.real >= 0:
        raise DomainError("z must lie off [0, inf)")
    rho = np.atleast_1d(np.asarray(rho, dtype=float))
    if np.any(rho <= 0):
        raise DomainError("rho must be positive")
    K0 = 50.0 * Z if K0 is None else float(K0)
    K_cap = 1e6 * Z if K_cap is None else float(K_cap)
    rmax = float(rho.max())
    s = np.sqrt(-z)

    def block(nodes, w):
        kk = nodes[:, None]
        psi = _psi_grid(Z, 0, kk, rho[None, :]).real
        nk = normalization_n(Z, kk)
        diff = psi * nk - sc.j0(kk * rho[None, :])
        return (w * nodes / (nodes ** 2 - z)) @ diff

    base = k_grid(Z, K=K0, width=min(float(Z), 4.0 / rmax))
    acc = block(base.nodes, base.weights / base.nodes)
    acc = acc + sc.kv(0, s * rho)
    lo = K0
    while True:
        hi = 2.0 * lo
        width = min(4.0 / rmax, lo / 8.0)
        npan = int(math.ceil((hi - lo) / width))
        nodes, w = _panel_rule(np.linspace(lo, hi, npan + 1), 16)
        inc = block(nodes, w)
        acc = acc + inc
        if np.max(np.abs(inc)) < tol:
            break
        lo = hi
        if lo >= K_cap:
            raise ConvergenceError("continuum integral did not settle before K_cap")
    return acc if z.imag else acc.real


def fz_expansion(Z: float, z: float, rho, n_max: int = 256, tol: float = 1e-7):
    """sum_n (f_z)_n psi_{0,n}(rho) + int f_z(k) psi_0(k, rho) k dk."""
    z = _check_resolvent_point(Z, z)
    nu = 2.0 * np.arange(n_max + 1) + 1.0
    coeffs = 2.0 * Z / (nu ** 1.5 * (-Z * Z / nu ** 2 - z))
    if z.imag == 0:
        coeffs = coeffs.real
    return bound_sum(Z, 0, coeffs, rho) + continuum_resolvent_integral(Z, z, rho, tol=tol)


def fz_coordinate_check(Z: float, z: float, rho_grid, n_max: int = 256, tol: float = 1e-7) -> float:
    """max over rho_grid of |expansion of f_z - coordinate-side closed form|, for z < -Z^2."""
    z = float(z)
    if not z < -Z * Z:
        raise DomainError("the correspondence check needs z < -Z^2")
    rho = np.atleast_1d(np.asarray(rho_grid, dtype=float))
    lhs = fz_expansion(Z, z, rho, n_max=n_max, tol=tol)
    rhs = fz_coordinate_side(Z, z, rho)
    return float(np.max(np.abs(lhs - rhs)))


def threshold_asymptote(Z: float, rho):
    """Small-rho limit -ln(Z rho) - gamma + 3 ln 2 of int psi_0 N/(k^2+Z^2) k dk."""
    rho = np.asarray(rho, dtype=float)
    return -np.log(Z * rho) - EULER_GAMMA + 3 * _LN2
