"""Hydrogen-like atom in a thin slab R^2 x (-a/2, a/2) and its planar limit.

Units are fixed by Z = 1. The slab Hamiltonian -Delta_D - 1/r is expanded
in the transverse Dirichlet modes chi_n; keeping the lowest mode gives the
effective planar operator -Delta + E_1 - V_eff. This module evaluates the
effective potential and the explicit constants of the convergence bounds,
discretizes the planar Coulomb, effective and mode-truncated slab
operators on a radial finite-volume grid, and measures resolvent
differences and sandwiched potential differences against those bounds.

Discretization: cell i is [rho_i - h/2, rho_i + h/2] (a disk of radius
h/2 for the origin node, present only for m = 0). The quadratic form
sum_i (rho_{i+1/2}/h)(u_{i+1} - u_i)^2 + sum_i u_i^2 int_cell V rho drho
with u = 0 at rho = R is exact for cell-averaged potentials, so matrix
inequalities between potentials carry over to the discrete operators.
The symmetric matrices act on B^{1/2} u, B = diag(cell areas / 2 pi).
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import integrate
from scipy import sparse
from scipy.linalg import eigh, eigh_tridiagonal
from scipy.sparse.linalg import splu

from .errors import ConvergenceError, DomainError, ResourceError, SpectralPointError
from .specfun import log_gamma

W_INTEGRAL = 0.25 - 1.0 / math.pi ** 2
DENSE_CAP = 4000
RADIAL_CAP = 50000
_GL16 = np.polynomial.legendre.leggauss(16)


# ---------------------------------------------------------------- parameters and grids

@dataclass(frozen=True)
class SlabParams:
    """Slab width a and number of transverse modes kept (Z = 1)."""

    a: float
    n_modes: int = 1

    def __post_init__(self):
        if not (self.a > 0 and math.isfinite(self.a)):
            raise DomainError("slab width a must be positive and finite")
        if int(self.n_modes) != self.n_modes or self.n_modes < 1:
            raise DomainError("n_modes must be a positive integer")


@dataclass(frozen=True)
class RadialGrid:
    """Uniform radial grid rho_i = i h with Dirichlet condition at rho = R."""

    h: float
    R: float

    def __post_init__(self):
        if not (self.h > 0 and self.R > self.h):
            raise DomainError("need h > 0 and R > h")
        n = self.R / self.h
        if abs(n - round(n)) > 1e-9 * n:
            raise DomainError("R must be an integer multiple of h")

    @property
    def n(self) -> int:
        """Number of cells R/h; node n sits on the Dirichlet boundary."""
        return int(round(self.R / self.h))

    def nodes(self, m: int = 0) -> np.ndarray:
        start = 0 if m == 0 else 1
        return self.h * np.arange(start, self.n)

    def cell_edges(self, m: int = 0):
        rho = self.nodes(m)
        lo = np.maximum(rho - 0.5 * self.h, 0.0)
        hi = rho + 0.5 * self.h
        return lo, hi


def default_grid(a: Optional[float] = None, R: float = 40.0, max_points: int = 4000) -> RadialGrid:
    """h = 1e-3 R by default, refined to h <= a/8 when a is given (capped at max_points cells)."""
    h = 1e-3 * R
    if a is not None:
        h = min(h, a / 8.0)
    n = max(int(math.ceil(R / h)), 2)
    if n > max_points:
        n = max_points
    return RadialGrid(h=R / n, R=R)


# ---------------------------------------------------------------- transverse modes

def transverse_energy(a: float, n: int) -> float:
    """E_n = n^2 pi^2 / a^2."""
    if n < 1:
        raise DomainError("mode index n must be >= 1")
    return (n * math.pi / a) ** 2


def transverse_mode(a: float, n: int, z):
    """chi_n(z) = sqrt(2/a) cos(n pi z / a) for odd n, sqrt(2/a) sin(n pi z / a) for even n."""
    if n < 1:
        raise DomainError("mode index n must be >= 1")
    z = np.asarray(z, dtype=float)
    if np.any(np.abs(z) >= 0.5 * a):
        raise DomainError("transverse_mode needs |z| < a/2")
    arg = n * math.pi * z / a
    out = math.sqrt(2.0 / a) * (np.cos(arg) if n % 2 else np.sin(arg))
    return out[()] if out.ndim == 0 else out


def _mode_values(a, n, z):
    arg = n * math.pi * z / a
    return math.sqrt(2.0 / a) * (np.cos(arg) if n % 2 else np.sin(arg))


# ---------------------------------------------------------------- effective potential

def _gl_panels(T, width, order=16):
    x, w = _GL16 if order == 16 else np.polynomial.legendre.leggauss(order)
    npan = max(1, int(math.ceil(T / width)))
    br = np.linspace(0.0, T, npan + 1)
    a, b = br[:-1, None], br[1:, None]
    half = 0.5 * (b - a)
    return (a + half * (x + 1)).ravel(), (half * w).ravel()


def _v_eff_unit(r):
    """V_eff^1(r) = 4 int_0^{asinh(1/(2r))} cos^2(pi r sinh t) dt (substitution z = r sinh t)."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    out = np.empty_like(r)
    for i, ri in enumerate(r):
        T = math.asinh(0.5 / ri)
        t, w = _gl_panels(T, 0.5)
        out[i] = 4.0 * np.sum(w * np.cos(math.pi * ri * np.sinh(t)) ** 2)
    return out


def v_eff(a: float, rho, method: str = "fast"):
    """Effective potential (2/a) int_{-a/2}^{a/2} cos^2(pi z/a) / sqrt(rho^2 + z^2) dz.

    method "fast" uses V_eff^a(rho) = V_eff^1(rho/a)/a with Gauss-Legendre
    panels after z = r sinh t; method "quad" integrates the defining
    formula adaptively with scipy.integrate.quad.
    """
    rho = np.asarray(rho, dtype=float)
    if np.any(rho <= 0):
        raise DomainError("v_eff needs rho > 0")
    if not a > 0:
        raise DomainError("v_eff needs a > 0")
    if method == "fast":
        out = _v_eff_unit(rho.ravel() / a).reshape(rho.shape) / a
    elif method == "quad":
        def one(r):
            val, err = integrate.quad(lambda z: math.cos(math.pi * z / a) ** 2 / math.hypot(r, z),
                                      0.0, 0.5 * a, points=[min(r, 0.25 * a)], limit=200,
                                      epsabs=0.0, epsrel=1e-13)
            return 4.0 / a * val
        out = np.vectorize(one)(rho)
    else:
        raise ValueError(f"unknown method {method!r}")
    return out[()] if np.ndim(out) == 0 else out


def w_profile(rho):
    """W(rho) = 1 - rho V_eff^1(rho) = 4 rho int_0^T cos^2(pi rho sinh t)(cosh t - 1) dt.

    The cancellation-free form follows from z = rho sinh t with T = asinh(1/(2 rho)).
    """
    arr = np.asarray(rho, dtype=float)
    if np.any(arr <= 0):
        raise DomainError("w_profile needs rho > 0")
    flat = np.atleast_1d(arr).ravel()
    out = np.empty_like(flat)
    for i, r in enumerate(flat):
        T = math.asinh(0.5 / r)
        t, w = _gl_panels(T, 0.5)
        out[i] = 4.0 * r * np.sum(w * np.cos(math.pi * r * np.sinh(t)) ** 2 * (np.cosh(t) - 1.0))
    return float(out[0]) if arr.ndim == 0 else out.reshape(arr.shape)


def w_tail_moment() -> float:
    """int_{-1/2}^{1/2} z^2 cos^2(pi z) dz = 1/24 - 1/(4 pi^2), the constant in rho^2 W <= it."""
    return 1.0 / 24.0 - 1.0 / (4.0 * math.pi ** 2)


# ---------------------------------------------------------------- constants

@dataclass(frozen=True)
class Constants:
    C_I: float
    C_II: float
    C_III: float


def _gamma_quarter(method):
    if method == "loggamma":
        return math.exp(float(np.real(log_gamma(0.25))))
    if method == "agm":
        # Gamma(1/4)^2 = (2 pi)^{3/2} / AGM(sqrt 2, 1)
        x, y = math.sqrt(2.0), 1.0
        for _ in range(40):
            x, y = 0.5 * (x + y), math.sqrt(x * y)
        return math.sqrt((2 * math.pi) ** 1.5 / x)
    raise ValueError(f"unknown method {method!r}")


def constants(method: str = "loggamma") -> Constants:
    """Explicit constants of the convergence bounds.

    C_I = (G^4 + sqrt(G^8 + 64 pi^4)) / (8 pi^2) with G = Gamma(1/4),
    C_II = (sqrt 3 / 2)(1 - 4/pi^2) sqrt(1 + 32 pi^2 / (3 (pi^2 - 4) ln^2 2)),
    C_III = C_I^2 G^4 / (6 sqrt 2 pi^3).
    ``method`` selects how Gamma(1/4) is obtained ("loggamma" or "agm").
    """
    g4 = _gamma_quarter(method) ** 4
    pi = math.pi
    c1 = (g4 + math.sqrt(g4 * g4 + 64 * pi ** 4)) / (8 * pi ** 2)
    c2 = (math.sqrt(3) / 2) * (1 - 4 / pi ** 2) * math.sqrt(
        1 + 32 * pi ** 2 / (3 * (pi ** 2 - 4) * math.log(2) ** 2))
    c3 = c1 ** 2 * g4 / (6 * math.sqrt(2) * pi ** 3)
    return Constants(C_I=c1, C_II=c2, C_III=c3)


def kato_constant() -> float:
    """Gamma(1/4)^4 / (4 pi^2), the constant in rho^{-1} <= c sqrt(-Delta) on R^2."""
    return _gamma_quarter("loggamma") ** 4 / (4 * math.pi ** 2)


def coulomb_distance(xi: float) -> float:
    """dist(xi, sigma(H_C)) with sigma(H_C) = {-1/(2N-1)^2} union [0, inf)."""
    if xi >= 0:
        return 0.0
    # eigenvalues nearest to xi: N around 1/(2 sqrt(-xi)) + 1/2
    n0 = 0.5 / math.sqrt(-xi) + 0.5
    cand = [-1.0 / (2 * N - 1) ** 2 for N in range(max(1, int(n0) - 2), int(n0) + 3)]
    return min(min(abs(xi - c) for c in cand), -xi)


def lemma_upper_bound(a: float) -> float:
    """sqrt(12 a^2 ln^2 a (int W)^2 + 32 a^2 int W): bound on the sandwiched difference."""
    return math.sqrt(12 * a * a * math.log(a) ** 2 * W_INTEGRAL ** 2 + 32 * a * a * W_INTEGRAL)


def w_integral(R: float = math.inf) -> float:
    """int_0^R W(rho) d rho (closed form 1/4 - 1/pi^2 for R = inf)."""
    if math.isinf(R):
        return W_INTEGRAL
    val, _ = integrate.quad(lambda r: float(w_profile(r)), 0.0, R, limit=200, epsrel=1e-11)
    return val


def lemma_lower_bound(a: float, R: float = 2.0) -> float:
    """(1/2) (int_0^R W) a ln(1/(a R)), valid for R > 1 (zero when a R >= 1)."""
    if not R > 1:
        raise DomainError("the lower bound needs R > 1")
    return max(0.0, 0.5 * w_integral(R) * a * math.log(1.0 / (a * R)))


def theorem_a0(eta: float) -> float:
    """Root a0 of (2 C_I^2 C_II / d_C(eta)) a0 |ln a0| = 1/2 on (0, 1/e)."""
    c = constants()
    d = coulomb_distance(eta)
    target = 0.5 * d / (2 * c.C_I ** 2 * c.C_II)
    lo, hi = 1e-300, math.exp(-1.0)
    for _ in range(200):
        mid = math.sqrt(lo * hi) if lo > 0 else hi / 2
        if mid * abs(math.log(mid)) < target:
            lo = mid
        else:
            hi = mid
    return lo


def theorem_admissible(a: float, eta: float) -> bool:
    """a < min(a0, d_C(eta) / (8 C_III)) and -3 < eta < 0 off the spectrum."""
    if not -3 < eta < 0:
        return False
    d = coulomb_distance(eta)
    if d <= 0:
        return False
    return a < min(theorem_a0(eta), d / (8 * constants().C_III))


def theorem_rhs(a: float, eta: float) -> float:
    """4 C_I^2 C_II / d^2 a|ln a| + 20 C_III / d^2 a + 2 a^2 / (3 pi^2) with d = d_C(eta)."""
    c = constants()
    d = coulomb_distance(eta)
    return (4 * c.C_I ** 2 * c.C_II / d ** 2 * a * abs(math.log(a))
            + 20 * c.C_III / d ** 2 * a + 2 * a * a / (3 * math.pi ** 2))


def proposition_rhs(a: float, xi: float) -> float:
    """(2 C_I^2 C_II / d) max(1, 2/d) a|ln a|: effective-versus-Coulomb bound."""
    c = constants()
    d = coulomb_distance(xi)
    return 2 * c.C_I ** 2 * c.C_II / d * max(1.0, 2.0 / d) * a * abs(math.log(a))


# ---------------------------------------------------------------- mode couplings

def coulomb_mode_matrix(a: float, n: int, m: int, rho) -> np.ndarray:
    """V_nm(rho) = int chi_n chi_m / sqrt(rho^2 + z^2) dz (zero when n + m is odd)."""
    if n < 1 or m < 1:
        raise DomainError("mode indices must be >= 1")
    rho = np.asarray(rho, dtype=float)
    if np.any(rho <= 0):
        raise DomainError("coulomb_mode_matrix needs rho > 0")
    if (n + m) % 2:
        return np.zeros_like(rho)[()] if rho.ndim == 0 else np.zeros_like(rho)

    def one(r):
        f = lambda z: _mode_values(a, n, z) * _mode_values(a, m, z) / math.hypot(r, z)
        val, _ = integrate.quad(f, 0.0, 0.5 * a, points=[min(r, 0.25 * a)], limit=400,
                                epsabs=1e-14, epsrel=1e-11)
        return 2.0 * val

    out = np.vectorize(one)(rho)
    return out[()] if np.ndim(out) == 0 else out


def _z_rule(a, h):
    """Nodes and weights on (0, a/2) after z = c sinh t, resolving scales from h/4 to a/2."""
    c = min(0.25 * h, a / 8.0)
    T = math.asinh(0.5 * a / c)
    t, w = _gl_panels(T, 0.5)
    return c * np.sinh(t), w * c * np.cosh(t)


def _g(rho, z):
    """sqrt(rho^2 + z^2) - rho without cancellation."""
    return z * z / (np.sqrt(rho * rho + z * z) + rho)


def _cell_coulomb_integrals(a, grid, m, n_modes):
    """P[n, k, i] = int_cell int chi_n chi_k / r dz rho drho for the cells of sector m.

    Evaluated as delta_nk (hi - lo) + int chi_n chi_k (g(hi, z) - g(lo, z)) dz.
    """
    lo, hi = grid.cell_edges(m)
    z, wz = _z_rule(a, grid.h)
    chi = np.array([_mode_values(a, n, z) for n in range(1, n_modes + 1)])
    dg = _g(hi[None, :], z[:, None]) - _g(lo[None, :], z[:, None])  # (nz, ncell), <= 0
    out = np.zeros((n_modes, n_modes, lo.size))
    for n in range(n_modes):
        for k in range(n, n_modes):
            if (n + k) % 2:
                continue
            val = 2.0 * ((wz * chi[n] * chi[k]) @ dg)
            if n == k:
                val = val + (hi - lo)
            out[n, k] = val
            out[k, n] = val
    return out


# ---------------------------------------------------------------- discrete operators

@dataclass(eq=False)
class DiscreteOperator:
    """Symmetric sparse matrix of a radial operator, possibly with transverse-mode blocks.

    ``matrix`` acts on B^{1/2}-weighted values, ordered mode-major (all
    radial cells of mode 1, then mode 2, ...). ``threshold`` is the energy
    already subtracted (E_1 for the effective and slab operators).
    """

    kind: str
    grid: RadialGrid
    m: int
    n_modes: int
    matrix: sparse.csr_matrix
    threshold: float = 0.0
    slab: Optional[SlabParams] = None
    _lu: dict = field(default_factory=dict, repr=False)

    @property
    def n_radial(self) -> int:
        return self.grid.nodes(self.m).size

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def factor(self, xi: float):
        """Sparse LU of (matrix - xi); SpectralPointError if singular."""
        key = float(xi)
        if key not in self._lu:
            A = (self.matrix - key * sparse.identity(self.size, format="csr")).tocsc()
            try:
                lu = splu(A)
            except RuntimeError as exc:
                raise SpectralPointError(f"xi = {xi} is (numerically) an eigenvalue of {self.kind}") from exc
            # condition estimate from one seeded solve: distance to the spectrum
            # below ~1e-13 ||A|| cannot be told apart from an eigenvalue
            v = np.random.default_rng(0).standard_normal(self.size)
            growth = np.linalg.norm(lu.solve(v)) / np.linalg.norm(v)
            scale = abs(A).sum(axis=0).max()
            if not np.isfinite(growth) or growth * scale > 1e13:
                raise SpectralPointError(f"xi = {xi} is (numerically) an eigenvalue of {self.kind}")
            self._lu[key] = lu
        return self._lu[key]

    def solve(self, xi: float, v: np.ndarray) -> np.ndarray:
        return self.factor(xi).solve(v)

    def lowest_eigenvalues(self, k: int = 1) -> np.ndarray:
        """The k smallest eigenvalues (tridiagonal solver for single-mode operators)."""
        if self.n_modes == 1:
            d = self.matrix.diagonal()
            e = self.matrix.diagonal(1)
            return eigh_tridiagonal(d, e, select="i", select_range=(0, k - 1), eigvals_only=True)
        from scipy.sparse.linalg import eigsh
        lo = self.lowest_single_mode_bound()
        vals = eigsh(self.matrix.tocsc(), k=k, sigma=lo - 1.0, which="LM", return_eigenvectors=False)
        return np.sort(vals)

    def lowest_single_mode_bound(self) -> float:
        d = self.matrix.diagonal()
        off = np.abs(self.matrix - sparse.diags(d)).sum(axis=1).A1
        return float(np.min(d - off))  # Gershgorin lower bound

    def dense(self) -> np.ndarray:
        if self.size > DENSE_CAP:
            raise ResourceError(f"dense form of a {self.size}x{self.size} matrix exceeds the cap {DENSE_CAP}")
        return self.matrix.toarray()


def _laplacian_parts(grid, m):
    """Stiffness diagonal/off-diagonal and cell areas (over 2 pi) for sector m."""
    lo, hi = grid.cell_edges(m)
    idx = np.arange(0 if m == 0 else 1, grid.n)
    vol = 0.5 * (hi * hi - lo * lo)
    face_out = idx + 0.5  # rho_{i+1/2} / h
    face_in = np.where(idx > 0, idx - 0.5, 0.0)
    diag = face_out + face_in
    if m:
        diag = diag + m * m * np.log(hi / lo)
    off = -face_out[:-1]
    return diag, off, vol


def _symmetric_laplacian(grid, m):
    diag, off, vol = _laplacian_parts(grid, m)
    s = 1.0 / np.sqrt(vol)
    return diag * s * s, off * s[:-1] * s[1:], vol


def discretize(kind: str, grid: RadialGrid, slab: Optional[SlabParams] = None, m: int = 0,
               subtract_threshold: bool = True, cap: int = RADIAL_CAP) -> DiscreteOperator:
    """Radial finite-volume discretization of one angular-momentum sector.

    kind "coulomb2d": -Delta - 1/rho. kind "effective": -Delta + E_1 - V_eff.
    kind "slab": the block operator ((-Delta + E_n) delta_nk - V_nk) over
    slab.n_modes transverse modes. With subtract_threshold the energy E_1
    is removed from the effective and slab operators so that all kinds are
    compared on the same energy scale.
    """
    if grid.n > cap:
        raise ResourceError(f"{grid.n} radial cells exceed the cap {cap}")
    m = int(m)
    d, e, vol = _symmetric_laplacian(grid, m)
    nr = d.size
    if kind == "coulomb2d":
        lo, hi = grid.cell_edges(m)
        diag = d - (hi - lo) / vol
        mat = sparse.diags([e, diag, e], [-1, 0, 1], format="csr")
        return DiscreteOperator(kind, grid, m, 1, mat)
    if slab is None:
        raise DomainError(f"kind {kind!r} needs slab parameters")
    n_modes = 1 if kind == "effective" else int(slab.n_modes)
    if kind not in ("effective", "slab"):
        raise ValueError(f"unknown kind {kind!r}")
    if nr * n_modes > 4 * cap:
        raise ResourceError("mode-truncated slab matrix exceeds the size cap")
    a = slab.a
    P = _cell_coulomb_integrals(a, grid, m, n_modes)
    e1 = transverse_energy(a, 1)
    shift = e1 if subtract_threshold else 0.0
    lap = sparse.diags([e, d, e], [-1, 0, 1], format="csr")
    blocks = [[None] * n_modes for _ in range(n_modes)]
    for n in range(n_modes):
        for k in range(n_modes):
            pot = -P[n, k] / vol
            if n == k:
                blocks[n][k] = lap + sparse.diags(pot + transverse_energy(a, n + 1) - shift)
            elif np.any(pot):
                blocks[n][k] = sparse.diags(pot)
    mat = sparse.bmat(blocks, format="csr")
    return DiscreteOperator(kind, grid, m, n_modes, mat, threshold=shift, slab=slab)


def form_inequality_gap(grid: RadialGrid, a: float, m: int = 0) -> float:
    """Smallest eigenvalue of (H_eff - E_1) - H_C on the grid.

    The two matrices share the kinetic part, so the difference is the
    diagonal of cell-averaged 1/rho - V_eff, which is nonnegative exactly.
    """
    hc = discretize("coulomb2d", grid, m=m)
    he = discretize("effective", grid, SlabParams(a), m=m)
    diff = (he.matrix - hc.matrix).tocsr()
    off = abs(diff - sparse.diags(diff.diagonal())).max() if diff.nnz else 0.0
    if off > 0:
        from scipy.sparse.linalg import eigsh
        return float(eigsh(diff, k=1, which="SA", return_eigenvectors=False)[0])
    return float(diff.diagonal().min())


# ---------------------------------------------------------------- norms

def _power_norm(apply, n, tol=1e-8, restarts=3, seed=0, max_iter=20000):
    """Largest |eigenvalue| of a symmetric operator by power iteration with seeded restarts."""
    rng = np.random.default_rng(seed)
    best = 0.0
    for _ in range(restarts):
        v = rng.standard_normal(n)
        v /= np.linalg.norm(v)
        lam_prev = 0.0
        for it in range(max_iter):
            w = apply(v)
            lam = float(np.linalg.norm(w))
            if lam == 0.0:
                break
            v = w / lam
            if abs(lam - lam_prev) <= tol * lam:
                break
            lam_prev = lam
        else:
            raise ConvergenceError("power iteration stagnated before reaching its tolerance")
        best = max(best, lam)
    return best


def resolvent_diff(opA: DiscreteOperator, opB: DiscreteOperator, xi: float, tol: float = 1e-8,
                   restarts: int = 3, seed: int = 0) -> float:
    """|| (A - xi)^{-1} - P (B - xi)^{-1} P || with B zero-padded onto the extra modes of A.

    Both operators must share grid and sector; if B has more modes the
    roles are exchanged (the norm is symmetric).
    """
    if opA.grid != opB.grid or opA.m != opB.m:
        raise DomainError("resolvent_diff needs operators on the same grid and sector")
    if opB.n_modes > opA.n_modes:
        opA, opB = opB, opA
    nb = opB.size
    opA.factor(xi)
    opB.factor(xi)

    def apply(v):
        out = opA.solve(xi, v)
        out[:nb] -= opB.solve(xi, v[:nb])
        return out

    return _power_norm(apply, opA.size, tol=tol, restarts=restarts, seed=seed)


def hs_sandwich_norm(a: float, grid: Optional[RadialGrid] = None, tol: float = 1e-10) -> float:
    """|| (-Delta+1)^{-1/2} (1/rho - V_eff^a) (-Delta+1)^{-1/2} || on the discrete m = 0 sector.

    Computed as the top eigenvalue of D^{1/2} (-Delta_h + 1)^{-1} D^{1/2},
    D = diag(cell averages of 1/rho - V_eff^a) >= 0, which has the same
    nonzero spectrum.
    """
    if not 0 < a < 0.5:
        raise DomainError("hs_sandwich_norm needs 0 < a < 1/2")
    grid = default_grid(a, R=5.0) if grid is None else grid
    lo, hi = grid.cell_edges(0)
    P = _cell_coulomb_integrals(a, grid, 0, 1)[0, 0]
    d, e, vol = _symmetric_laplacian(grid, 0)
    dvals = np.maximum((hi - lo) - P, 0.0) / vol
    sq = np.sqrt(dvals)
    lu = splu(sparse.diags([e, d + 1.0, e], [-1, 0, 1], format="csc"))
    return _power_norm(lambda v: sq * lu.solve(sq * v), d.size, tol=tol, restarts=1)


def kato_check(grid: RadialGrid) -> float:
    """min eig of c sqrt(-Delta_h) - diag(<1/rho>) on the m = 0 sector (c the Kato constant).

    Uses a dense eigendecomposition of the discrete Laplacian; ResourceError
    above DENSE_CAP cells.
    """
    if grid.n > DENSE_CAP:
        raise ResourceError(f"{grid.n} cells exceed the dense cap {DENSE_CAP}")
    d, e, vol = _symmetric_laplacian(grid, 0)
    lam, vec = eigh_tridiagonal(d, e)
    root = (vec * np.sqrt(np.maximum(lam, 0.0))) @ vec.T
    lo, hi = grid.cell_edges(0)
    M = kato_constant() * root - np.diag((hi - lo) / vol)
    return float(eigh(M, eigvals_only=True, subset_by_index=[0, 0])[0])


# ---------------------------------------------------------------- convergence study

@dataclass(frozen=True)
class ConvergenceRecord:
    """Measured resolvent differences at one slab width, with the analytic bounds."""

    a: float
    xi: float
    resolvent_diff: float
    effective_diff: float
    slab_effective_diff: float
    theorem_rhs: float
    proposition_rhs: float
    admissible: bool
    respects_bounds: bool
    fit_c1: float = float("nan")
    fit_c2: float = float("nan")

    def __post_init__(self):
        if self.resolvent_diff < 0 or self.effective_diff < 0:
            raise DomainError("resolvent differences are nonnegative")


def worker_count(threads: Optional[int] = None) -> int:
    """Worker count: explicit value, else SPEC2D_THREADS, else 1."""
    if threads is None:
        threads = int(os.environ.get("SPEC2D_THREADS", "1"))
    return max(1, int(threads))


def _study_one(xi, a, grid, n_modes):
    hc = discretize("coulomb2d", grid)
    he = discretize("effective", grid, SlabParams(a))
    hs = discretize("slab", grid, SlabParams(a, n_modes))
    d_slab = resolvent_diff(hs, hc, xi)
    d_eff = resolvent_diff(he, hc, xi)
    d_se = resolvent_diff(hs, he, xi)
    adm = theorem_admissible(a, xi)
    rhs_t = theorem_rhs(a, xi)
    rhs_p = proposition_rhs(a, xi)
    ok = (d_slab <= rhs_t and d_eff <= rhs_p) if adm else True
    return ConvergenceRecord(a=a, xi=xi, resolvent_diff=d_slab, effective_diff=d_eff,
                             slab_effective_diff=d_se, theorem_rhs=rhs_t, proposition_rhs=rhs_p,
                             admissible=adm, respects_bounds=ok)


def fit_rate(a_values: Sequence[float], diffs: Sequence[float]):
    """Least-squares fit diff ~ c1 a|ln a| + c2 a."""
    a = np.asarray(a_values, dtype=float)
    A = np.stack([a * np.abs(np.log(a)), a], axis=1)
    coef, *_ = np.linalg.lstsq(A, np.asarray(diffs, dtype=float), rcond=None)
    return float(coef[0]), float(coef[1])


def convergence_study(xi: float, a_list: Sequence[float], grid: Optional[RadialGrid] = None,
                      n_modes: int = 4, threads: Optional[int] = None) -> list:
    """Resolvent differences (slab vs Coulomb, effective vs Coulomb, slab vs effective) per a.

    Entries outside the Theorem's admissible range are kept and flagged;
    ``respects_bounds`` is only meaningful for admissible entries.
    """
    if not -3 < xi < 0:
        raise DomainError("the study needs -3 < xi < 0")
    if coulomb_distance(xi) <= 0:
        raise SpectralPointError("xi lies in the spectrum of H_C")
    grid = RadialGrid(h=0.005, R=20.0) if grid is None else grid
    a_list = [float(a) for a in a_list]
    with ThreadPoolExecutor(max_workers=worker_count(threads)) as pool:
        recs = list(pool.map(lambda a: _study_one(xi, a, grid, n_modes), a_list))
    if len(recs) >= 2:
        c1, c2 = fit_rate([r.a for r in recs], [r.resolvent_diff for r in recs])
        recs = [ConvergenceRecord(**{**r.__dict__, "fit_c1": c1, "fit_c2": c2}) for r in recs]
    return recs
