"""Confluent hypergeometric functions M(a, b, z) and U(a, b, z).

M is evaluated by its power series where the sum is well conditioned,
by the large-|z| asymptotic expansion (truncated at its smallest term),
and otherwise by Taylor continuation along a ray with the Kummer ODE
z w'' + (b - z) w' - a w = 0, started inside the series region.

U is evaluated by its asymptotic expansion for large |z|, by the M
connection formula for non-integer b, by the logarithmic series for
integer b, and otherwise from the Laplace integral (trapezoid rule after
the substitution s = e^u). For Re a <= 0 the integral is taken at a
shifted parameter and brought back with the three-term recurrence in a.
"""

from dataclasses import dataclass

import numpy as np

from ..errors import BranchCutError, ConvergenceError, PoleError
from ._util import as_complex, finish, nonpositive_integer
from .gamma import EULER_GAMMA, _log_gamma_array, digamma, rgamma

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class EvalPolicy:
    """Accuracy and regime-switch settings for the confluent kernels."""

    rel_tol: float = 1e-12
    max_terms: int = 4000
    switch_radius: float = 30.0

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if self.max_terms < 1:
            raise ValueError("max_terms must be at least 1")
        if not self.switch_radius > 0:
            raise ValueError("switch_radius must be positive")


DEFAULT_POLICY = EvalPolicy()


# ---------------------------------------------------------------- series

def _m_series(a, b, z, max_terms, need_der=True):
    """Power series of M and M'; returns (value, derivative, loss, converged).

    With ``need_der=False`` the derivative is skipped and returned as None.
    """
    term = np.ones_like(z)
    s = np.ones_like(z)
    sabs = np.ones(z.shape)
    if need_der:
        dterm = a / b
        ds = dterm.copy()
        dsabs = np.abs(dterm)
    done = np.zeros(z.shape, bool)
    zabs = np.abs(z)
    for n in range(max_terms):
        term = term * (a + n) * z / ((b + n) * (n + 1))
        s = s + term
        sabs = sabs + np.abs(term)
        small = np.abs(term) <= _EPS * np.abs(s) * 0.1
        if need_der:
            dterm = dterm * (a + 1 + n) * z / ((b + 1 + n) * (n + 1))
            ds = ds + dterm
            dsabs = dsabs + np.abs(dterm)
            small &= np.abs(dterm) <= _EPS * np.abs(ds) * 0.1 + 1e-300
        done = small & (n + 1 > zabs)
        if done.all():
            break
    with np.errstate(divide="ignore", invalid="ignore"):
        loss = sabs / np.abs(s)
        if need_der:
            loss = np.maximum(loss, dsabs / np.maximum(np.abs(ds), 1e-300))
    loss = np.where(np.isfinite(loss), loss, np.inf)
    return s, (ds if need_der else None), loss, done


def _asym_sum(p, q, w, max_terms):
    """sum_s (p)_s (q)_s / s! * w^s truncated at its smallest term.

    Returns (sum, last-included-term magnitude) per element.
    """
    s = np.ones_like(w)
    best = np.full(w.shape, np.inf)
    idx = np.arange(w.size)
    term = np.ones_like(w)
    pa, qa, wa, sa = p, q, w, s.copy()
    for n in range(max_terms):
        nxt = term * (pa + n) * (qa + n) * wa / (n + 1)
        anxt = np.abs(nxt)
        stop = (anxt > np.abs(term)) | (anxt <= _EPS * 0.1 * np.abs(sa))
        if stop.any():
            best[idx[stop]] = anxt[stop]
            s[idx[stop]] = sa[stop]
            keep = ~stop
            idx, term, pa, qa, wa = idx[keep], nxt[keep], pa[keep], qa[keep], wa[keep]
            sa = sa[keep] + term
        else:
            term = nxt
            sa = sa + nxt
        if idx.size == 0:
            break
    s[idx] = sa
    return s, best


def _m_asymptotic(a, b, z, max_terms=200):
    """Large-|z| expansion of M; returns (value, relative error estimate)."""
    log_pref = np.zeros_like(z)
    log_pref = _log_gamma_array(b)
    ra = rgamma(a)
    rba = rgamma(b - a)
    s1, e1 = _asym_sum(b - a, 1 - a, 1.0 / z, max_terms)
    s2, e2 = _asym_sum(a, a - b + 1, -1.0 / z, max_terms)
    lz = np.log(z)
    dom = ra * np.exp(log_pref + z + (a - b) * lz)
    sgn = np.sign(z.imag)
    phase = np.where(sgn > 0, np.exp(1j * np.pi * a),
                     np.where(sgn < 0, np.exp(-1j * np.pi * a), np.cos(np.pi * a)))
    rec = rba * phase * np.exp(log_pref - a * lz)
    val = dom * s1 + rec * s2
    err = np.abs(dom) * e1 + np.abs(rec) * e2
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = err / np.abs(val)
    rel = np.where(np.isfinite(rel), rel, np.inf)
    return val, rel


def _u_asymptotic(a, b, z, max_terms=400):
    """Large-|z| expansion of U; returns (value, relative error estimate)."""
    s, e = _asym_sum(a, a - b + 1, -1.0 / z, max_terms)
    val = np.exp(-a * np.log(z)) * s
    rel = e / np.maximum(np.abs(s), 1e-300)
    return val, rel


# ---------------------------------------------------------------- ODE continuation

def _taylor_step(a, b, z0, w, dw, h, max_terms=600):
    d_prev = w
    d_cur = dw * h
    s = d_prev + d_cur
    ds = d_cur.copy()
    h2 = h * h
    for n in range(max_terms):
        d_next = ((n + a) * d_prev * h2 - (n + 1) * (n + b - z0) * d_cur * h) / (z0 * (n + 1) * (n + 2))
        s = s + d_next
        ds = ds + (n + 2) * d_next
        if n > 4 and np.all(np.abs(d_next) + np.abs(d_cur) <= 1e-17 * (np.abs(s) + np.abs(ds)) + 1e-300):
            break
        d_prev, d_cur = d_cur, d_next
    else:
        raise ConvergenceError("Taylor continuation step did not converge")
    return s, ds / h


def _march(a, b, z_from, w, dw, z_to, step_scale=2.5, max_steps=20000):
    """Integrate the Kummer ODE along straight segments from z_from to z_to."""
    z0 = z_from.astype(complex).copy()
    w = w.copy()
    dw = dw.copy()
    for _ in range(max_steps):
        active = z0 != z_to
        if not active.any():
            return w, dw
        idx = np.nonzero(active)[0]
        zc = z0[idx]
        rem = z_to[idx] - zc
        dist = np.abs(rem)
        za = np.abs(zc)
        rate = np.maximum(1.0, np.sqrt(np.abs(a[idx]) / za))
        rate = np.maximum(rate, np.abs(b[idx]) / za)
        hlen = np.minimum(np.minimum(0.5 * za, step_scale / rate), dist)
        last = hlen >= dist
        h = rem / dist * hlen
        wn, dwn = _taylor_step(a[idx], b[idx], zc, w[idx], dw[idx], h)
        w[idx] = wn
        dw[idx] = dwn
        z0[idx] = np.where(last, z_to[idx], zc + h)
    raise ConvergenceError("ODE continuation exceeded the step budget")


# ---------------------------------------------------------------- M

def _kummer_m_core(a, b, z, policy, need_der=True):
    """M and M' for Re z >= 0 (after the Kummer transform).

    The derivative is None when ``need_der`` is False.
    """
    n = z.size
    val = np.empty(n, complex)
    der = np.empty(n, complex)
    todo = np.ones(n, bool)
    loss_cap = max(policy.rel_tol / _EPS, 10.0)

    try_series = np.abs(z) <= max(policy.switch_radius, 2.0 * np.abs(b).max(initial=0.0) + 5.0)
    idx = np.nonzero(try_series)[0]
    if idx.size:
        s, ds, loss, conv = _m_series(a[idx], b[idx], z[idx], policy.max_terms, need_der)
        ok = conv & (loss <= loss_cap)
        val[idx[ok]] = s[ok]
        if need_der:
            der[idx[ok]] = ds[ok]
        todo[idx[ok]] = False

    idx = np.nonzero(todo & (np.abs(z) >= 0.5 * policy.switch_radius))[0]
    if idx.size:
        v, rel = _m_asymptotic(a[idx], b[idx], z[idx])
        ok = rel <= policy.rel_tol
        if need_der:
            dv, drel = _m_asymptotic(a[idx] + 1, b[idx] + 1, z[idx])
            ok &= drel <= policy.rel_tol
            der[idx[ok]] = dv[ok] * a[idx[ok]] / b[idx[ok]]
        val[idx[ok]] = v[ok]
        todo[idx[ok]] = False

    idx = np.nonzero(todo)[0]
    if idx.size:
        ai, bi, zi = a[idx], b[idx], z[idx]
        # keep |a| r0 small so the starting series is well conditioned
        amag = np.maximum(np.abs(ai), 1.0)
        r0 = np.minimum(np.abs(zi), np.minimum(2.0, np.minimum(2.0 / np.sqrt(amag), 4.0 / amag)))
        start = zi / np.abs(zi) * r0
        s, ds, loss, conv = _m_series(ai, bi, start, policy.max_terms)
        if not conv.all():
            raise ConvergenceError("kummer_m: series failed at continuation start")
        w, dw = _march(ai, bi, start, s, ds, zi)
        val[idx] = w
        der[idx] = dw
    return val, (der if need_der else None)


def _kummer_m_array(a, b, z, policy):
    if nonpositive_integer(b).any():
        bad = int(np.round(b[nonpositive_integer(b)][0].real))
        raise PoleError(f"kummer_m: b = {bad} is a nonpositive integer", point=bad)
    out = np.empty_like(z)
    neg = z.real < 0
    if (~neg).any():
        out[~neg] = _kummer_m_core(a[~neg], b[~neg], z[~neg], policy, need_der=False)[0]
    if neg.any():
        # Kummer transform M(a,b,z) = e^z M(b-a,b,-z)
        zn = z[neg]
        out[neg] = np.exp(zn) * _kummer_m_core(b[neg] - a[neg], b[neg], -zn, policy, need_der=False)[0]
    return out


def kummer_m(a, b, z, policy=DEFAULT_POLICY):
    """Kummer's confluent hypergeometric function M(a, b, z) = 1F1(a; b; z)."""
    (a, b, z), shape, scalar = as_complex(a, b, z)
    return finish(_kummer_m_array(a, b, z, policy), shape, scalar)


# ---------------------------------------------------------------- U

def _u_terminating(p, b, z):
    """U(-p, b, z) = (-1)^p (b)_p M(-p, b, z), a polynomial of degree p."""
    out = np.empty_like(z)
    for i in range(z.size):
        pi = int(p[i])
        coef = 1.0 + 0j
        total = 1.0 + 0j
        term = 1.0 + 0j
        for n in range(pi):
            term = term * (-pi + n) * z[i] / ((b[i] + n) * (n + 1))
            total += term
        for n in range(pi):
            coef *= b[i] + n
        out[i] = (-1) ** pi * coef * total
    return out


def _u_log_series_scaled(a, b_int, z, max_terms):
    """z^(b-1) U(a, b, z) for integer b = n+1 >= 1 by the logarithmic series.

    Returns (scaled value, loss estimate).
    """
    n = int(b_int) - 1
    ra = rgamma(a)
    # finite part: (1/Gamma(a)) sum_{k=1}^{n} (k-1)! (1-a+k)_{n-k} / (n-k)! z^(n-k)
    fin = np.zeros_like(z)
    finabs = np.zeros(z.shape)
    c = np.ones_like(a)          # (1-a+k)_{n-k}, built from k = n downwards
    logfac = 0.0                 # ln((k-1)!/(n-k)!)
    lf = np.array([_log_gamma_array(np.array([k], complex))[0].real for k in range(1, n + 2)])
    zpow = np.ones_like(z)       # z^(n-k)
    for k in range(n, 0, -1):
        if k < n:
            c = c * (1 - a + k)
            zpow = zpow * z
        logfac = lf[k - 1] - lf[n - k]
        t = np.exp(logfac) * c * zpow
        fin = fin + t
        finabs = finabs + np.abs(t)
    fin = fin * ra
    finabs = finabs * np.abs(ra)
    # logarithmic part: (-1)^(n+1) / (n! Gamma(a-n)) * z^n sum_k (a)_k/((n+1)_k k!) z^k
    #                   * [ln z + psi(a+k) - psi(1+k) - psi(n+k+1)]
    ran = rgamma(a - n)
    lz = np.log(z)
    fac_n = np.exp(_log_gamma_array(np.array([n + 1], complex))[0]).real
    term = np.ones_like(z)
    psi_a = digamma(a) if not nonpositive_integer(a).any() else None
    if psi_a is None:
        # a nonpositive integer is handled by the terminating branch upstream
        raise PoleError("log series requires non-terminating a")
    psi_1 = -EULER_GAMMA
    psi_n = float(digamma(n + 1).real)
    acc = np.zeros_like(z)
    accabs = np.zeros(z.shape)
    zabs = np.abs(z)
    for k in range(max_terms):
        t = term * (lz + psi_a - psi_1 - psi_n)
        acc = acc + t
        accabs = accabs + np.abs(t)
        term = term * (a + k) * z / ((n + 1 + k) * (k + 1))
        psi_a = psi_a + 1.0 / (a + k)
        psi_1 += 1.0 / (k + 1)
        psi_n += 1.0 / (n + k + 1)
        if k > zabs.max() and np.all(np.abs(term) * (np.abs(lz) + np.abs(psi_a) + 40) <= 1e-17 * (np.abs(acc) + 1e-300)):
            break
    pref = (-1) ** (n + 1) * ran / fac_n * z ** n
    logp = pref * acc
    val = fin + logp
    with np.errstate(divide="ignore", invalid="ignore"):
        loss = (finabs + np.abs(pref) * accabs) / np.abs(val)
    loss = np.where(np.isfinite(loss), loss, np.inf)
    return val, loss


def _u_connection(a, b, z, policy):
    """U via the M connection formula for non-integer b."""
    m1 = _kummer_m_array(a, b, z, policy)
    m2 = _kummer_m_array(a - b + 1, 2 - b, z, policy)
    g1 = rgamma(a - b + 1) * np.exp(_log_gamma_array(1 - b))
    g2 = rgamma(a) * np.exp(_log_gamma_array(b - 1))
    t1 = g1 * m1
    t2 = g2 * np.exp((1 - b) * np.log(z)) * m2
    val = t1 + t2
    with np.errstate(divide="ignore", invalid="ignore"):
        loss = (np.abs(t1) + np.abs(t2)) / np.abs(val)
    return val, np.where(np.isfinite(loss), loss, np.inf)


def _u_integral_logscaled(a, b, z):
    """U(a,b,z) from the Laplace integral, for Re a > 0.

    With s = e^u the representation
    Gamma(a) z^(b-1) U(a,b,z) = int_0^inf e^-s s^(a-1) (z+s)^(b-a-1) ds
    becomes an integral over the real line whose integrand is analytic in
    the strip |Im u| < pi/2, so the trapezoid rule converges
    exponentially. Returns (mantissa, log_scale).
    """
    man = np.empty_like(z)
    lsc = np.empty_like(z)
    for i in range(z.size):
        ai, ci, zi = a[i], b[i] - a[i] - 1, z[i]

        def logf(u):
            return ai * u - np.exp(u) + ci * np.log(zi + np.exp(u))

        coarse = np.linspace(-60.0 / min(ai.real, 1.0) - 40.0, 8.0, 2000)
        lf = logf(coarse).real
        peak = lf.max()
        keep = np.nonzero(lf >= peak - 42.0)[0]
        lo = coarse[max(keep[0] - 1, 0)]
        hi = coarse[min(keep[-1] + 1, coarse.size - 1)]
        h = min(0.05, 0.5 / (1.0 + abs(ai.imag) + 0.1 * abs(ci)))
        u = np.arange(lo, hi + h, h)
        man[i] = h * np.sum(np.exp(logf(u) - peak))
        lsc[i] = peak
    lsc = lsc - _log_gamma_array(a) - (b - 1) * np.log(z)
    return man, lsc


def _tricomi_u_logscaled(a, b, z, policy):
    """Return (mantissa, log_scale) with U(a,b,z) = mantissa * exp(log_scale)."""
    if np.any((z.imag == 0) & (z.real <= 0)):
        raise BranchCutError("tricomi_u: z on the branch cut (-inf, 0]")
    n = z.size
    man = np.empty(n, complex)
    lsc = np.zeros(n, complex)
    todo = np.ones(n, bool)

    term = nonpositive_integer(a, atol=1e-13)
    if term.any():
        idx = np.nonzero(term)[0]
        p = np.round(-a[idx].real)
        man[idx] = _u_terminating(p, b[idx], z[idx])
        todo[idx] = False

    b_round = np.round(b.real)
    b_int = (np.abs(b - b_round) <= 1e-14) & (b_round >= 1)
    loss_cap = max(policy.rel_tol / _EPS, 10.0)

    # asymptotic regime
    idx = np.nonzero(todo & (np.abs(z) >= 0.5 * policy.switch_radius))[0]
    if idx.size:
        v, rel = _u_asymptotic(a[idx], b[idx], z[idx])
        ok = rel <= policy.rel_tol
        man[idx[ok]] = v[ok]
        todo[idx[ok]] = False

    # non-integer b: connection formula
    idx = np.nonzero(todo & ~b_int)[0]
    if idx.size:
        v, loss = _u_connection(a[idx], b[idx], z[idx], policy)
        ok = loss <= loss_cap
        man[idx[ok]] = v[ok]
        todo[idx[ok]] = False

    # integer b: logarithmic series
    for bv in np.unique(b_round[todo & b_int]):
        idx = np.nonzero(todo & b_int & (b_round == bv) & (np.abs(z) <= policy.switch_radius))[0]
        if idx.size == 0:
            continue
        v, loss = _u_log_series_scaled(a[idx], bv, z[idx], policy.max_terms)
        ok = loss <= loss_cap
        good = idx[ok]
        man[good] = v[ok]
        lsc[good] = -(bv - 1) * np.log(z[good])
        todo[good] = False

    # Laplace integral for Re a > 0
    idx = np.nonzero(todo & (a.real > 0.05))[0]
    if idx.size:
        man[idx], lsc[idx] = _u_integral_logscaled(a[idx], b[idx], z[idx])
        todo[idx] = False

    # Re a <= 0.05: start the integral at a + p with Re(a + p) > 1 and run the
    # three-term recurrence in a downwards, the stable direction for U
    idx = np.nonzero(todo)[0]
    if idx.size:
        ai, bi, zi = a[idx], b[idx], z[idx]
        p = np.ceil(1.05 - ai.real).astype(int)
        top = ai + p
        m1, l1 = _u_integral_logscaled(top, bi, zi)
        m2, l2 = _u_integral_logscaled(top + 1, bi, zi)
        u_hi = m2 * np.exp(l2 - l1)
        u_cur = m1
        cur = top.copy()
        for step in range(int(p.max())):
            go = step < p
            nxt = (2 * cur - bi + zi) * u_cur - cur * (cur - bi + 1) * u_hi
            u_hi = np.where(go, u_cur, u_hi)
            u_cur = np.where(go, nxt, u_cur)
            cur = np.where(go, cur - 1, cur)
        man[idx] = u_cur
        lsc[idx] = l1
    return man, lsc


def tricomi_u(a, b, z, policy=DEFAULT_POLICY):
    """Tricomi's confluent hypergeometric function U(a, b, z), principal branch."""
    (a, b, z), shape, scalar = as_complex(a, b, z)
    man, lsc = _tricomi_u_logscaled(a, b, z, policy)
    return finish(man * np.exp(lsc), shape, scalar)
