"""Whittaker functions, Laguerre polynomials, order-zero Bessel functions."""

import numpy as np
from scipy import special as sc

from ..errors import BranchCutError, DomainError, PoleError
from ._util import as_complex, finish, nonpositive_integer
from .hypergeometric import DEFAULT_POLICY, _kummer_m_array, _tricomi_u_logscaled


def sqrt_minus(z):
    """sqrt(-z) on the branch with positive real part.

    Raises BranchCutError for z on [0, inf), where no such branch exists.
    """
    (z,), shape, scalar = as_complex(z)
    if np.any((z.imag == 0) & (z.real >= 0)):
        raise BranchCutError("sqrt_minus: z lies on [0, inf)")
    return finish(np.sqrt(-z), shape, scalar)


def _check_whittaker_arg(z, name):
    if np.any((z.imag == 0) & (z.real <= 0)):
        raise BranchCutError(f"{name}: z on the branch cut (-inf, 0]")


def whittaker_m_logscaled(kap, mu, z, policy=DEFAULT_POLICY):
    """(mantissa, log_scale) with M_{kap,mu}(z) = mantissa * exp(log_scale)."""
    (kap, mu, z), shape, _ = as_complex(kap, mu, z)
    _check_whittaker_arg(z, "whittaker_m")
    b = 1 + 2 * mu
    if nonpositive_integer(b).any():
        raise PoleError("whittaker_m: 1 + 2 mu is a nonpositive integer")
    man = _kummer_m_array(mu - kap + 0.5, b, z, policy)
    lsc = -0.5 * z + (mu + 0.5) * np.log(z)
    return man.reshape(shape), lsc.reshape(shape)


def whittaker_m(kap, mu, z, policy=DEFAULT_POLICY):
    """Whittaker M_{kap,mu}(z) = e^{-z/2} z^{mu+1/2} M(mu-kap+1/2, 1+2mu, z)."""
    scalar = all(np.ndim(x) == 0 for x in (kap, mu, z))
    man, lsc = whittaker_m_logscaled(kap, mu, z, policy)
    out = man * np.exp(lsc)
    return out[()].item() if scalar else out


def is_terminating(kap, mu, atol=1e-13):
    """True where mu - kap + 1/2 is a nonpositive integer.

    There W_{kap,mu} is a Laguerre polynomial times e^{-z/2} z^{mu+1/2},
    which is the bound-state case of the radial Coulomb problem.
    """
    return nonpositive_integer(np.asarray(mu, complex) - np.asarray(kap, complex) + 0.5, atol=atol)


def whittaker_w_logscaled(kap, mu, z, policy=DEFAULT_POLICY):
    """(mantissa, log_scale) with W_{kap,mu}(z) = mantissa * exp(log_scale)."""
    (kap, mu, z), shape, _ = as_complex(kap, mu, z)
    _check_whittaker_arg(z, "whittaker_w")
    man, lsc = _tricomi_u_logscaled(mu - kap + 0.5, 1 + 2 * mu, z, policy)
    lsc = lsc - 0.5 * z + (mu + 0.5) * np.log(z)
    return man.reshape(shape), lsc.reshape(shape)


def whittaker_w(kap, mu, z, policy=DEFAULT_POLICY):
    """Whittaker W_{kap,mu}(z) = e^{-z/2} z^{mu+1/2} U(mu-kap+1/2, 1+2mu, z).

    When mu - kap + 1/2 is a nonpositive integer (see ``is_terminating``)
    the terminating Laguerre form of U is used.
    """
    scalar = all(np.ndim(x) == 0 for x in (kap, mu, z))
    man, lsc = whittaker_w_logscaled(kap, mu, z, policy)
    out = man * np.exp(lsc)
    return out[()].item() if scalar else out


def laguerre(n, alpha, x):
    """Generalized Laguerre polynomial L_n^{(alpha)}(x) by its recurrence."""
    n = int(n)
    if n < 0:
        raise DomainError("laguerre: n must be nonnegative")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return prev[()] if prev.ndim == 0 else prev
    cur = 1.0 + alpha - x
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 + alpha - x) * cur - (k + alpha) * prev) / (k + 1)
    return cur[()] if cur.ndim == 0 else cur


def bessel(kind, x):
    """Order-zero Bessel functions J0, I0, K0 of a real argument."""
    x = np.asarray(x, dtype=float)
    if kind == "J0":
        if np.any(x < 0):
            raise DomainError("J0 requires x >= 0")
        out = sc.j0(x)
    elif kind == "I0":
        if np.any(x < 0):
            raise DomainError("I0 requires x >= 0")
        out = sc.i0(x)
    elif kind == "K0":
        if np.any(x <= 0):
            raise DomainError("K0 requires x > 0")
        out = sc.k0(x)
    else:
        raise ValueError(f"unknown Bessel kind {kind!r}")
    return out[()] if out.ndim == 0 else out
