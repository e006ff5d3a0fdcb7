"""Gamma-family functions on the complex plane.

Every routine shifts its argument into the right half-plane with the
functional recurrence, evaluates an asymptotic series there, and uses
the reflection formula for arguments with negative real part.
"""

import numpy as np

from ..errors import PoleError
from ._util import as_complex, finish, nonpositive_integer

EULER_GAMMA = 0.57721566490153286061
_LOG_SQRT_2PI = 0.91893853320467274178

# B_{2k} for k = 1..10
_BERNOULLI = np.array([
    1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30, 5.0 / 66, -691.0 / 2730,
    7.0 / 6, -3617.0 / 510, 43867.0 / 798, -174611.0 / 330,
])
_SHIFT_TO = 16.0


def _check_poles(z, name):
    bad = nonpositive_integer(z)
    if bad.any():
        p = int(np.round(z[bad][0].real))
        raise PoleError(f"{name} has a pole at z = {p}", point=p)


def _shift_count(z):
    return np.maximum(0, np.ceil(_SHIFT_TO - z.real)).astype(int)


def _log_gamma_array(z):
    n = _shift_count(z)
    acc = np.zeros_like(z)
    w = z.copy()
    for k in range(int(n.max(initial=0))):
        sel = k < n
        acc[sel] += np.log(w[sel])
        w[sel] += 1.0
    inv = 1.0 / w
    inv2 = inv * inv
    series = np.zeros_like(z)
    for k in range(len(_BERNOULLI), 0, -1):
        b = _BERNOULLI[k - 1]
        series = series * inv2 + b / (2 * k * (2 * k - 1))
    stirling = (w - 0.5) * np.log(w) - w + _LOG_SQRT_2PI + series * inv
    return stirling - acc


def log_gamma(z):
    """Principal branch of log Gamma(z).

    The branch cut follows the negative real axis, matching the usual
    convention where log Gamma is analytic off (-inf, 0].
    """
    (z,), shape, scalar = as_complex(z)
    _check_poles(z, "log_gamma")
    return finish(_log_gamma_array(z), shape, scalar)


def gamma(z):
    """Gamma(z) for complex z, computed as exp(log_gamma(z))."""
    (z,), shape, scalar = as_complex(z)
    _check_poles(z, "gamma")
    out = np.exp(_log_gamma_array(z))
    real = (z.imag == 0)
    out[real] = out[real].real
    return finish(out, shape, scalar)


def rgamma(z):
    """1/Gamma(z); entire, so it returns 0 at the poles of Gamma."""
    (z,), shape, scalar = as_complex(z)
    out = np.zeros_like(z)
    ok = ~nonpositive_integer(z)
    out[ok] = np.exp(-_log_gamma_array(z[ok]))
    real = ok & (z.imag == 0)
    out[real] = out[real].real
    return finish(out, shape, scalar)


def _pi_cot_pi(z):
    """pi*cot(pi*z), stable for large |Im z|."""
    x = z - np.round(z.real)
    up = x.imag >= 0
    xs = np.where(up, x, np.conj(x))
    q = np.exp(2j * np.pi * xs)
    val = 1j * (q + 1.0) / (q - 1.0)
    out = np.where(up, val, np.conj(val))
    small = np.abs(x.imag) < 1.0
    out[small] = np.cos(np.pi * x[small]) / np.sin(np.pi * x[small])
    return np.pi * out


def _pi2_csc2_pi(z):
    """pi^2 / sin^2(pi*z), stable for large |Im z|."""
    x = z - np.round(z.real)
    up = x.imag >= 0
    xs = np.where(up, x, np.conj(x))
    q = np.exp(2j * np.pi * xs)
    val = -4.0 * q / (q - 1.0) ** 2
    out = np.where(up, val, np.conj(val))
    small = np.abs(x.imag) < 1.0
    out[small] = 1.0 / np.sin(np.pi * x[small]) ** 2
    return np.pi ** 2 * out


def _digamma_right(z):
    n = _shift_count(z)
    acc = np.zeros_like(z)
    w = z.copy()
    for k in range(int(n.max(initial=0))):
        sel = k < n
        acc[sel] += 1.0 / w[sel]
        w[sel] += 1.0
    inv2 = 1.0 / (w * w)
    series = np.zeros_like(z)
    for k in range(len(_BERNOULLI), 0, -1):
        series = series * inv2 + _BERNOULLI[k - 1] / (2 * k)
    return np.log(w) - 0.5 / w - series * inv2 - acc


def digamma(z):
    """Psi(z) = Gamma'(z)/Gamma(z)."""
    (z,), shape, scalar = as_complex(z)
    _check_poles(z, "digamma")
    out = np.empty_like(z)
    left = z.real < 0.5
    out[~left] = _digamma_right(z[~left])
    zl = z[left]
    out[left] = _digamma_right(1.0 - zl) - _pi_cot_pi(zl)
    real = z.imag == 0
    out[real] = out[real].real
    return finish(out, shape, scalar)


def _trigamma_right(z):
    n = _shift_count(z)
    acc = np.zeros_like(z)
    w = z.copy()
    for k in range(int(n.max(initial=0))):
        sel = k < n
        acc[sel] += 1.0 / (w[sel] * w[sel])
        w[sel] += 1.0
    inv = 1.0 / w
    inv2 = inv * inv
    series = np.zeros_like(z)
    for k in range(len(_BERNOULLI), 0, -1):
        series = series * inv2 + _BERNOULLI[k - 1]
    return inv + 0.5 * inv2 + series * inv2 * inv + acc


def trigamma(z):
    """Psi'(z), the first derivative of the digamma function."""
    (z,), shape, scalar = as_complex(z)
    _check_poles(z, "trigamma")
    out = np.empty_like(z)
    left = z.real < 0.5
    out[~left] = _trigamma_right(z[~left])
    zl = z[left]
    out[left] = _pi2_csc2_pi(zl) - _trigamma_right(1.0 - zl)
    real = z.imag == 0
    out[real] = out[real].real
    return finish(out, shape, scalar)
