"""Small array helpers shared by the special-function kernels."""

import numpy as np


def as_complex(*args):
    """Broadcast inputs to complex arrays; report whether all were scalars."""
    scalar = all(np.ndim(a) == 0 for a in args)
    arrs = np.broadcast_arrays(*[np.asarray(a, dtype=complex) for a in args])
    return [np.array(a, dtype=complex).ravel() for a in arrs], arrs[0].shape, scalar


def finish(values, shape, scalar):
    out = np.asarray(values).reshape(shape)
    if scalar:
        return out[()].item() if out.ndim == 0 else out
    return out


def nonpositive_integer(z, atol=0.0):
    """Mask of entries equal (within atol) to 0, -1, -2, ..."""
    z = np.asarray(z, dtype=complex)
    re = z.real
    return (np.abs(z.imag) <= atol) & (re <= atol) & (np.abs(re - np.round(re)) <= atol)
