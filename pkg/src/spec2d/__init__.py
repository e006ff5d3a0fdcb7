"""Spectral theory of the planar Coulomb Hamiltonian with a point interaction.

Submodules:
    specfun        gamma family, confluent hypergeometric and Whittaker functions
    spectral_core  bound states, point levels and Green functions (coordinate side)
    momentum_rep   eigenfunction transform, deficiency elements, momentum-side levels
    slab_limit     thin-slab effective potential, explicit constants, discrete checks
    cli            the ``spec2d`` command
"""

from . import momentum_rep, slab_limit, spectral_core, specfun
from .errors import (
    BracketError,
    BranchCutError,
    ConvergenceError,
    DomainError,
    IntegrabilityError,
    PoleError,
    ResourceError,
    Spec2DError,
    SpectralPointError,
    TruncationError,
)
from .spectral_core import FRIEDRICHS, SpectralParams, eigenvalue, green_full, point_levels

__version__ = "0.1.0"

__all__ = [
    "specfun", "spectral_core", "momentum_rep", "slab_limit",
    "Spec2DError", "PoleError", "BranchCutError", "DomainError", "ConvergenceError",
    "SpectralPointError", "BracketError", "TruncationError", "ResourceError", "IntegrabilityError",
    "FRIEDRICHS", "SpectralParams", "eigenvalue", "point_levels", "green_full",
]
