"""Desk-scale laboratory for spectral measures of quantized observables on
the sphere: exact section geometry, Toeplitz matrix assembly, local and
global spectral measures, 1/k expansion extraction, and a stationary-phase
sanity module."""

from . import assembly, asymptotics, cache, observables, phase, spectra, sphere
from .sphere import ModelPoint

__all__ = [
    "assembly",
    "asymptotics",
    "cache",
    "observables",
    "phase",
    "spectra",
    "sphere",
    "ModelPoint",
]
