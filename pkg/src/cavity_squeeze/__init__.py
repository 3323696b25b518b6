"""Collective spin-light interaction in an optical cavity.

Cavity response, light-induced shearing and Fisher information, Gaussian
spin states, the four-level extension, exact small-N oracles and scans.
"""
from .cavity import AtomParams, CavityParams, ProbePoint, map_lossless, probe_at
from .fourlevel import FourLevelPoint, NoSolutionError, RamanModel
from .gaussian import GaussianSpinState, SqueezeOutcome

__version__ = "0.1.0"

__all__ = ["AtomParams", "CavityParams", "ProbePoint", "map_lossless", "probe_at",
           "FourLevelPoint", "NoSolutionError", "RamanModel", "GaussianSpinState",
           "SqueezeOutcome", "__version__"]
