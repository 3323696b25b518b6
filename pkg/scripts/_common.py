"""Shared parameters for the experiment scripts (Yb-171 cavity, frequencies angular)."""
import math

from cavity_squeeze.cavity import AtomParams, CavityParams, map_lossless

TWO_PI = 2.0 * math.pi
MHZ = TWO_PI * 1e6
GAMMA = TWO_PI * 184e3
KAPPA = TWO_PI * 520e3


def yb_lossy():
    return CavityParams(T1=30e-6, L1=30e-6, T2=196e-6, L2=227.3e-6, finesse=13.0e3, kappa=KAPPA)


def yb_core():
    return map_lossless(yb_lossy()).cavity(like=yb_lossy())


def yb_atoms(eta_down=None):
    kw = {} if eta_down is None else {"eta_down": eta_down}
    return AtomParams(gamma=GAMMA, eta=1.8, b=230.0, **kw)


def resonant():
    """kappa/Gamma = 2.8, eta = 1.8: N_up eta = 900 at N = 1000."""
    return CavityParams(T1=30e-6, T2=453.3e-6, kappa=2.8 * GAMMA), AtomParams(gamma=GAMMA, eta=1.8)
