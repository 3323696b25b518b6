"""Chirp (beat-note) Fisher information versus cavity shift 2(omega_c - omega_a)/kappa.

The chirp is centred on the |up> line and omega_m is held at its optimum for
the symmetric (compensated) cavity; values are normalized to that point.
"""
import math

import numpy as np

from cavity_squeeze.fourlevel import FourLevelPoint, compensation_detuning
from cavity_squeeze.qfi import DetectionSetup, chirp_fisher
from cavity_squeeze.spinlight import PhotonBudget
from cavity_squeeze.sweep import _chirp_probe, best_chirp

from _common import KAPPA, yb_atoms, yb_core

cav = yb_core()
unit = PhotonBudget(1.0, math.nan, math.nan, None, "n_in")
for eta_down in (0.0, 0.6, 1.8):
    atoms = yb_atoms(eta_down)
    dc = compensation_detuning(cav, atoms, 500)[0] if eta_down else 0.0
    ref = FourLevelPoint.at(cav, atoms, 1000, 0.0, -dc)
    setup = DetectionSetup(omega_m=best_chirp(cav, atoms, ref))
    f0 = chirp_fisher(cav, atoms, _chirp_probe(ref), setup, unit, ref).measured
    print(f"eta_down = {eta_down}: symmetric point at shift {-2 * dc / KAPPA:.3f}")
    for s in np.linspace(-1.0, 1.0, 11):
        flp = FourLevelPoint.at(cav, atoms, 1000, 0.0, -dc + s * KAPPA / 2)
        f = chirp_fisher(cav, atoms, _chirp_probe(flp), setup, unit, flp).measured
        print(f"  shift {s:+.1f} from symmetric: F/F0 = {f / f0:.3f}")
