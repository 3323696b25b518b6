"""Lossy two-mirror cavity -> lossless equivalent: mapped powers and field agreement."""
import math

import numpy as np

from cavity_squeeze.cavity import AtomParams, ProbePoint, free_space_cooperativity, lossy_fields, map_lossless

from _common import GAMMA, yb_lossy

cav = yb_lossy()
eq = map_lossless(cav)
for k, v in eq.powers().items():
    print(f"{k:4s} {v:.6g}")
atoms = AtomParams(gamma=GAMMA, eta=1.8)
p = ProbePoint(x_a=3.0, x_c=1.0, n_up=200.0)
kL = np.linspace(0.0, math.pi, 1000)
eta_fs = free_space_cooperativity(cav, atoms)
lossy = lossy_fields(cav, atoms, p, kL, eta_fs)
err = max(float(np.max(np.abs(a - b))) for a, b in zip((lossy.e_c, lossy.e_t, lossy.e_r), eq.fields(atoms, p, kL, eta_fs)))
print(f"max |lossy - mapped| field over 1000 kL points: {err:.2e}")
