"""Wineland gain versus atomic detuning at N_up eta = 900, n_sc = 400, kappa/Gamma = 2.8.

Writes the scan as CSV (default dressed_scan.csv) and prints the Q sign changes
and the best gain on each side of the atomic line.
"""
import argparse

import numpy as np

from cavity_squeeze.cavity import dressed_resonances
from cavity_squeeze.sweep import Context, ScanSpec, wineland_scan

from _common import resonant

ap = argparse.ArgumentParser(description=__doc__)
ap.add_argument("--out", default="dressed_scan.csv")
ap.add_argument("--points", type=int, default=3000)
ap.add_argument("--no-curvature", action="store_true")
args = ap.parse_args()

cav, atoms = resonant()
ctx = Context(cav, atoms, 1000, n_sc=400.0)
r = wineland_scan(ScanSpec("x_a", tuple(np.linspace(-150, 150, args.points)), ctx, not args.no_curvature))
with open(args.out, "w", newline="") as fh:
    r.to_csv(fh)
x, q, xi2 = r.column("value"), r.column("Q"), r.column("xi2")
flips = [0.5 * (x[i] + x[i + 1]) for i in np.nonzero(np.sign(q[:-1]) * np.sign(q[1:]) < 0)[0]]
print("dressed resonances (closed form):", ", ".join(f"{v:.3f}" for v in dressed_resonances(cav, atoms, 500).x_a))
print("Q sign changes:", ", ".join(f"{v:.2f}" for v in flips))
for name, side in (("red", x < 0), ("blue", x > 0)):
    i = np.argmax(np.where(side, 1 / xi2, 0))
    print(f"{name} side: best gain {10 * np.log10(1 / xi2[i]):.2f} dB at x_a = {x[i]:.2f}")
print(f"wrote {args.out}")
