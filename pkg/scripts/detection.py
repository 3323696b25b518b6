"""Chirped two-colour readout of the four-level system: sigma_d^2 versus detected photons.

N = 1000, eta = 1.8, q = 0.15, Raman branching 2/3, compensated cavity.
"""
import argparse
import math

from cavity_squeeze.fourlevel import RamanModel
from cavity_squeeze.sweep import DetectionContext, detection_minimum, detection_scan, log_grid

from _common import yb_atoms, yb_lossy

ap = argparse.ArgumentParser(description=__doc__)
ap.add_argument("--out", default="detection.csv")
ap.add_argument("--branching", type=float, default=2.0 / 3.0)
args = ap.parse_args()

fixed = DetectionContext(yb_lossy(), yb_atoms(), 1000.0, 0.15, RamanModel(branching=args.branching))
r = detection_scan(fixed, log_grid(1.0, 1e6, 16))
with open(args.out, "w", newline="") as fh:
    r.to_csv(fh)
n, s = detection_minimum(fixed)
print(f"minimum sigma_d^2 = {10 * math.log10(s):.2f} dB at n_d = {n:.0f}")
print(f"wrote {args.out}")
