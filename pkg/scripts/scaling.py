"""Optimal Wineland gain and detuning versus atom number, N = 500..8000.

Fits gain ~ N^a with and without Bloch-sphere curvature, and x_a* ~ N^b.
"""
from cavity_squeeze.sweep import Context, optimize_gain, scaling_fit

from _common import resonant

cav, atoms = resonant()
Ns = [500.0 * k for k in range(1, 17)]
for curvature in (False, True):
    rows = [(N, optimize_gain(Context(cav, atoms, N, n_sc=1.0), N, curvature)) for N in Ns]
    print(f"curvature={curvature}")
    print("      N      x_a*     n_sc*      p*   gain (dB)")
    for N, o in rows:
        print(f"{N:7.0f} {o.x_a:9.2f} {o.n_sc:9.1f} {o.n_sc / N:7.3f} {10 * __import__('math').log10(o.gain):10.2f}")
    g = scaling_fit([(N, o.gain) for N, o in rows], exclude_breakdown=curvature)
    x = scaling_fit([(N, o.x_a) for N, o in rows])
    print(f"gain exponent {g.exponent:.3f} +- {g.stderr:.3f}, excluded {g.excluded}; "
          f"x_a* exponent {x.exponent:.3f} +- {x.stderr:.3f}\n")
