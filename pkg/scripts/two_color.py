"""Two-colour pulse pair cancelling the atom-number dependence of Q and the phase.

Solves at omega_l1 = 2 pi x 7.333 MHz and scans omega_l1 above the upper Rabi peak.
"""
from cavity_squeeze.fourlevel import NoSolutionError, rabi_peaks, two_color_solve

from _common import MHZ, yb_atoms, yb_core

cav, atoms = yb_core(), yb_atoms()
off = -0.34 * MHZ
t = two_color_solve(cav, atoms, 1000, 7.333 * MHZ, off)
print(f"omega_l1 = 7.333 MHz: omega_l2 = {t.omega_l2 / MHZ:.3f} MHz, gamma = {t.gamma_ratio:.3f}, "
      f"Q/F = {t.q_over_f:.2f}, residuals {t.residual_q:.1e} {t.residual_phi:.1e}")
lo, hi = rabi_peaks(cav, atoms, 1000, off)
print(f"Rabi peaks {lo / MHZ:.3f}, {hi / MHZ:.3f} MHz")
print(" omega_l1   omega_l2    gamma     Q/F")
for k in range(1, 21):
    w1 = hi + 0.5 * k * MHZ
    try:
        t = two_color_solve(cav, atoms, 1000, w1, off)
        print(f"{w1 / MHZ:9.3f} {t.omega_l2 / MHZ:9.3f} {t.gamma_ratio:8.3f} {t.q_over_f:8.2f}")
    except NoSolutionError:
        print(f"{w1 / MHZ:9.3f}   no solution")
