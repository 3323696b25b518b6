"""Four-level atoms: a second, Zeeman-shifted transition from |down>.

Per-input-photon quantities are used throughout (n_in = 1 unless given).
Derivatives with respect to S_z use N_up = S + S_z, N_down = S - S_z; those
with respect to the total atom number N keep N_up = N_down = N/2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .cavity import AtomParams, CavityParams, coupling_g, loaded_denominator, lorentzians


class NoSolutionError(RuntimeError):
    """A solver found no root in the requested window."""


@dataclass(frozen=True)
class FourLevelPoint:
    x_a: float
    x_c: float
    b: float
    n_up: float
    n_down: float
    eta_up: float
    eta_down: float

    def __post_init__(self):
        if self.n_up < 0 or self.n_down < 0:
            raise ValueError("atom numbers must be non-negative")
        if self.eta_up < 0 or self.eta_down < 0:
            raise ValueError("cooperativities must be non-negative")

    @property
    def N(self):
        return self.n_up + self.n_down

    @property
    def x_b(self):
        return self.x_a + self.b

    @classmethod
    def at(cls, cav: CavityParams, atoms: AtomParams, N, omega_l, cavity_offset=0.0, n_up=None):
        """Probe at angular detuning omega_l from the |up> line; omega_c - omega_a = cavity_offset."""
        if atoms.b is None:
            raise ValueError("four-level model needs the Zeeman splitting (b or delta_z)")
        n_up = N / 2.0 if n_up is None else n_up
        return cls(x_a=2.0 * omega_l / atoms.gamma,
                   x_c=2.0 * (omega_l - cavity_offset) / cav.kappa,
                   b=atoms.b, n_up=n_up, n_down=N - n_up,
                   eta_up=atoms.eta, eta_down=atoms.eta_down)


@dataclass(frozen=True)
class RamanModel:
    """Spin-flip noise from |down> -> |e down> -> |up>.

    With rate_down_up set, the variance is rate*tau; otherwise it is built
    from the scattered photons on the |down> transition times branching.
    """

    rate_down_up: float | None = None
    branching: float = 2.0 / 3.0

    def __post_init__(self):
        if not 0.0 <= self.branching <= 1.0:
            raise ValueError(f"branching={self.branching!r} must lie in [0, 1]")


@dataclass(frozen=True)
class FourLevelEffects:
    delta_phi: float
    Q: float
    F: float
    n_t: float
    n_sc_up: float
    n_sc_down: float


def _den(flp):
    return loaded_denominator(flp.x_a, flp.x_c, flp.n_up, flp.eta_up,
                              flp.n_down, flp.eta_down, flp.b)


def fl_cavity_field(cav: CavityParams, flp: FourLevelPoint):
    """Intracavity amplitude with both transitions."""
    if not cav.lossless:
        raise ValueError("cavity has lossy mirrors; map it first")
    D, _ = _den(flp)
    return (cav.finesse / math.pi) * 1j * cav.t1 / D


def fl_transmission(cav: CavityParams, flp: FourLevelPoint):
    D, _ = _den(flp)
    T0 = 1.0 / abs(D) ** 2
    return T0, (cav.finesse / math.pi) ** 2 * cav.T1 * cav.T2 * T0


def delta_ld(flp: FourLevelPoint):
    """Differential light-shift lineshape eta_up Ld(x_a) - eta_down Ld(x_a + b)."""
    return flp.eta_up * lorentzians(flp.x_a)[0] - flp.eta_down * lorentzians(flp.x_b)[0]


def _dT0(D, dD):
    T0 = 1.0 / abs(D) ** 2
    return T0, -2.0 * T0 ** 2 * (D.conjugate() * dD).real


def fl_squeeze(cav: CavityParams, flp: FourLevelPoint, n_in=1.0, n_atoms=None) -> FourLevelEffects:
    """Phase shift, shear and normalized Fisher information of one pulse.

    Q = N F/pi T1 dLd dT0/dS_z n_in, i.e. N times the S_z-derivative of the
    differential phase at fixed lineshape; the printed four-level shear keeps
    only part of that derivative, so the exact one is used here.
    F sums the information leaving through both mirrors and free space.
    """
    N = flp.N if n_atoms is None else n_atoms
    D, dD = _den(flp)
    T0, dT0 = _dT0(D, dD)
    fpi = cav.finesse / math.pi
    dld = delta_ld(flp)
    la_up = lorentzians(flp.x_a)[1]
    la_dn = lorentzians(flp.x_b)[1]
    n_t = fpi ** 2 * cav.T1 * cav.T2 * T0 * n_in
    dphi = dld * n_t / (fpi * cav.T2)
    Q = N * fpi * cav.T1 * dld * dT0 * n_in
    scatter = flp.n_up * flp.eta_up * la_up + flp.n_down * flp.eta_down * la_dn
    F = (N * n_in * fpi ** 2 * cav.T1 * abs(dD) ** 2 * T0 ** 2
         * (cav.T1 + cav.T2 + scatter / fpi))
    st = 2.0 * math.pi / (cav.T2 * cav.finesse)
    return FourLevelEffects(dphi, Q, F, n_t,
                            st * flp.n_up * flp.eta_up * la_up * n_t,
                            st * flp.n_down * flp.eta_down * la_dn * n_t)


def raman_variance(cav: CavityParams, flp: FourLevelPoint, n_t, model: RamanModel, tau=None):
    """Raman spin-flip variance in SQL units (divided by S/2 = N/4)."""
    if model.rate_down_up is not None:
        if tau is None:
            raise ValueError("explicit Raman rate needs tau")
        flips = model.rate_down_up * tau
    else:
        la_dn = lorentzians(flp.x_b)[1]
        flips = (2.0 * math.pi / (cav.T2 * cav.finesse) * flp.n_down * flp.eta_down
                 * la_dn * n_t * model.branching)
    return flips / (flp.N / 4.0)


def compensation_detuning(cav: CavityParams, atoms: AtomParams, n_down):
    """delta_c = N_down eta_down Gamma kappa / (4 Delta_z); returns (delta_c, shift in x_c)."""
    if not atoms.delta_z:
        raise ValueError("compensation_detuning needs a nonzero Zeeman splitting")
    dc = n_down * atoms.eta_down * atoms.gamma * cav.kappa / (4.0 * atoms.delta_z)
    return dc, 2.0 * dc / cav.kappa


# ---------------------------------------------------------------- two colours

@dataclass(frozen=True)
class TwoColorPulse:
    omega_l1: float
    omega_l2: float
    gamma_ratio: float
    q_hat: tuple
    f_hat: tuple
    dphi_hat: tuple
    residual_q: float
    residual_phi: float

    @property
    def q_over_f(self):
        g = self.gamma_ratio
        return (self.q_hat[0] + g * self.q_hat[1]) / (self.f_hat[0] + g * self.f_hat[1])


def per_photon(cav, atoms, N, omega_l, cavity_offset):
    """(Q, F, dphi) per input photon at N_up = N_down = N/2."""
    e = fl_squeeze(cav, FourLevelPoint.at(cav, atoms, N, omega_l, cavity_offset))
    return e.Q, e.F, e.delta_phi


def d_dN(cav, atoms, N, omega_l, cavity_offset):
    """Analytic dQ/dN and d(dphi)/dN per input photon at N_up = N_down = N/2."""
    flp = FourLevelPoint.at(cav, atoms, N, omega_l, cavity_offset)
    D, w = _den(flp)
    u = flp.eta_up / (1.0 - 1j * flp.x_a)
    v = flp.eta_down / (1.0 - 1j * flp.x_b)
    s = (u + v) / 2.0  # dD/dN
    T0 = 1.0 / abs(D) ** 2
    dT0_dN = -2.0 * T0 ** 2 * (D.conjugate() * s).real
    dT0_dSz = -2.0 * T0 ** 2 * (D.conjugate() * w).real
    d2 = -4.0 * T0 * dT0_dN * (D.conjugate() * w).real - 2.0 * T0 ** 2 * (s.conjugate() * w).real
    k = cav.finesse / math.pi * cav.T1 * delta_ld(flp)
    return k * (dT0_dSz + N * d2), k * dT0_dN


def d_dN_numeric(cav, atoms, N, omega_l, cavity_offset, rel=1e-5):
    """Central-difference version of d_dN (cross-check)."""
    h = rel * N
    a = per_photon(cav, atoms, N + h, omega_l, cavity_offset)
    c = per_photon(cav, atoms, N - h, omega_l, cavity_offset)
    return (a[0] - c[0]) / (2 * h), (a[2] - c[2]) / (2 * h)


def rabi_peaks(cav, atoms, N, cavity_offset=0.0):
    """Normal-mode frequencies relative to the |up> line (angular).

    (dca -+ sqrt(4 g^2 N_up + dca^2))/2 with dca = omega_c - omega_a.
    """
    g = coupling_g(cav, atoms)
    r = math.sqrt(4.0 * g * g * N / 2.0 + cavity_offset ** 2)
    return (cavity_offset - r) / 2.0, (cavity_offset + r) / 2.0


def two_color_solve(cav, atoms, N, omega_l1, cavity_offset=0.0, window=None,
                    phase_sign=-1.0, grid_step=None):
    """Solve the atom-number compensation conditions for (omega_l2, gamma).

    dQ1/dN + gamma dQ2/dN = 0 and dphi1/dN + phase_sign gamma dphi2/dN = 0.
    phase_sign = -1 describes the two pulses on opposite sides of the echo
    pi pulse, where their phase shifts enter with opposite signs.
    The window for omega_l2 defaults to between the lower Rabi peak and the
    bare line; it is pre-scanned on a grid_step mesh (2 kHz) then bisected.
    """
    lo_peak, hi_peak = rabi_peaks(cav, atoms, N, cavity_offset)
    if window is None:
        window = (lo_peak, 0.0)
    a, b = sorted(window)
    if grid_step is None:
        grid_step = 2.0 * math.pi * 2e3
    dq1, dp1 = d_dN(cav, atoms, N, omega_l1, cavity_offset)

    def h(w2):
        dq2, dp2 = d_dN(cav, atoms, N, w2, cavity_offset)
        return dq1 * phase_sign * dp2 - dp1 * dq2

    n = max(int(math.ceil((b - a) / grid_step)), 2)
    grid = np.linspace(a, b, n + 1)[1:-1]
    grid = grid[np.abs(grid - omega_l1) > grid_step]
    if grid.size < 2:
        raise NoSolutionError("omega_l2 window is empty")
    vals = np.array([h(w) for w in grid])
    roots = []
    exact = list(grid[vals == 0.0])
    brackets = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
    found = exact + [brentq(h, grid[i], grid[i + 1], xtol=1e-12 * max(1.0, abs(grid[i])), rtol=1e-14)
                     for i in brackets]
    for w2 in sorted(found):
        dq2, dp2 = d_dN(cav, atoms, N, w2, cavity_offset)
        # a sign change of h across a pole (near the lower Rabi peak) is not a root
        if abs(h(w2)) > 1e-8 * (abs(dq1 * dp2) + abs(dp1 * dq2)):
            continue
        g = -dq1 / dq2
        if g > 0 and math.isfinite(g):
            roots.append((w2, g, dq2, dp2))
    if not roots:
        raise NoSolutionError(
            f"no positive-gamma root for omega_l2 in [{a / 2 / math.pi:.6g}, "
            f"{b / 2 / math.pi:.6g}] Hz ({np.count_nonzero(np.diff(np.sign(vals)))} sign changes)")
    pulses = []
    q1, f1, p1 = per_photon(cav, atoms, N, omega_l1, cavity_offset)
    for w2, g, dq2, dp2 in roots:
        q2, f2, p2 = per_photon(cav, atoms, N, w2, cavity_offset)
        scale_q = max(abs(dq1), abs(g * dq2))
        scale_p = max(abs(dp1), abs(g * dp2))
        pulses.append(TwoColorPulse(omega_l1, w2, g, (q1, q2), (f1, f2), (p1, p2),
                                    abs(dq1 + g * dq2) / scale_q,
                                    abs(dp1 + phase_sign * g * dp2) / scale_p))
    return max(pulses, key=lambda t: (abs(t.q_over_f), -abs(t.omega_l2)))


def q_compensation_curve(cav, atoms, N, omega_l1, omega_l2_grid, cavity_offset=0.0):
    """gamma(omega_l2) cancelling dQ/dN alone, and the combined Q/F along it."""
    dq1, _ = d_dN(cav, atoms, N, omega_l1, cavity_offset)
    q1, f1, _ = per_photon(cav, atoms, N, omega_l1, cavity_offset)
    out = []
    for w2 in omega_l2_grid:
        dq2, _ = d_dN(cav, atoms, N, w2, cavity_offset)
        g = -dq1 / dq2
        q2, f2, _ = per_photon(cav, atoms, N, w2, cavity_offset)
        out.append((w2, g, (q1 + g * q2) / (f1 + g * f2) if g > 0 else float("nan")))
    return np.array(out)


def two_color_optimize(cav, atoms, N, window, cavity_offset=0.0, points=41, phase_sign=-1.0):
    """Maximize |combined Q/F| over omega_l1 in window, subject to solvability."""
    a, b = window
    lo_peak, hi_peak = rabi_peaks(cav, atoms, N, cavity_offset)
    if max(a, b) <= hi_peak:
        raise NoSolutionError("omega_l1 window lies below the upper Rabi peak")
    grid = [a] if a == b else np.linspace(max(min(a, b), hi_peak * 1.0001), max(a, b), points)
    best = None
    for w1 in grid:
        try:
            t = two_color_solve(cav, atoms, N, w1, cavity_offset, phase_sign=phase_sign)
        except NoSolutionError:
            continue
        if best is None or abs(t.q_over_f) > abs(best.q_over_f):
            best = t
    if best is None:
        raise NoSolutionError("no feasible two-colour solution in the omega_l1 window")
    return best.omega_l1, best, best.q_over_f
