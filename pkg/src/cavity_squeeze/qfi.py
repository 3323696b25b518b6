"""Fisher information carried by the cavity light.

Normalized informations are in SQL units: a raw QFI about S_z is multiplied
by the CSS variance S/2 = N/4, so that 1 + F is the factor by which an ideal
readout beats the standard quantum limit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cavity import AtomParams, CavityParams, ProbePoint, loaded_denominator, lorentzians, transmission
from .fourlevel import FourLevelPoint, RamanModel, raman_variance
from .spinlight import photon_budget


@dataclass(frozen=True)
class QfiBreakdown:
    total: float
    amplitude: float
    phase: float
    normalized: float | None = None
    amplitude_only: bool = False


@dataclass(frozen=True)
class DetectionSetup:
    """Readout: port ('transmission' -> T2, 'both' -> T1 + T2), efficiency, chirp."""

    t_tot_mode: str = "transmission"
    q_eff: float = 1.0
    omega_m: float | None = None

    def __post_init__(self):
        if self.t_tot_mode not in ("transmission", "both"):
            raise ValueError("t_tot_mode must be 'transmission' or 'both'")
        if not 0.0 < self.q_eff <= 1.0:
            raise ValueError("q_eff must lie in (0, 1]")

    def t_tot(self, cav):
        return cav.T2 if self.t_tot_mode == "transmission" else cav.T1 + cav.T2


def coherent_qfi(dalpha_dx):
    """QFI of a displaced coherent state, 4 |d alpha/dx|^2."""
    return 4.0 * abs(dalpha_dx) ** 2


def qfi_split(alpha, dalpha_dx) -> QfiBreakdown:
    """Amplitude and phase components of the coherent-state QFI."""
    total = coherent_qfi(dalpha_dx)
    A = abs(alpha)
    if A == 0.0:
        return QfiBreakdown(total, total, 0.0, amplitude_only=True)
    proj = np.conj(alpha) * dalpha_dx / A
    dA = proj.real
    A_dphi = proj.imag
    return QfiBreakdown(total, 4.0 * dA ** 2, 4.0 * A_dphi ** 2)


def _dec_dSz(cav, atoms, p):
    """Intracavity amplitude and its S_z derivative, exact from the cavity denominator."""
    D, dD = loaded_denominator(p.x_a, p.x_c, p.n_up, atoms.eta)
    ec = (cav.finesse / math.pi) * 1j * cav.t1 / D
    return ec, -ec * dD / D


def total_F(cav: CavityParams, atoms: AtomParams, p: ProbePoint, budget=None):
    """Normalized total QFI, (N/N_up) n_sc eta La (1 + x_a^2 + N_up eta/2) T0."""
    b = photon_budget(cav, atoms, p) if budget is None else budget
    if p.n_up == 0:
        return 0.0
    _, la = lorentzians(p.x_a)
    T0, _ = transmission(cav, atoms, p)
    return (p.N / p.n_up) * b.n_sc * atoms.eta * la * (1.0 + p.x_a ** 2 + p.n_up * atoms.eta / 2.0) * T0


def total_F_channels(cav: CavityParams, atoms: AtomParams, p: ProbePoint, budget=None):
    """Same quantity summed over output channels.

    (S/2) 4 n_in |d e_c/dS_z|^2 (T1 + T2 + (pi/F) N_up eta La): the first two
    terms leave through the mirrors, the last is free-space scattering.
    """
    b = photon_budget(cav, atoms, p) if budget is None else budget
    _, dec = _dec_dSz(cav, atoms, p)
    _, la = lorentzians(p.x_a)
    chan = cav.T1 + cav.T2 + math.pi / cav.finesse * p.n_up * atoms.eta * la
    return p.N * b.n_in * abs(dec) ** 2 * chan


def output_qfi(cav: CavityParams, atoms: AtomParams, p: ProbePoint, budget=None, port="t") -> QfiBreakdown:
    """Amplitude/phase QFI split of the transmitted ('t') or reflected ('r') light."""
    b = photon_budget(cav, atoms, p) if budget is None else budget
    ec, dec = _dec_dSz(cav, atoms, p)
    if port == "t":
        a, da = 1j * cav.t2 * ec, 1j * cav.t2 * dec
    elif port == "r":
        a, da = cav.r1 + 1j * cav.t1 * cav.r2 * ec, 1j * cav.t1 * cav.r2 * dec
    else:
        raise ValueError("port must be 't' or 'r'")
    s = math.sqrt(b.n_in)
    raw = qfi_split(a * s, da * s)
    return QfiBreakdown(raw.total, raw.amplitude, raw.phase, raw.total * p.N / 4.0, raw.amplitude_only)


def measurement_fisher(cav: CavityParams, atoms: AtomParams, p: ProbePoint, setup: DetectionSetup,
                       budget=None):
    """Normalized measurable information q (S/2) 4 n_in T_tot |d e_c/dS_z|^2."""
    b = photon_budget(cav, atoms, p) if budget is None else budget
    _, dec = _dec_dSz(cav, atoms, p)
    return setup.q_eff * p.N * b.n_in * setup.t_tot(cav) * abs(dec) ** 2


# ------------------------------------------------------------------ chirp

@dataclass(frozen=True)
class ChirpFisher:
    quantum: float     # sum of the two sideband QFIs (normalized)
    measured: float    # beat-note intensity detection (normalized, before q)
    n_t: tuple         # transmitted photons per sideband
    sidebands: tuple   # (x_a, x_c) of the lower and upper sideband


def _sideband(cav, atoms, x_a, x_c, n_up, fl):
    if fl is None:
        D, dD = loaded_denominator(x_a, x_c, n_up, atoms.eta)
    else:
        D, dD = loaded_denominator(x_a, x_c, fl.n_up, fl.eta_up, fl.n_down, fl.eta_down, fl.b)
    et = (cav.finesse / math.pi) * 1j * cav.t1 * cav.t2 / D
    return et, -et * dD / D


def chirp_fisher(cav: CavityParams, atoms: AtomParams, p: ProbePoint, setup: DetectionSetup,
                 budget=None, fl: FourLevelPoint | None = None, n_phase=2048) -> ChirpFisher:
    """Two balanced sidebands at the carrier -+ omega_m, read out in transmission.

    The carrier (p.x_a, p.x_c, or fl.x_a, fl.x_c in four-level mode) is the
    chirp centre.  n_in from the budget is split equally.  'measured' is the
    classical information of time-resolved intensity detection of the beat
    note, averaged over the beat phase; it equals 'quantum' when the two
    sidebands see mirror-image responses.
    """
    if setup.omega_m is None:
        raise ValueError("chirp needs omega_m")
    b = photon_budget(cav, atoms, p) if budget is None else budget
    ca, cc = (p.x_a, p.x_c) if fl is None else (fl.x_a, fl.x_c)
    N = p.N if fl is None else fl.N
    dxa = 2.0 * setup.omega_m / atoms.gamma
    dxc = 2.0 * setup.omega_m / cav.kappa
    half = b.n_in / 2.0
    sbs = ((ca - dxa, cc - dxc), (ca + dxa, cc + dxc))
    (em, dem), (ep, dep) = (_sideband(cav, atoms, xa, xc, p.n_up, fl) for xa, xc in sbs)
    scale = math.sqrt(half)
    em, dem, ep, dep = em * scale, dem * scale, ep * scale, dep * scale
    fq = 4.0 * (abs(dem) ** 2 + abs(dep) ** 2)
    u = np.linspace(0.0, 2.0 * math.pi, n_phase, endpoint=False)
    E = ep * np.exp(-1j * u) + em * np.exp(1j * u)
    dE = dep * np.exp(-1j * u) + dem * np.exp(1j * u)
    lam = np.abs(E) ** 2
    dlam = 2.0 * np.real(np.conj(E) * dE)
    good = lam > 1e-300
    fc = float(np.sum(dlam[good] ** 2 / lam[good]) / n_phase)
    return ChirpFisher(fq * N / 4.0, fc * N / 4.0,
                       (abs(em) ** 2, abs(ep) ** 2), sbs)


def detection_variance(cav: CavityParams, atoms: AtomParams, p: ProbePoint, setup: DetectionSetup,
                       budget=None, raman: RamanModel | None = None, fl: FourLevelPoint | None = None):
    """Measured S_z variance in SQL units: 1/(1 + q F_meas) + Raman term.

    With a chirp (setup.omega_m) F_meas is the beat-note information; the
    Raman term counts |down> scattering of both sidebands.
    """
    b = photon_budget(cav, atoms, p) if budget is None else budget
    if setup.omega_m is not None:
        ch = chirp_fisher(cav, atoms, p, setup, b, fl)
        fmeas = setup.q_eff * ch.measured
        tones = [(xa, xc, nt) for (xa, xc), nt in zip(ch.sidebands, ch.n_t)]
    else:
        fmeas = measurement_fisher(cav, atoms, p, setup, b)
        tones = [(p.x_a if fl is None else fl.x_a, p.x_c if fl is None else fl.x_c, b.n_t)]
    var_r = 0.0
    if raman is not None and fl is not None:
        for xa, xc, nt in tones:
            tone = FourLevelPoint(xa, xc, fl.b, fl.n_up, fl.n_down, fl.eta_up, fl.eta_down)
            var_r += raman_variance(cav, tone, nt, raman, p.tau)
        if raman.rate_down_up is not None:
            var_r /= len(tones)
    return 1.0 / (1.0 + fmeas) + var_r
