"""Light-induced spin dynamics for the three-level model.

Photon-budget bookkeeping, the collective phase shift, one-axis-twisting
shear Q and the Q/F ratio.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .cavity import (AtomParams, CavityParams, ProbePoint, lorentzians, saturation_guard,
                     scatter_to_transmit, transmission)


@dataclass(frozen=True)
class PhotonBudget:
    n_in: float
    n_t: float
    n_sc: float
    n_c: float | None
    authoritative: str


@dataclass(frozen=True)
class CoherentEffects:
    delta_phi: float
    chi_rate: float | None
    Q: float
    light_shift_per_photon: float


def photon_budget(cav: CavityParams, atoms: AtomParams, p: ProbePoint) -> PhotonBudget:
    """Fill in n_in, n_t, n_sc and n_c from the authoritative count."""
    v = p.budget
    if not v >= 0:
        raise ValueError(f"photon budget {p.budget_kind}={v!r} must be non-negative")
    _, T = transmission(cav, atoms, p)
    st = scatter_to_transmit(cav, atoms, p)
    rate = None if p.tau is None else cav.T2 * cav.kappa * p.tau
    kind = p.budget_kind
    if kind == "n_in":
        n_t = T * v
    elif kind == "n_t":
        n_t = v
    elif kind == "n_sc":
        if st == 0.0:
            if v > 0:
                raise ValueError("n_sc requested but the probe point scatters no photons")
            n_t = 0.0
        else:
            n_t = v / st
    else:  # n_c
        if rate is None:
            raise ValueError("n_c budget needs tau")
        n_t = v * rate
    n_in = v if kind == "n_in" else (n_t / T if T > 0 else math.inf)
    n_sc = v if kind == "n_sc" else st * n_t
    n_c = v if kind == "n_c" else (None if rate is None else n_t / rate)
    saturation_guard(n_c, p.n_up)
    return PhotonBudget(n_in, n_t, n_sc, n_c, kind)


def light_shift_per_photon(cav: CavityParams, atoms: AtomParams, p: ProbePoint):
    """Omega = pi eta Ld(x_a) kappa / F (angular frequency per intracavity photon)."""
    ld, _ = lorentzians(p.x_a)
    return math.pi * atoms.eta * ld * cav.kappa / cav.finesse


def _budget(cav, atoms, p, budget):
    return photon_budget(cav, atoms, p) if budget is None else budget


def phase_shift(cav: CavityParams, atoms: AtomParams, p: ProbePoint, budget=None):
    """Delta phi = -n_sc x_a / (2 N_up)."""
    b = _budget(cav, atoms, p, budget)
    if p.n_up == 0:
        if b.n_sc > 0:
            raise ValueError("scattered photons with no atoms in |up>")
        return 0.0
    return -b.n_sc * p.x_a / (2.0 * p.n_up)


def phase_shift_from_transmitted(cav: CavityParams, atoms: AtomParams, p: ProbePoint, budget=None):
    """Same phase shift via the transmitted photons: eta n_t (T1+T2)/(2 T2) Ld."""
    b = _budget(cav, atoms, p, budget)
    ld, _ = lorentzians(p.x_a)
    return atoms.eta * b.n_t * (cav.T1 + cav.T2) / (2.0 * cav.T2) * ld


def shearing(cav: CavityParams, atoms: AtomParams, p: ProbePoint, budget=None) -> CoherentEffects:
    """Shear Q (and chi = Q/(N tau)) of one pulse.

    Q = -(N/N_up) eta Ld (1 - x_c x_a + N_up eta) T0 n_sc; on the equator
    N/N_up = 2.
    """
    b = _budget(cav, atoms, p, budget)
    ld, _ = lorentzians(p.x_a)
    T0, _ = transmission(cav, atoms, p)
    if p.n_up == 0:
        Q = 0.0
    else:
        Q = -(p.N / p.n_up) * atoms.eta * ld * (1.0 - p.x_c * p.x_a + p.n_up * atoms.eta) * T0 * b.n_sc
    chi = None if (p.tau is None or p.N == 0) else Q / (p.N * p.tau)
    return CoherentEffects(phase_shift(cav, atoms, p, b), chi, Q,
                           light_shift_per_photon(cav, atoms, p))


def q_over_f(atoms: AtomParams, p: ProbePoint):
    """x_a (1 - x_c x_a + S eta) / (1 + x_a^2 + S eta/2) with S = N_up."""
    s_eta = p.n_up * atoms.eta
    return p.x_a * (1.0 - p.x_c * p.x_a + s_eta) / (1.0 + p.x_a ** 2 + s_eta / 2.0)
