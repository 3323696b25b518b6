"""Steady-state optics of a two-mirror cavity loaded with an atomic ensemble.

Detunings are normalized throughout: x_a = 2*Delta/Gamma from the atomic
line and x_c = 2*delta/kappa from the bare cavity resonance.  Frequencies
and rates are angular (rad/s).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

BUDGET_KINDS = ("n_in", "n_t", "n_sc", "n_c")


class ConsistencyWarning(UserWarning):
    """Redundant parameters disagree beyond the declared tolerance."""


class SaturationWarning(UserWarning):
    """Intracavity photon number approaches the linear-response limit."""


def lorentzians(x):
    """Dispersive and absorptive Lorentzians (Ld, La) of a normalized detuning."""
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("lorentzians: detuning must be finite")
    la = 1.0 / (1.0 + arr * arr)
    ld = -arr * la
    if arr.ndim == 0:
        return float(ld), float(la)
    return ld, la


def _unit(name, v):
    if not (0.0 <= v <= 1.0) or not math.isfinite(v):
        raise ValueError(f"{name}={v!r} must lie in [0, 1]")


@dataclass(frozen=True)
class CavityParams:
    """Mirror powers, finesse and linewidth.  Missing redundant values are derived."""

    T1: float
    T2: float
    L1: float = 0.0
    L2: float = 0.0
    finesse: float | None = None
    kappa: float | None = None
    fsr: float | None = None
    waist: float | None = None
    wavelength: float | None = None

    def __post_init__(self):
        for name in ("T1", "T2", "L1", "L2"):
            _unit(name, getattr(self, name))
        if self.T1 + self.L1 > 1.0 or self.T2 + self.L2 > 1.0:
            raise ValueError("mirror T + L must not exceed 1")
        total = self.T1 + self.L1 + self.T2 + self.L2
        if total <= 0.0:
            raise ValueError("cavity needs nonzero mirror transmission or loss")
        f_loss = 2.0 * math.pi / total
        if self.finesse is None:
            object.__setattr__(self, "finesse", f_loss)
        else:
            if self.finesse <= 0:
                raise ValueError("finesse must be positive")
            if abs(self.finesse / f_loss - 1.0) > 0.02:
                warnings.warn(
                    f"finesse {self.finesse:.6g} differs from 2*pi/(T1+L1+T2+L2)="
                    f"{f_loss:.6g} by more than 2%", ConsistencyWarning, stacklevel=3)
        if self.fsr is not None:
            k = self.fsr / self.finesse
            if self.kappa is not None and abs(self.kappa / k - 1.0) > 0.02:
                warnings.warn(
                    f"kappa {self.kappa:.6g} disagrees with fsr/finesse={k:.6g}; "
                    "using fsr/finesse", ConsistencyWarning, stacklevel=3)
            object.__setattr__(self, "kappa", k)
        elif self.kappa is not None:
            object.__setattr__(self, "fsr", self.kappa * self.finesse)

    # amplitude coefficients
    @property
    def t1(self):
        return math.sqrt(self.T1)

    @property
    def t2(self):
        return math.sqrt(self.T2)

    @property
    def r1(self):
        return math.sqrt(1.0 - self.T1 - self.L1)

    @property
    def r2(self):
        return math.sqrt(1.0 - self.T2 - self.L2)

    @property
    def lossless(self):
        return self.L1 == 0.0 and self.L2 == 0.0

    @property
    def k(self):
        if self.wavelength is None:
            raise ValueError("wavelength not set")
        return 2.0 * math.pi / self.wavelength

    def cooperativity(self):
        """Single-atom cooperativity at an antinode, 24 F / (pi k^2 w^2)."""
        if self.waist is None:
            raise ValueError("waist not set")
        return 24.0 * self.finesse / (math.pi * self.k ** 2 * self.waist ** 2)


@dataclass(frozen=True)
class AtomParams:
    """Atomic line and its coupling to the mode.

    eta is the cooperativity of the |up>-|e up> transition; eta_down defaults
    to eta/3.  b = 2*delta_z/gamma; supply either.
    """

    gamma: float
    eta: float
    eta_down: float | None = None
    delta_z: float | None = None
    b: float | None = None

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")
        if self.eta < 0:
            raise ValueError("eta must be non-negative")
        if self.eta_down is None:
            object.__setattr__(self, "eta_down", self.eta / 3.0)
        elif self.eta_down < 0:
            raise ValueError("eta_down must be non-negative")
        if self.b is None and self.delta_z is not None:
            object.__setattr__(self, "b", 2.0 * self.delta_z / self.gamma)
        elif self.b is not None and self.delta_z is None:
            object.__setattr__(self, "delta_z", self.b * self.gamma / 2.0)
        elif self.b is not None and self.delta_z is not None:
            if abs(self.b - 2.0 * self.delta_z / self.gamma) > 1e-9 * max(1.0, abs(self.b)):
                raise ValueError("b and delta_z are inconsistent (b must equal 2*delta_z/gamma)")

    @property
    def eta_up(self):
        return self.eta

    @classmethod
    def from_cavity(cls, cav: CavityParams, gamma, **kw):
        return cls(gamma=gamma, eta=cav.cooperativity(), **kw)


@dataclass(frozen=True)
class ProbePoint:
    """One probing condition: detunings, atoms in |up>, and a photon budget.

    Exactly one count (budget_kind) is authoritative.  n_atoms defaults to
    2*n_up, i.e. a state on the equator.
    """

    x_a: float
    x_c: float
    n_up: float
    budget_kind: str = "n_sc"
    budget: float = 0.0
    tau: float | None = None
    n_atoms: float | None = None

    def __post_init__(self):
        if self.budget_kind not in BUDGET_KINDS:
            raise ValueError(f"budget_kind must be one of {BUDGET_KINDS}")
        if self.n_up < 0:
            raise ValueError("n_up must be non-negative")
        if self.tau is not None and not self.tau > 0:
            raise ValueError("tau must be positive")
        if not (math.isfinite(self.x_a) and math.isfinite(self.x_c)):
            raise ValueError("detunings must be finite")
        if self.n_atoms is None:
            object.__setattr__(self, "n_atoms", 2.0 * self.n_up)

    @property
    def N(self):
        return self.n_atoms


def x_c_from_x_a(x_a, gamma, kappa, cavity_offset=0.0):
    """Cavity detuning for a probe at x_a when omega_c - omega_a = cavity_offset."""
    return (x_a * gamma / 2.0 - cavity_offset) * 2.0 / kappa


def probe_at(x_a, cav: CavityParams, atoms: AtomParams, n_up, cavity_offset=0.0, **kw):
    """ProbePoint for a laser at normalized atomic detuning x_a."""
    return ProbePoint(x_a=x_a, x_c=x_c_from_x_a(x_a, atoms.gamma, cav.kappa, cavity_offset),
                      n_up=n_up, **kw)


@dataclass(frozen=True)
class FieldResponse:
    e_c: complex
    e_t: complex
    e_r: complex
    transmission: float
    scatter_to_transmit: float


@dataclass(frozen=True)
class LosslessEquivalent:
    """Lossless network reproducing a lossy cavity (amplitudes, see map_lossless)."""

    t1s: float
    t2s: float
    t3s: float
    t4s: float
    t5s: float

    @property
    def r1s(self):
        return math.sqrt(max(0.0, 1.0 - self.t1s ** 2))

    @property
    def r2s(self):
        return math.sqrt(max(0.0, 1.0 - self.t2s ** 2))

    def powers(self):
        return {"T1*": self.t1s ** 2, "T2*": self.t2s ** 2, "T3*": self.t3s ** 2,
                "T4*": self.t4s ** 2, "T5*": self.t5s ** 2}

    def cavity(self, like: CavityParams | None = None):
        """The lossless two-mirror cavity at the heart of the network."""
        kw = {}
        if like is not None:
            kw = dict(kappa=like.kappa, fsr=like.fsr, waist=like.waist,
                      wavelength=like.wavelength)
        return CavityParams(T1=self.t1s ** 2, T2=self.t2s ** 2, **kw)

    def fields(self, atoms: AtomParams, p: ProbePoint, kL, eta_fs):
        """External fields of the network: (e_c, e_t, e_r)."""
        core = CavityParams(T1=self.t1s ** 2, T2=self.t2s ** 2)
        ec, et, er = _exact_fields(core.t1, core.r1, core.t2, core.r2,
                                   _beta(atoms, p, eta_fs), kL)
        return self.t4s * ec, self.t3s * self.t4s * et, self.t5s * self.t4s * er


def loaded_denominator(x_a, x_c, n_up, eta_up, n_down=0.0, eta_down=0.0, b=0.0):
    """Dimensionless cavity denominator D and dD/dS_z.

    D = 1 - i x_c + N_up eta_up/(1 - i x_a) + N_down eta_down/(1 - i (x_a + b)),
    which equals 1 + sum N eta La - i (x_c + sum N eta Ld).  With
    N_up = S + S_z and N_down = S - S_z the derivative is
    eta_up/(1 - i x_a) - eta_down/(1 - i (x_a + b)).
    """
    u = eta_up / (1.0 - 1j * x_a)
    D = 1.0 - 1j * x_c + n_up * u
    dD = u
    if eta_down:
        v = eta_down / (1.0 - 1j * (x_a + b))
        D = D + n_down * v
        dD = dD - v
    return D, dD


def _check_lossless(cav):
    if not cav.lossless:
        raise ValueError("cavity has lossy mirrors; use map_lossless(cav).cavity(cav) first")


def saturation_guard(n_c, n_up):
    """Warn when the intracavity photon number approaches N_up/10."""
    if n_c is not None and n_up > 0 and n_c >= n_up / 10.0:
        warnings.warn(f"intracavity photon number {n_c:.3g} >= N_up/10; "
                      "linear atomic response is questionable", SaturationWarning, stacklevel=3)


def intracavity_field(cav: CavityParams, atoms: AtomParams, p: ProbePoint, n_c=None):
    """Intracavity amplitude relative to the input field."""
    _check_lossless(cav)
    saturation_guard(n_c, p.n_up)
    D, _ = loaded_denominator(p.x_a, p.x_c, p.n_up, atoms.eta)
    return (cav.finesse / math.pi) * 1j * cav.t1 / D


def transmission(cav: CavityParams, atoms: AtomParams, p: ProbePoint):
    """(T0, T): normalized Lorentzian factor and power transmission."""
    _check_lossless(cav)
    D, _ = loaded_denominator(p.x_a, p.x_c, p.n_up, atoms.eta)
    T0 = 1.0 / abs(D) ** 2
    return T0, 4.0 * cav.T1 * cav.T2 / (cav.T1 + cav.T2) ** 2 * T0


def scatter_to_transmit(cav: CavityParams, atoms: AtomParams, p: ProbePoint):
    """Ratio of photons scattered into free space to photons transmitted."""
    if cav.T2 == 0.0:
        raise ZeroDivisionError("scatter_to_transmit: T2 = 0, no transmitted photons")
    _, la = lorentzians(p.x_a)
    return 2.0 * math.pi / (cav.T2 * cav.finesse) * p.n_up * atoms.eta * la


def field_response(cav: CavityParams, atoms: AtomParams, p: ProbePoint) -> FieldResponse:
    ec = intracavity_field(cav, atoms, p)
    et = 1j * cav.t2 * ec
    er = cav.r1 + 1j * cav.t1 * cav.r2 * ec
    return FieldResponse(ec, et, er, abs(et) ** 2, scatter_to_transmit(cav, atoms, p))


@dataclass(frozen=True)
class DressedResonances:
    x_a: tuple
    rabi: float  # vacuum Rabi frequency 2 g sqrt(N_up), angular


def coupling_g(cav: CavityParams, atoms: AtomParams):
    """Single-atom coupling g = sqrt(eta kappa Gamma)/2."""
    return math.sqrt(atoms.eta * cav.kappa * atoms.gamma) / 2.0


def dressed_resonances(cav: CavityParams, atoms: AtomParams, n_up) -> DressedResonances:
    """Normal-mode positions for omega_c = omega_a: x_a = +-sqrt(N_up eta kappa/Gamma - 1)."""
    rabi = 2.0 * coupling_g(cav, atoms) * math.sqrt(max(n_up, 0.0))
    arg = n_up * atoms.eta * cav.kappa / atoms.gamma - 1.0
    if arg <= 0.0:
        return DressedResonances((), rabi)
    r = math.sqrt(arg)
    return DressedResonances((-r, r), rabi)


def map_lossless(cav: CavityParams) -> LosslessEquivalent:
    """Exact lossless network for a cavity with lossy mirrors.

    Evaluated in the power form T1* = T1/(T1+R1), T2* = 1-(1-T2-L2)(1-L1),
    T3* = T2/T2*, T4* = 1-L1, T5* = 1, which is algebraically identical to
    the amplitude relations and keeps full precision when the losses vanish.
    """
    if cav.T1 <= 0 or cav.T2 <= 0:
        raise ValueError("map_lossless needs T1, T2 > 0")
    R1, R2 = 1.0 - cav.T1 - cav.L1, 1.0 - cav.T2 - cav.L2
    if R1 <= 0:
        raise ValueError("map_lossless needs R1 > 0")
    if R2 < 0:
        raise ValueError("map_lossless needs R2 >= 0")
    a, b = cav.T2 + cav.L2, cav.L1
    T1s = cav.T1 / (cav.T1 + R1)
    T2s = a + b - a * b
    T3s = cav.T2 / T2s
    T4s = cav.T1 + R1
    for name, v in (("T1*", T1s), ("T2*", T2s), ("T3*", T3s), ("T4*", T4s)):
        if not 0.0 < v <= 1.0:
            raise ValueError(f"mapped {name}={v} outside (0, 1] (unphysical input)")
    return LosslessEquivalent(math.sqrt(T1s), math.sqrt(T2s), math.sqrt(T3s),
                              math.sqrt(T4s), 1.0)


def free_space_cooperativity(cav: CavityParams, atoms: AtomParams):
    """eta_fs = 6/(k^2 w^2); falls back to pi*eta/(4F) without geometry."""
    if cav.waist is not None and cav.wavelength is not None:
        return 6.0 / (cav.k ** 2 * cav.waist ** 2)
    return math.pi * atoms.eta / (4.0 * cav.finesse)


def _beta(atoms, p, eta_fs):
    ld, la = lorentzians(p.x_a)
    return p.n_up * eta_fs * (ld + 1j * la)


def _exact_fields(t1, r1, t2, r2, beta, kL):
    ph = np.exp(2j * np.asarray(kL, dtype=float))
    den = 1.0 - 4j * beta - r1 * r2 * ph
    ec = 1j * t1 / den
    et = -t1 * t2 * np.exp(1j * np.asarray(kL, dtype=float)) / den
    er = r1 - t1 ** 2 * r2 * ph / den
    return ec, et, er


def lossy_fields(cav: CavityParams, atoms: AtomParams, p: ProbePoint, kL, eta_fs=None):
    """Fields with exact round-trip phase exp(2ikL) (no near-resonance expansion).

    Returns a FieldResponse (arrays when kL is an array); its
    scatter_to_transmit is free_space_power over |e_t|^2.
    """
    if eta_fs is None:
        eta_fs = free_space_cooperativity(cav, atoms)
    beta = _beta(atoms, p, eta_fs)
    ec, et, er = _exact_fields(cav.t1, cav.r1, cav.t2, cav.r2, beta, kL)
    T = np.abs(et) ** 2
    p4pi = free_space_power(ec, beta)
    with np.errstate(divide="ignore", invalid="ignore"):
        st = np.where(T > 0, p4pi / T, np.inf)
    if np.ndim(kL) == 0:
        return FieldResponse(complex(ec), complex(et), complex(er), float(T), float(st))
    return FieldResponse(ec, et, er, T, st)


def free_space_power(e_c, beta):
    """Power radiated into free space relative to the input.

    Exact balance of the lossless-mirror network: |e_c|^2 (|1 - 4i beta|^2 - 1)
    = |e_c|^2 (2 Im(4 beta) + |4 beta|^2).  The intracavity standing wave passes
    the atoms twice per round trip, hence 2 Im(4 beta) at first order, which is
    what makes the near-resonance limit agree with scatter_to_transmit.
    """
    a = 4.0 * beta
    return np.abs(e_c) ** 2 * (2.0 * np.imag(a) + np.abs(a) ** 2)
