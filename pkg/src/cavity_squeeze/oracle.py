"""Brute-force reference calculations.

Nothing here calls the analytic modules it is used to check; only the
parameter containers are shared.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import gammaln

from .cavity import AtomParams, CavityParams, ProbePoint


# ------------------------------------------------------------------ Dicke

@dataclass(frozen=True)
class DickeState:
    n_atoms: int
    amplitudes: np.ndarray  # index k = S + S_z

    @property
    def S(self):
        return self.n_atoms / 2.0

    @property
    def m(self):
        return np.arange(self.n_atoms + 1) - self.S


def css(N, theta, phi=0.0) -> DickeState:
    """Coherent spin state in the Dicke basis; theta = 0 is S_z = -S."""
    if N < 1:
        raise ValueError("N must be >= 1")
    k = np.arange(N + 1)
    s, c = math.sin(theta / 2.0), math.cos(theta / 2.0)
    logb = 0.5 * (gammaln(N + 1) - gammaln(k + 1) - gammaln(N - k + 1))
    with np.errstate(divide="ignore"):
        ls = np.where(k > 0, k * np.log(abs(s)), 0.0) if s != 0 else np.where(k == 0, 0.0, -np.inf)
        lc = np.where(N - k > 0, (N - k) * np.log(abs(c)), 0.0) if c != 0 else np.where(k == N, 0.0, -np.inf)
    mag = np.exp(logb + ls + lc)
    sign = np.sign(s) ** k * np.sign(c) ** (N - k) if (s != 0 and c != 0) else 1.0
    amp = mag * sign * np.exp(-1j * k * phi)
    # gammaln rounding leaves ~1e-12 norm error at N ~ 4000; remove it
    amp /= math.sqrt(math.fsum(np.abs(amp) ** 2))
    return DickeState(N, amp)


def _fsum_c(z):
    return complex(math.fsum(np.real(z)), math.fsum(np.imag(z)))


def spin_moments(st: DickeState):
    """<S_x>, <S_y>, <S_z>, <S^2> and the covariance of (S_x, S_y, S_z)."""
    a = st.amplitudes
    m = st.m
    S = st.S
    p = np.abs(a) ** 2
    cp = np.sqrt(np.maximum(S * (S + 1) - m[:-1] * (m[:-1] + 1), 0.0))
    sp = _fsum_c(np.conj(a[1:]) * a[:-1] * cp)  # <S+>
    sx, sy = sp.real, sp.imag
    sz = math.fsum(p * m)
    sz2 = math.fsum(p * m * m)
    cpp = np.sqrt(np.maximum(S * (S + 1) - m[:-2] * (m[:-2] + 1), 0.0)) * cp[1:]
    sp2 = _fsum_c(np.conj(a[2:]) * a[:-2] * cpp)  # <S+^2>
    spm = math.fsum(p * (S * (S + 1) - m * m + m))  # <S+ S->
    smp = math.fsum(p * (S * (S + 1) - m * m - m))  # <S- S+>
    sx2 = (2 * sp2.real + spm + smp) / 4.0
    sy2 = (-2 * sp2.real + spm + smp) / 4.0
    return {"Sx": sx, "Sy": sy, "Sz": sz, "S2": sx2 + sy2 + sz2,
            "var_x": sx2 - sx * sx, "var_y": sy2 - sy * sy, "var_z": sz2 - sz * sz,
            "norm": math.fsum(p)}


def oat_exact_contrast(N, Q):
    """<S_x>/S after exp(-i (Q/N) S_z^2) acting on the CSS along +x."""
    if N < 2:
        raise ValueError("N must be >= 2")
    st = css(N, math.pi / 2.0, 0.0)
    m = st.m
    a = st.amplitudes * np.exp(-1j * (Q / N) * m * m)
    S = st.S
    cp = np.sqrt(np.maximum(S * (S + 1) - m[:-1] * (m[:-1] + 1), 0.0))
    return _fsum_c(np.conj(a[1:]) * a[:-1] * cp).real / S


# --------------------------------------------------------- Gaussian scans

def variance_alpha_scan(Q, F, n_grid=100_000):
    """Dense scan of var(S_z') over the rotation angle, from the covariance U U^T.

    Returns (min, max, argmin); the extrema are polished with a bounded
    scalar search around the best grid point.
    """
    if n_grid < 1000:
        raise ValueError("n_grid must be >= 1000")
    U = np.array([[math.sqrt(1.0 + F), Q], [0.0, 1.0]])
    sig = U @ U.T

    def var(al):
        c, s = np.cos(al), np.sin(al)
        return s * s * sig[0, 0] - 2 * s * c * sig[0, 1] + c * c * sig[1, 1]

    al = np.linspace(-math.pi / 2, math.pi / 2, n_grid, endpoint=False)
    v = var(al)
    step = math.pi / n_grid
    out = []
    for sgn, i in ((1.0, int(np.argmin(v))), (-1.0, int(np.argmax(v)))):
        r = minimize_scalar(lambda x: sgn * var(x), bounds=(al[i] - step, al[i] + step),
                            method="bounded", options={"xatol": 1e-13})
        out.append((sgn * r.fun, r.x))
    return out[0][0], out[1][0], out[0][1]


# ------------------------------------------------------ Fisher information

def fidelity_qfi(alpha_fn, x0, h=1e-6):
    """QFI from the coherent-state overlap at x0 -+ h.

    |<b|a>|^2 = exp(-(|a|^2 + |b|^2 - 2 Re b* a)) = exp(-|a - b|^2) and
    F = 4 (1 - |<psi(x0-h)|psi(x0+h)>|^2) / (2h)^2.  The exponent is
    evaluated in the |a - b|^2 form, which avoids cancellation for large |a|;
    the truncation error is about 2 h^2 |d alpha/dx|^2 relative.
    """
    a, b = complex(alpha_fn(x0 + h)), complex(alpha_fn(x0 - h))
    log_ov2 = -abs(a - b) ** 2
    if not math.isfinite(log_ov2):
        raise ValueError("non-finite overlap")
    return -4.0 * math.expm1(log_ov2) / (2.0 * h) ** 2


def poisson_fisher(lambda_fn, x0, h=1e-5):
    """Classical information of Poisson counts, (d lambda/dx)^2 / lambda."""
    lam = lambda_fn(x0)
    if not lam > 0:
        raise ValueError("Poisson mean must be positive")
    d = (lambda_fn(x0 + h) - lambda_fn(x0 - h)) / (2.0 * h)
    return d * d / lam


# --------------------------------------------------- microscopic light shift

@dataclass(frozen=True)
class EffectiveDetuning:
    delta_eff: float       # energy shift of one |up> atom (angular)
    photons: float         # mean intracavity photon number
    valid: bool


def effective_detuning(cav: CavityParams, atoms: AtomParams, p: ProbePoint, drive):
    """Light shift per |up> atom from the mean-field cavity/atom normal modes.

    drive is the input photon flux |beta|^2 (photons per second) on mirror 1.
    The linear steady state of the coupled cavity mode b and collective
    excitation a (coupling g sqrt(N_up), g = sqrt(eta kappa Gamma)/2) is
    solved directly; the |up> level then shifts by
    g^2 |b|^2 Delta / (Delta^2 + Gamma^2/4) with Delta = omega_l - omega_a.
    """
    kappa, gam = cav.kappa, atoms.gamma
    g = math.sqrt(atoms.eta * kappa * gam) / 2.0
    delta_a = p.x_a * gam / 2.0
    delta_c = p.x_c * kappa / 2.0
    kappa1 = kappa * cav.T1 / (cav.T1 + cav.T2)
    G = g * math.sqrt(p.n_up)
    M = np.array([[kappa / 2 - 1j * delta_c, 1j * G],
                  [1j * G, gam / 2 - 1j * delta_a]])
    rhs = np.array([math.sqrt(kappa1 * drive), 0.0], dtype=complex)
    b, _ = np.linalg.solve(M, rhs)
    n = abs(b) ** 2
    shift = g * g * n * delta_a / (delta_a ** 2 + gam ** 2 / 4.0)
    w = 2 * cav.T1 / (cav.T1 + cav.T2)
    lhs = max(kappa * drive * w * n, g * g * w * n)
    valid = lhs < 0.1 * min(delta_a ** 2, delta_c ** 2) if (delta_a and delta_c) else False
    return EffectiveDetuning(shift, n, valid)


def delta_eff_printed(cav: CavityParams, atoms: AtomParams, omega_la, omega_lc, n_up, beta2):
    """The closed-form expression exactly as printed, kept for comparison only.

    It carries no odd factor of the detuning, so its sign cannot follow the
    dispersive light shift; see the decision ledger.
    """
    kappa, gam = cav.kappa, atoms.gamma
    g2 = atoms.eta * kappa * gam / 4.0
    A = 1.0 + 2.0 * omega_la ** 2 / gam ** 2
    c = g2 * n_up / (kappa * gam)
    w = 2 * cav.T1 / (cav.T1 + cav.T2)
    den = (A ** 2 + c) ** 2 + (2 * omega_lc / kappa * A ** 2 - 2 * omega_la / gam * c) ** 2
    return -beta2 * w * g2 / (kappa * gam) * A ** 2 / den
