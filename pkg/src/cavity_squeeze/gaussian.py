"""Gaussian collective-spin states in SQL units (a CSS has identity covariance).

Coordinates are (S_y, S_z).  A probe pulse shears by Q, broadens S_y by F,
and a final rotation by alpha turns the squeezed axis onto S_z.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class GaussianSpinState:
    cov: np.ndarray = field(default_factory=lambda: np.eye(2))
    mean_shift: tuple = (0.0, 0.0)
    n_atoms: float = 1.0
    contrast: float = 1.0

    def __post_init__(self):
        c = np.asarray(self.cov, dtype=float)
        if c.shape != (2, 2) or not np.allclose(c, c.T, rtol=0, atol=1e-12 * max(1.0, np.abs(c).max())):
            raise ValueError("cov must be a symmetric 2x2 matrix")
        if np.linalg.det(c) <= 0 or c[0, 0] <= 0:
            raise ValueError("cov must be positive definite")
        if not 0.0 < self.contrast <= 1.0:
            raise ValueError("contrast must lie in (0, 1]")
        object.__setattr__(self, "cov", c)

    def spin_units(self):
        """Covariance in units of S_z^2 (CSS variance N/4)."""
        return self.cov * self.n_atoms / 4.0


@dataclass(frozen=True)
class SqueezeOutcome:
    Q: float
    F: float
    delta_phi: float
    contrast: float
    xi2_ku: float
    xi2_wineland: float


def rotation(alpha):
    c, s = math.cos(alpha), math.sin(alpha)
    return np.array([[c, s], [-s, c]])


def evolve(state: GaussianSpinState, Q, F, alpha=0.0) -> GaussianSpinState:
    """Shear by Q, add F to the S_y variance, then rotate by alpha."""
    if F < 0:
        raise ValueError("F must be non-negative")
    M = np.array([[1.0, Q], [0.0, 1.0]])
    c = M @ state.cov @ M.T
    c[0, 0] += F
    R = rotation(alpha)
    c = R @ c @ R.T
    c = 0.5 * (c + c.T)
    return GaussianSpinState(c, state.mean_shift, state.n_atoms, state.contrast)


def variance_at_angle(Q, F, alpha):
    """S_z variance after rotating the sheared state by alpha."""
    return 1.0 - Q * np.sin(2.0 * alpha) + (F + Q * Q) * np.sin(alpha) ** 2


def xi2_ku(Q, F):
    """(xi_-^2, xi_+^2): eigenvalues of [[1+F+Q^2, Q], [Q, 1]].  Broadcasts over arrays."""
    if np.any(np.asarray(F) < 0):
        raise ValueError("F must be non-negative")
    a = F + Q * Q
    r = np.sqrt(4.0 * Q * Q + a * a)
    plus = (2.0 + a + r) / 2.0
    # product of eigenvalues is 1+F; avoids cancellation in the small one
    return (1.0 + F) / plus, plus


def optimal_angle(Q, F):
    """Rotation minimizing the S_z variance: tan(alpha) = (sqrt(4Q^2+(F+Q^2)^2) - (F+Q^2))/(2Q)."""
    if Q == 0:
        return 0.0
    a = F + Q * Q
    return math.atan((math.sqrt(4.0 * Q * Q + a * a) - a) / (2.0 * Q))


def contrast(Q, n_sc, N):
    """(C_sc, C_bloch, C): scattering loss exp(-n_sc/N), wrapping loss exp(-Q^2/2N)."""
    if np.any(np.asarray(N) < 1):
        raise ValueError("N must be >= 1")
    c_sc = np.exp(-n_sc / N)
    c_b = np.exp(-Q * Q / (2.0 * N))
    return c_sc, c_b, c_sc * c_b


def wineland(Q, F, n_sc, N, curvature=True):
    """Wineland parameter xi^2 = xi_KU^2 / C^2.

    curvature switches on both effects of the finite Bloch sphere: the
    Q^4/(24 S^2) broadening of the squeezed quadrature and the wrapping
    contrast exp(-Q^2/2N).  With it off only scattering costs contrast.
    """
    ku = xi2_ku(Q, F)[0]
    c_sc, c_b, c = contrast(Q, n_sc, N)
    if curvature:
        S = N / 2.0
        ku += Q ** 4 / (24.0 * S * S)
    else:
        c = c_sc
    with np.errstate(divide="ignore", over="ignore"):  # contrast underflow means xi^2 = inf
        return ku / (c * c)


def squeeze_outcome(Q, F, delta_phi, n_sc, N, curvature=True) -> SqueezeOutcome:
    c_sc, _, c = contrast(Q, n_sc, N)
    xi2 = wineland(Q, F, n_sc, N, curvature)
    cc = c if curvature else c_sc
    return SqueezeOutcome(Q, F, delta_phi, cc, xi2 * cc * cc, xi2)
