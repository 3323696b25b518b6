import math

import hypothesis.strategies as st
import numpy as np
import pytest
from hypothesis import given

from cavity_squeeze.gaussian import (GaussianSpinState, contrast, evolve, optimal_angle, rotation,
                                     squeeze_outcome, variance_at_angle, wineland, xi2_ku)
from cavity_squeeze.oracle import oat_exact_contrast, variance_alpha_scan

shears = st.floats(-50, 50)
broad = st.floats(0, 50)
angles = st.floats(-math.pi, math.pi)


def test_evolve_trivial():
    assert np.array_equal(evolve(GaussianSpinState(), 0.0, 0.0).cov, np.eye(2))
    assert np.allclose(evolve(GaussianSpinState(), 0.0, 2.0).cov, np.diag([3.0, 1.0]), atol=0)
    with pytest.raises(ValueError):
        evolve(GaussianSpinState(), 1.0, -0.1)


@given(shears, broad)
def test_evolve_closed_form(Q, F):
    c = evolve(GaussianSpinState(), Q, F).cov
    assert np.allclose(c, [[1 + F + Q * Q, Q], [Q, 1.0]], rtol=1e-13, atol=1e-13)


def test_evolve_composition_limit():
    Q, F, n = 3.0, 1.0, 10_000
    s = GaussianSpinState()
    for _ in range(n):
        s = evolve(s, Q / n, F / n)
    target = np.array([[1 + F + Q * Q, Q], [Q, 1.0]])
    assert np.abs(s.cov - target).max() < 1e-3
    # the first-order splitting error falls as 1/n
    s2 = GaussianSpinState()
    for _ in range(2 * n):
        s2 = evolve(s2, Q / (2 * n), F / (2 * n))
    err1 = np.abs(s.cov - target).max()
    err2 = np.abs(s2.cov - target).max()
    richardson = np.abs(2 * s2.cov - s.cov - target).max()
    assert err2 == pytest.approx(err1 / 2, rel=1e-3)
    assert richardson < 1e-6


@given(shears, broad, angles)
def test_determinant_floor(Q, F, alpha):
    c = evolve(GaussianSpinState(), Q, F, alpha).cov
    assert np.linalg.det(c) == pytest.approx(1 + F, rel=1e-9)
    assert np.linalg.det(c) >= 1 - 1e-9


def test_state_validation():
    with pytest.raises(ValueError):
        GaussianSpinState(np.array([[1.0, 0.5], [0.4, 1.0]]))
    with pytest.raises(ValueError):
        GaussianSpinState(np.array([[1.0, 2.0], [2.0, 1.0]]))
    with pytest.raises(ValueError):
        GaussianSpinState(contrast=0.0)
    s = GaussianSpinState(n_atoms=100)
    assert np.allclose(s.spin_units(), 25 * np.eye(2))


@given(shears, broad, angles)
def test_variance_matches_rotated_covariance(Q, F, alpha):
    c = evolve(GaussianSpinState(), Q, F, alpha).cov
    assert variance_at_angle(Q, F, alpha) == pytest.approx(c[1, 1], rel=1e-9, abs=1e-9)


def test_variance_trivial():
    assert variance_at_angle(3.0, 1.0, 0.0) == 1.0
    assert variance_at_angle(0.0, 2.0, math.pi / 2) == pytest.approx(3.0)


def test_xi2_values():
    assert xi2_ku(0.0, 0.0) == (1.0, 1.0)
    lo, hi = xi2_ku(0.0, 2.0)
    assert (lo, hi) == (pytest.approx(1.0), pytest.approx(3.0))
    lo, _ = xi2_ku(3.0, 1.0)
    assert lo == pytest.approx((12 - math.sqrt(136)) / 2, rel=1e-12)
    assert lo == pytest.approx(0.16905, abs=1e-5)
    with pytest.raises(ValueError):
        xi2_ku(1.0, -1.0)


@given(shears, broad)
def test_xi2_product(Q, F):
    lo, hi = xi2_ku(Q, F)
    assert lo * hi == pytest.approx(1 + F, rel=1e-12)
    assert 0 < lo <= 1 + 1e-12 <= hi + 2e-12


@given(st.floats(-20, 20), st.floats(0, 20))
def test_xi2_against_angle_scan(Q, F):
    lo, hi = xi2_ku(Q, F)
    smin, smax, arg = variance_alpha_scan(Q, F, n_grid=20_000)
    assert smin == pytest.approx(lo, rel=1e-6, abs=1e-9)
    assert smax == pytest.approx(hi, rel=1e-6)
    assert variance_at_angle(Q, F, optimal_angle(Q, F)) == pytest.approx(lo, rel=1e-9, abs=1e-12)


def test_optimal_angle_matches_scan():
    _, _, arg = variance_alpha_scan(3.0, 1.0)
    assert optimal_angle(3.0, 1.0) == pytest.approx(arg, abs=1e-4)
    assert optimal_angle(0.0, 5.0) == 0.0


def test_xi2_broadcasts():
    Q = np.array([0.0, 3.0, 10.0])
    lo, hi = xi2_ku(Q, 1.0)
    assert lo.shape == (3,)
    assert lo[1] == pytest.approx(xi2_ku(3.0, 1.0)[0])


def test_contrast_values():
    assert contrast(0.0, 0.0, 100) == (1.0, 1.0, 1.0)
    _, cb, _ = contrast(10.0, 0.0, 100)
    assert cb == pytest.approx(math.exp(-0.5))
    assert cb == pytest.approx(oat_exact_contrast(100, 10.0), rel=5e-3)
    csc, _, c = contrast(0.0, 500.0, 1000)
    assert csc == pytest.approx(math.exp(-0.5)) and c == csc
    with pytest.raises(ValueError):
        contrast(1.0, 1.0, 0.5)


@pytest.mark.parametrize("N", [50, 100, 400])
def test_bloch_contrast_against_dicke(N):
    """exp(-Q^2/2N) tracks the exact one-axis-twisting contrast up to Q^2 = 2N.

    The worst deviation, 1.3% at N = 50 and Q^2 = 2N, is inside the 5%
    envelope used for the acceptance check; it shrinks as 1/N.
    """
    worst = 0.0
    for Q in np.linspace(0, math.sqrt(2 * N), 25):
        exact = oat_exact_contrast(N, Q)
        worst = max(worst, abs(contrast(Q, 0.0, N)[1] / exact - 1))
    assert worst < 0.05
    assert worst < 0.7 / N


def test_wineland_trivial():
    assert wineland(0.0, 0.0, 0.0, 1000) == 1.0
    assert wineland(0.0, 0.0, 0.0, 1000, curvature=False) == 1.0


def test_large_q_asymptote():
    lo, _ = xi2_ku(100.0, 1.0)
    assert lo == pytest.approx(2.0 / 100 ** 2, rel=0.02)


@st.composite
def pulses(draw):
    N = draw(st.floats(10, 1e5))
    Q = draw(st.floats(-1, 1)) * math.sqrt(20 * N)
    return Q, draw(broad), draw(st.floats(0, 5)) * N, N


@given(pulses())
def test_wineland_is_ku_over_contrast(pulse):
    Q, F, n_sc, N = pulse
    o = squeeze_outcome(Q, F, 0.0, n_sc, N)
    assert o.xi2_wineland == pytest.approx(o.xi2_ku / o.contrast ** 2, rel=1e-12)
    off = squeeze_outcome(Q, F, 0.0, n_sc, N, curvature=False)
    assert off.contrast == pytest.approx(math.exp(-n_sc / N))
    assert off.xi2_ku == pytest.approx(xi2_ku(Q, F)[0], rel=1e-12)


def test_curvature_term():
    N, Q, F = 1000, 20.0, 1.0
    ku = xi2_ku(Q, F)[0] + Q ** 4 / (24 * (N / 2) ** 2)
    assert wineland(Q, F, 0.0, N) == pytest.approx(ku / math.exp(-Q * Q / (2 * N)) ** 2, rel=1e-14)


def test_optimal_photon_fraction_is_half():
    """In the large-N limit xi^2 ~ p^-1 exp(2p); its minimum sits at p = 1/2."""
    N = 1e6
    ps = np.linspace(0.05, 2.0, 3901)
    # per-photon Q and F chosen in the large-detuning regime, Q^2 >> F
    q, f = 1.0, 1e-3
    xi = [wineland(q * p * N, f * p * N, p * N, N, curvature=False) for p in ps]
    assert ps[int(np.argmin(xi))] == pytest.approx(0.5, rel=0.02)


def test_rotation_is_orthogonal():
    R = rotation(0.3)
    assert np.allclose(R @ R.T, np.eye(2), atol=1e-15)
