import math

import hypothesis.strategies as st
import numpy as np
import pytest
from hypothesis import given

from cavity_squeeze.cavity import AtomParams, CavityParams, probe_at, transmission
from cavity_squeeze.oracle import (css, delta_eff_printed, effective_detuning, fidelity_qfi,
                                   oat_exact_contrast, poisson_fisher, spin_moments, variance_alpha_scan)
from cavity_squeeze.spinlight import light_shift_per_photon

from conftest import GAMMA, KAPPA


@pytest.mark.parametrize("N", [1, 2, 10, 100, 1000])
def test_css_norm_and_total_spin(N):
    st_ = css(N, 1.1, 0.4)
    m = spin_moments(st_)
    S = N / 2
    assert m["norm"] == pytest.approx(1.0, abs=1e-12)
    assert m["S2"] == pytest.approx(S * (S + 1), rel=1e-9)


def test_css_large_n_stable():
    st_ = css(4000, math.pi / 2)
    assert np.all(np.isfinite(st_.amplitudes))
    assert spin_moments(st_)["norm"] == pytest.approx(1.0, abs=1e-12)


def test_css_pole_and_hand_values():
    pole = css(6, 0.0).amplitudes
    assert abs(pole[0]) == 1.0 and np.all(pole[1:] == 0)
    eq = css(2, math.pi / 2, 0.0).amplitudes
    assert np.allclose(eq, [0.5, 1 / math.sqrt(2), 0.5], atol=1e-15)
    with pytest.raises(ValueError):
        css(0, 0.0)


@given(st.floats(0.05, math.pi - 0.05), st.floats(-math.pi, math.pi), st.integers(2, 300))
def test_css_transverse_noise(theta, phi, N):
    m = spin_moments(css(N, theta, phi))
    S = N / 2
    mean = np.array([m["Sx"], m["Sy"], m["Sz"]])
    assert np.linalg.norm(mean) == pytest.approx(S, rel=1e-9)
    # total variance = S(S+1) - |<S>|^2 = S, split equally across two transverse directions
    assert m["var_x"] + m["var_y"] + m["var_z"] == pytest.approx(S, rel=1e-8)
    assert m["var_z"] == pytest.approx(S / 2 * math.sin(theta) ** 2, rel=1e-8, abs=1e-8 * S)


def test_oat_contrast_values():
    assert oat_exact_contrast(100, 0.0) == pytest.approx(1.0, abs=1e-14)
    c = oat_exact_contrast(100, 10.0)
    assert c == pytest.approx(math.cos(0.1) ** 99, abs=1e-10)
    assert c == pytest.approx(0.6088, abs=5e-4)
    with pytest.raises(ValueError):
        oat_exact_contrast(1, 1.0)


@given(st.integers(2, 400), st.floats(0, 30))
def test_oat_contrast_closed_form(N, Q):
    assert oat_exact_contrast(N, Q) == pytest.approx(math.cos(Q / N) ** (N - 1), abs=1e-10)


def test_alpha_scan_values():
    lo, hi, arg = variance_alpha_scan(0.0, 0.0)
    assert lo == pytest.approx(1.0) and hi == pytest.approx(1.0)
    lo, _, arg = variance_alpha_scan(0.0, 3.0)
    assert lo == pytest.approx(1.0) and arg == pytest.approx(0.0, abs=1e-4)
    lo, _, arg = variance_alpha_scan(3.0, 1.0)
    assert lo == pytest.approx(0.16905, abs=1e-5)
    a = 1 + 9.0
    assert math.tan(arg) == pytest.approx((math.sqrt(36 + a * a) - a) / 6, abs=1e-4)
    with pytest.raises(ValueError):
        variance_alpha_scan(1.0, 1.0, n_grid=10)


def test_fidelity_qfi_values():
    for x0 in (-2.0, 0.0, 5.0):
        assert fidelity_qfi(lambda x: x, x0) == pytest.approx(4.0, rel=1e-9)
    assert fidelity_qfi(lambda x: complex(math.cos(x), math.sin(x)), 0.0) == pytest.approx(4.0, rel=1e-6)
    with pytest.raises(ValueError):
        fidelity_qfi(lambda x: complex(math.inf, 0.0), 0.0)


def test_poisson_values():
    assert poisson_fisher(lambda x: 3.0, 1.0) == 0.0
    assert poisson_fisher(lambda x: x, 4.0) == pytest.approx(0.25, rel=1e-9)
    with pytest.raises(ValueError):
        poisson_fisher(lambda x: 0.0, 1.0)


# ------------------------------------------------------------ light shift

def _yb():
    return CavityParams(T1=30e-6, T2=453.3e-6, kappa=KAPPA), AtomParams(gamma=GAMMA, eta=1.8)


def test_effective_detuning_trivial():
    cav, atoms = _yb()
    p = probe_at(20.0, cav, atoms, 300)
    assert effective_detuning(cav, atoms, p, 0.0).delta_eff == 0.0
    dark = AtomParams(gamma=GAMMA, eta=0.0)
    assert effective_detuning(cav, dark, probe_at(20.0, cav, dark, 300), 1e3).delta_eff == 0.0


@st.composite
def light_draws(draw):
    cav, atoms = _yb()
    p = probe_at(draw(st.floats(-80, 80).filter(lambda v: abs(v) > 0.5)), cav, atoms,
                 draw(st.floats(10, 800)), draw(st.floats(-1e6, 1e6)))
    return cav, atoms, p, 10.0 ** draw(st.floats(0, 4))


@given(light_draws())
def test_effective_detuning_matches_dispersive_shift(d):
    cav, atoms, p, drive = d
    r = effective_detuning(cav, atoms, p, drive)
    _, T = transmission(cav, atoms, p)
    n_c = T * drive / (cav.T2 * cav.kappa)
    ref = -light_shift_per_photon(cav, atoms, p) * n_c
    if r.valid:
        assert r.delta_eff == pytest.approx(ref, rel=1e-6)
    assert r.photons == pytest.approx(2 * math.pi / cav.finesse * n_c, rel=1e-9)


def test_printed_closed_form_lacks_odd_parity():
    """The printed expression is even in the detunings, so it cannot track the odd light shift."""
    cav, atoms = _yb()
    a = delta_eff_printed(cav, atoms, 5 * GAMMA, 5 * GAMMA / 2.8, 300, 1e3)
    b = delta_eff_printed(cav, atoms, -5 * GAMMA, -5 * GAMMA / 2.8, 300, 1e3)
    assert a == pytest.approx(b, rel=1e-14)
    p = probe_at(10.0, cav, atoms, 300)
    m = probe_at(-10.0, cav, atoms, 300)
    assert effective_detuning(cav, atoms, p, 1e3).delta_eff == pytest.approx(
        -effective_detuning(cav, atoms, m, 1e3).delta_eff, rel=1e-12)
