import cmath
import math

import hypothesis.strategies as st
import numpy as np
import pytest
from hypothesis import given

from cavity_squeeze.cavity import AtomParams, CavityParams, ProbePoint, field_response, probe_at
from cavity_squeeze.fourlevel import FourLevelPoint, RamanModel
from cavity_squeeze.oracle import fidelity_qfi, poisson_fisher
from cavity_squeeze.qfi import (DetectionSetup, chirp_fisher, coherent_qfi, detection_variance,
                                measurement_fisher, output_qfi, qfi_split, total_F, total_F_channels)
from cavity_squeeze.spinlight import PhotonBudget, photon_budget
from cavity_squeeze.sweep import _chirp_probe, best_chirp

from conftest import GAMMA, KAPPA

finite = st.floats(-10, 10)


@st.composite
def smooth_alpha(draw):
    """alpha(x) = (a0 + a1 x + a2 x^2) exp(i (p0 + p1 x + p2 x^2))."""
    a = [draw(st.floats(0.5, 5)), draw(st.floats(-3, 3)), draw(st.floats(-1, 1))]
    p = [draw(finite), draw(st.floats(-3, 3)), draw(st.floats(-1, 1))]
    x0 = draw(st.floats(-0.2, 0.2))

    def A(x):
        return a[0] + a[1] * x + a[2] * x * x

    def dA(x):
        return a[1] + 2 * a[2] * x

    def ph(x):
        return p[0] + p[1] * x + p[2] * x * x

    def dph(x):
        return p[1] + 2 * p[2] * x

    alpha = lambda x: A(x) * cmath.exp(1j * ph(x))
    dalpha = lambda x: (dA(x) + 1j * A(x) * dph(x)) * cmath.exp(1j * ph(x))
    return alpha, dalpha, A, dA, x0


# ------------------------------------------------------------ coherent QFI

def test_coherent_qfi_trivial():
    assert coherent_qfi(0.0) == 0.0
    assert coherent_qfi(1.0) == 4.0
    assert 1.0 / math.sqrt(coherent_qfi(1.0)) == 0.5


def test_split_trivial():
    radial = qfi_split(2.0 + 0j, 3.0 + 0j)
    assert radial.phase == 0.0 and radial.amplitude == pytest.approx(36.0)
    rot = qfi_split(2.0 + 0j, 2j)
    assert rot.amplitude == 0.0 and rot.phase == pytest.approx(16.0)
    mixed = qfi_split(1 + 1j, 1 + 1j)
    assert mixed.amplitude + mixed.phase == pytest.approx(8.0, rel=1e-14)
    origin = qfi_split(0.0, 1.0 + 1.0j)
    assert origin.amplitude_only and origin.total == pytest.approx(8.0)


@given(st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False).filter(lambda z: abs(z) > 1e-6),
       st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False))
def test_split_sums_to_total(a, da):
    s = qfi_split(a, da)
    assert s.amplitude >= 0 and s.phase >= 0
    assert s.amplitude + s.phase == pytest.approx(s.total, rel=1e-9, abs=1e-300)


@given(smooth_alpha())
def test_matches_fidelity_oracle(f):
    alpha, dalpha, *_, x0 = f
    fq = coherent_qfi(dalpha(x0))
    assert fidelity_qfi(alpha, x0) == pytest.approx(fq, rel=1e-6, abs=1e-9)


def test_fidelity_hand_values():
    assert fidelity_qfi(lambda x: x, 0.3) == pytest.approx(4.0, rel=1e-9)
    assert fidelity_qfi(lambda x: cmath.exp(1j * x), 0.0) == pytest.approx(4.0, rel=1e-6)


@given(smooth_alpha())
def test_poisson_equals_amplitude_component(f):
    alpha, dalpha, A, dA, x0 = f
    fc = poisson_fisher(lambda x: abs(alpha(x)) ** 2, x0)
    assert fc == pytest.approx(qfi_split(alpha(x0), dalpha(x0)).amplitude, rel=1e-6, abs=1e-8)


def test_cavity_output_split_matches_oracle(resonant):
    """Transmitted amplitude along the detuning axis, checked with the overlap oracle."""
    cav, atoms = resonant
    n_in = 50.0

    def alpha(x):
        p = probe_at(x, cav, atoms, 500)
        return field_response(cav, atoms, p).e_t * math.sqrt(n_in)

    for x0 in (-60.0, -20.0, 3.0, 47.0):
        h = 1e-5
        da = (alpha(x0 + h) - alpha(x0 - h)) / (2 * h)
        split = qfi_split(alpha(x0), da)
        assert fidelity_qfi(alpha, x0) == pytest.approx(split.total, rel=1e-6)


# ---------------------------------------------------------- cavity Fisher

@st.composite
def points(draw):
    return ProbePoint(x_a=draw(st.floats(-200, 200)), x_c=draw(st.floats(-100, 100)),
                      n_up=draw(st.floats(1, 3000)), budget=draw(st.floats(0.1, 2000)))


def test_total_F_trivial(resonant):
    cav, atoms = resonant
    p = probe_at(20.0, cav, atoms, 500, budget=0.0)
    assert total_F(cav, atoms, p) == 0.0


@given(points(), st.floats(0.01, 100))
def test_total_F_linear(p, lam):
    cav = CavityParams(T1=30e-6, T2=453.3e-6, kappa=KAPPA)
    atoms = AtomParams(gamma=GAMMA, eta=1.8)
    q = ProbePoint(p.x_a, p.x_c, p.n_up, "n_sc", lam * p.budget)
    assert total_F(cav, atoms, q) == pytest.approx(lam * total_F(cav, atoms, p), rel=1e-12)


def test_total_F_two_routes_resonant_grid(resonant):
    cav, atoms = resonant
    worst = 0.0
    for x in np.linspace(-150, 150, 500):
        p = probe_at(x, cav, atoms, 500, budget=400.0)
        a, b = total_F(cav, atoms, p), total_F_channels(cav, atoms, p)
        worst = max(worst, abs(a - b) / a)
    assert worst < 1e-8


@given(points())
def test_total_F_two_routes_random(p):
    cav = CavityParams(T1=1e-4, T2=3e-4, kappa=KAPPA)
    atoms = AtomParams(gamma=GAMMA, eta=0.7)
    a, b = total_F(cav, atoms, p), total_F_channels(cav, atoms, p)
    assert a == pytest.approx(b, rel=1e-8, abs=1e-300)


@given(points(), st.floats(0.05, 1.0))
def test_measurable_never_exceeds_total(p, q):
    cav = CavityParams(T1=30e-6, T2=453.3e-6, kappa=KAPPA)
    atoms = AtomParams(gamma=GAMMA, eta=1.8)
    b = photon_budget(cav, atoms, p)
    F = total_F(cav, atoms, p, b)
    for mode in ("transmission", "both"):
        assert measurement_fisher(cav, atoms, p, DetectionSetup(mode, q), b) <= F * (1 + 1e-12)


def test_measurement_fisher_scaling(resonant):
    cav, atoms = resonant
    p1 = probe_at(40.0, cav, atoms, 500, budget_kind="n_in", budget=1e3)
    p2 = probe_at(40.0, cav, atoms, 500, budget_kind="n_in", budget=2e3)
    s = DetectionSetup()
    assert measurement_fisher(cav, atoms, p2, s) == pytest.approx(2 * measurement_fisher(cav, atoms, p1, s),
                                                                  rel=1e-14)
    half = DetectionSetup(q_eff=0.5)
    assert measurement_fisher(cav, atoms, p1, half) == pytest.approx(0.5 * measurement_fisher(cav, atoms, p1, s))


def test_transmitted_output_split_matches_measurement(resonant):
    cav, atoms = resonant
    p = probe_at(45.0, cav, atoms, 500, budget=400.0)
    out = output_qfi(cav, atoms, p)
    assert out.normalized == pytest.approx(measurement_fisher(cav, atoms, p, DetectionSetup()), rel=1e-12)
    with pytest.raises(ValueError):
        output_qfi(cav, atoms, p, port="x")


def test_phase_dominates_on_resonant_cavity(resonant):
    """With omega_c = omega_a the best measurable information is in the phase quadrature."""
    cav, atoms = resonant
    xs = np.linspace(-150, 150, 6000)
    out = [output_qfi(cav, atoms, probe_at(x, cav, atoms, 500, budget=400.0)) for x in xs]
    amp = np.array([o.amplitude for o in out])
    ph = np.array([o.phase for o in out])
    assert ph.max() > 3 * amp.max()
    assert abs(xs[np.argmax(ph)]) == pytest.approx(50.2, abs=0.2)


def test_setup_validation():
    with pytest.raises(ValueError):
        DetectionSetup(q_eff=0.0)
    with pytest.raises(ValueError):
        DetectionSetup(t_tot_mode="side")
    cav = CavityParams(T1=1e-4, T2=2e-4)
    assert DetectionSetup().t_tot(cav) == 2e-4
    assert DetectionSetup("both").t_tot(cav) == pytest.approx(3e-4)


# ------------------------------------------------------------------- chirp

def _resonant(cav, eta_down=0.0):
    atoms = AtomParams(gamma=GAMMA, eta=1.8, eta_down=eta_down, b=230.0)
    return atoms, FourLevelPoint.at(cav, atoms, 1000, 0.0, 0.0)


def test_chirp_symmetric_measured_equals_quantum(yb):
    cav, _ = yb
    atoms, flp = _resonant(cav)
    wm = best_chirp(cav, atoms, flp)
    unit = PhotonBudget(1.0, math.nan, math.nan, None, "n_in")
    ch = chirp_fisher(cav, atoms, _chirp_probe(flp), DetectionSetup(omega_m=wm), unit, flp)
    assert ch.measured == pytest.approx(ch.quantum, rel=1e-9)
    assert ch.n_t[0] == pytest.approx(ch.n_t[1], rel=1e-12)


def test_chirp_prefers_resonant_cavity(yb):
    cav, _ = yb
    atoms, flp = _resonant(cav)
    wm = best_chirp(cav, atoms, flp)
    unit = PhotonBudget(1.0, math.nan, math.nan, None, "n_in")
    ref = chirp_fisher(cav, atoms, _chirp_probe(flp), DetectionSetup(omega_m=wm), unit, flp).measured
    for off in (-KAPPA / 10, KAPPA / 10):
        d = FourLevelPoint.at(cav, atoms, 1000, 0.0, off)
        assert chirp_fisher(cav, atoms, _chirp_probe(d), DetectionSetup(omega_m=wm), unit, d).measured < ref


def test_chirp_empty_cavity_symmetric(yb):
    cav, _ = yb
    atoms = AtomParams(gamma=GAMMA, eta=1.8, b=230.0)
    flp = FourLevelPoint(0.0, 0.0, 230.0, 0.0, 0.0, 1.8, 0.6)
    unit = PhotonBudget(1.0, math.nan, math.nan, None, "n_in")
    ch = chirp_fisher(cav, atoms, _chirp_probe(flp), DetectionSetup(omega_m=KAPPA), unit, flp)
    assert ch.n_t[0] == pytest.approx(ch.n_t[1], rel=1e-14)
    assert ch.quantum == 0.0


def test_chirp_needs_modulation(resonant):
    cav, atoms = resonant
    with pytest.raises(ValueError):
        chirp_fisher(cav, atoms, probe_at(0.0, cav, atoms, 500, budget_kind="n_in", budget=1.0),
                     DetectionSetup())


# --------------------------------------------------------------- detection

def test_detection_variance_no_light(resonant):
    cav, atoms = resonant
    p = probe_at(30.0, cav, atoms, 500, budget_kind="n_in", budget=0.0)
    assert detection_variance(cav, atoms, p, DetectionSetup(q_eff=0.15)) == 1.0


def test_detection_variance_includes_raman(yb):
    cav, atoms = yb
    flp = FourLevelPoint.at(cav, atoms, 1000, 0.0, 0.0)
    p = ProbePoint(flp.x_a, flp.x_c, flp.n_up, "n_in", 1e4, n_atoms=1000)
    setup = DetectionSetup(q_eff=0.15)
    bare = detection_variance(cav, atoms, p, setup, fl=flp)
    noisy = detection_variance(cav, atoms, p, setup, raman=RamanModel(), fl=flp)
    silent = detection_variance(cav, atoms, p, setup, raman=RamanModel(branching=0.0), fl=flp)
    assert noisy > bare and silent == bare
