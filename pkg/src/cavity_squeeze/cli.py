"""cavity-squeeze command line.

Exit codes: 0 success, 2 configuration error, 3 no solver solution,
4 oracle validation failure.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import warnings

import numpy as np

from . import config as C
from . import oracle
from .cavity import (AtomParams, CavityParams, ProbePoint, _beta, free_space_cooperativity,
                     free_space_power, intracavity_field, lossy_fields, map_lossless, probe_at,
                     transmission)
from .fourlevel import FourLevelPoint, NoSolutionError, RamanModel, fl_transmission, two_color_solve
from .gaussian import optimal_angle, xi2_ku
from .qfi import _dec_dSz, coherent_qfi, qfi_split
from .spinlight import light_shift_per_photon
from .sweep import (Context, DetectionContext, ScanResult, ScanSpec, detection_scan, log_grid,
                    optimize_gain, point_four_level, point_three_level, scaling_fit, wineland_scan)

EXIT_CONFIG, EXIT_SOLVER, EXIT_VALIDATION = 2, 3, 4
MHZ = 2.0 * math.pi * 1e6


def _context(b: C.Built, N=None):
    p = b.cfg["probe"]
    x_a = p["x_a"]
    if p["detuning_hz"] is not None:
        x_a = 2.0 * C._hz(p["detuning_hz"]) / b.atoms.gamma
    if p["budget_kind"] != "n_sc" and p["p"] is None:
        raise C.ConfigError("probe.budget_kind: scans and squeeze use an n_sc budget (or probe.p)")
    return Context(b.core, b.atoms, p["N"] if N is None else N, x_a, p["budget"], p["p"],
                   C._hz(p["cavity_offset_hz"]))


# ------------------------------------------------------------ subcommands

def cmd_spectrum(b: C.Built, args):
    s, p = b.cfg["spectrum"], b.cfg["probe"]
    off = C._hz(p["cavity_offset_hz"])
    rows = []
    for f in np.linspace(s["start_hz"], s["stop_hz"], s["points"]):
        w = C._hz(f)
        if p["model"] == "four_level":
            flp = FourLevelPoint.at(b.core, b.atoms, p["N"], w, off)
            T0, T = fl_transmission(b.core, flp)
            xa, xc = flp.x_a, flp.x_c
        else:
            pt = probe_at(2.0 * w / b.atoms.gamma, b.core, b.atoms, p["N"] / 2.0, off)
            T0, T = transmission(b.core, b.atoms, pt)
            xa, xc = pt.x_a, pt.x_c
        rows.append((f, xa, xc, T0, T))
    return ScanResult(("detuning_hz", "x_a", "x_c", "T0", "T"), np.array(rows),
                      {"command": "spectrum", "model": p["model"]})


def cmd_squeeze(b: C.Built, args):
    ctx = _context(b)
    p = b.cfg["probe"]
    point = point_four_level if p["model"] == "four_level" else point_three_level
    n_sc = ctx.budget()
    Q, F, dphi, c, ku, xi2, xc, nt = point(ctx, ctx.x_a, ctx.N, n_sc, p["curvature"])
    alpha = optimal_angle(Q, F)
    cols = ("x_a", "x_c", "n_sc", "n_t", "Q", "F", "delta_phi", "C", "xi2_ku", "xi2", "alpha_opt")
    row = (ctx.x_a, xc, n_sc, nt, Q, F, dphi, c, ku, xi2, alpha)
    return ScanResult(cols, np.array([row]), {"command": "squeeze", "model": p["model"]})


def _grid(s):
    if s["scale"] == "log":
        if s["start"] <= 0 or s["stop"] <= 0:
            raise C.ConfigError("scan.start: log scale needs positive bounds")
        return np.geomspace(s["start"], s["stop"], s["points"])
    return np.linspace(s["start"], s["stop"], s["points"])


def cmd_wineland_scan(b: C.Built, args):
    p = b.cfg["probe"]
    try:
        spec = ScanSpec(b.cfg["scan"]["variable"], tuple(_grid(b.cfg["scan"])), _context(b),
                        p["curvature"], p["model"])
    except ValueError as e:
        raise C.ConfigError(f"scan: {e}") from None
    return wineland_scan(spec)


def cmd_optimize(b: C.Built, args):
    o, p = b.cfg["optimize"], b.cfg["probe"]
    best = optimize_gain(_context(b), p["N"], p["curvature"], (o["x_a_min"], o["x_a_max"]),
                         o["per_decade"])
    cols = ("N", "x_a", "n_sc", "p", "gain", "gain_db", "Q", "F")
    row = (p["N"], best.x_a, best.n_sc, best.n_sc / p["N"], best.gain,
           10 * math.log10(best.gain), best.Q, best.F)
    return ScanResult(cols, np.array([row]), {"command": "optimize", "curvature": p["curvature"]})


def cmd_scaling(b: C.Built, args):
    o, p = b.cfg["optimize"], b.cfg["probe"]
    rows = []
    for N in o["N_list"]:
        best = optimize_gain(_context(b, N), N, p["curvature"], (o["x_a_min"], o["x_a_max"]),
                             o["per_decade"])
        rows.append((N, best.x_a, best.n_sc, best.n_sc / N, best.gain))
    rows = np.array(rows)
    if len(rows) < 4:
        raise C.ConfigError("optimize.N_list: scaling needs at least 4 atom numbers")
    g = scaling_fit(zip(rows[:, 0], rows[:, 4]), exclude_breakdown=p["curvature"])
    x = scaling_fit(zip(rows[:, 0], rows[:, 1]))
    prov = {"command": "scaling", "curvature": p["curvature"],
            "gain_exponent": g.exponent, "gain_exponent_stderr": g.stderr,
            "excluded_N": list(g.excluded), "x_a_exponent": x.exponent,
            "x_a_exponent_stderr": x.stderr}
    return ScanResult(("N", "x_a", "n_sc", "p", "gain"), rows, prov)


def cmd_detection_scan(b: C.Built, args):
    d, a = b.cfg["detection"], b.cfg["atoms"]
    ctx = DetectionContext(b.cavity, b.atoms, b.cfg["probe"]["N"], d["q_eff"],
                           RamanModel(branching=a["branching"]), C._hz(d["omega_m_hz"]),
                           C._hz(d["cavity_offset_hz"]), C._hz(d["centre_hz"]))
    return detection_scan(ctx, log_grid(d["n_d_min"], d["n_d_max"], d["per_decade"]))


def cmd_two_color(b: C.Built, args):
    t = b.cfg["two_color"]
    win = None
    if t["window_lo_hz"] is not None and t["window_hi_hz"] is not None:
        win = (C._hz(t["window_lo_hz"]), C._hz(t["window_hi_hz"]))
    pulse = two_color_solve(b.core, b.atoms, b.cfg["probe"]["N"], C._hz(t["omega_l1_hz"]),
                            C._hz(t["cavity_offset_hz"]), window=win, phase_sign=t["phase_sign"])
    cols = ("omega_l1_mhz", "omega_l2_mhz", "gamma", "q_over_f", "residual_q", "residual_phi")
    row = (pulse.omega_l1 / MHZ, pulse.omega_l2 / MHZ, pulse.gamma_ratio, pulse.q_over_f,
           pulse.residual_q, pulse.residual_phi)
    return ScanResult(cols, np.array([row]), {"command": "two-color",
                                              "phase_sign": t["phase_sign"]})


def cmd_map_lossless(b: C.Built, args):
    try:
        m = map_lossless(b.cavity)
    except ValueError as e:
        raise C.ConfigError(f"cavity: {e}") from None
    pw = m.powers()
    return ScanResult(tuple(pw), np.array([list(pw.values())]), {"command": "map-lossless"})


# -------------------------------------------------------------- validation

def validation_suite():
    """(name, passed, detail) for each oracle cross-check."""
    out = []

    def check(name, ok, detail):
        out.append((name, bool(ok), detail))

    worst = 0.0
    for N in (1, 2, 10, 100, 1000):
        m = oracle.spin_moments(oracle.css(N, 1.1, 0.4))
        S = N / 2.0
        worst = max(worst, abs(m["norm"] - 1), abs(m["S2"] / (S * (S + 1)) - 1))
    check("css norm and total spin", worst <= 1e-9, f"max rel err {worst:.2e}")

    worst = max(abs(oracle.oat_exact_contrast(N, Q) - math.cos(Q / N) ** (N - 1))
                for N, Q in ((10, 1.0), (100, 10.0), (400, 25.0)))
    check("one-axis twisting contrast closed form", worst <= 1e-10, f"max abs err {worst:.2e}")

    worst = 0.0
    for N in (50, 100, 400):
        for Q in np.linspace(0.0, math.sqrt(2 * N), 6):
            ex = oracle.oat_exact_contrast(N, Q)
            worst = max(worst, abs(math.exp(-Q * Q / (2 * N)) / ex - 1))
    check("Bloch contrast vs Dicke sum", worst <= 0.05, f"max rel err {worst:.2e}")

    worst = 0.0
    for Q, F in ((0.0, 0.0), (3.0, 1.0), (10.0, 5.0), (0.3, 20.0)):
        lo, hi, _ = oracle.variance_alpha_scan(Q, F)
        m, p = xi2_ku(Q, F)
        worst = max(worst, abs(lo - m), abs(hi - p) / p)
    check("xi^2 vs angle scan", worst <= 1e-6, f"max err {worst:.2e}")

    cav = CavityParams(T1=2e-4, T2=2e-4, kappa=2 * math.pi * 520e3)
    at = AtomParams(gamma=2 * math.pi * 184e3, eta=1.8)
    worst = 0.0
    for xa in (-30.0, 5.0, 50.2, 80.0):
        def alpha(sz, xa=xa):
            pt = probe_at(xa, cav, at, 450.0 + sz, 0.0)
            return 1j * cav.t2 * intracavity_field(cav, at, pt) * 10.0
        pt = probe_at(xa, cav, at, 450.0, 0.0)
        _, dec = _dec_dSz(cav, at, pt)
        da = 1j * cav.t2 * dec * 10.0
        fq = coherent_qfi(da)
        worst = max(worst, abs(oracle.fidelity_qfi(alpha, 0.0, 1e-4) / fq - 1))
        amp = qfi_split(alpha(0.0), da).amplitude
        fc = oracle.poisson_fisher(lambda s: abs(alpha(s)) ** 2, 0.0, 1e-4)
        worst = max(worst, abs(fc - amp) / fq)
    check("coherent QFI vs fidelity and Poisson", worst <= 1e-6, f"max rel err {worst:.2e}")

    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(20):
        pt = probe_at(rng.uniform(-80, 80), cav, at, rng.uniform(10, 800),
                      rng.uniform(-1e6, 1e6), budget_kind="n_t", budget=1.0)
        drive = 10.0 ** rng.uniform(0, 4)
        r = oracle.effective_detuning(cav, at, pt, drive)
        _, T = transmission(cav, at, pt)
        n_c = T * drive / (cav.T2 * cav.kappa)
        ref = -light_shift_per_photon(cav, at, pt) * n_c
        if r.valid:
            worst = max(worst, abs(r.delta_eff / ref - 1))
    check("microscopic light shift vs dispersive coefficient", worst <= 1e-6,
          f"max rel err {worst:.2e}")

    table = CavityParams(T1=30e-6, L1=30e-6, T2=196e-6, L2=227.3e-6, finesse=13e3)
    pw = map_lossless(table).powers()
    ref = {"T1*": 30e-6, "T2*": 453.3e-6, "T3*": 0.4324}
    worst = max(abs(pw[k] / v - 1) for k, v in ref.items())
    check("lossless map reproduces the table", worst <= 1e-4, f"max rel err {worst:.2e}")

    pt = ProbePoint(x_a=3.0, x_c=1.0, n_up=200.0)
    kL = np.linspace(0.0, math.pi, 1000)
    fr = lossy_fields(cav, at, pt, kL)
    beta = _beta(at, pt, free_space_cooperativity(cav, at))
    bal = np.abs(fr.e_t) ** 2 + np.abs(fr.e_r) ** 2 + free_space_power(fr.e_c, beta)
    err = float(np.max(np.abs(bal - 1.0)))
    check("energy balance of the exact fields", err <= 1e-9, f"max err {err:.2e}")
    return out


def cmd_validate(b, args):
    rows = validation_suite()
    width = max(len(r[0]) for r in rows)
    for name, ok, detail in rows:
        print(f"{'PASS' if ok else 'FAIL'}  {name:<{width}}  {detail}")
    return all(ok for _, ok, _ in rows)


COMMANDS = {
    "spectrum": cmd_spectrum, "squeeze": cmd_squeeze, "wineland-scan": cmd_wineland_scan,
    "optimize": cmd_optimize, "scaling": cmd_scaling, "detection-scan": cmd_detection_scan,
    "two-color": cmd_two_color, "map-lossless": cmd_map_lossless, "validate": cmd_validate,
}


def _apply_set(data, item):
    if "=" not in item:
        raise C.ConfigError(f"--set {item}: expected section.key=value")
    key, val = item.split("=", 1)
    if "." not in key:
        raise C.ConfigError(f"--set {key}: expected section.key")
    sec, k = key.split(".", 1)
    try:
        v = C.tomllib.loads(f"v = {val}")["v"]
    except C.tomllib.TOMLDecodeError:
        v = val
    data.setdefault(sec, {})[k] = v


def build_parser():
    ap = argparse.ArgumentParser(prog="cavity-squeeze",
                                 description="Cavity spin-squeezing numerics.")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("-c", "--config", help="TOML config, or a JSON document from --json")
    ap.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE",
                    help="override one config value (repeatable)")
    ap.add_argument("--omega-l1-mhz", type=float, help="two-color: first pulse detuning in MHz")
    ap.add_argument("--json", action="store_true", help="emit one JSON document")
    ap.add_argument("--out", help="write to this file instead of stdout")
    return ap


def _to_nested(cfg):
    return {s: dict(v) for s, v in cfg.items()}


def run(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.config:
            cfg = C.load(args.config)
            base = _to_nested(cfg)
        else:
            base = {}
        for item in args.set:
            _apply_set(base, item)
        if args.omega_l1_mhz is not None:
            base.setdefault("two_color", {})["omega_l1_hz"] = args.omega_l1_mhz * 1e6
        cfg = C.parse(base)
        built = C.build(cfg)
        if args.command == "validate":
            return 0 if cmd_validate(built, args) else EXIT_VALIDATION
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            res = COMMANDS[args.command](built, args)
    except C.ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except NoSolutionError as e:
        print(f"no solution: {e}", file=sys.stderr)
        return EXIT_SOLVER
    if args.json:
        doc = res.to_dict()
        doc["config"] = cfg
        text = json.dumps(doc, indent=1, sort_keys=True) + "\n"
    else:
        text = res.to_csv()
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
