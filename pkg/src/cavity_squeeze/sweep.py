"""Parameter scans, optimizers and fits.

Work is spread over a thread pool sized by CAVITY_SQUEEZE_THREADS (default
1); results are always returned in grid order, so parallel and serial runs
give identical rows.
"""
from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.stats import linregress

from .cavity import AtomParams, CavityParams, ProbePoint, map_lossless, probe_at
from .fourlevel import (FourLevelPoint, NoSolutionError, RamanModel, compensation_detuning,
                        fl_squeeze, two_color_solve)
from .gaussian import squeeze_outcome, wineland
from .qfi import DetectionSetup, chirp_fisher, detection_variance, total_F
from .spinlight import PhotonBudget, photon_budget, shearing

VARIABLES = ("x_a", "n_sc", "N", "n_d", "omega_l1")
MODELS = ("three_level", "four_level")


def n_threads():
    v = os.environ.get("CAVITY_SQUEEZE_THREADS", "1")
    try:
        n = int(v)
    except ValueError:
        raise ValueError(f"CAVITY_SQUEEZE_THREADS={v!r} is not an integer") from None
    return max(1, n)


def pmap(fn, items, threads=None):
    """Ordered map over a thread pool; serial when one thread is requested."""
    items = list(items)
    t = n_threads() if threads is None else threads
    if t <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=t) as ex:
        return list(ex.map(fn, items))


def fmt(v):
    """CSV number: 12 significant digits, no locale."""
    if isinstance(v, str):
        return v
    if v is None:
        return ""
    v = float(v)
    return format(v + 0.0 if v == 0 else v, ".12g")  # no "-0"


@dataclass(frozen=True)
class Context:
    """Everything held fixed during a scan.

    The photon budget is n_sc, or p = n_sc/N when p is given.  Detunings are
    normalized to the |up> line; cavity_offset = omega_c - omega_a (angular).
    """

    cav: CavityParams
    atoms: AtomParams
    N: float = 1000.0
    x_a: float = 10.0
    n_sc: float = 400.0
    p: float | None = None
    cavity_offset: float = 0.0

    def budget(self, N=None):
        N = self.N if N is None else N
        return self.p * N if self.p is not None else self.n_sc

    def echo(self):
        return {"cavity": asdict(self.cav), "atoms": asdict(self.atoms), "N": self.N,
                "x_a": self.x_a, "n_sc": self.n_sc, "p": self.p,
                "cavity_offset": self.cavity_offset}


@dataclass(frozen=True)
class ScanSpec:
    variable: str
    grid: tuple
    fixed: Context
    curvature: bool = True
    model: str = "three_level"

    def __post_init__(self):
        if self.variable not in VARIABLES:
            raise ValueError(f"variable must be one of {VARIABLES}")
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}")
        g = np.asarray(self.grid, dtype=float)
        if g.ndim != 1 or g.size < 2:
            raise ValueError("grid needs at least two points")
        d = np.diff(g)
        if not (np.all(d > 0) or np.all(d < 0)):
            raise ValueError("grid must be strictly monotone")
        object.__setattr__(self, "grid", tuple(float(v) for v in g))


@dataclass(frozen=True)
class ScanResult:
    columns: tuple
    rows: np.ndarray
    provenance: dict = field(default_factory=dict)

    def column(self, name):
        return self.rows[:, self.columns.index(name)]

    def to_csv(self, stream=None):
        out = io.StringIO() if stream is None else stream
        w = csv.writer(out, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([fmt(v) for v in r])
        return out.getvalue() if stream is None else None

    def to_dict(self):
        return {"columns": list(self.columns),
                "rows": [[float(v) for v in r] for r in self.rows],
                "provenance": self.provenance}


# ------------------------------------------------------------ single points

SCAN_COLUMNS = ("value", "Q", "F", "delta_phi", "C", "xi2_ku", "xi2", "x_c", "n_t")


def point_three_level(ctx: Context, x_a, N, n_sc, curvature):
    p = probe_at(x_a, ctx.cav, ctx.atoms, N / 2.0, ctx.cavity_offset,
                 budget_kind="n_sc", budget=n_sc, n_atoms=N)
    b = photon_budget(ctx.cav, ctx.atoms, p)
    ce = shearing(ctx.cav, ctx.atoms, p, b)
    F = total_F(ctx.cav, ctx.atoms, p, b)
    o = squeeze_outcome(ce.Q, F, ce.delta_phi, n_sc, N, curvature)
    return (ce.Q, F, ce.delta_phi, o.contrast, o.xi2_ku, o.xi2_wineland, p.x_c, b.n_t)


def point_four_level(ctx: Context, x_a, N, n_sc, curvature):
    flp = FourLevelPoint.at(ctx.cav, ctx.atoms, N, x_a * ctx.atoms.gamma / 2.0, ctx.cavity_offset)
    unit = fl_squeeze(ctx.cav, flp)
    per_in = unit.n_sc_up + unit.n_sc_down
    n_in = n_sc / per_in if per_in > 0 else 0.0
    Q, F, dphi = unit.Q * n_in, unit.F * n_in, unit.delta_phi * n_in
    o = squeeze_outcome(Q, F, dphi, n_sc, N, curvature)
    return (Q, F, dphi, o.contrast, o.xi2_ku, o.xi2_wineland, flp.x_c, unit.n_t * n_in)


def wineland_scan(spec: ScanSpec) -> ScanResult:
    """Q, F, contrast and squeezing along one of x_a, n_sc or N."""
    ctx = spec.fixed
    if spec.variable not in ("x_a", "n_sc", "N"):
        raise ValueError(f"wineland_scan cannot scan {spec.variable}; "
                         "use detection_scan or two_color_scan")
    point = point_three_level if spec.model == "three_level" else point_four_level

    def one(v):
        x_a, N = ctx.x_a, ctx.N
        if spec.variable == "x_a":
            x_a = v
        elif spec.variable == "N":
            N = v
        n_sc = v if spec.variable == "n_sc" else ctx.budget(N)
        return (v,) + point(ctx, x_a, N, n_sc, spec.curvature)

    rows = np.array(pmap(one, spec.grid), dtype=float)
    prov = {"scan": "wineland", "variable": spec.variable, "curvature": spec.curvature,
            "model": spec.model, "fixed": ctx.echo()}
    return ScanResult(SCAN_COLUMNS, rows, prov)


# ------------------------------------------------------------ optimization

@dataclass(frozen=True)
class GainOptimum:
    x_a: float
    n_sc: float
    gain: float        # 1/xi^2
    Q: float
    F: float


def log_grid(lo, hi, per_decade=64):
    n = max(int(math.ceil(per_decade * math.log10(hi / lo))), 1)
    return np.exp(np.linspace(math.log(lo), math.log(hi), n + 1))


def _per_photon(ctx, x_a, N):
    """(Q, F) per scattered photon; both are linear in n_sc."""
    p = probe_at(x_a, ctx.cav, ctx.atoms, N / 2.0, ctx.cavity_offset,
                 budget_kind="n_sc", budget=1.0, n_atoms=N)
    b = photon_budget(ctx.cav, ctx.atoms, p)
    return shearing(ctx.cav, ctx.atoms, p, b).Q, total_F(ctx.cav, ctx.atoms, p, b)


def _refine(f, xs, i, tol):
    """Golden-section search on the bracket around grid index i (log axis)."""
    if 0 < i < len(xs) - 1:
        r = minimize_scalar(f, bracket=(xs[i - 1], xs[i], xs[i + 1]), method="golden",
                            options={"xtol": tol})
        if xs[i - 1] <= r.x <= xs[i + 1] and r.fun <= f(xs[i]):
            return r.x, r.fun
        return xs[i], f(xs[i])
    lo, hi = xs[max(i - 1, 0)], xs[min(i + 1, len(xs) - 1)]
    r = minimize_scalar(f, bounds=(lo, hi), method="bounded", options={"xatol": tol})
    return (r.x, r.fun) if r.fun <= f(xs[i]) else (xs[i], f(xs[i]))


def best_photons(q, f, N, curvature, n_range=None, per_decade=64):
    """Photon number minimizing xi^2 at fixed detuning: (n_sc, xi2)."""
    lo, hi = n_range or (1e-2, 50.0 * N)
    ln = np.log(log_grid(lo, hi, per_decade))
    with np.errstate(over="ignore", divide="ignore"):
        vals = wineland(q * np.exp(ln), f * np.exp(ln), np.exp(ln), N, curvature)
    i = int(np.argmin(vals))  # first minimum: ties go to fewer photons

    def obj(l):
        n = math.exp(l)
        return float(wineland(q * n, f * n, n, N, curvature))

    l, v = _refine(obj, ln, i, 1e-7)
    return math.exp(l), v


def optimize_gain(fixed: Context, N, curvature, x_range=(1.0, 2000.0), per_decade=64) -> GainOptimum:
    """Best photon number at each detuning, then the best detuning.

    Only x_a > 0 is searched; with omega_c = omega_a the problem is mirror
    symmetric.  Ties resolve toward smaller |x_a| and fewer photons.
    """
    if N < 2:
        raise ValueError("N must be >= 2")
    lx = np.log(log_grid(*x_range, per_decade))

    def inner(l):
        q, f = _per_photon(fixed, math.exp(l), N)
        return best_photons(q, f, N, curvature, per_decade=per_decade)

    coarse = pmap(lambda l: inner(l)[1], lx)
    i = int(np.argmin(coarse))
    l, _ = _refine(lambda l: inner(l)[1], lx, i, 1e-7)
    x = math.exp(l)
    n, v = inner(l)
    q, f = _per_photon(fixed, x, N)
    return GainOptimum(x, n, 1.0 / v, q * n, f * n)


@dataclass(frozen=True)
class ScalingFit:
    exponent: float
    stderr: float
    prefactor: float
    excluded: tuple = ()


def scaling_fit(points, exclude_breakdown=False) -> ScalingFit:
    """Least-squares slope of log(gain) against log(N).

    With exclude_breakdown the smallest N is dropped when its residual from
    the fit through the others exceeds three times their rms residual (and
    at least 1%); the dropped N is reported.
    """
    pts = sorted((float(n), float(g)) for n, g in points)
    if len(pts) < 4:
        raise ValueError("scaling_fit needs at least 4 points")
    if any(n <= 0 or g <= 0 for n, g in pts):
        raise ValueError("scaling_fit needs positive N and gain")
    excluded = ()
    if exclude_breakdown and len(pts) >= 5:
        x = np.log([n for n, _ in pts[1:]])
        y = np.log([g for _, g in pts[1:]])
        r = linregress(x, y)
        rms = math.sqrt(np.mean((y - (r.intercept + r.slope * x)) ** 2))
        res0 = abs(math.log(pts[0][1]) - (r.intercept + r.slope * math.log(pts[0][0])))
        if res0 > max(3.0 * rms, 0.01):
            excluded = (pts[0][0],)
            pts = pts[1:]
    x = np.log([n for n, _ in pts])
    y = np.log([g for _, g in pts])
    r = linregress(x, y)
    return ScalingFit(r.slope, r.stderr, math.exp(r.intercept), excluded)


# --------------------------------------------------------------- detection

@dataclass(frozen=True)
class DetectionContext:
    """Chirped two-colour readout of the four-level system.

    The cavity sits at -delta_c (compensation) unless cavity_offset is given,
    the chirp is centred on the |up> line, and omega_m defaults to the value
    maximizing the sideband QFI.  n_d counts photons leaving the physical
    output mirror, T3* times those transmitted by the lossless core.  Only
    those can reach the detector, so the information is q_eff T3* times that
    of the core output while Raman flips follow all core photons.
    """

    cav: CavityParams
    atoms: AtomParams
    N: float = 1000.0
    q_eff: float = 0.15
    raman: RamanModel = field(default_factory=RamanModel)
    omega_m: float | None = None
    cavity_offset: float | None = None
    centre: float = 0.0

    def resolved(self):
        core = self.cav if self.cav.lossless else map_lossless(self.cav).cavity(like=self.cav)
        t3 = 1.0 if self.cav.lossless else map_lossless(self.cav).powers()["T3*"]
        off = self.cavity_offset
        if off is None:
            off = -compensation_detuning(self.cav, self.atoms, self.N / 2.0)[0]
        flp = FourLevelPoint.at(core, self.atoms, self.N, self.centre, off)
        wm = self.omega_m if self.omega_m is not None else best_chirp(core, self.atoms, flp)
        return core, t3, off, flp, wm


def _chirp_probe(flp):
    return ProbePoint(x_a=flp.x_a, x_c=flp.x_c, n_up=flp.n_up, budget_kind="n_in",
                      budget=1.0, n_atoms=flp.N)


def best_chirp(core, atoms, flp, lo=None, hi=None, points=301):
    """Sideband offset omega_m maximizing the chirp QFI per input photon."""
    g = math.sqrt(atoms.eta * core.kappa * atoms.gamma) / 2.0
    split = g * math.sqrt(flp.N / 2.0)
    lo = 0.3 * split if lo is None else lo
    hi = 3.0 * split if hi is None else hi
    p = _chirp_probe(flp)
    unit = PhotonBudget(1.0, math.nan, math.nan, None, "n_in")

    def fq(w):
        return chirp_fisher(core, atoms, p, DetectionSetup(omega_m=w), unit, flp, n_phase=16).quantum

    ws = np.linspace(lo, hi, points)
    i = int(np.argmax([fq(w) for w in ws]))
    if 0 < i < points - 1:
        r = minimize_scalar(lambda w: -fq(w), bracket=(ws[i - 1], ws[i], ws[i + 1]),
                            method="golden", options={"xtol": 1e-8})
        if ws[i - 1] <= r.x <= ws[i + 1]:
            return float(r.x)
    return float(ws[i])


DETECTION_COLUMNS = ("n_d", "sigma2", "sigma2_db", "var_info", "var_raman", "F_meas", "n_in")


def _detection_point(fixed: DetectionContext, resolved):
    core, t3, off, flp, wm = resolved
    # only the T3* share of the core's output leaves the real mirror and can be detected
    setup = DetectionSetup("transmission", fixed.q_eff * t3, wm)
    unit = PhotonBudget(1.0, math.nan, math.nan, None, "n_in")
    ch = chirp_fisher(core, fixed.atoms, _chirp_probe(flp), setup, unit, flp)
    nt_per_in = sum(ch.n_t)

    def one(nd):
        n_in = nd / (t3 * nt_per_in)
        b = PhotonBudget(n_in, n_in * nt_per_in, math.nan, None, "n_in")
        p = ProbePoint(flp.x_a, flp.x_c, flp.n_up, "n_in", n_in, n_atoms=flp.N)
        total = detection_variance(core, fixed.atoms, p, setup, b, fixed.raman, flp)
        info = detection_variance(core, fixed.atoms, p, setup, b, None, flp)
        fm = setup.q_eff * ch.measured * n_in
        return (nd, total, 10.0 * math.log10(total), info, total - info, fm, n_in)

    return one


def detection_scan(fixed: DetectionContext, n_d_grid) -> ScanResult:
    """sigma_d^2 against detected photon number, with minimum location and depth."""
    g = ScanSpec("n_d", tuple(n_d_grid), Context(fixed.cav, fixed.atoms, fixed.N)).grid
    if min(g) <= 0:
        raise ValueError("n_d grid must be positive")
    resolved = fixed.resolved()
    core, t3, off, flp, wm = resolved
    rows = np.array(pmap(_detection_point(fixed, resolved), g), dtype=float)
    i = int(np.argmin(rows[:, 1]))
    prov = {"scan": "detection", "N": fixed.N, "q_eff": fixed.q_eff,
            "branching": fixed.raman.branching, "omega_m": wm, "cavity_offset": off,
            "T3*": t3, "min_n_d": float(rows[i, 0]), "min_sigma2_db": float(rows[i, 2])}
    return ScanResult(DETECTION_COLUMNS, rows, prov)


def detection_minimum(fixed: DetectionContext, lo=1.0, hi=1e6):
    """Minimum of sigma_d^2 refined by golden search on log n_d: (n_d*, sigma2*)."""
    one = _detection_point(fixed, fixed.resolved())
    ln = np.log(log_grid(lo, hi, 16))
    vals = [one(math.exp(l))[1] for l in ln]
    i = int(np.argmin(vals))
    l, v = _refine(lambda l: one(math.exp(l))[1], ln, i, 1e-6)
    return math.exp(l), v


# ----------------------------------------------------------------- two colour

TWO_COLOR_COLUMNS = ("omega_l1", "omega_l2", "gamma", "q_over_f", "residual_q", "residual_phi")


def two_color_scan(cav: CavityParams, atoms: AtomParams, N, omega_l1_grid, cavity_offset=0.0,
                   phase_sign=-1.0) -> ScanResult:
    """Compensated second pulse for each first-pulse detuning (NaN where none exists)."""
    g = ScanSpec("omega_l1", tuple(omega_l1_grid), Context(cav, atoms, N)).grid

    def one(w1):
        try:
            t = two_color_solve(cav, atoms, N, w1, cavity_offset, phase_sign=phase_sign)
        except NoSolutionError:
            return (w1,) + (math.nan,) * 5
        return (w1, t.omega_l2, t.gamma_ratio, t.q_over_f, t.residual_q, t.residual_phi)

    rows = np.array(pmap(one, g), dtype=float)
    return ScanResult(TWO_COLOR_COLUMNS, rows,
                      {"scan": "two_color", "N": N, "cavity_offset": cavity_offset,
                       "phase_sign": phase_sign})
