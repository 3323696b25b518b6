"""Run configuration: a sectioned TOML file, frequencies in Hz.

Every key is optional; missing keys take the Yb-171 values (lossy cavity
of the experiment, kappa = 2 pi 520 kHz, Gamma = 2 pi 184 kHz, eta = 1.8).
Unknown sections or keys are rejected with their dotted path.
"""
from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .cavity import AtomParams, CavityParams, map_lossless

TWO_PI = 2.0 * math.pi

DEFAULTS = {
    "cavity": {"T1": 30e-6, "T2": 196e-6, "L1": 30e-6, "L2": 227.3e-6, "finesse": 13.0e3,
               "kappa_hz": 520e3, "fsr_hz": None, "waist_m": None, "wavelength_m": None},
    "atoms": {"gamma_hz": 184e3, "eta": 1.8, "eta_down_ratio": 1.0 / 3.0, "delta_z_hz": None,
              "b": 230.0, "branching": 2.0 / 3.0},
    "probe": {"N": 1000.0, "x_a": 10.0, "detuning_hz": None, "cavity_offset_hz": 0.0,
              "budget_kind": "n_sc", "budget": 400.0, "p": None, "tau_s": None,
              "model": "three_level", "curvature": True},
    "scan": {"variable": "x_a", "start": -150.0, "stop": 150.0, "points": 301, "scale": "lin"},
    "optimize": {"x_a_min": 1.0, "x_a_max": 2000.0, "per_decade": 64,
                 "N_list": [500.0, 1000.0, 2000.0, 4000.0, 8000.0]},
    "detection": {"q_eff": 0.15, "omega_m_hz": None, "cavity_offset_hz": None,
                  "centre_hz": 0.0, "n_d_min": 1.0, "n_d_max": 1e5, "per_decade": 16},
    "two_color": {"omega_l1_hz": 7.333e6, "cavity_offset_hz": -340e3, "phase_sign": -1.0,
                  "window_lo_hz": None, "window_hi_hz": None},
    "spectrum": {"start_hz": -10e6, "stop_hz": 10e6, "points": 401},
}

_TYPES = {"budget_kind": str, "model": str, "variable": str, "scale": str,
          "curvature": bool, "points": int, "per_decade": int, "N_list": list}


class ConfigError(ValueError):
    """Bad configuration; the message names the offending key."""


def _merge(base, user, path=""):
    for sec, body in user.items():
        where = f"{path}{sec}"
        if sec not in base:
            raise ConfigError(f"{where}: unknown section" if not path else f"{where}: unknown key")
        if isinstance(base[sec], dict):
            if not isinstance(body, dict):
                raise ConfigError(f"{where}: expected a table")
            _merge(base[sec], body, where + ".")
        else:
            base[sec] = _coerce(where, sec, body)
    return base


def _coerce(where, key, v):
    t = _TYPES.get(key)
    if v is None:
        return None
    if t is bool:
        if not isinstance(v, bool):
            raise ConfigError(f"{where}: expected true/false")
        return v
    if t is str:
        if not isinstance(v, str):
            raise ConfigError(f"{where}: expected a string")
        return v
    if t is int:
        if isinstance(v, bool) or not isinstance(v, (int, float)) or int(v) != v:
            raise ConfigError(f"{where}: expected an integer")
        return int(v)
    if t is list:
        if not isinstance(v, list) or not all(isinstance(x, (int, float)) for x in v):
            raise ConfigError(f"{where}: expected a list of numbers")
        return [float(x) for x in v]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{where}: expected a number")
    if not math.isfinite(v):
        raise ConfigError(f"{where}: must be finite")
    return float(v)


def parse(data: dict) -> dict:
    """Merge a user dict onto the defaults, validating names and types."""
    cfg = _merge(copy.deepcopy(DEFAULTS), data)
    p = cfg["probe"]
    if p["budget_kind"] not in ("n_in", "n_t", "n_sc", "n_c"):
        raise ConfigError("probe.budget_kind: must be one of n_in, n_t, n_sc, n_c")
    if p["model"] not in ("three_level", "four_level"):
        raise ConfigError("probe.model: must be three_level or four_level")
    if cfg["scan"]["scale"] not in ("lin", "log"):
        raise ConfigError("scan.scale: must be lin or log")
    if cfg["scan"]["variable"] not in ("x_a", "n_sc", "N"):
        raise ConfigError("scan.variable: must be x_a, n_sc or N")
    if cfg["scan"]["points"] < 2:
        raise ConfigError("scan.points: need at least 2")
    if p["N"] < 1:
        raise ConfigError("probe.N: must be >= 1")
    return cfg


def load(path) -> dict:
    """Read TOML, or JSON (a document written with --json carries its config)."""
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as e:
        raise ConfigError(f"{path}: {e.strerror}") from None
    text = raw.decode("utf-8")
    if text.lstrip().startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path}: invalid JSON ({e})") from None
        data = data.get("config", data)
    else:
        try:
            data = tomllib.loads(text)
        except tomllib.TOMLDecodeError as e:
            raise ConfigError(f"{path}: invalid TOML ({e})") from None
    return parse(data)


def _hz(v):
    return None if v is None else TWO_PI * v


@dataclass(frozen=True)
class Built:
    cavity: CavityParams     # as configured (possibly lossy)
    core: CavityParams       # lossless cavity used for the atom-light physics
    atoms: AtomParams
    cfg: dict


def build(cfg: dict) -> Built:
    c, a = cfg["cavity"], cfg["atoms"]
    try:
        cav = CavityParams(T1=c["T1"], T2=c["T2"], L1=c["L1"], L2=c["L2"], finesse=c["finesse"],
                           kappa=_hz(c["kappa_hz"]), fsr=_hz(c["fsr_hz"]), waist=c["waist_m"],
                           wavelength=c["wavelength_m"])
    except ValueError as e:
        raise ConfigError(f"cavity: {e}") from None
    if cav.kappa is None:
        raise ConfigError("cavity.kappa_hz: needed (or fsr_hz)")
    eta = a["eta"]
    if eta is None:
        try:
            eta = cav.cooperativity()
        except ValueError as e:
            raise ConfigError(f"atoms.eta: {e}") from None
    try:
        atoms = AtomParams(gamma=_hz(a["gamma_hz"]), eta=eta, eta_down=eta * a["eta_down_ratio"],
                           delta_z=_hz(a["delta_z_hz"]), b=a["b"])
    except (ValueError, TypeError) as e:
        raise ConfigError(f"atoms: {e}") from None
    try:
        core = cav if cav.lossless else map_lossless(cav).cavity(like=cav)
    except ValueError as e:
        raise ConfigError(f"cavity: {e}") from None
    return Built(cav, core, atoms, cfg)
