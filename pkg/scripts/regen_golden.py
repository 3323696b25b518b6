"""Regenerate the golden CSV files under tests/golden from the configs directory.

Run from the repository root:  python3 scripts/regen_golden.py
Every run is deterministic; a diff after regeneration means the numerics changed.
"""
from __future__ import annotations

import os
import sys
from pathlib import Path

from cavity_squeeze.cli import run

ROOT = Path(__file__).resolve().parent.parent
GOLDEN = ROOT / "tests" / "golden"

# name -> argv (config paths relative to the repository root)
CASES = {
    "wineland_resonant.csv": ["wineland-scan", "-c", "configs/resonant.toml"],
    "scaling_resonant.csv": ["scaling", "-c", "configs/resonant.toml"],
    "detection_yb.csv": ["detection-scan", "-c", "configs/yb.toml"],
    "two_color_yb.csv": ["two-color", "-c", "configs/yb.toml"],
    "map_lossless_yb.csv": ["map-lossless", "-c", "configs/yb.toml"],
    "spectrum_yb.csv": ["spectrum", "-c", "configs/yb.toml", "--set", "spectrum.points=201"],
}


def main():
    os.chdir(ROOT)
    GOLDEN.mkdir(parents=True, exist_ok=True)
    for name, argv in CASES.items():
        code = run(argv + ["--out", str(GOLDEN / name)])
        if code:
            sys.exit(f"{name}: exit {code}")
        print(f"wrote {GOLDEN / name}")


if __name__ == "__main__":
    main()
