#!/usr/bin/env python3
"""Reproduce the Gaussian converse surfaces (minimal ratio over a distortion grid).

Runs the bundled ``gaussian-converse-fig3`` preset for both encoder cases and
writes one CSV artifact per case. Equivalent to:

    semsec converse --preset gaussian-converse-fig3 --case <c> --out <file>
"""

import argparse
from pathlib import Path

from semsec.cli import main as semsec_main


def run(out_dir: Path) -> int:
    out_dir.mkdir(parents=True, exist_ok=True)
    for case in (1, 2):
        out = out_dir / f"converse_surface_case{case}.csv"
        code = semsec_main([
            "converse", "--preset", "gaussian-converse-fig3",
            "--case", str(case), "--out", str(out),
        ])
        if code != 0:
            return code
        print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", type=Path, default=Path("artifacts"))
    args = parser.parse_args()
    raise SystemExit(run(args.out_dir))
