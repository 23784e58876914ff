#!/usr/bin/env python3
"""Monte-Carlo inner-bound scans next to their converse floors.

Runs both bundled inner-bound presets (no-secrecy and semantic-secrecy
targets) for both encoder cases, writing one CSV artifact per run.
Equivalent to:

    semsec inner --preset <name> --case <c> --samples <n> --out <file>

The converse surfaces from ``run_converse_surfaces.py`` (or the converse
subcommand with matching targets) provide the lower envelope to compare
against; the acceptance suite automates that comparison.
"""

import argparse
from pathlib import Path

from semsec.cli import main as semsec_main

PRESETS = ("gaussian-inner-nosecrecy", "gaussian-inner-semantic")


def run(out_dir: Path, samples: int | None) -> int:
    out_dir.mkdir(parents=True, exist_ok=True)
    for preset in PRESETS:
        for case in (1, 2):
            tag = preset.rsplit("-", 1)[-1]
            out = out_dir / f"inner_{tag}_case{case}.csv"
            argv = ["inner", "--preset", preset, "--case", str(case),
                    "--out", str(out)]
            if samples is not None:
                argv += ["--samples", str(samples)]
            code = semsec_main(argv)
            if code != 0:
                return code
            print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", type=Path, default=Path("artifacts"))
    parser.add_argument("--samples", type=int, default=None,
                        help="override the preset sample count")
    args = parser.parse_args()
    raise SystemExit(run(args.out_dir, args.samples))
