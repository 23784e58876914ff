"""Command-line interface.

Subcommands
-----------
converse   minimal channel-use ratio over a distortion grid (both models)
inner      Monte-Carlo inner-bound scan (Gaussian model)
curve      binary semantic distortion-equivocation tradeoff curve
rdf        rate-distortion values at a single distortion pair
verify     fast self-check battery (machine-readable report)
preset     list or show the bundled run presets

Exit codes: 0 success, 1 failed verification, 2 validation error,
3 infeasible everywhere, 4 sampler starvation.

Artifacts are deterministic byte-for-byte for a fixed config and seed.
CSV files start with two comment lines: an artifact-format marker and the
config hash plus seed. Infeasible cells keep their row with an empty value
column and feasible=0 (never NaN or infinities in CSV output).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .binary import binary_min_r, delta_s_curve
from .config import (
    RunConfig,
    build_channel,
    build_source,
    config_hash,
    dump_config,
    get_preset,
    load_config,
    preset_names,
    resolve_distortion_grid,
    _encode,
)
from .errors import DomainError, InfeasibleError, SamplerStarvationError, ValidationError
from .gaussian import (
    converse_min_r,
    gaussian_rdf_joint,
    gaussian_rdf_obs,
    gaussian_rdf_sem,
    inner_bound_scan,
)
from .rdf import binary_rdf_joint, binary_rdf_obs, binary_rdf_sem
from .verify import run_verification

ARTIFACT_MARKER = "# semsec-artifact v1"
SURFACE_COLUMNS = ("case", "D_s", "D_u", "r_min", "feasible", "capped", "samples")
CURVE_COLUMNS = ("D_s", "delta_s_max", "capped")


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.12g}"


def _render_csv(columns, rows, cfg: RunConfig) -> str:
    lines = [
        ARTIFACT_MARKER,
        f"# config-hash={config_hash(cfg)} seed={cfg.seed}",
        ",".join(columns),
    ]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def _render_json(columns, rows, cfg: RunConfig, metadata=None) -> str:
    def clean(v):
        if v is None:
            return None
        if isinstance(v, (bool, np.bool_)):
            return bool(v)
        if isinstance(v, (int, np.integer)):
            return int(v)
        return float(v)

    payload = {
        "artifact": ARTIFACT_MARKER.lstrip("# "),
        "config_hash": config_hash(cfg),
        "seed": cfg.seed,
        "columns": list(columns),
        "rows": [[clean(v) for v in row] for row in rows],
    }
    if metadata:
        payload["metadata"] = _encode(metadata)
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)


def _variant_path(out: Path, case: int, r_k: float) -> Path:
    return out.with_name(f"{out.stem}_case{case}_rk{r_k:g}{out.suffix}")


# ---------------------------------------------------------------------------
# config resolution
# ---------------------------------------------------------------------------

_SUBCOMMAND_MODEL = {"converse": "gaussian", "inner": "gaussian", "curve": "binary"}


def _resolve_config(args, subcommand: str) -> RunConfig:
    if args.preset and args.config:
        raise ValidationError(["--preset and --config are mutually exclusive"])
    if args.preset:
        cfg = get_preset(args.preset)
    elif args.config:
        cfg = load_config(args.config)
    else:
        kwargs = {}
        if subcommand in _SUBCOMMAND_MODEL:
            kwargs["mode"] = subcommand
            kwargs["model"] = args.model or _SUBCOMMAND_MODEL[subcommand]
        elif args.model:
            kwargs["model"] = args.model
        cfg = RunConfig(**kwargs)
    overrides = {}
    if args.model and args.model != cfg.model:
        overrides["model"] = args.model
    if getattr(args, "case", None):
        overrides["cases"] = (args.case,)
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if getattr(args, "samples", None) is not None:
        overrides["samples"] = args.samples
    if subcommand in _SUBCOMMAND_MODEL:
        overrides["mode"] = subcommand
        if cfg.mode != subcommand and (args.preset or args.config):
            raise ValidationError([
                f"config is a {cfg.mode!r} run but the {subcommand!r} subcommand "
                "was invoked"
            ])
    if overrides:
        cfg = replace(cfg, **overrides)
    return cfg


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _grid_pair(cfg: RunConfig, src):
    if cfg.model == "gaussian":
        hi_s, hi_u = src.P_s, src.P_u
    else:
        hi_s = hi_u = 0.5
    return (
        resolve_distortion_grid(cfg.d_s_grid, hi_s),
        resolve_distortion_grid(cfg.d_u_grid, hi_u),
    )


def _cmd_converse(args) -> int:
    cfg = _resolve_config(args, "converse")
    src = build_source(cfg)
    ch = build_channel(cfg)
    d_s_grid, d_u_grid = _grid_pair(cfg, src)
    targets = cfg.targets()
    rows = []
    any_feasible = False
    for case in cfg.cases:
        for d_s in d_s_grid:
            for d_u in d_u_grid:
                if cfg.model == "gaussian":
                    res = converse_min_r(src, ch, float(d_s), float(d_u), targets, case=case)
                else:
                    res = binary_min_r(src, ch, float(d_s), float(d_u), targets, case=case)
                any_feasible |= res.feasible
                rows.append((
                    case, float(d_s), float(d_u),
                    res.r_min if res.feasible else None,
                    res.feasible, False, 0,
                ))
    render = _render_json if args.format == "json" else _render_csv
    _emit(render(SURFACE_COLUMNS, rows, cfg), args.out)
    if not any_feasible:
        print("no feasible cell on the requested grid", file=sys.stderr)
        return 3
    return 0


def _cmd_inner(args) -> int:
    cfg = _resolve_config(args, "inner")
    src = build_source(cfg)
    ch = build_channel(cfg)

    def edges(grid, hi, name):
        if isinstance(grid, int) and not isinstance(grid, bool):
            return np.linspace(0.0, hi, grid + 1)
        raise ValidationError([
            f"{name}: the inner-bound scan needs an integer bucket count"
        ])

    grid = (
        edges(cfg.d_s_grid, src.P_s, "d_s_grid"),
        edges(cfg.d_u_grid, src.P_u, "d_u_grid"),
    )
    targets = cfg.targets()
    rows = []
    total_accepted = 0
    metadata = {}
    for case in cfg.cases:
        surface = inner_bound_scan(
            src, ch, targets, case, cfg.samples, cfg.seed, grid=grid
        )
        total_accepted += surface.metadata["accepted"]
        metadata[f"case{case}"] = {
            "accepted": surface.metadata["accepted"],
            "discard_reasons": surface.metadata["discard_reasons"],
        }
        for row in surface.rows():
            rows.append((
                case, row["D_s"], row["D_u"],
                row["value"] if row["feasible"] else None,
                row["feasible"], row["capped"], row["samples"],
            ))
    if args.format == "json":
        text = _render_json(SURFACE_COLUMNS, rows, cfg, metadata=metadata)
    else:
        text = _render_csv(SURFACE_COLUMNS, rows, cfg)
    _emit(text, args.out)
    if total_accepted == 0:
        print("no draw satisfied the requested targets", file=sys.stderr)
        return 3
    return 0


def _cmd_curve(args) -> int:
    cfg = _resolve_config(args, "curve")
    src = build_source(cfg)
    ch = build_channel(cfg)
    variants = [(case, r_k) for case in cfg.cases for r_k in cfg.key_rates()]
    multi = len(variants) > 1
    for case, r_k in variants:
        if isinstance(cfg.d_s_grid, int) and not isinstance(cfg.d_s_grid, bool):
            lo = src.alpha + 1e-4 if case == 1 else 1e-4
            grid = np.linspace(lo, 0.5, cfg.d_s_grid)
        else:
            grid = resolve_distortion_grid(cfg.d_s_grid, 0.5)
        curve = delta_s_curve(
            src, ch, r=cfg.r, R_k=r_k, case=case, d_s_grid=grid
        )
        rows = [
            (row["D_s"], row["delta_s_max"], row["capped"]) for row in curve.rows()
        ]
        render = _render_json if args.format == "json" else _render_csv
        text = render(CURVE_COLUMNS, rows, cfg)
        if args.out is None:
            if multi:
                sys.stdout.write(f"# variant case={case} R_k={r_k:g}\n")
            sys.stdout.write(text)
        else:
            path = _variant_path(args.out, case, r_k) if multi else args.out
            _emit(text, path)
    return 0


def _cmd_rdf(args) -> int:
    cfg = _resolve_config(args, "rdf")
    src = build_source(cfg)
    d_s, d_u = args.d_s, args.d_u
    if d_s is None or d_u is None:
        raise ValidationError(["rdf needs both --d-s and --d-u"])
    columns = ("case", "D_s", "D_u", "feasible", "R_s", "R_u", "R_joint")
    rows = []
    for case in cfg.cases:
        try:
            if cfg.model == "gaussian":
                r_s = gaussian_rdf_sem(src, d_s, case)
                r_u = gaussian_rdf_obs(src, d_u)
                r_j = gaussian_rdf_joint(src, d_s, d_u, case)
            else:
                r_s = binary_rdf_sem(src.alpha, d_s, case)
                r_u = binary_rdf_obs(src.alpha, d_u)
                r_j = binary_rdf_joint(src.alpha, d_s, d_u, case)
            if not np.isfinite(r_s):
                raise InfeasibleError("semantic distortion below the case-1 floor")
            rows.append((case, d_s, d_u, True, r_s, r_u, r_j))
        except InfeasibleError:
            rows.append((case, d_s, d_u, False, None, None, None))
    render = _render_json if args.format == "json" else _render_csv
    _emit(render(columns, rows, cfg), args.out)
    if not any(row[3] for row in rows):
        return 3
    return 0


def _cmd_verify(args) -> int:
    report = run_verification()
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    _emit(text, args.out)
    return 0 if report["passed"] else 1


def _cmd_preset(args) -> int:
    if args.action == "list":
        for name in preset_names():
            sys.stdout.write(name + "\n")
        return 0
    cfg = get_preset(args.name)
    sys.stdout.write(dump_config(cfg))
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_common(sub, *, with_samples=False):
    sub.add_argument("--config", type=Path, default=None,
                     help="path to a run-config JSON file")
    sub.add_argument("--preset", default=None,
                     help="name of a bundled preset (see 'preset list')")
    sub.add_argument("--model", choices=("gaussian", "binary"), default=None)
    sub.add_argument("--case", type=int, choices=(1, 2), default=None,
                     help="restrict to one encoder case")
    sub.add_argument("--seed", type=int, default=None)
    if with_samples:
        sub.add_argument("--samples", type=int, default=None,
                         help="Monte-Carlo sample count")
    sub.add_argument("--out", type=Path, default=None,
                     help="output path (stdout when omitted)")
    sub.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semsec",
        description="Secure semantic communication bounds: converse and "
                    "inner-bound evaluation, RDFs, and tradeoff curves.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("converse", help="minimal ratio over a distortion grid")
    _add_common(p)
    p.set_defaults(func=_cmd_converse)

    p = sub.add_parser("inner", help="Monte-Carlo inner-bound scan")
    _add_common(p, with_samples=True)
    p.set_defaults(func=_cmd_inner)

    p = sub.add_parser("curve", help="binary semantic tradeoff curve")
    _add_common(p)
    p.set_defaults(func=_cmd_curve)

    p = sub.add_parser("rdf", help="rate-distortion values at one point")
    _add_common(p)
    p.add_argument("--d-s", type=float, default=None, dest="d_s")
    p.add_argument("--d-u", type=float, default=None, dest="d_u")
    p.set_defaults(func=_cmd_rdf)

    p = sub.add_parser("verify", help="fast self-check battery")
    p.add_argument("--out", type=Path, default=None)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("preset", help="list or show bundled presets")
    p.add_argument("action", choices=("list", "show"))
    p.add_argument("name", nargs="?", default=None)
    p.set_defaults(func=_cmd_preset)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "preset" and args.action == "show" and not args.name:
        print("preset show needs a preset name", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SamplerStarvationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
