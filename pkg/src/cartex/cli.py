"""Command-line interface.

Subcommands: decompose | denoise | inpaint | synthesize | metrics | ablate.
Solver flags mirror the reference configuration key for key; a flat
key=value config file can supply any of them (flags win on conflict, and
unknown keys are rejected).  Every run writes a ``summary.txt`` in the
exact config format, so a run can be reproduced with ``--config
<out>/summary.txt``.

Exit codes: 0 success, 1 numerical failure, 2 usage or I/O error.
"""

import argparse
import csv
import json
import logging
import sys
import time
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from cartex.graph import GraphParams, dump_laplacian
from cartex.image_io import read_image, read_mask, write_image
from cartex.metrics import psnr, ssim
from cartex.nlmeans import estimate_noise_sigma, pre_denoise
from cartex.operators import build_system
from cartex.solver import (
    SolverParams,
    solve_inpaint,
    solve_noiseless,
    solve_noisy,
)
from cartex.synthetic import read_spec_file, render_synthetic, write_spec_file

log = logging.getLogger("cartex.cli")

# reference defaults per mode (regularisation weights, penalty, iterations)
_MODE_DEFAULTS = {
    "noiseless": dict(beta1=0.30, beta2=0.36, gamma=0.1, iters=15),
    "noisy": dict(beta1=1e-5, beta2=1e2, gamma=2.5, iters=20),
    "inpaint": dict(beta1=0.30, beta2=0.36, gamma=0.5, iters=30),
}


@dataclass
class RunConfig:
    mode: str = "noiseless"
    input: str = ""
    mask: str = ""
    out: str = "."
    beta1: float = None
    beta2: float = None
    eta1: float = 0.5
    eta2: float = 0.5
    gamma: float = None
    delta: float = 1.0
    iters: int = None
    window: int = 51
    directions: int = 4
    knn: int = 16
    h: float = 0.3
    patch: int = 7
    band: float = 2.0
    seed: int = 0
    dump_graph: bool = False
    log_level: str = "warning"

    def resolve_mode_defaults(self):
        for key, value in _MODE_DEFAULTS[self.mode].items():
            if getattr(self, key) is None:
                setattr(self, key, value)

    def solver_params(self):
        return SolverParams(
            beta1=self.beta1, beta2=self.beta2, eta1=self.eta1,
            eta2=self.eta2, gamma=self.gamma, delta=self.delta,
            iters=self.iters, mode=self.mode,
        )

    def graph_params(self, directional=True):
        return GraphParams(
            window=self.window, directions=self.directions, knn=self.knn,
            h=self.h, patch=self.patch, band=self.band,
            directional=directional,
        )


_CONFIG_KEYS = {f.name.replace("_", "-"): f for f in fields(RunConfig)}


class UsageError(Exception):
    pass


def _parse_value(field, raw, where):
    if field.type is bool or field.name == "dump_graph":
        if raw.lower() in ("1", "true", "yes"):
            return True
        if raw.lower() in ("0", "false", "no"):
            return False
        raise UsageError(f"{where}: boolean expected for {field.name}, got {raw!r}")
    try:
        if field.name in ("iters", "window", "directions", "knn", "patch", "seed"):
            return int(raw)
        if field.name in ("beta1", "beta2", "eta1", "eta2", "gamma", "delta",
                          "h", "band"):
            return float(raw)
    except ValueError as exc:
        raise UsageError(f"{where}: {exc}") from exc
    return raw


def read_config_file(path):
    """Parse a flat key=value config file; unknown keys are errors."""
    values = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        field = _CONFIG_KEYS.get(key)
        if field is None:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        values[field.name] = _parse_value(field, value.strip(),
                                          f"{path}:{lineno}")
    return values


def write_summary(cfg, path):
    lines = []
    for key, field in _CONFIG_KEYS.items():
        value = getattr(cfg, field.name)
        if isinstance(value, bool):
            value = "true" if value else "false"
        elif isinstance(value, float):
            value = repr(value)
        lines.append(f"{key} = {value}")
    Path(path).write_text("\n".join(lines) + "\n")


def build_config(args):
    cfg = RunConfig()
    file_values = read_config_file(args.config) if args.config else {}
    for field in fields(RunConfig):
        flag_value = getattr(args, field.name, None)
        if flag_value is not None:
            setattr(cfg, field.name, flag_value)
        elif field.name in file_values:
            setattr(cfg, field.name, file_values[field.name])
    if getattr(args, "force_mode", None):
        cfg.mode = args.force_mode
    if cfg.mode not in _MODE_DEFAULTS:
        raise UsageError(f"unknown mode {cfg.mode!r}")
    cfg.resolve_mode_defaults()
    return cfg


def _load_input(cfg):
    if not cfg.input:
        raise UsageError("no input image given (--input)")
    path = Path(cfg.input)
    if not path.exists():
        raise UsageError(f"input {path} does not exist")
    return read_image(path)


def _stretched(img):
    lo, hi = float(img.min()), float(img.max())
    if hi - lo < 1e-12:
        return np.zeros_like(img)
    return (img - lo) / (hi - lo)


def _write_components(result, cfg, out_dir, diag_extra=None):
    write_image(result.cartoon, out_dir / "u.png", bit_depth=16)
    # texture is signed: raw 16-bit copy sits on a 0.5 offset, the 8-bit
    # v.png is a min-max stretched preview
    write_image(result.texture + 0.5, out_dir / "v_raw.png", bit_depth=16)
    write_image(_stretched(result.texture), out_dir / "v.png", bit_depth=8)
    if cfg.mode == "noisy":
        write_image(_stretched(result.noise), out_dir / "noise.png", bit_depth=8)
        write_image(result.cartoon + result.texture, out_dir / "denoised.png",
                    bit_depth=16)
    if cfg.mode == "inpaint":
        write_image(result.noise, out_dir / "recovered.png", bit_depth=16)
    payload = result.diagnostics.as_dict()
    if diag_extra:
        payload.update(diag_extra)
    (out_dir / "diagnostics.json").write_text(
        json.dumps(payload, indent=1, sort_keys=True) + "\n")


def _run_solver(cfg, f, mask, directional=True):
    params = cfg.solver_params()
    gp = cfg.graph_params(directional)
    if cfg.mode == "inpaint":
        if mask is None:
            raise UsageError("inpaint mode needs --mask")
        known = None if mask.all() else mask
        f_known = f if known is None else np.where(known, f, 0.0)
        system = build_system(f_known, gp, mask=known)
        result = solve_inpaint(f, mask, system, params)
    elif cfg.mode == "noisy":
        sigma = estimate_noise_sigma(f)
        match = pre_denoise(f, sigma) if sigma > 1e-4 else f
        log.info("estimated noise sigma %.4f", sigma)
        system = build_system(match, gp)
        result = solve_noisy(f, system, params)
    else:
        system = build_system(f, gp)
        result = solve_noiseless(f, system, params)
    return result, system


def cmd_decompose(args):
    cfg = build_config(args)
    logging.basicConfig(level=cfg.log_level.upper())
    f = _load_input(cfg)
    mask = read_mask(cfg.mask) if cfg.mask else None
    out_dir = Path(cfg.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    result, system = _run_solver(cfg, f, mask)
    _write_components(result, cfg, out_dir)
    if cfg.dump_graph:
        dump_laplacian(system.laplacian, out_dir / "graph.txt")
    write_summary(cfg, out_dir / "summary.txt")
    for warning in result.diagnostics.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    print(f"wrote {out_dir}/u.png, v.png, v_raw.png (mode={cfg.mode})")
    return 0


def cmd_synthesize(args):
    cfg = build_config(args)
    if not cfg.input:
        raise UsageError("no spec file given (--input)")
    if not Path(cfg.input).exists():
        raise UsageError(f"spec {cfg.input} does not exist")
    spec = read_spec_file(cfg.input)
    if getattr(args, "seed", None) is not None:
        spec.seed = args.seed
    cartoon, texture, mix = render_synthetic(spec)
    out_dir = Path(cfg.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_image(cartoon, out_dir / "cartoon.png", bit_depth=16)
    write_image(texture + 0.5, out_dir / "texture.png", bit_depth=16)
    write_image(mix, out_dir / "mix.png", bit_depth=16)
    write_spec_file(spec, out_dir / "spec.txt")
    print(f"wrote {out_dir}/cartoon.png, texture.png, mix.png")
    return 0


_METRIC_PAIRS = (("cartoon", "u.png", "cartoon.png"),
                 ("texture", "v_raw.png", "texture.png"))


def _metric_rows(result_dir, truth_dir):
    result_dir, truth_dir = Path(result_dir), Path(truth_dir)
    if (truth_dir / "cartoon.png").exists():
        pairs = [("", result_dir, truth_dir)]
    else:
        names = sorted(
            p.name for p in truth_dir.iterdir()
            if p.is_dir() and (result_dir / p.name).is_dir()
        )
        pairs = [(n, result_dir / n, truth_dir / n) for n in names]
    if not pairs:
        raise UsageError(f"no matching result/truth sets under {result_dir}")
    rows = []
    for name, rdir, tdir in pairs:
        row = {"name": name or result_dir.name}
        for component, rfile, tfile in _METRIC_PAIRS:
            rpath, tpath = rdir / rfile, tdir / tfile
            if not rpath.exists() or not tpath.exists():
                raise UsageError(f"missing {rpath if not rpath.exists() else tpath}")
            got, want = read_image(rpath), read_image(tpath)
            row[f"psnr_{component}"] = psnr(got, want)
            row[f"ssim_{component}"] = ssim(got, want)
        rows.append(row)
    mean_row = {"name": "mean"}
    for key in rows[0]:
        if key != "name":
            mean_row[key] = float(np.mean([r[key] for r in rows]))
    rows.append(mean_row)
    return rows


def cmd_metrics(args):
    if not args.truth:
        raise UsageError("metrics needs --truth")
    if not args.input:
        raise UsageError("metrics needs --input (result directory)")
    rows = _metric_rows(args.input, args.truth)
    cols = ["name", "psnr_cartoon", "ssim_cartoon", "psnr_texture", "ssim_texture"]
    print("  ".join(f"{c:>14}" for c in cols))
    for row in rows:
        cells = [f"{row['name']:>14}"] + [f"{row[c]:14.4f}" for c in cols[1:]]
        print("  ".join(cells))
    if args.out:
        with open(args.out, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=cols)
            writer.writeheader()
            writer.writerows(rows)
    return 0


def cmd_ablate(args):
    cfg = build_config(args)
    logging.basicConfig(level=cfg.log_level.upper())
    f = _load_input(cfg)
    mask = read_mask(cfg.mask) if cfg.mask else None
    out_dir = Path(cfg.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for label, directional in (("isotropic", True), ("baseline", False)):
        t0 = time.time()
        result, system = _run_solver(cfg, f, mask, directional=directional)
        sub = out_dir / label
        sub.mkdir(exist_ok=True)
        _write_components(result, cfg, sub)
        last = result.diagnostics.iterations[-1]
        rows.append({
            "method": label,
            "v_norm": float(np.linalg.norm(result.texture)),
            "data_residual": last.data_term,
            "split_relative": last.split_relative,
            "seconds": time.time() - t0,
        })
    write_summary(cfg, out_dir / "summary.txt")
    cols = ["method", "v_norm", "data_residual", "split_relative", "seconds"]
    with open(out_dir / "ablation.csv", "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=cols)
        writer.writeheader()
        writer.writerows(rows)
    print("  ".join(f"{c:>14}" for c in cols))
    for row in rows:
        print(f"{row['method']:>14}  " + "  ".join(
            f"{row[c]:14.5g}" for c in cols[1:]))
    return 0


def _add_solver_flags(parser):
    parser.add_argument("--mode", choices=list(_MODE_DEFAULTS))
    parser.add_argument("--input")
    parser.add_argument("--mask")
    parser.add_argument("--out")
    for name in ("beta1", "beta2", "eta1", "eta2", "gamma", "delta", "h",
                 "band"):
        parser.add_argument(f"--{name}", type=float)
    for name in ("iters", "window", "directions", "knn", "patch", "seed"):
        parser.add_argument(f"--{name}", type=int)
    parser.add_argument("--config")
    parser.add_argument("--dump-graph", action="store_const", const=True,
                        dest="dump_graph")
    parser.add_argument("--log-level", dest="log_level",
                        choices=["debug", "info", "warning", "error"])


def make_parser():
    parser = argparse.ArgumentParser(
        prog="cartex",
        description="Cartoon-texture image decomposition",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    specs = [
        ("decompose", cmd_decompose, None),
        ("denoise", cmd_decompose, "noisy"),
        ("inpaint", cmd_decompose, "inpaint"),
        ("synthesize", cmd_synthesize, None),
        ("ablate", cmd_ablate, None),
    ]
    for name, handler, forced in specs:
        p = sub.add_parser(name)
        _add_solver_flags(p)
        p.set_defaults(handler=handler, force_mode=forced)
    p = sub.add_parser("metrics")
    p.add_argument("--input")
    p.add_argument("--truth")
    p.add_argument("--out")
    p.set_defaults(handler=cmd_metrics, force_mode=None)
    return parser


def main(argv=None):
    args = make_parser().parse_args(argv)
    try:
        return args.handler(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FloatingPointError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
