"""Command line front end.

Five subcommands: spectrum, cusps, companions, decompose, verify.  All
output is batch artifacts (JSON with a versioned schema, CSV, or
whitespace plotdata); identical config and seed give byte-identical
files.  Exit codes: 0 success, 1 verification/domain failure, 2 usage.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, asdict

import numpy as np

from .arith import build_context, farey_points
from . import cusps as cu
from . import expsums as ex
from . import transference as tr
from .report import all_clean
from .verify import run_suite, SUITE_NAMES

SCHEMA = 1

_DEFAULTS = {
    "N": None, "subset": "full", "density": 0.5, "pmin": None,
    "A": 4.0, "B": 2.0, "xi": 0.0, "z0": 3.0, "z": None, "M": None,
    "tau": 1, "grid": None, "Q": 30, "suite": "all", "zmax": 10_000,
    "format": "json", "output": None, "threads": 1, "mode": "exact",
    "seed": 0, "limit": None,
}

_COERCE = {
    "N": int, "density": float, "pmin": int, "A": float, "B": float,
    "xi": float, "z0": float, "z": float, "M": int, "tau": int, "grid": int,
    "Q": int, "zmax": int, "threads": int, "seed": int, "limit": int,
    "subset": str, "suite": str, "format": str, "output": str, "mode": str,
}


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    N: int
    subset: str
    density: float
    pmin: int
    A: float
    B: float
    xi: float
    z0: float
    z: float
    M: int
    tau: int
    grid: int
    Q: int
    suite: str
    zmax: int
    format: str
    output: str
    threads: int
    mode: str
    seed: int
    limit: int

    def __post_init__(self):
        if self.subset not in ("full", "sqrt2", "random"):
            raise UsageError(f"unknown subset {self.subset!r}")
        if self.format not in ("json", "csv", "plotdata"):
            raise UsageError(f"unknown format {self.format!r}")
        if self.mode not in ("exact", "fast"):
            raise UsageError(f"unknown mode {self.mode!r}")
        if self.suite not in SUITE_NAMES + ("all",):
            raise UsageError(f"unknown suite {self.suite!r}")
        if self.threads < 1:
            raise UsageError("threads must be >= 1")
        if self.command != "verify":
            if self.N is None:
                raise UsageError(f"{self.command} requires --N")
            if self.N < 100:
                raise UsageError("N must be >= 100")
        if not 0 <= self.seed < 1 << 64:
            raise UsageError("seed must fit in 64 bits")


def _parse_config_file(path: str) -> dict:
    values = {}
    try:
        with open(path) as fh:
            for ln, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise UsageError(f"{path}:{ln}: expected key=value")
                key, val = (s.strip() for s in line.split("=", 1))
                if key not in _DEFAULTS:
                    raise UsageError(f"{path}:{ln}: unknown key {key!r}")
                values[key] = _COERCE[key](val)
    except OSError as err:
        raise UsageError(f"cannot read config {path}: {err}")
    return values


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="primecusps", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)
    for name in ("spectrum", "cusps", "companions", "decompose", "verify"):
        p = sub.add_parser(name)
        p.add_argument("--config", default=None, help="key=value file; flags win")
        for key, default in _DEFAULTS.items():
            typ = _COERCE[key]
            p.add_argument(f"--{key}", type=typ, default=None,
                           help=f"default {default!r}")
    return top


def build_config(argv) -> RunConfig:
    args = _build_parser().parse_args(argv)
    merged = dict(_DEFAULTS)
    if args.config:
        merged.update(_parse_config_file(args.config))
    for key in _DEFAULTS:
        flag = getattr(args, key)
        if flag is not None:
            merged[key] = flag
    return RunConfig(command=args.command, **merged)


def _echo(cfg: RunConfig) -> dict:
    out = {k: v for k, v in asdict(cfg).items() if v is not None}
    return out


def _subset(ctx, cfg: RunConfig) -> ex.PrimeSubset:
    if cfg.subset == "full":
        return ex.subset_full(ctx, cfg.N, pmin=cfg.pmin)
    if cfg.subset == "sqrt2":
        return ex.subset_sqrt2(ctx, cfg.N, pmin=cfg.pmin)
    return ex.subset_random(ctx, cfg.N, cfg.density, seed=cfg.seed,
                            pmin=cfg.pmin)


def _grid_size(cfg: RunConfig) -> int:
    if cfg.grid is not None:
        return cfg.grid
    size = ex.default_grid_size(cfg.N)
    if cfg.mode == "fast":
        size = min(size, 1 << 20)
    return size


def _out_path(cfg: RunConfig, ext: str) -> str:
    return cfg.output or f"primecusps-{cfg.command}.{ext}"


def _write(path: str, text: str) -> str:
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as err:
        raise RuntimeError(f"cannot write {path}: {err}")
    return path


def _json_text(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def cmd_spectrum(ctx, cfg: RunConfig) -> int:
    subset = _subset(ctx, cfg)
    grid = ex.spectrum(subset, _grid_size(cfg))
    ratio = np.abs(grid.values) / subset.size
    if cfg.format == "plotdata":
        alphas = np.arange(grid.G) / grid.G
        lines = [f"{a:.12g} {float(r)!r}" for a, r in zip(alphas, ratio)]
        path = _write(_out_path(cfg, "txt"), "\n".join(lines) + "\n")
        overlay = [f"{float(fp):.12g} {fp.q} "
                   f"{1 if ctx.is_squarefree(fp.q) else 0}"
                   for fp in farey_points(cfg.Q)]
        _write(path + ".farey", "\n".join(overlay) + "\n")
    elif cfg.format == "csv":
        lines = ["alpha,ratio"]
        lines += [f"{j / grid.G:.12g},{r:.10g}" for j, r in enumerate(ratio)]
        path = _write(_out_path(cfg, "csv"), "\n".join(lines) + "\n")
    else:
        payload = {
            "schema": SCHEMA, "seed": cfg.seed, "config": _echo(cfg),
            "N": subset.N, "size": subset.size, "K": subset.K,
            "grid": grid.G, "l1_estimate": ex.l1_estimate(grid),
            "ratio_min": float(ratio.min()), "ratio_max": float(ratio.max()),
        }
        path = _write(_out_path(cfg, "json"), _json_text(payload))
    print(path)
    return 0


def cmd_cusps(ctx, cfg: RunConfig) -> int:
    subset = _subset(ctx, cfg)
    grid = ex.spectrum(subset, _grid_size(cfg))
    report = cu.find_cusps(grid, cfg.A)
    rows = cu.structure_check(report, subset)
    rows.append(cu.farey_census_report(ctx, report))
    if cfg.format == "csv":
        lines = ["lo,hi,peak_pos,peak_height"]
        lines += [f"{a.lo:.12g},{a.hi:.12g},{a.peak.position:.12g},"
                  f"{a.peak.weight:.10g}" for a in report.arcs]
        path = _write(_out_path(cfg, "csv"), "\n".join(lines) + "\n")
    else:
        payload = {
            "schema": SCHEMA, "seed": cfg.seed, "config": _echo(cfg),
            "N": report.N, "A": report.A, "K": report.K,
            "threshold": report.threshold, "bound": report.bound,
            "count": len(report.wellspaced), "count_ok": report.count_ok,
            "measure_estimate": report.measure_estimate,
            "arcs": [{"lo": a.lo, "hi": a.hi, "peak_pos": a.peak.position,
                      "peak_height": a.peak.weight} for a in report.arcs],
            "wellspaced": [{"position": p.position, "weight": p.weight}
                           for p in report.wellspaced],
            "checks": [r.to_dict() for r in rows],
        }
        path = _write(_out_path(cfg, "json"), _json_text(payload))
    print(path)
    return 0 if report.count_ok and all_clean(rows) else 1


def cmd_companions(ctx, cfg: RunConfig) -> int:
    subset = _subset(ctx, cfg)
    result = cu.companion_search(subset, cfg.xi, cfg.A, cfg.B)
    payload = {"schema": SCHEMA, "seed": cfg.seed, "config": _echo(cfg),
               **result}
    path = _write(_out_path(cfg, "json"), _json_text(payload))
    print(path)
    return 0 if result["ok"] else 1


def cmd_decompose(ctx, cfg: RunConfig) -> int:
    subset = _subset(ctx, cfg)
    M = cfg.M if cfg.M is not None else int(ctx.primorial(cfg.z0))
    dec = tr.decompose(ctx, subset, cfg.z0, M, cfg.A, z=cfg.z)
    rows = tr.transform_checks(dec, seed=cfg.seed + 1)
    rows.extend(tr.cusp_suppression_report(dec, seed=cfg.seed + 2))
    rows.append(tr.bohr_size_row(dec.bohr, subset.N))
    sup = tr.sharp_sup_report(dec, min(_grid_size(cfg), 1 << 20))
    if cfg.format == "csv":
        path = _write(_out_path(cfg, "csv"), tr.decomposition_csv(dec))
    else:
        payload = {
            "schema": SCHEMA, "seed": cfg.seed, "config": _echo(cfg),
            "M": M, "z": dec.z, "G": float(dec.G_val), "V": float(dec.V_val),
            "metrics": dec.metrics, "sup": sup,
            "checks": [r.to_dict() for r in rows],
        }
        path = _write(_out_path(cfg, "json"), _json_text(payload))
    print(path)
    return 0 if all_clean(rows) else 1


def cmd_verify(ctx, cfg: RunConfig) -> int:
    rows = run_suite(ctx, cfg.suite, seed=cfg.seed, zmax=cfg.zmax,
                     threads=cfg.threads)
    payload = {"schema": SCHEMA, "seed": cfg.seed, "config": _echo(cfg),
               "suite": cfg.suite, "rows": [r.to_dict() for r in rows],
               "clean": all_clean(rows)}
    path = _write(_out_path(cfg, "json"), _json_text(payload))
    print(path)
    if not all_clean(rows):
        for r in rows:
            if r.status == "fail":
                print(f"FAIL {r.lemma}", file=sys.stderr)
        return 1
    return 0


_COMMANDS = {
    "spectrum": cmd_spectrum,
    "cusps": cmd_cusps,
    "companions": cmd_companions,
    "decompose": cmd_decompose,
    "verify": cmd_verify,
}


def _context_limit(cfg: RunConfig) -> int:
    if cfg.limit is not None:
        return cfg.limit
    if cfg.command == "verify":
        return max(120_000, cfg.zmax)
    return max(1000, cfg.N)


def main(argv=None) -> int:
    try:
        cfg = build_config(sys.argv[1:] if argv is None else argv)
    except UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return 2
    try:
        ctx = build_context(_context_limit(cfg))
        return _COMMANDS[cfg.command](ctx, cfg)
    except (ValueError, RuntimeError, ArithmeticError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
