"""Command line entry point: ``swssb <kind> --config run.yaml --out results/``."""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .rbim import InsufficientStatisticsError
from .experiments import KINDS, ExperimentConfig, _plain, execute, validate
from .rng import GENERATOR_NAME


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _json_value(v):
    v = _plain(v)
    if isinstance(v, float) and not math.isfinite(v):
        return None
    if isinstance(v, dict):
        return {k: _json_value(x) for k, x in v.items()}
    if isinstance(v, list):
        return [_json_value(x) for x in v]
    return v


def write_csv(path: Path, rows: list[dict]) -> None:
    columns = []
    for row in rows:
        columns.extend(k for k in row if k not in columns)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(columns)
        for row in rows:
            w.writerow([_cell(row.get(c)) for c in columns])


def write_json(path: Path, kind: str, rows: list[dict], summary: dict) -> None:
    doc = {"experiment": kind, "rows": _json_value(rows), "summary": _json_value(summary)}
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def load_config(path: str | None, kind: str, seed: int | None) -> ExperimentConfig:
    data = {}
    if path:
        with open(path) as fh:
            data = yaml.safe_load(fh) or {}
        if not isinstance(data, dict):
            raise ValueError(f"{path}: top level must be a mapping")
        file_kind = data.get("kind")
        if file_kind is not None and file_kind != kind:
            raise ValueError(f"{path}: config is for {file_kind!r}, not {kind!r}")
    if seed is not None:
        data["seed"] = seed
    return ExperimentConfig.from_mapping(data, kind)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="swssb", description=__doc__)
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="kind", required=True, metavar="kind")
    for k in KINDS:
        sp = sub.add_parser(k, help=f"run the {k} experiment")
        sp.add_argument("--config", help="YAML config file")
        sp.add_argument("--out", help="output directory (overrides the config)")
        sp.add_argument("--seed", type=int, help="root seed (overrides the config)")
        sp.add_argument("--threads", type=int, default=1, help="worker threads (results do not depend on it)")
        sp.add_argument("--format", choices=("csv", "json"), help="data file format")
        sp.add_argument("--validate-only", action="store_true", help="check the config and exit")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.kind, args.seed)
    except (OSError, ValueError, yaml.YAMLError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.out:
        cfg.output = args.out
    if args.format:
        cfg.format = args.format
    problems = validate(cfg)
    if problems:
        for msg in problems:
            print(f"config error: {msg}", file=sys.stderr)
        return 2
    if args.validate_only:
        print("config ok")
        return 0
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return 2

    t0 = time.perf_counter()
    try:
        result = execute(cfg, threads=args.threads)
    except (ValueError, ArithmeticError, InsufficientStatisticsError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    wall = time.perf_counter() - t0

    out = Path(cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    data_name = f"{cfg.kind}.{cfg.format}"
    if cfg.format == "csv":
        write_csv(out / data_name, result.rows)
    else:
        write_json(out / data_name, cfg.kind, result.rows, result.summary)
    checks = [{"name": c.name, "passed": bool(c.passed), "detail": c.detail} for c in result.checks]
    ok = all(c["passed"] for c in checks)
    manifest = {
        "experiment": cfg.kind,
        "version": __version__,
        "config": _json_value(cfg.as_dict()),
        "rng": GENERATOR_NAME,
        "threads": args.threads,
        "data_file": data_name,
        "n_rows": len(result.rows),
        "summary": _json_value(result.summary),
        "checks": checks,
        "passed": ok,
        "wall_time_s": wall,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    for c in checks:
        print(f"{'PASS' if c['passed'] else 'FAIL'}  {c['name']}  {c['detail']}")
    print(f"wrote {out / data_name} ({len(result.rows)} rows) in {wall:.2f} s")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
