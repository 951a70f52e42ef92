"""Command line interface.

Subcommands: simulate, test, power, levels, ingest. All take
--config CONFIG.json plus optional --seed (overrides the config's seed),
--out (default stdout), and --format {csv,json}.

Exit codes: 0 success, 2 configuration error, 3 data error,
4 numerical failure. JSON result objects embed a provenance block
(resolved config, seed, package version); CSV outputs carry the same
block as a leading '# {...}' comment line.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import replace
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .config import (
    _take,
    batch_source_from_dict,
    load_batch,
    power_config_from_dict,
    power_config_to_dict,
    schema_from_dict,
    specs_from_value,
    specs_to_value,
    two_sample_config_from_dict,
    two_sample_config_to_dict,
    weights_from_dict,
    weights_to_dict,
)
from .errors import ConfigError, DataError, NumericalError
from .ingest import ingest_prices
from .pathio import path_to_dict
from .simulate import multichannel_batch, simulate_batch
from .two_sample import level_contribution_samples, power_study, two_sample_test


# ---------------------------------------------------------------------------
# plumbing
# ---------------------------------------------------------------------------

def _load_config(path: str | None) -> dict:
    if path is None:
        raise ConfigError("--config is required")
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}") from exc


def _provenance(command: str, config: dict, seed) -> dict:
    return {"command": command, "package": "sigmmd", "version": __version__,
            "seed": seed, "config": config,
            "created": datetime.now(timezone.utc).isoformat(timespec="seconds")}


def _write_text(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _write_json(payload, out: str | None) -> None:
    _write_text(json.dumps(payload, indent=2) + "\n", out)


def _write_csv(header, rows, provenance, out: str | None) -> None:
    buf = io.StringIO()
    buf.write("# " + json.dumps(provenance) + "\n")
    writer = csv.writer(buf)
    writer.writerow(header)
    writer.writerows(rows)
    _write_text(buf.getvalue(), out)


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

def cmd_simulate(args) -> int:
    raw = _load_config(args.config)
    kw = _take(raw, "simulate config", required=("spec", "n_paths"))
    spec = specs_from_value(kw["spec"])
    n_paths = int(kw["n_paths"])
    if args.seed is not None:
        if isinstance(spec, tuple):
            spec = tuple(replace(s, seed=args.seed + j) for j, s in enumerate(spec))
        else:
            spec = replace(spec, seed=args.seed)
    if isinstance(spec, tuple):
        paths = multichannel_batch(list(spec), n_paths)
    else:
        paths = simulate_batch(spec, n_paths)

    resolved = {"spec": specs_to_value(spec), "n_paths": n_paths}
    if args.fmt == "json":
        # portable format: a bare array of {dim, times, values} objects
        _write_json([path_to_dict(p) for p in paths], args.out)
    else:
        dim = paths[0].dim
        header = ["path", "time"] + [f"c{i}" for i in range(dim)]
        rows = [[i, t] + list(row)
                for i, p in enumerate(paths)
                for t, row in zip(p.times, p.values)]
        _write_csv(header, rows, _provenance("simulate", resolved, args.seed), args.out)
    return 0


# ---------------------------------------------------------------------------
# test
# ---------------------------------------------------------------------------

def cmd_test(args) -> int:
    raw = _load_config(args.config)
    kw = _take(raw, "test command config", required=("x", "y"),
               optional=("null_pool", "test"))
    batch_x = load_batch(batch_source_from_dict(kw["x"]))
    batch_y = load_batch(batch_source_from_dict(kw["y"]))
    pool = (load_batch(batch_source_from_dict(kw["null_pool"]))
            if "null_pool" in kw else None)
    cfg = two_sample_config_from_dict(kw.get("test", {}))
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)

    res = two_sample_test(batch_x, batch_y, cfg, null_pool=pool)
    resolved = {"x": kw["x"], "y": kw["y"], "test": two_sample_config_to_dict(cfg)}
    if "null_pool" in kw:
        resolved["null_pool"] = kw["null_pool"]
    prov = _provenance("test", resolved, cfg.seed)
    fields = [("statistic", res.statistic), ("threshold", res.threshold),
              ("p_value", res.p_value), ("reject", res.reject),
              ("estimator", res.estimator), ("alpha", res.alpha),
              ("null_method", res.null_method), ("B", res.B), ("seed", res.seed)]
    if args.fmt == "json":
        payload = dict(fields)
        payload["provenance"] = prov
        _write_json(payload, args.out)
    else:
        _write_csv([k for k, _ in fields], [[v for _, v in fields]], prov, args.out)
    return 0


# ---------------------------------------------------------------------------
# power
# ---------------------------------------------------------------------------

def cmd_power(args) -> int:
    raw = _load_config(args.config)
    cfg = power_config_from_dict(raw)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    rows = power_study(cfg)
    prov = _provenance("power", power_config_to_dict(cfg), cfg.seed)
    header = ["scaling", "batch_size", "estimator", "type1", "type2",
              "std", "reps", "seed"]
    table = [[r.scaling, r.batch_size, r.estimator, r.type1, r.type2,
              r.std, r.reps, r.seed] for r in rows]
    if args.fmt == "json":
        _write_json({"rows": [dict(zip(header, row)) for row in table],
                     "provenance": prov}, args.out)
    else:
        _write_csv(header, table, prov, args.out)
    return 0


# ---------------------------------------------------------------------------
# levels
# ---------------------------------------------------------------------------

def cmd_levels(args) -> int:
    raw = _load_config(args.config)
    kw = _take(raw, "levels config", required=("x", "y", "depth"),
               optional=("B", "n1", "n2", "mode", "weights", "seed"))
    batch_x = load_batch(batch_source_from_dict(kw["x"]))
    batch_y = load_batch(batch_source_from_dict(kw["y"]))
    depth = int(kw["depth"])
    B = int(kw.get("B", 200))
    n1 = int(kw.get("n1", max(2, len(batch_x) // 2)))
    n2 = int(kw.get("n2", max(2, len(batch_y) // 2)))
    mode = kw.get("mode", "unbiased")
    weights = weights_from_dict(kw["weights"]) if "weights" in kw else None
    seed = args.seed if args.seed is not None else int(kw.get("seed", 0))

    samples = level_contribution_samples(batch_x, batch_y, depth=depth, B=B,
                                         n1=n1, n2=n2, weights=weights,
                                         mode=mode, seed=seed)
    resolved = {"x": kw["x"], "y": kw["y"], "depth": depth, "B": B, "n1": n1,
                "n2": n2, "mode": mode, "seed": seed,
                "weights": weights_to_dict(weights) if weights else {"kind": "unit"}}
    prov = _provenance("levels", resolved, seed)
    header = ["hypothesis", "level", "mean", "std", "q05", "q95", "log10_abs_mean"]
    rows = []
    for hyp in ("null", "alt"):
        block = samples[hyp]
        for m in range(depth + 1):
            col = block[:, m]
            mean = float(col.mean())
            rows.append([hyp, m, mean, float(col.std(ddof=1)) if B > 1 else 0.0,
                         float(np.quantile(col, 0.05)), float(np.quantile(col, 0.95)),
                         math.log10(abs(mean)) if mean != 0.0 else None])
    if args.fmt == "json":
        _write_json({"rows": [dict(zip(header, r)) for r in rows],
                     "provenance": prov}, args.out)
    else:
        _write_csv(header, [["" if v is None else v for v in r] for r in rows],
                   prov, args.out)
    return 0


# ---------------------------------------------------------------------------
# ingest
# ---------------------------------------------------------------------------

def _split_out_names(out: str) -> tuple[str, str]:
    base = out[:-5] if out.endswith(".json") else out
    return base + "-calibration.json", base + "-test.json"


def cmd_ingest(args) -> int:
    raw = _load_config(args.config)
    kw = _take(raw, "ingest config", required=("source",),
               optional=("schema", "window", "ratio", "method", "seed", "kind",
                         "cumulative", "max_drop_fraction"))
    schema = schema_from_dict(kw["schema"]) if "schema" in kw else None
    seed = args.seed if args.seed is not None else int(kw.get("seed", 0))
    cumulative = bool(kw.get("cumulative", True))
    res = ingest_prices(kw["source"], schema=schema,
                        window=int(kw.get("window", 30)),
                        ratio=float(kw.get("ratio", 0.5)),
                        method=kw.get("method", "chronological"),
                        seed=seed, kind=kw.get("kind", "log"),
                        max_drop_fraction=float(kw.get("max_drop_fraction", 0.05)))
    resolved = dict(kw, seed=seed, cumulative=cumulative)
    prov = _provenance("ingest", resolved, seed)
    report = {"n_rows": res.report.n_rows, "n_kept": res.report.n_kept,
              "n_bad_values": res.report.n_bad_values,
              "n_duplicate_dates": res.report.n_duplicate_dates,
              "fraction_dropped": res.report.fraction_dropped,
              "n_calibration_windows": res.calibration.n_windows,
              "n_test_windows": res.test.n_windows}

    if args.fmt == "json":
        if args.out is None:
            raise ConfigError("ingest with json format needs --out to place "
                              "the calibration and test path files")
        cal_file, test_file = _split_out_names(args.out)
        _write_json([path_to_dict(p) for p in res.calibration.to_paths(cumulative)],
                    cal_file)
        _write_json([path_to_dict(p) for p in res.test.to_paths(cumulative)],
                    test_file)
        summary = {"calibration_file": cal_file, "test_file": test_file,
                   "report": report, "provenance": prov}
        _write_json(summary, None)
    else:
        header = ["split", "window", "step"] + list(res.calibration.columns)
        rows = []
        for split, ws in (("calibration", res.calibration), ("test", res.test)):
            for wi, win in enumerate(ws.windows):
                for si, step in enumerate(win):
                    rows.append([split, wi, si] + list(step))
        prov["report"] = report
        _write_csv(header, rows, prov, args.out)
    return 0


# ---------------------------------------------------------------------------
# parser and entry point
# ---------------------------------------------------------------------------

_COMMANDS = [
    ("simulate", cmd_simulate, "draw a batch of paths from a process model"),
    ("test", cmd_test, "run a two-sample test between two batches"),
    ("power", cmd_power, "estimate Type 1/2 error rates over a parameter grid"),
    ("levels", cmd_levels, "resample per-level contributions to the statistic"),
    ("ingest", cmd_ingest, "turn a price CSV into calibration/test path files"),
]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sigmmd",
        description="Two-sample hypothesis testing for path-valued data "
                    "with weighted signature kernels.")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn, help_text in _COMMANDS:
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--config", required=True, help="JSON config file")
        sp.add_argument("--seed", type=int, default=None,
                        help="override the config's seed")
        sp.add_argument("--out", default=None, help="output file (default stdout)")
        sp.add_argument("--format", dest="fmt", choices=("csv", "json"),
                        default="json", help="output format")
        sp.set_defaults(func=fn)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
