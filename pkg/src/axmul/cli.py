"""Command-line front end: sweeps, tables, cluster grids, histograms, selection.

Subcommands: validate, sweep, table, clusters, histogram, select.
Exit codes: 0 success, 1 usage error, 2 input-format error, 3 internal error.

The adder library file is taken from --library, else the AXMUL_LIBRARY
environment variable, else the packaged default.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import traceback
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from . import render
from .adders import (AdderFormatError, AdderLibrary, UnknownAdderError,
                     error_profile, load_library)
from .clustering import (ClusterSpec, cluster_csv, cluster_matrix, cluster_sweep,
                         ed_histogram, histogram_csv)
from .designspace import (DEGREE_BITS, SelectionPolicy,
                          library_metrics_table, select_per_cluster,
                          selection_csv, selection_summary, table_csv)
from .fabric import MultiplierConfig, build_multiplier
from .metrics import (finalize, fmt6, merge, report_csv_header,
                      report_csv_row, sweep_chunk, sweep_chunk_bounds)

ENV_LIBRARY = "AXMUL_LIBRARY"
DEFAULT_FORMATS = ("csv", "json", "svg")


@dataclass
class RunConfig:
    library_path: str
    width: int = 8
    cluster_size: int = 16
    ned_threshold: float = 1.0
    psnr_threshold: float = 25.0
    out_dir: Path = Path(".")
    formats: tuple[str, ...] = DEFAULT_FORMATS
    workers: int = 1
    half_adders: str | None = None
    architecture: str = "row_ripple"
    library: AdderLibrary = field(init=False)

    def __post_init__(self):
        if self.ned_threshold < 0 or self.psnr_threshold < 0:
            raise ValueError("thresholds must be nonnegative")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        bad = set(self.formats) - set(DEFAULT_FORMATS)
        if bad:
            raise ValueError(f"unsupported formats: {sorted(bad)}")
        with open(self.library_path, encoding="utf-8") as fh:
            self.library = load_library(fh.read())


class _Parser(argparse.ArgumentParser):
    # usage problems exit 1; exit code 2 is reserved for input-format errors
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def default_library_path() -> str:
    env = os.environ.get(ENV_LIBRARY)
    if env:
        return env
    return str(resources.files("axmul").joinpath("data/ama_adders.json"))


def parse_degree(text: str, width: int) -> tuple[str, int]:
    """Accept D1..D4 names or a plain integer bit count."""
    name = text.upper()
    if name in DEGREE_BITS:
        return name, DEGREE_BITS[name]
    try:
        bits = int(text)
    except ValueError:
        raise ValueError(f"degree must be D1..D4 or an integer, got {text!r}") from None
    if not 0 <= bits <= 2 * width:
        raise ValueError(f"degree {bits} out of range for width {width}")
    for dname, dbits in DEGREE_BITS.items():
        if dbits == bits and width == 8:
            return dname, bits
    return f"d{bits}", bits


def _add_common(sub, with_design=False):
    sub.add_argument("--library", default=None, help="adder library JSON file")
    sub.add_argument("--width", type=int, default=8)
    sub.add_argument("--cluster-size", type=int, default=16)
    sub.add_argument("--ned-threshold", type=float, default=1.0)
    sub.add_argument("--psnr-threshold", type=float, default=25.0)
    sub.add_argument("--out", default=".", help="output directory")
    sub.add_argument("--format", default="csv,json,svg",
                     help="comma list from csv,json,svg")
    sub.add_argument("--workers", type=int, default=1)
    sub.add_argument("--architecture", choices=("row_ripple", "carry_save"),
                     default="row_ripple",
                     help="array layout (default: row_ripple, which the "
                          "shipped library is calibrated against)")
    sub.add_argument("--half-adders", choices=("approximate", "exact"),
                     default=None,
                     help="tables at constant-fed cell positions: approximate "
                          "applies the weight rule uniformly, exact keeps "
                          "plain half adders there (default follows the "
                          "architecture)")
    if with_design:
        sub.add_argument("--type", required=True, help="adder type name")
        sub.add_argument("--degree", required=True, help="D1..D4 or bit count")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="axmul", description=__doc__,
                formatter_class=argparse.RawDescriptionHelpFormatter)
    subs = p.add_subparsers(dest="command", required=True)

    v = subs.add_parser("validate", help="check an adder library file")
    v.add_argument("library_path", nargs="?", default=None)
    v.set_defaults(func=cmd_validate)

    s = subs.add_parser("sweep", help="exhaustive sweep of one design")
    _add_common(s, with_design=True)
    s.set_defaults(func=cmd_sweep)

    t = subs.add_parser("table", help="accuracy table over the 20-design library")
    _add_common(t)
    t.add_argument("--type", default=None, help="filter rows by adder type")
    t.add_argument("--degree", default=None, help="filter rows by degree")
    t.add_argument("--ordinals", default=None, help="comma list of design ordinals")
    t.set_defaults(func=cmd_table)

    c = subs.add_parser("clusters", help="per-cluster NED/PSNR analysis of one design")
    _add_common(c, with_design=True)
    c.set_defaults(func=cmd_clusters)

    h = subs.add_parser("histogram", help="error-distance histogram of one design")
    _add_common(h, with_design=True)
    h.add_argument("--bin-width", type=int, default=None)
    h.set_defaults(func=cmd_histogram)

    e = subs.add_parser("select", help="quality-constrained design per cluster")
    _add_common(e)
    e.add_argument("--metric", choices=("ned", "psnr"), default="ned")
    e.set_defaults(func=cmd_select)
    return p


def _run_config(args) -> RunConfig:
    return RunConfig(
        library_path=args.library or default_library_path(),
        width=args.width,
        cluster_size=args.cluster_size,
        ned_threshold=args.ned_threshold,
        psnr_threshold=args.psnr_threshold,
        out_dir=Path(args.out),
        formats=tuple(f.strip() for f in args.format.split(",") if f.strip()),
        workers=args.workers,
        half_adders=args.half_adders,
        architecture=args.architecture,
    )


def _write(cfg: RunConfig, name: str, text: str) -> Path:
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    path = cfg.out_dir / name
    path.write_text(text, encoding="utf-8", newline="\n")
    return path


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _design_config(cfg: RunConfig, args) -> tuple[str, MultiplierConfig]:
    label, bits = parse_degree(args.degree, args.width)
    config = MultiplierConfig(args.width, args.type, bits,
                              half_adders=cfg.half_adders,
                              architecture=cfg.architecture)
    cfg.library.get(args.type)   # fail early with a resolution error
    return f"{args.type}_{label}", config


def cmd_validate(args) -> int:
    path = args.library_path or default_library_path()
    with open(path, encoding="utf-8") as fh:
        library = load_library(fh.read())
    for spec in library:
        profile = error_profile(spec)
        detail = ""
        if profile.row_error_count:
            detail = (f" (sum rows {sorted(profile.sum_error_rows)}, "
                      f"cout rows {sorted(profile.cout_error_rows)})")
        print(f"{spec.name}: {profile.row_error_count} erroneous rows{detail}")
    return 0


def _swept_accumulator(cfg: RunConfig, grid):
    bounds = sweep_chunk_bounds(grid.width)
    if cfg.workers > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            parts = list(pool.map(_chunk_job, [(grid, lo, hi) for lo, hi in bounds]))
    else:
        parts = [sweep_chunk(grid, lo, hi) for lo, hi in bounds]
    acc = parts[0]
    for part in parts[1:]:
        acc = merge(acc, part)
    return acc


def _chunk_job(job):
    grid, lo, hi = job
    return sweep_chunk(grid, lo, hi)


def cmd_sweep(args) -> int:
    cfg = _run_config(args)
    name, config = _design_config(cfg, args)
    grid = build_multiplier(config, cfg.library)
    acc = _swept_accumulator(cfg, grid)
    pmax = ((1 << config.width) - 1) ** 2
    clusters = cluster_sweep(grid, spec=ClusterSpec(config.width, cfg.cluster_size))
    report = finalize(acc, pmax).with_cluster_averages(
        clusters.ned_avg, clusters.psnr_avg)

    if "json" in cfg.formats:
        _write(cfg, f"sweep_{name}.json", _json_text(report.to_dict()))
    if "csv" in cfg.formats:
        csv_text = (report_csv_header(("design", "type", "degree")) + "\n" +
                    report_csv_row(report, (name, args.type, str(config.degree))) + "\n")
        _write(cfg, f"sweep_{name}.csv", csv_text)
    print(f"{name}: er={fmt6(report.er)} med={fmt6(report.med)} "
          f"ned={fmt6(report.ned_clustered_avg)} mred={fmt6(report.mred)} "
          f"mse={fmt6(report.mse)} psnr={fmt6(report.psnr_clustered_avg)}")
    return 0


def cmd_table(args) -> int:
    cfg = _run_config(args)
    rows = library_metrics_table(cfg.library, cluster_size=cfg.cluster_size,
                                 workers=cfg.workers, half_adders=cfg.half_adders,
                                 architecture=cfg.architecture)
    if args.type:
        rows = [r for r in rows if r.design.type_knob == args.type]
    if args.degree:
        rows = [r for r in rows if r.design.degree_knob == args.degree.upper()]
    if args.ordinals:
        keep = {int(tok) for tok in args.ordinals.split(",")}
        rows = [r for r in rows if r.design.ordinal in keep]
    if not rows:
        raise ValueError("design filter matched no rows")

    if "csv" in cfg.formats:
        _write(cfg, "library_table.csv", table_csv(rows))
    if "json" in cfg.formats:
        doc = [{"design": r.design.label, "type": r.design.type_knob,
                "degree": r.design.degree_knob, "ordinal": r.design.ordinal,
                **r.report.to_dict()} for r in rows]
        _write(cfg, "library_table.json", _json_text(doc))
    for r in rows:
        print(f"{r.design.label} ({r.design.type_knob}/{r.design.degree_knob}): "
              f"er={fmt6(r.report.er)} med={fmt6(r.report.med)} "
              f"ned={fmt6(r.report.ned_clustered_avg)} "
              f"psnr={fmt6(r.report.psnr_clustered_avg)}")
    return 0


def cmd_clusters(args) -> int:
    cfg = _run_config(args)
    name, config = _design_config(cfg, args)
    grid = build_multiplier(config, cfg.library)
    report = cluster_sweep(grid, spec=ClusterSpec(config.width, cfg.cluster_size))

    if "csv" in cfg.formats:
        _write(cfg, f"clusters_{name}.csv", cluster_csv(report))
        _write(cfg, f"clusters_{name}_ned.txt", cluster_matrix(report, "ned"))
    if "svg" in cfg.formats:
        _write(cfg, f"clusters_{name}.svg",
               render.cluster_svg(report, "ned", f"per-cluster NED, {name}"))
    if "json" in cfg.formats:
        doc = {
            "design": name,
            "ned_avg": report.ned_avg, "ned_max": report.ned_max,
            "psnr_avg": report.psnr_avg, "psnr_min": report.psnr_min,
            "ned_violations": report.count_ned_over(cfg.ned_threshold),
            "psnr_violations": report.count_psnr_under(cfg.psnr_threshold),
        }
        _write(cfg, f"clusters_{name}.json", _json_text(doc))

    total = report.spec.total_clusters
    print(f"{name}: ned_avg={fmt6(report.ned_avg)} psnr_avg={fmt6(report.psnr_avg)}")
    print(f"ned>{cfg.ned_threshold:g}: "
          f"{report.count_ned_over(cfg.ned_threshold)}/{total}")
    print(f"psnr<{cfg.psnr_threshold:g}dB: "
          f"{report.count_psnr_under(cfg.psnr_threshold)}/{total}")
    return 0


def cmd_histogram(args) -> int:
    cfg = _run_config(args)
    name, config = _design_config(cfg, args)
    grid = build_multiplier(config, cfg.library)
    hist = ed_histogram(grid, bin_width=args.bin_width)

    if "csv" in cfg.formats:
        _write(cfg, f"histogram_{name}.csv", histogram_csv(hist))
    if "svg" in cfg.formats:
        _write(cfg, f"histogram_{name}.svg",
               render.histogram_svg(hist, f"ED histogram, {name}"))
    if "json" in cfg.formats:
        doc = {"design": name, "bin_width": hist.bin_width,
               "total_count": hist.total_count, "min_ed": hist.min_ed,
               "max_ed": hist.max_ed, "mean_ed": hist.mean_ed}
        _write(cfg, f"histogram_{name}.json", _json_text(doc))
    print(f"{name}: ED min={hist.min_ed} max={hist.max_ed} "
          f"mean={fmt6(hist.mean_ed)} over {hist.total_count} pairs")
    return 0


def cmd_select(args) -> int:
    cfg = _run_config(args)
    rows = library_metrics_table(cfg.library, cluster_size=cfg.cluster_size,
                                 workers=cfg.workers, half_adders=cfg.half_adders,
                                 architecture=cfg.architecture)
    policy = SelectionPolicy(args.metric,
                             cfg.ned_threshold if args.metric == "ned"
                             else cfg.psnr_threshold)
    sel = select_per_cluster([(r.design, r.clusters) for r in rows], policy)

    if "csv" in cfg.formats:
        _write(cfg, "selection.csv", selection_csv(sel))
    if "json" in cfg.formats:
        doc = selection_summary(sel)
        doc["policy"] = {"metric": policy.quality_metric,
                         "threshold": policy.threshold}
        _write(cfg, "selection.json", _json_text(doc))
    counts = sel.usage_counts()
    top = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))[:4]
    summary = " ".join(f"{k}:{v}" for k, v in top)
    print(f"selection ({policy.quality_metric}<= {policy.threshold:g}): "
          f"exact_fraction={fmt6(sel.exact_fraction)} top=[{summary}]")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    try:
        return args.func(args)
    except (AdderFormatError, FileNotFoundError) as exc:
        print(f"axmul: {exc}", file=sys.stderr)
        return 2
    except (UnknownAdderError, ValueError, KeyError) as exc:
        print(f"axmul: {exc}", file=sys.stderr)
        return 1
    except Exception:
        traceback.print_exc()
        return 3


if __name__ == "__main__":
    sys.exit(main())
