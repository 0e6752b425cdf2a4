"""The 20-design library: enumeration, the accuracy table, per-cluster selection.

Designs are numbered row-major over the type x degree table: AMA1/D1 is
Design1, AMA1/D2 is Design2, ..., AMA5/D4 is Design20.
"""

from __future__ import annotations

from dataclasses import dataclass

from .adders import AdderLibrary
from .clustering import ClusterReport, ClusterSpec, cluster_sweep
from .fabric import MultiplierConfig, build_multiplier
from .metrics import (MetricReport, exhaustive_sweep, finalize,
                      report_csv_header, report_csv_row)

AMA_TYPES = ("AMA1", "AMA2", "AMA3", "AMA4", "AMA5")
DEGREE_BITS = {"D1": 7, "D2": 8, "D3": 9, "D4": 16}
DEGREE_NAMES = tuple(DEGREE_BITS)
LIBRARY_WIDTH = 8


@dataclass(frozen=True)
class DesignId:
    type_knob: str
    degree_knob: str
    ordinal: int
    degree_bits: int

    @property
    def label(self) -> str:
        return f"Design{self.ordinal}"

    @property
    def name(self) -> str:
        return f"{self.type_knob}_{self.degree_knob}"


def design_id(type_knob: str, degree_knob: str) -> DesignId:
    ti = AMA_TYPES.index(type_knob)
    di = DEGREE_NAMES.index(degree_knob)
    return DesignId(type_knob, degree_knob, 4 * ti + di + 1, DEGREE_BITS[degree_knob])


def enumerate_library(library: AdderLibrary, half_adders: str | None = None,
                      architecture: str = "row_ripple",
                      ) -> list[tuple[DesignId, MultiplierConfig]]:
    """All 20 (DesignId, config) pairs at width 8, in ordinal order.

    The published accuracy figures for this library correspond to the
    row-ripple array with plain half adders at its two-input positions,
    so that is the default build here.
    """
    missing = [t for t in AMA_TYPES if t not in library]
    if missing:
        raise KeyError(f"library is missing adder types: {', '.join(missing)}")
    out = []
    for t in AMA_TYPES:
        for d in DEGREE_NAMES:
            did = design_id(t, d)
            out.append((did, MultiplierConfig(LIBRARY_WIDTH, t, did.degree_bits,
                                              half_adders=half_adders,
                                              architecture=architecture)))
    return out


@dataclass(frozen=True)
class TableRow:
    design: DesignId
    config: MultiplierConfig
    report: MetricReport
    clusters: ClusterReport


def analyze_design(config: MultiplierConfig, library: AdderLibrary,
                   cluster_size: int = 16) -> tuple[MetricReport, ClusterReport]:
    """Exhaustive sweep plus cluster sweep; cluster averages attached to the report."""
    grid = build_multiplier(config, library)
    acc = exhaustive_sweep(grid)
    pmax = ((1 << config.width) - 1) ** 2
    clusters = cluster_sweep(grid, spec=ClusterSpec(config.width, cluster_size))
    report = finalize(acc, pmax).with_cluster_averages(
        clusters.ned_avg, clusters.psnr_avg)
    return report, clusters


def library_metrics_table(library: AdderLibrary, cluster_size: int = 16,
                          workers: int = 1, half_adders: str | None = None,
                          architecture: str = "row_ripple") -> list[TableRow]:
    """One analyzed row per design, ordered by ordinal.

    Rows are independent jobs; with workers > 1 they run in a process
    pool and are still collected in ordinal order, so the result is
    identical for any worker count.
    """
    entries = enumerate_library(library, half_adders=half_adders,
                                architecture=architecture)
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(
                _analyze_job, [(cfg, library, cluster_size) for _, cfg in entries]))
    else:
        results = [_analyze_job((cfg, library, cluster_size)) for _, cfg in entries]
    return [TableRow(did, cfg, report, clusters)
            for (did, cfg), (report, clusters) in zip(entries, results)]


def _analyze_job(args):
    config, library, cluster_size = args
    return analyze_design(config, library, cluster_size)


def table_csv(rows: list[TableRow]) -> str:
    lines = [report_csv_header(("design", "type", "degree"))]
    for row in rows:
        lines.append(report_csv_row(
            row.report,
            (row.design.label, row.design.type_knob, row.design.degree_knob)))
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class SelectionPolicy:
    quality_metric: str          # "ned" or "psnr"
    threshold: float

    def __post_init__(self):
        if self.quality_metric not in ("ned", "psnr"):
            raise ValueError(f"unknown quality metric {self.quality_metric!r}")

    def admits(self, cell) -> bool:
        if self.quality_metric == "ned":
            return cell.ned <= self.threshold
        return cell.psnr >= self.threshold


@dataclass(frozen=True)
class SelectionMap:
    grid_side: int
    choices: tuple[DesignId | None, ...]   # row-major; None means exact fallback

    def choice(self, ia: int, ib: int) -> DesignId | None:
        return self.choices[ia * self.grid_side + ib]

    def usage_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for c in self.choices:
            key = c.label if c is not None else "exact"
            counts[key] = counts.get(key, 0) + 1
        return counts

    @property
    def exact_fraction(self) -> float:
        return sum(1 for c in self.choices if c is None) / len(self.choices)


def select_per_cluster(reports: list[tuple[DesignId, ClusterReport]],
                       policy: SelectionPolicy) -> SelectionMap:
    """Pick, per cluster, the highest-degree design whose cell meets the policy.

    Ties go to the lowest cluster NED, then the lowest ordinal; clusters
    with no qualifying design fall back to exact.
    """
    if not reports:
        raise ValueError("no design reports to select from")
    sides = {rep.spec.grid_side for _, rep in reports}
    if len(sides) != 1:
        raise ValueError(f"cluster grids disagree: sides {sorted(sides)}")
    side = sides.pop()

    choices: list[DesignId | None] = []
    for ci in range(side * side):
        best = None   # (-degree, ned, ordinal, design)
        for did, rep in reports:
            cell = rep.cells[ci]
            if not policy.admits(cell):
                continue
            key = (-did.degree_bits, cell.ned, did.ordinal)
            if best is None or key < best[0]:
                best = (key, did)
        choices.append(best[1] if best else None)
    return SelectionMap(side, tuple(choices))


def selection_csv(sel: SelectionMap) -> str:
    lines = ["ia,ib,design"]
    g = sel.grid_side
    for ia in range(g):
        for ib in range(g):
            c = sel.choice(ia, ib)
            lines.append(f"{ia},{ib},{c.ordinal if c is not None else 'exact'}")
    return "\n".join(lines) + "\n"


def selection_summary(sel: SelectionMap) -> dict:
    return {
        "grid_side": sel.grid_side,
        "usage_counts": sel.usage_counts(),
        "exact_fraction": sel.exact_fraction,
    }
