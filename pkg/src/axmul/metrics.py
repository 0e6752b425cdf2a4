"""Error metrics over exhaustive operand sweeps.

Sufficient statistics are collected in a mergeable accumulator so a sweep
can be partitioned arbitrarily and reduced deterministically: all counts
and distance sums are exact integers, only the relative-error sum is a
float.  Sums fit comfortably in 63 bits for every supported width.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .fabric import CellGrid, eval_multiply_many

PEAK_SQUARED = 255 * 255   # PSNR numerator is fixed at 255^2 for every width


@dataclass(frozen=True)
class EvalOutcome:
    x: int
    y: int
    exact: int
    approx: int

    @property
    def ed(self) -> int:
        return abs(self.exact - self.approx)


@dataclass(frozen=True)
class MetricAccumulator:
    count: int = 0
    err_count: int = 0
    sum_ed: int = 0
    sum_ed_sq: int = 0
    max_ed: int = 0
    sum_red: float = 0.0
    red_count: int = 0


def accumulate(acc: MetricAccumulator, outcome: EvalOutcome) -> MetricAccumulator:
    ed = outcome.ed
    return MetricAccumulator(
        count=acc.count + 1,
        err_count=acc.err_count + (1 if ed else 0),
        sum_ed=acc.sum_ed + ed,
        sum_ed_sq=acc.sum_ed_sq + ed * ed,
        max_ed=max(acc.max_ed, ed),
        sum_red=acc.sum_red + (ed / outcome.exact if outcome.exact > 0 else 0.0),
        red_count=acc.red_count + (1 if outcome.exact > 0 else 0),
    )


def merge(a: MetricAccumulator, b: MetricAccumulator) -> MetricAccumulator:
    return MetricAccumulator(
        count=a.count + b.count,
        err_count=a.err_count + b.err_count,
        sum_ed=a.sum_ed + b.sum_ed,
        sum_ed_sq=a.sum_ed_sq + b.sum_ed_sq,
        max_ed=max(a.max_ed, b.max_ed),
        sum_red=a.sum_red + b.sum_red,
        red_count=a.red_count + b.red_count,
    )


def accumulate_arrays(exact: np.ndarray, approx: np.ndarray) -> MetricAccumulator:
    """Build an accumulator from parallel exact/approximate product arrays."""
    exact = np.asarray(exact, dtype=np.int64)
    ed = np.abs(exact - np.asarray(approx, dtype=np.int64))
    nonzero = exact > 0
    red = ed[nonzero] / exact[nonzero]
    return MetricAccumulator(
        count=int(ed.size),
        err_count=int(np.count_nonzero(ed)),
        sum_ed=int(ed.sum()),
        sum_ed_sq=int((ed * ed).sum()),
        max_ed=int(ed.max(initial=0)),
        sum_red=float(red.sum()),
        red_count=int(np.count_nonzero(nonzero)),
    )


def psnr_from_mse(mse: float) -> float:
    """10*log10(255^2 / mse); mse = 0 maps to the +inf sentinel."""
    if mse < 0:
        raise ValueError(f"mse must be nonnegative, got {mse}")
    if mse == 0:
        return math.inf
    return 10.0 * math.log10(PEAK_SQUARED / mse)


@dataclass(frozen=True)
class MetricReport:
    er: float
    med: float
    ned_global: float
    mred: float
    mse: float
    psnr_global: float
    max_ed: int
    count: int
    ned_clustered_avg: float | None = None
    psnr_clustered_avg: float | None = None

    def with_cluster_averages(self, ned_avg: float, psnr_avg: float) -> "MetricReport":
        return replace(self, ned_clustered_avg=ned_avg, psnr_clustered_avg=psnr_avg)

    def to_dict(self) -> dict:
        return {
            "er": self.er,
            "med": self.med,
            "ned_global": self.ned_global,
            "ned_clustered_avg": self.ned_clustered_avg,
            "mred": self.mred,
            "mse": self.mse,
            "psnr_global": self.psnr_global,
            "psnr_clustered_avg": self.psnr_clustered_avg,
            "max_ed": self.max_ed,
            "count": self.count,
        }


def finalize(acc: MetricAccumulator, pmax: int) -> MetricReport:
    if acc.count == 0:
        raise ValueError("cannot finalize an empty accumulator")
    if pmax <= 0:
        raise ValueError(f"pmax must be positive, got {pmax}")
    med = acc.sum_ed / acc.count
    mse = acc.sum_ed_sq / acc.count
    return MetricReport(
        er=acc.err_count / acc.count,
        med=med,
        ned_global=med / pmax,
        mred=acc.sum_red / acc.red_count if acc.red_count else 0.0,
        mse=mse,
        psnr_global=psnr_from_mse(mse),
        max_ed=acc.max_ed,
        count=acc.count,
    )


def sweep_chunk_bounds(n: int) -> list[tuple[int, int]]:
    """Fixed first-operand partition of the sweep domain.

    Chunking depends only on the width, never on worker count, so any
    parallel schedule reduces to the same merge order.
    """
    side = 1 << n
    chunks = min(16, side)
    step = side // chunks
    return [(lo, lo + step) for lo in range(0, side, step)]


def sweep_chunk(grid: CellGrid, lo: int, hi: int) -> MetricAccumulator:
    """Accumulate outcomes for first operand in [lo, hi), all second operands."""
    side = 1 << grid.width
    xs = np.repeat(np.arange(lo, hi, dtype=np.int64), side)
    ys = np.tile(np.arange(side, dtype=np.int64), hi - lo)
    exact = xs * ys
    approx = eval_multiply_many(grid, xs, ys)
    return accumulate_arrays(exact, approx)


def exhaustive_sweep(grid: CellGrid, n: int | None = None) -> MetricAccumulator:
    """Accumulate all 2^(2n) ordered operand pairs."""
    if n is not None and n != grid.width:
        raise ValueError(f"sweep width {n} does not match grid width {grid.width}")
    acc = MetricAccumulator()
    for lo, hi in sweep_chunk_bounds(grid.width):
        acc = merge(acc, sweep_chunk(grid, lo, hi))
    return acc


def report_csv_header(extra: tuple[str, ...] = ()) -> str:
    base = ("er", "med", "ned", "mred", "mse", "psnr",
            "ned_global", "psnr_global", "max_ed", "count")
    return ",".join(extra + base)


def report_csv_row(report: MetricReport, extra: tuple[str, ...] = ()) -> str:
    """One CSV row in accuracy-table column order; floats at 6 significant digits."""
    fields = (
        fmt6(report.er),
        fmt6(report.med),
        fmt6(report.ned_clustered_avg),
        fmt6(report.mred),
        fmt6(report.mse),
        fmt6(report.psnr_clustered_avg),
        fmt6(report.ned_global),
        fmt6(report.psnr_global),
        str(report.max_ed),
        str(report.count),
    )
    return ",".join(extra + fields)


def fmt6(value) -> str:
    if value is None:
        return ""
    if value == math.inf:
        return "inf"
    return f"{value:.6g}"
