"""Input-cluster analysis: per-block NED/MSE/PSNR and ED histograms.

The operand space is tiled into blocks of `cluster_size` consecutive
values per operand (16x16 blocks of 256 pairs each at width 8).  Each
block's NED is normalized by the block-local maximum exact product, so
blocks of small operands are judged against what they could actually
produce; the global normalization stays available in MetricReport.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fabric import CellGrid, eval_multiply_many
from .metrics import fmt6, psnr_from_mse


@dataclass(frozen=True)
class ClusterSpec:
    width: int
    cluster_size: int = 16

    def __post_init__(self):
        side = 1 << self.width
        if self.cluster_size < 1 or side % self.cluster_size:
            raise ValueError(
                f"cluster size {self.cluster_size} must divide 2^{self.width}")

    @property
    def grid_side(self) -> int:
        return (1 << self.width) // self.cluster_size

    @property
    def total_clusters(self) -> int:
        return self.grid_side ** 2


@dataclass(frozen=True)
class ClusterCell:
    """Aggregates of one s*s block of operand pairs.

    `mse` is the raw mean squared ED (its count-weighted mean over all
    blocks reproduces the global MSE exactly).  `psnr` judges the block
    as an image scaled to its own peak product: the EDs are mapped onto
    the 0..255 range by 255/pmax_cluster before squaring, which is what
    makes blocks of small operands comparable to blocks of large ones.
    """

    ia: int                 # first-operand block index
    ib: int                 # second-operand block index
    mean_ed: float
    pmax_cluster: int
    ned: float
    mse: float
    psnr: float
    sum_ed: int             # exact integer mass, kept for conservation checks
    sum_ed_sq: int

    @property
    def mse_scaled(self) -> float:
        """Mean squared ED after scaling the block's products to 0..255."""
        if self.pmax_cluster == 0:
            return self.mse
        return self.mse * (255.0 / self.pmax_cluster) ** 2


@dataclass(frozen=True)
class ClusterReport:
    spec: ClusterSpec
    cells: tuple[ClusterCell, ...]    # row-major: ia * grid_side + ib

    def cell(self, ia: int, ib: int) -> ClusterCell:
        return self.cells[ia * self.spec.grid_side + ib]

    @property
    def ned_avg(self) -> float:
        return sum(c.ned for c in self.cells) / len(self.cells)

    @property
    def ned_max(self) -> float:
        return max(c.ned for c in self.cells)

    @property
    def psnr_avg(self) -> float:
        """Mean over finite-PSNR cells; +inf cells are reported separately."""
        finite = [c.psnr for c in self.cells if c.psnr != math.inf]
        return sum(finite) / len(finite) if finite else math.inf

    @property
    def psnr_min(self) -> float:
        finite = [c.psnr for c in self.cells if c.psnr != math.inf]
        return min(finite) if finite else math.inf

    @property
    def infinite_psnr_count(self) -> int:
        return sum(1 for c in self.cells if c.psnr == math.inf)

    def count_ned_over(self, threshold: float) -> int:
        return sum(1 for c in self.cells if c.ned > threshold)

    def count_psnr_under(self, threshold: float) -> int:
        return sum(1 for c in self.cells if c.psnr < threshold)


def cluster_sweep(grid: CellGrid, n: int | None = None,
                  spec: ClusterSpec | None = None) -> ClusterReport:
    """Aggregate every s*s operand block of the exhaustive sweep."""
    if n is not None and n != grid.width:
        raise ValueError(f"sweep width {n} does not match grid width {grid.width}")
    if spec is None:
        spec = ClusterSpec(grid.width)
    elif spec.width != grid.width:
        raise ValueError("cluster spec width does not match grid width")

    side = 1 << grid.width
    s = spec.cluster_size
    g = spec.grid_side

    xs, ys = np.meshgrid(np.arange(side, dtype=np.int64),
                         np.arange(side, dtype=np.int64), indexing="ij")
    exact = xs * ys
    ed = np.abs(exact - eval_multiply_many(grid, xs, ys))

    blocks = ed.reshape(g, s, g, s)
    sum_ed = blocks.sum(axis=(1, 3))
    sum_ed_sq = (blocks.astype(np.int64) ** 2).sum(axis=(1, 3))

    pairs = s * s
    cells = []
    for ia in range(g):
        for ib in range(g):
            block_sum = int(sum_ed[ia, ib])
            block_sq = int(sum_ed_sq[ia, ib])
            mean_ed = block_sum / pairs
            mse = block_sq / pairs
            pmax = (s * ia + s - 1) * (s * ib + s - 1)
            scaled = mse * (255.0 / pmax) ** 2 if pmax else mse
            cells.append(ClusterCell(
                ia=ia, ib=ib,
                mean_ed=mean_ed,
                pmax_cluster=pmax,
                ned=mean_ed / pmax if pmax else 0.0,
                mse=mse,
                psnr=psnr_from_mse(scaled),
                sum_ed=block_sum,
                sum_ed_sq=block_sq,
            ))
    return ClusterReport(spec, tuple(cells))


def threshold_counts(report: ClusterReport, ned_threshold: float,
                     psnr_threshold: float) -> tuple[int, int]:
    """(# cells with ned > ned_threshold, # cells with psnr < psnr_threshold)."""
    return (report.count_ned_over(ned_threshold),
            report.count_psnr_under(psnr_threshold))


def cluster_csv(report: ClusterReport) -> str:
    lines = ["ia,ib,mean_ed,pmax_cluster,ned,mse,psnr"]
    for c in report.cells:
        lines.append(f"{c.ia},{c.ib},{fmt6(c.mean_ed)},{c.pmax_cluster},"
                     f"{fmt6(c.ned)},{fmt6(c.mse)},{fmt6(c.psnr)}")
    return "\n".join(lines) + "\n"


def cluster_matrix(report: ClusterReport, field: str = "ned") -> str:
    """Whitespace matrix (one row per ia) for heat-map tooling."""
    g = report.spec.grid_side
    rows = []
    for ia in range(g):
        rows.append(" ".join(fmt6(getattr(report.cell(ia, ib), field))
                             for ib in range(g)))
    return "\n".join(rows) + "\n"


@dataclass(frozen=True)
class EdHistogram:
    bin_width: int
    bins: tuple[tuple[int, int], ...]   # (lower_edge, count), contiguous from 0
    total_count: int
    min_ed: int
    max_ed: int
    mean_ed: float


def ed_histogram(grid: CellGrid, n: int | None = None,
                 bin_width: int | None = None) -> EdHistogram:
    """Tally ED over all 2^(2n) pairs into contiguous fixed-width bins.

    Default bin width is max(1, ceil(max_ed / 64)), sized for plotting.
    """
    if n is not None and n != grid.width:
        raise ValueError(f"sweep width {n} does not match grid width {grid.width}")
    if bin_width is not None and bin_width < 1:
        raise ValueError(f"bin width must be >= 1, got {bin_width}")

    side = 1 << grid.width
    xs, ys = np.meshgrid(np.arange(side, dtype=np.int64),
                         np.arange(side, dtype=np.int64), indexing="ij")
    ed = np.abs(xs * ys - eval_multiply_many(grid, xs, ys)).ravel()

    max_ed = int(ed.max(initial=0))
    if bin_width is None:
        bin_width = max(1, math.ceil(max_ed / 64))
    counts = np.bincount(ed // bin_width)
    bins = tuple((k * bin_width, int(c)) for k, c in enumerate(counts))
    return EdHistogram(
        bin_width=bin_width,
        bins=bins,
        total_count=int(ed.size),
        min_ed=int(ed.min(initial=0)),
        max_ed=max_ed,
        mean_ed=float(ed.mean()) if ed.size else 0.0,
    )


def histogram_csv(hist: EdHistogram) -> str:
    lines = ["lower_edge,count"]
    for lower, count in hist.bins:
        lines.append(f"{lower},{count}")
    return "\n".join(lines) + "\n"
