"""Array multipliers built from 1-bit adder cells.

Two textbook unsigned array architectures are supported:

* "carry_save" (the default contract): n-1 carry-save rows over the
  partial products, each cell's carry dropping diagonally to the next
  row, then a final ripple merge over the upper result weights; the
  carry out of the top weight is discarded.
* "row_ripple": every row is a full carry-propagate adder whose carries
  ripple within the row; the row's carry-out becomes the accumulator's
  new top bit, so nothing is discarded.  This is the layout with
  n*(n-1) cells, of which the first cell of each row and the top cell
  of row 1 are two-input (half-adder) positions.

Signals are integer ids into a flat evaluation vector; id 0 is the
constant 0, ids 1..n*n are the partial products, and cell outputs are
allocated after those.  Cells are stored in a valid evaluation order,
so running a grid is a single flat loop.

A cell is approximate iff the significance (weight) of its sum output
is below the configured degree; approximate cells use the configured
adder tables, everything else uses the exact tables.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .adders import AdderLibrary, FullAdderSpec

MIN_WIDTH = 2
MAX_WIDTH = 16

ARCHITECTURES = ("carry_save", "row_ripple")
HALF_ADDER_MODES = ("approximate", "exact")


@dataclass(frozen=True)
class MultiplierConfig:
    """Width, adder type, approximation degree and array layout.

    `half_adders` controls the degenerate cell positions that have a
    constant-0 input.  "approximate" applies the weight rule uniformly,
    so even a constant-fed cell uses the approximate tables; "exact"
    keeps those positions on exact tables, as a netlist that
    instantiates plain half adders there would.  The default follows
    the architecture: uniform tables for carry_save, exact half adders
    for row_ripple (the combination that reproduces the published
    accuracy figures of the shipped adder library).
    """

    width: int = 8
    adder_type: str = "exact"
    degree: int = 0
    half_adders: str | None = None
    architecture: str = "carry_save"

    def __post_init__(self):
        if not MIN_WIDTH <= self.width <= MAX_WIDTH:
            raise ValueError(f"width must be in [{MIN_WIDTH}, {MAX_WIDTH}], got {self.width}")
        if not 0 <= self.degree <= 2 * self.width:
            raise ValueError(
                f"degree must be in [0, {2 * self.width}] for width {self.width}, "
                f"got {self.degree}")
        if self.architecture not in ARCHITECTURES:
            raise ValueError(f"architecture must be one of {ARCHITECTURES}, "
                             f"got {self.architecture!r}")
        if self.half_adders is None:
            default = "exact" if self.architecture == "row_ripple" else "approximate"
            object.__setattr__(self, "half_adders", default)
        if self.half_adders not in HALF_ADDER_MODES:
            raise ValueError(f"half_adders must be one of {HALF_ADDER_MODES}, "
                             f"got {self.half_adders!r}")


@dataclass(frozen=True)
class AdderCell:
    kind: str        # "array" or "merge"
    row: int         # array row i (1..n-1); -1 for merge cells
    col: int         # array column j; merge cells carry the weight w here
    weight: int      # significance of the sum output
    in_a: int
    in_b: int
    in_cin: int
    out_sum: int
    out_cout: int
    spec: FullAdderSpec
    approximate: bool

    @property
    def role(self) -> str:
        if self.kind == "array":
            return f"array({self.row},{self.col})"
        return f"merge({self.col})"


@dataclass(frozen=True)
class CellGrid:
    width: int
    config: MultiplierConfig
    cells: tuple[AdderCell, ...]
    output_taps: tuple[int, ...]   # signal id of product bit w, for w = 0..2n-1
    signal_count: int

    def pp_signal(self, i: int, j: int) -> int:
        return 1 + i * self.width + j


class _GridBuilder:
    def __init__(self, config: MultiplierConfig, library: AdderLibrary):
        self.config = config
        self.approx_spec = library.get(config.adder_type)
        self.exact_spec = library.get("exact")
        self.next_id = 1 + config.width * config.width
        self.cells: list[AdderCell] = []

    def pp(self, i, j):
        return 1 + i * self.config.width + j

    def cell(self, kind, row, col, weight, a, b, cin):
        approx = weight < self.config.degree
        if approx and self.config.half_adders == "exact" and 0 in (a, b, cin):
            approx = False
        spec = self.approx_spec if approx else self.exact_spec
        out_sum, out_cout = self.next_id, self.next_id + 1
        self.next_id += 2
        self.cells.append(AdderCell(kind, row, col, weight, a, b, cin,
                                    out_sum, out_cout, spec, approx))
        return out_sum, out_cout

    def finish(self, taps, expected_cells) -> CellGrid:
        if len(self.cells) != expected_cells:
            raise RuntimeError(
                f"built {len(self.cells)} cells, expected {expected_cells}")
        return CellGrid(self.config.width, self.config, tuple(self.cells),
                        tuple(taps), self.next_id)


def build_multiplier(config: MultiplierConfig, library: AdderLibrary) -> CellGrid:
    """Wire the configured array architecture into an evaluatable grid."""
    if config.architecture == "row_ripple":
        return _build_row_ripple(config, library)
    return _build_carry_save(config, library)


def _build_carry_save(config: MultiplierConfig, library: AdderLibrary) -> CellGrid:
    n = config.width
    b = _GridBuilder(config, library)
    const0 = 0

    # Row 0 is the bare partial products: S(0, j) = pp[0][j], C(0, j) = 0.
    sum_sig = [b.pp(0, j) for j in range(n)]
    carry_sig = [const0] * n

    taps = [0] * (2 * n)
    taps[0] = b.pp(0, 0)

    for i in range(1, n):
        new_sum = [0] * n
        new_carry = [0] * n
        for j in range(n):
            shifted = sum_sig[j + 1] if j + 1 < n else const0   # S(i-1, n) = 0
            s, c = b.cell("array", i, j, i + j, b.pp(i, j), shifted, carry_sig[j])
            new_sum[j] = s
            new_carry[j] = c
        sum_sig, carry_sig = new_sum, new_carry
        taps[i] = sum_sig[0]

    # Final ripple merge over weights n .. 2n-1; carry out of the top is discarded.
    ripple = const0
    for w in range(n, 2 * n):
        j = w - n + 1
        top_sum = sum_sig[j] if j < n else const0               # S(n-1, n) = 0
        s, c = b.cell("merge", -1, w, w, top_sum, carry_sig[w - n], ripple)
        taps[w] = s
        ripple = c

    return b.finish(taps, n * (n - 1) + n)


def _build_row_ripple(config: MultiplierConfig, library: AdderLibrary) -> CellGrid:
    n = config.width
    b = _GridBuilder(config, library)
    const0 = 0

    # Accumulator after row 0 is the bare pp row 0; `top` is its bit of
    # weight i-1+n entering row i (0 before row 1 exists).
    acc = [b.pp(0, j) for j in range(n)]
    top = const0

    taps = [0] * (2 * n)
    taps[0] = b.pp(0, 0)

    for i in range(1, n):
        carry = const0
        new_acc = [0] * n
        for j in range(n):
            above = acc[j + 1] if j + 1 < n else top
            s, c = b.cell("array", i, j, i + j, b.pp(i, j), above, carry)
            new_acc[j] = s
            carry = c
        acc = new_acc
        top = carry
        taps[i] = acc[0]

    for j in range(1, n):
        taps[n - 1 + j] = acc[j]
    taps[2 * n - 1] = top

    return b.finish(taps, n * (n - 1))


def exact_multiply(x: int, y: int, n: int) -> int:
    """The integer-product oracle every error metric is measured against."""
    _check_operand(x, n)
    _check_operand(y, n)
    return x * y


def _check_operand(v: int, n: int) -> None:
    if not 0 <= v < (1 << n):
        raise ValueError(f"operand {v} out of range for width {n}")


def eval_multiply(grid: CellGrid, x: int, y: int) -> int:
    """Evaluate the wired grid on one operand pair, bit by bit."""
    n = grid.width
    _check_operand(x, n)
    _check_operand(y, n)

    sig = [0] * grid.signal_count
    for i in range(n):
        xi = (x >> i) & 1
        for j in range(n):
            sig[1 + i * n + j] = xi & ((y >> j) & 1)

    for cell in grid.cells:
        idx = 4 * sig[cell.in_a] + 2 * sig[cell.in_b] + sig[cell.in_cin]
        sig[cell.out_sum] = cell.spec.sum_bits[idx]
        sig[cell.out_cout] = cell.spec.cout_bits[idx]

    product = 0
    for w, tap in enumerate(grid.output_taps):
        product |= sig[tap] << w
    return product


def eval_multiply_many(grid: CellGrid, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Vectorized grid evaluation over parallel operand arrays.

    Same wiring as eval_multiply, run elementwise with numpy lookups;
    returns int64 products.
    """
    n = grid.width
    xs = np.asarray(xs)
    ys = np.asarray(ys)
    if xs.shape != ys.shape:
        raise ValueError("operand arrays must have the same shape")
    if xs.size and (int(xs.min()) < 0 or int(xs.max()) >= (1 << n)
                    or int(ys.min()) < 0 or int(ys.max()) >= (1 << n)):
        raise ValueError(f"operands out of range for width {n}")

    sig: list = [None] * grid.signal_count
    sig[0] = np.zeros(xs.shape, dtype=np.uint8)

    xbits = [((xs >> i) & 1).astype(np.uint8) for i in range(n)]
    ybits = [((ys >> j) & 1).astype(np.uint8) for j in range(n)]
    for i in range(n):
        for j in range(n):
            sig[1 + i * n + j] = xbits[i] & ybits[j]

    luts: dict[int, tuple[np.ndarray, np.ndarray]] = {}
    for cell in grid.cells:
        key = id(cell.spec)
        if key not in luts:
            luts[key] = (np.array(cell.spec.sum_bits, dtype=np.uint8),
                         np.array(cell.spec.cout_bits, dtype=np.uint8))
        sum_lut, cout_lut = luts[key]
        idx = (sig[cell.in_a] << 2) | (sig[cell.in_b] << 1) | sig[cell.in_cin]
        sig[cell.out_sum] = sum_lut[idx]
        sig[cell.out_cout] = cout_lut[idx]

    product = np.zeros(xs.shape, dtype=np.int64)
    for w, tap in enumerate(grid.output_taps):
        product |= sig[tap].astype(np.int64) << w
    return product


def cell_weight_map(grid: CellGrid) -> list[tuple[str, int, bool]]:
    """One (role, weight, is_approximate) entry per cell, in evaluation order."""
    return [(cell.role, cell.weight, cell.approximate) for cell in grid.cells]


def grid_csv(grid: CellGrid) -> str:
    """Introspection export: role,row,col,weight,approx (merge rows use row=-1)."""
    lines = ["role,row,col,weight,approx"]
    for cell in grid.cells:
        lines.append(f"{cell.kind},{cell.row},{cell.col},{cell.weight},{int(cell.approximate)}")
    return "\n".join(lines) + "\n"
