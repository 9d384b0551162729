"""Tile-area estimation from the elaborated netlist.

The weight table below is a synthesis *proxy*, not a silicon measurement:
it exists so designs land on a plausible tile shape and over-sized ones
get caught before export. Weights are in abstract cell units; one 1x1 tile
holds `capacity_per_1x1` units (default 1000, a calibration constant).

Weights (W = operand width):
  wiring (copy, slice, concat, constants)            0
  bitwise / not / mux / logical                      W
  add / sub / neg / compare                          W
  reductions                                         W
  variable shift                                     W * ceil(log2 W)
  multiply                                           Wa * Wb
  divide / modulo                                    2 * W^2
  register bit                                       1.5 per bit

The tile ladder grows by doubling the long side: 1x1, 1x2, 2x2, 2x4, ...
Export supports shapes up to 2x4; larger estimates still get a shape but
fail the tapeout gate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..frontend.netlist import (
    ADD, AND, CONCAT, COPY, DIV, EQ, GE, GT, LAND, LE, LOGICNOT, LOR, LT,
    MOD, MUL, MUX, NE, NEG, NOT, OR, REDAND, REDOR, REDXOR, SHL, SHR, SLICE,
    SUB, XNOR, XOR,
    Cell, ElaboratedDesign,
)

DEFAULT_CAPACITY_PER_1X1 = 1000.0
REGISTER_WEIGHT_PER_BIT = 1.5
MAX_EXPORT_TILES = (2, 4)

_LINEAR_OPS = frozenset({
    NOT, NEG, LOGICNOT, AND, OR, XOR, XNOR, ADD, SUB,
    EQ, NE, LT, LE, GT, GE, LAND, LOR, REDAND, REDOR, REDXOR, MUX,
})
_FREE_OPS = frozenset({COPY, SLICE, CONCAT})


def cell_weight(cell: Cell, design: ElaboratedDesign) -> float:
    w_out = cell.width
    op = cell.op
    if op in _FREE_OPS:
        return 0.0
    if op in _LINEAR_OPS:
        if op in (REDAND, REDOR, REDXOR):
            return float(design.nets[cell.a].width)
        if op in (EQ, NE, LT, LE, GT, GE):
            return float(max(design.nets[cell.a].width, design.nets[cell.b].width))
        return float(w_out)
    if op in (SHL, SHR):
        w = w_out
        return float(w * max(1, math.ceil(math.log2(max(w, 2)))))
    if op == MUL:
        return float(design.nets[cell.a].width * design.nets[cell.b].width)
    if op in (DIV, MOD):
        return float(2 * w_out * w_out)
    raise ValueError(f"no weight for opcode {op}")


def tile_ladder():
    """1x1, 1x2, 2x2, 2x4, 4x4, ... doubling one side at a time."""
    w = h = 1
    while True:
        yield (w, h)
        if w == h:
            h *= 2
        else:
            w *= 2


@dataclass(frozen=True)
class AreaEstimate:
    cell_units: float
    tiles: tuple[int, int]
    utilization: float
    capacity_per_1x1: float

    @property
    def tiles_str(self) -> str:
        return f"{self.tiles[0]}x{self.tiles[1]}"

    @property
    def fits_supported_tiles(self) -> bool:
        return self.tiles[0] * self.tiles[1] <= MAX_EXPORT_TILES[0] * MAX_EXPORT_TILES[1]

    def to_dict(self) -> dict:
        return {
            "cell_units": round(self.cell_units, 2),
            "tiles": self.tiles_str,
            "utilization": round(self.utilization, 4),
            "fits_supported_tiles": self.fits_supported_tiles,
        }


def estimate_area(design: ElaboratedDesign,
                  capacity_per_1x1: float = DEFAULT_CAPACITY_PER_1X1) -> AreaEstimate:
    if capacity_per_1x1 <= 0:
        raise ValueError("capacity_per_1x1 must be positive")
    units = sum(cell_weight(c, design) for c in design.cells)
    units += REGISTER_WEIGHT_PER_BIT * sum(r.width for r in design.registers)
    for w, h in tile_ladder():
        capacity = w * h * capacity_per_1x1
        if capacity >= units:
            return AreaEstimate(
                cell_units=units,
                tiles=(w, h),
                utilization=units / capacity,
                capacity_per_1x1=capacity_per_1x1,
            )
    raise AssertionError("unreachable: the ladder is unbounded")
