"""Compile an ElaboratedDesign into flat arrays the kernels execute.

Cells are laid out in topological order; evaluating them once brings every
combinational net to its fixed point.
"""

from __future__ import annotations

import numpy as np

from ..frontend.netlist import ElaboratedDesign, width_mask


class Tape:
    def __init__(self, design: ElaboratedDesign):
        self.design = design
        cells = [design.cells[i] for i in design.comb_order]
        n = len(cells)
        self.n_cells = n
        self.n_nets = len(design.nets)

        self.op = np.array([c.op for c in cells], dtype=np.int32)
        self.a = np.array([c.a for c in cells], dtype=np.int32)
        self.b = np.array([c.b for c in cells], dtype=np.int32)
        self.c = np.array([c.c for c in cells], dtype=np.int32)
        self.imm = np.array([c.imm for c in cells], dtype=np.int64)
        self.out = np.array([c.out for c in cells], dtype=np.int32)
        self.mask = np.array([width_mask(c.width) for c in cells], dtype=np.uint64)

        regs = design.registers
        self.reg_q = np.array([r.q for r in regs], dtype=np.int32)
        self.reg_d = np.array([r.d for r in regs], dtype=np.int32)
        self.reg_mask = np.array([width_mask(r.width) for r in regs], dtype=np.uint64)
        self.reg_reset = np.array([r.reset_value for r in regs], dtype=np.uint64)

        self.const_init = list(design.const_init)

    def initial_values(self) -> np.ndarray:
        vals = np.zeros(self.n_nets, dtype=np.uint64)
        for net, value in self.const_init:
            vals[net] = value
        for i in range(len(self.reg_q)):
            vals[self.reg_q[i]] = self.reg_reset[i] & self.reg_mask[i]
        return vals
