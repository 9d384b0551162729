"""Pure-Python simulation kernel: the import-time fallback.

Semantics are identical to the Cython kernel, instruction for instruction;
the compiled kernel is just (much) faster. Tests run both.
"""

from __future__ import annotations

import numpy as np

from ..frontend.netlist import fold_op
from .tape import Tape


class PyKernel:
    name = "python"
    supports_commit_order = True

    def __init__(self, tape: Tape):
        self.tape = tape
        design_cells = [tape.design.cells[i] for i in tape.design.comb_order]
        self.op = tape.op.tolist()
        self.a = tape.a.tolist()
        self.b = tape.b.tolist()
        self.c = tape.c.tolist()
        self.imm = tape.imm.tolist()
        self.out = tape.out.tolist()
        self.mask = [int(m) for m in tape.mask.tolist()]
        self.widths = [design_cells[i].width for i in range(len(self.out))]
        self.reg_q = tape.reg_q.tolist()
        self.reg_d = tape.reg_d.tolist()
        self.reg_mask = [int(m) for m in tape.reg_mask.tolist()]
        self.vals = [int(v) for v in tape.initial_values().tolist()]
        self.div_by_zero = False

    def get(self, net: int) -> int:
        return self.vals[net]

    def set(self, net: int, value: int) -> None:
        self.vals[net] = value

    def eval_comb(self) -> None:
        vals = self.vals
        for i in range(len(self.op)):
            op = self.op[i]
            av = vals[self.a[i]]
            bv = vals[self.b[i]]
            if op in (14, 15) and bv == 0:  # DIV, MOD
                self.div_by_zero = True
            vals[self.out[i]] = fold_op(op, av, bv, vals[self.c[i]], self.imm[i], self.widths[i])

    def run(
        self,
        n_cycles: int,
        start_cycle: int,
        sample_net: int = -1,
        schedule: tuple[list[int], list[int], list[int]] | None = None,
        sched_pos: int = 0,
        commit_order: list[int] | None = None,
    ) -> tuple[np.ndarray | None, int]:
        vals = self.vals
        reg_q, reg_d, reg_mask = self.reg_q, self.reg_d, self.reg_mask
        order = commit_order if commit_order is not None else range(len(reg_q))
        samples: list[int] | None = [] if sample_net >= 0 else None
        s_cycles, s_nets, s_vals = schedule if schedule else ((), (), ())
        n_sched = len(s_cycles)

        for k in range(n_cycles):
            cyc = start_cycle + k
            dirty = False
            while sched_pos < n_sched and s_cycles[sched_pos] <= cyc:
                vals[s_nets[sched_pos]] = s_vals[sched_pos]
                sched_pos += 1
                dirty = True
            if dirty:
                self.eval_comb()
            if samples is not None:
                samples.append(vals[sample_net])
            tmp = [vals[reg_d[i]] for i in order]
            for j, i in enumerate(order):
                vals[reg_q[i]] = tmp[j] & reg_mask[i]
            self.eval_comb()

        out = np.array(samples, dtype=np.uint64) if samples is not None else None
        return out, sched_pos
