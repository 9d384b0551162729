"""Wrapper around the compiled kernel. Import fails if the extension is
missing; the engine then falls back to the pure-Python kernel."""

from __future__ import annotations

import numpy as np

from . import _kernel  # noqa: F401 — ImportError here selects the fallback
from .tape import Tape

_EMPTY_SCHED = (
    np.empty(0, dtype=np.int64),
    np.empty(0, dtype=np.int32),
    np.empty(0, dtype=np.uint64),
)


class CyKernel:
    name = "compiled"
    supports_commit_order = False

    def __init__(self, tape: Tape):
        self.tape = tape
        self.vals = tape.initial_values()
        self.reg_tmp = np.zeros(len(tape.reg_q), dtype=np.uint64)
        self._dummy_samples = np.zeros(1, dtype=np.uint64)
        self.div_by_zero = False

    def get(self, net: int) -> int:
        return int(self.vals[net])

    def set(self, net: int, value: int) -> None:
        self.vals[net] = value

    def eval_comb(self) -> None:
        t = self.tape
        if _kernel.eval_comb(t.op, t.a, t.b, t.c, t.imm, t.out, t.mask, self.vals):
            self.div_by_zero = True

    def run(
        self,
        n_cycles: int,
        start_cycle: int,
        sample_net: int = -1,
        schedule: tuple[np.ndarray, np.ndarray, np.ndarray] | None = None,
        sched_pos: int = 0,
        commit_order=None,
    ) -> tuple[np.ndarray | None, int]:
        if commit_order is not None:
            raise NotImplementedError("commit-order permutation is a debug feature of the python kernel")
        t = self.tape
        samples = np.empty(n_cycles, dtype=np.uint64) if sample_net >= 0 else None
        s = schedule if schedule is not None else _EMPTY_SCHED
        new_pos, divz = _kernel.run_cycles(
            t.op, t.a, t.b, t.c, t.imm, t.out, t.mask,
            self.vals,
            t.reg_q, t.reg_d, t.reg_mask, self.reg_tmp,
            n_cycles, start_cycle,
            sample_net, samples if samples is not None else self._dummy_samples,
            s[0], s[1], s[2], sched_pos,
        )
        if divz:
            self.div_by_zero = True
        return samples, new_pos
