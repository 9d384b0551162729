"""Cycle-based simulation instances.

Two-phase clocked update: register next-values are all read before any is
committed, then the combinational cells are re-evaluated in topological
order to a fixed point. A SimInstance is single-threaded; run one per
session and as many sessions in parallel as you like.

The hot loop runs in a compiled Cython kernel when available; set
CHIPCHAT_PURE_PY=1 to force the pure-Python fallback (same semantics,
roughly two orders of magnitude slower).
"""

from __future__ import annotations

import os
import warnings
from dataclasses import dataclass

import numpy as np

from ..frontend.netlist import ElaboratedDesign, width_mask
from .kernel_py import PyKernel
from .tape import Tape

try:
    from .kernel_cy import CyKernel
except ImportError:  # extension not built: pure-Python fallback
    CyKernel = None

DEFAULT_MAX_CELLS = 200_000
DEFAULT_MAX_NETS = 500_000


@dataclass(frozen=True)
class SimLimits:
    max_cells: int = DEFAULT_MAX_CELLS
    max_nets: int = DEFAULT_MAX_NETS


@dataclass(frozen=True)
class SignalValue:
    bits: int
    width: int

    def __int__(self) -> int:
        return self.bits

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            return self.bits == other
        if isinstance(other, SignalValue):
            return self.bits == other.bits and self.width == other.width
        return NotImplemented

    def __hash__(self):
        return hash((self.bits, self.width))


class SimError(Exception):
    pass


class ResourceLimitError(SimError):
    pass


def kernel_available() -> bool:
    return CyKernel is not None


def _pick_kernel(tape: Tape, which: str):
    if which == "auto":
        which = "python" if os.environ.get("CHIPCHAT_PURE_PY") or CyKernel is None else "compiled"
    if which == "compiled":
        if CyKernel is None:
            raise SimError("the compiled kernel is not available; reinstall with a C compiler or use kernel='python'")
        return CyKernel(tape)
    if which == "python":
        return PyKernel(tape)
    raise ValueError(f"unknown kernel {which!r} (expected 'auto', 'compiled' or 'python')")


class SimInstance:
    def __init__(self, design: ElaboratedDesign, kernel: str = "auto", limits: SimLimits = SimLimits()):
        if design.n_cells > limits.max_cells:
            raise ResourceLimitError(
                f"this design needs {design.n_cells} cells, over the limit of {limits.max_cells}; "
                "it is too large to simulate here")
        if design.n_nets > limits.max_nets:
            raise ResourceLimitError(
                f"this design needs {design.n_nets} nets, over the limit of {limits.max_nets}")
        self.design = design
        self.tape = Tape(design)
        self.kernel = _pick_kernel(self.tape, kernel)
        self.cycle_count = 0
        self._warned_div = False
        self.kernel.eval_comb()
        self._check_div_warning()

    # -- name handling -------------------------------------------------------

    def _input_net(self, name: str) -> int:
        net = self.design.inputs.get(name)
        if net is None:
            known = ", ".join(sorted(self.design.inputs))
            raise SimError(f"there is no input named {name!r} (inputs: {known})")
        return net

    def _net(self, name: str) -> int:
        net = self.design.name_to_net.get(name)
        if net is None:
            raise SimError(f"there is no signal named {name!r} in this design")
        return net

    def net_width(self, name: str) -> int:
        return self.design.nets[self._net(name)].width

    # -- public operations ----------------------------------------------------

    def poke(self, name: str, value: int) -> None:
        net = self._input_net(name)
        w = self.design.nets[net].width
        if not 0 <= value <= width_mask(w):
            raise SimError(f"value {value} does not fit input {name!r} ({w} bits wide)")
        self.kernel.set(net, value)
        self.kernel.eval_comb()
        self._check_div_warning()

    def peek(self, name: str) -> SignalValue:
        net = self._net(name)
        return SignalValue(self.kernel.get(net), self.design.nets[net].width)

    def step(self, n: int = 1, commit_order: list[int] | None = None) -> None:
        if n < 1:
            raise ValueError("step() needs n >= 1")
        _, _ = self.kernel.run(n, self.cycle_count, commit_order=commit_order)
        self.cycle_count += n
        self._check_div_warning()

    def reset(self, cycles: int = 1) -> None:
        """Hold rst_n low for `cycles` clock cycles, then release it."""
        if cycles < 1:
            raise ValueError("reset() needs cycles >= 1")
        self.poke("rst_n", 0)
        self.step(cycles)
        self.poke("rst_n", 1)

    def run_sampled(
        self,
        n: int,
        sample: str,
        schedule: list[tuple[int, str, int]] | None = None,
    ) -> np.ndarray:
        """Advance n cycles recording the named net each cycle.

        Schedule entries (cycle, input, value) use absolute cycle numbers;
        each poke lands before that cycle's sample and clock edge.
        """
        net = self._net(sample)
        sched = None
        if schedule:
            entries = sorted(schedule, key=lambda e: e[0])
            cycles = np.array([e[0] for e in entries], dtype=np.int64)
            nets = np.empty(len(entries), dtype=np.int32)
            vals = np.empty(len(entries), dtype=np.uint64)
            for i, (_, name, value) in enumerate(entries):
                inp = self._input_net(name)
                w = self.design.nets[inp].width
                if not 0 <= value <= width_mask(w):
                    raise SimError(f"value {value} does not fit input {name!r} ({w} bits wide)")
                nets[i] = inp
                vals[i] = value
            if isinstance(self.kernel, PyKernel):
                sched = (cycles.tolist(), nets.tolist(), [int(v) for v in vals])
            else:
                sched = (cycles, nets, vals)
        samples, _ = self.kernel.run(n, self.cycle_count, sample_net=net, schedule=sched)
        self.cycle_count += n
        self._check_div_warning()
        return samples

    # -- diagnostics ------------------------------------------------------------

    def _check_div_warning(self) -> None:
        if self.kernel.div_by_zero and not self._warned_div:
            self._warned_div = True
            warnings.warn(
                "a division by zero happened during simulation; the result is all-ones",
                RuntimeWarning,
                stacklevel=3,
            )

    @property
    def divide_by_zero_seen(self) -> bool:
        return self.kernel.div_by_zero

    @property
    def kernel_name(self) -> str:
        return self.kernel.name


def build_sim(design: ElaboratedDesign, kernel: str = "auto", limits: SimLimits = SimLimits()) -> SimInstance:
    """Build a simulation instance: registers at their reset values and the
    combinational network settled once."""
    return SimInstance(design, kernel=kernel, limits=limits)
