#!/usr/bin/env python3
"""Benchmark: compiled Cython kernel vs pure-Python fallback.

Runs each corpus design for a fixed cycle budget per kernel and reports
cycles/second plus the speedup. The Python kernel gets a smaller budget;
its numbers are extrapolated per-frame for comparison.

Usage: python benches/bench_sim.py [--cycles N] [--py-cycles N]
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from chipchat.frontend.elaborate import elaborate  # noqa: E402
from chipchat.frontend.parser import parse  # noqa: E402
from chipchat.sim.engine import build_sim, kernel_available  # noqa: E402
from chipchat.vga.timing import default_library  # noqa: E402

FRAME = 420_000


def bench(design, kernel: str, cycles: int) -> float:
    sim = build_sim(design, kernel=kernel)
    for pin in ("ui_in", "uio_in"):
        sim.poke(pin, 0)
    sim.poke("ena", 1)
    sim.reset(2)
    sim.step(100)  # warm up
    t0 = time.perf_counter()
    sim.step(cycles)
    dt = time.perf_counter() - t0
    return cycles / dt


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--cycles", type=int, default=FRAME, help="compiled-kernel cycles per design")
    ap.add_argument("--py-cycles", type=int, default=4_000, help="python-kernel cycles per design")
    args = ap.parse_args()

    corpus = Path(__file__).resolve().parent.parent / "corpus"
    library = default_library()
    rows = []
    for vfile in sorted(corpus.glob("*/design.v")):
        text = vfile.read_text()
        ast = parse(text)
        top = next(m.name for m in ast.modules if m.name.startswith("tt_um_"))
        design = elaborate(ast, top, library)
        py_rate = bench(design, "python", args.py_cycles)
        cy_rate = bench(design, "compiled", args.cycles) if kernel_available() else float("nan")
        rows.append((vfile.parent.name, design.n_cells, py_rate, cy_rate))

    print(f"{'design':<22} {'cells':>6} {'python cyc/s':>14} {'compiled cyc/s':>15} "
          f"{'speedup':>8} {'frame(py)':>10} {'frame(cy)':>10}")
    for name, cells, py, cy in rows:
        speedup = cy / py if cy == cy else float("nan")
        print(f"{name:<22} {cells:>6} {py:>14,.0f} {cy:>15,.0f} {speedup:>7.0f}x "
              f"{FRAME / py:>9.1f}s {FRAME / cy:>9.2f}s")
    return 0


if __name__ == "__main__":
    sys.exit(main())
