#!/usr/bin/env python3
"""Generate golden frame-0 digests for the corpus with the reference
interpreter, independently of the production capture path.

The oracle here re-derives everything from first principles: it drives the
AST interpreter one clock cycle at a time, finds the vsync falling edge in
the raw uo_out byte stream, skips the 35 blanking lines (2 sync + 33 back
porch), and rebuilds the 640x480 frame with the standard pin mapping
(bit7 hsync, bit3 vsync, channels 2*{bit0,bit1,bit2} + {bit4,bit5,bit6}).
No code is shared with chipchat.vga.capture on purpose.

Usage: python tools/gen_goldens.py [corpus_dir] [--design NAME] [--write]
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from chipchat.frontend.parser import parse  # noqa: E402
from chipchat.sim.refsim import RefSim  # noqa: E402
from chipchat.vga.timing import default_library  # noqa: E402

H_TOTAL = 800
V_TOTAL = 525
VISIBLE_W, VISIBLE_H = 640, 480
BLANK_LINES_AFTER_VSYNC = 2 + 33  # sync + back porch
RESET_CYCLES = 2
MAX_ALIGN_CYCLES = 2 * H_TOTAL * V_TOTAL


def oracle_frame0_digest(verilog: str, top: str) -> str:
    sim = RefSim(parse(verilog), top, default_library())
    sim.poke("ui_in", 0)
    sim.poke("uio_in", 0)
    sim.poke("ena", 1)
    sim.poke("rst_n", 0)
    sim.step(RESET_CYCLES)
    sim.poke("rst_n", 1)

    # sample until the vsync falling edge, then exactly one more frame
    samples: list[int] = []
    prev_vsync = None
    edge = None
    while True:
        s = sim.peek("uo_out")
        v = (s >> 3) & 1
        if prev_vsync == 1 and v == 0 and edge is None:
            edge = len(samples)
        prev_vsync = v
        samples.append(s)
        if edge is None and len(samples) > MAX_ALIGN_CYCLES:
            raise RuntimeError(f"{top}: no vsync edge within {MAX_ALIGN_CYCLES} cycles")
        if edge is not None:
            origin = edge + BLANK_LINES_AFTER_VSYNC * H_TOTAL
            if len(samples) >= origin + H_TOTAL * V_TOTAL:
                break
        sim.step(1)

    origin = edge + BLANK_LINES_AFTER_VSYNC * H_TOTAL
    rgb = bytearray()
    for y in range(VISIBLE_H):
        row = samples[origin + y * H_TOTAL: origin + y * H_TOTAL + VISIBLE_W]
        for s in row:
            r = 2 * (s & 1) + ((s >> 4) & 1)
            g = 2 * ((s >> 1) & 1) + ((s >> 5) & 1)
            b = 2 * ((s >> 2) & 1) + ((s >> 6) & 1)
            rgb.append(r * 85)
            rgb.append(g * 85)
            rgb.append(b * 85)
    assert len(rgb) == VISIBLE_W * VISIBLE_H * 3
    return hashlib.sha256(bytes(rgb)).hexdigest()


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("corpus", nargs="?", default="corpus")
    ap.add_argument("--design", help="only this design directory")
    ap.add_argument("--write", action="store_true", help="update design.json files")
    args = ap.parse_args()

    root = Path(args.corpus)
    dirs = sorted(p.parent for p in root.glob("*/design.json"))
    if args.design:
        dirs = [d for d in dirs if d.name == args.design]
    for d in dirs:
        meta_path = d / "design.json"
        meta = json.loads(meta_path.read_text())
        text = (d / "design.v").read_text()
        top = next(
            line.split()[1].rstrip("(").strip()
            for line in text.splitlines()
            if line.strip().startswith("module ")
        )
        t0 = time.time()
        digest = oracle_frame0_digest(text, top)
        dt = time.time() - t0
        print(f"{d.name}: {digest}  ({dt:.1f}s)")
        if args.write:
            meta["expected_frame0_digest"] = digest
            meta_path.write_text(json.dumps(meta, indent=2) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
