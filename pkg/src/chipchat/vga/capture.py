"""Frame capture: sample uo_out every cycle, align on vsync, rebuild pixels.

A Frame is only produced when the observed sync pattern matches the VGA
timing exactly; anything else raises TimingViolation with a plain-language
diagnosis, because a silently shifted frame would mislead a beginner far
more than an error does.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from ..sim.engine import SimInstance
from .pinmap import DEFAULT_PINMAP, PinMap
from .timing import VGA_640x480, VgaTiming

OUTPUT_PORT = "uo_out"


class TimingViolation(Exception):
    """The design's sync pulses do not match the VGA timing."""

    def __init__(self, diagnosis: str):
        super().__init__(diagnosis)
        self.diagnosis = diagnosis


@dataclass(frozen=True)
class SyncStats:
    hsync_pulses: int
    vsync_pulses: int
    hsync_low_cycles: int
    vsync_low_lines: int


@dataclass
class Frame:
    width: int
    height: int
    pixels: np.ndarray  # (height, width, 3) uint8, channel values 0..3
    sync_stats: SyncStats
    frame_index: int
    _digest: str | None = field(default=None, repr=False)

    def rgb888(self) -> np.ndarray:
        return (self.pixels.astype(np.uint8) * np.uint8(85)).astype(np.uint8)

    def digest(self) -> str:
        """Lowercase hex SHA-256 of the raw RGB888 pixel bytes."""
        if self._digest is None:
            self._digest = hashlib.sha256(self.rgb888().tobytes()).hexdigest()
        return self._digest


def _bit(samples: np.ndarray, index: int) -> np.ndarray:
    return ((samples >> np.uint64(index)) & np.uint64(1)).astype(np.uint8)


def _falling_edges(bits: np.ndarray) -> np.ndarray:
    return np.where((bits[:-1] == 1) & (bits[1:] == 0))[0] + 1


def _low_runs(bits: np.ndarray) -> list[tuple[int, int]]:
    """(start, length) of each run of zeros fully inside the window."""
    if len(bits) == 0:
        return []
    diff = np.diff(bits.astype(np.int8))
    starts = list(np.where(diff == -1)[0] + 1)
    ends = list(np.where(diff == 1)[0] + 1)
    if bits[0] == 0:
        starts.insert(0, 0)
    if bits[-1] == 0:
        ends.append(len(bits))
    return [(s, e - s) for s, e in zip(starts, ends)]


def capture_frames(
    sim: SimInstance,
    pinmap: PinMap = DEFAULT_PINMAP,
    timing: VgaTiming = VGA_640x480,
    n_frames: int = 1,
    input_schedule: list[tuple[int, str, int]] | None = None,
) -> list[Frame]:
    """Capture vsync-aligned frames from a running simulation.

    Schedule cycles are relative to the first sampled cycle. Raises
    TimingViolation when no vsync arrives or the sync pattern is off.
    """
    if n_frames < 1:
        raise ValueError("n_frames must be >= 1")
    fc = timing.cycles_per_frame
    start = sim.cycle_count
    schedule = None
    if input_schedule:
        schedule = [(start + c, name, value) for c, name, value in input_schedule]

    # collect enough samples to find vsync and cover the frames
    search_budget = 2 * fc
    samples = sim.run_sampled(search_budget, OUTPUT_PORT, schedule)
    vsync = _bit(samples, pinmap.vsync)
    edges = _falling_edges(vsync)
    if len(edges) == 0:
        raise TimingViolation(
            f"no vsync edge appeared within {search_budget:,} cycles; the design never "
            "produces a vertical sync pulse — check that uo_out carries vsync from the timing controller"
        )
    align = int(edges[0])
    origin = align + (timing.v_sync + timing.v_back) * timing.h_total
    needed = origin + n_frames * fc + 1
    if needed > len(samples):
        extra = sim.run_sampled(needed - len(samples), OUTPUT_PORT, schedule)
        samples = np.concatenate([samples, extra])

    frames: list[Frame] = []
    for k in range(n_frames):
        window = samples[origin + k * fc: origin + (k + 1) * fc]
        frames.append(_reconstruct(window, pinmap, timing, k))
    return frames


def _reconstruct(window: np.ndarray, pinmap: PinMap, timing: VgaTiming, index: int) -> Frame:
    ht, vt = timing.h_total, timing.v_total
    hsync = _bit(window, pinmap.hsync)
    vsync = _bit(window, pinmap.vsync)

    # horizontal sync: one pulse per line, correct width, correct period
    h_edges = _falling_edges(hsync)
    if len(h_edges) != vt:
        raise TimingViolation(
            f"found {len(h_edges)} horizontal sync pulses in one frame, expected {vt} (one per line)"
        )
    first = int(h_edges[0])
    if first != timing.hsync_start:
        raise TimingViolation(
            f"the horizontal sync pulse starts {first} cycles into the line, expected {timing.hsync_start}"
        )
    periods = np.diff(h_edges)
    if not np.all(periods == ht):
        bad = int(periods[periods != ht][0])
        raise TimingViolation(
            f"scanline length {bad} cycles, expected {ht} (640 visible + 16 + 96 + 48 blanking)"
        )
    runs = _low_runs(hsync)
    widths = {length for _s, length in runs}
    if widths != {timing.h_sync}:
        bad = sorted(w for w in widths if w != timing.h_sync)[0]
        raise TimingViolation(f"hsync pulse width {bad} cycles, expected {timing.h_sync}")

    # vertical sync: one pulse, v_sync lines wide, on the right line
    v_edges = _falling_edges(vsync)
    if len(v_edges) != 1:
        raise TimingViolation(f"found {len(v_edges)} vsync pulses in one frame, expected exactly 1")
    v_start = int(v_edges[0])
    if v_start != timing.vsync_start_line * ht:
        raise TimingViolation(
            f"the vsync pulse begins on line {v_start // ht}, expected line {timing.vsync_start_line}"
        )
    v_runs = _low_runs(vsync)
    v_len = v_runs[0][1] if v_runs else 0
    if len(v_runs) != 1 or v_len != timing.v_sync * ht:
        raise TimingViolation(
            f"the vsync pulse spans {v_len / ht:g} lines, expected {timing.v_sync}"
        )

    grid = window.reshape(vt, ht)
    visible = grid[: timing.v_visible, : timing.h_visible]
    r = (2 * ((visible >> np.uint64(pinmap.r1)) & np.uint64(1))
         + ((visible >> np.uint64(pinmap.r0)) & np.uint64(1)))
    g = (2 * ((visible >> np.uint64(pinmap.g1)) & np.uint64(1))
         + ((visible >> np.uint64(pinmap.g0)) & np.uint64(1)))
    b = (2 * ((visible >> np.uint64(pinmap.b1)) & np.uint64(1))
         + ((visible >> np.uint64(pinmap.b0)) & np.uint64(1)))
    pixels = np.stack([r, g, b], axis=-1).astype(np.uint8)

    stats = SyncStats(
        hsync_pulses=len(h_edges),
        vsync_pulses=1,
        hsync_low_cycles=timing.h_sync,
        vsync_low_lines=timing.v_sync,
    )
    return Frame(
        width=timing.h_visible,
        height=timing.v_visible,
        pixels=pixels,
        sync_stats=stats,
        frame_index=index,
    )
