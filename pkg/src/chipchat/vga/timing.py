"""VGA 640x480@60 timing constants and the built-in sync-generator IP."""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

from ..frontend.library import BuiltinLibrary

TIMING_CONTROLLER_NAME = "hvsync_generator"


@dataclass(frozen=True)
class VgaTiming:
    h_visible: int = 640
    h_front: int = 16
    h_sync: int = 96
    h_back: int = 48
    v_visible: int = 480
    v_front: int = 10
    v_sync: int = 2
    v_back: int = 33
    # both sync pulses are active-low (negative polarity)

    @property
    def h_total(self) -> int:
        return self.h_visible + self.h_front + self.h_sync + self.h_back

    @property
    def v_total(self) -> int:
        return self.v_visible + self.v_front + self.v_sync + self.v_back

    @property
    def cycles_per_frame(self) -> int:
        return self.h_total * self.v_total

    @property
    def hsync_start(self) -> int:
        return self.h_visible + self.h_front

    @property
    def hsync_end(self) -> int:
        return self.hsync_start + self.h_sync

    @property
    def vsync_start_line(self) -> int:
        return self.v_visible + self.v_front

    @property
    def vsync_end_line(self) -> int:
        return self.vsync_start_line + self.v_sync


VGA_640x480 = VgaTiming()


def timing_controller_source() -> str:
    return resources.files("chipchat.vga").joinpath("hvsync_generator.v").read_text("utf-8")


def builtin_timing_controller(library: BuiltinLibrary | None = None) -> BuiltinLibrary:
    """Register the VGA timing controller IP; returns the library."""
    lib = library or BuiltinLibrary()
    lib.register(TIMING_CONTROLLER_NAME, timing_controller_source())
    return lib


def default_library() -> BuiltinLibrary:
    """The standard built-in IP library every pipeline stage uses."""
    return builtin_timing_controller()
