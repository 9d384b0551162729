"""Output-pin decode map for the 8-bit uo_out port.

The default follows the common Tiny Tapeout VGA PMOD convention:
bit7=hsync, bit6=B0, bit5=G0, bit4=R0, bit3=vsync, bit2=B1, bit1=G1,
bit0=R1, where each colour channel value is 2*high_bit + low_bit.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class PinMap:
    hsync: int = 7
    b0: int = 6
    g0: int = 5
    r0: int = 4
    vsync: int = 3
    b1: int = 2
    g1: int = 1
    r1: int = 0

    def __post_init__(self):
        bits = (self.hsync, self.vsync, self.r1, self.r0, self.g1, self.g0, self.b1, self.b0)
        if sorted(bits) != list(range(8)):
            raise ValueError("pin map must assign all eight indices 0..7 exactly once")


DEFAULT_PINMAP = PinMap()


def decode_pins(sample: int, pinmap: PinMap = DEFAULT_PINMAP) -> tuple[int, int, int, int, int]:
    """sample byte -> (hsync, vsync, r, g, b), channels 0..3."""
    bit = lambda i: (sample >> i) & 1
    r = 2 * bit(pinmap.r1) + bit(pinmap.r0)
    g = 2 * bit(pinmap.g1) + bit(pinmap.g0)
    b = 2 * bit(pinmap.b1) + bit(pinmap.b0)
    return bit(pinmap.hsync), bit(pinmap.vsync), r, g, b


def encode_pins(hsync: int, vsync: int, r: int, g: int, b: int,
                pinmap: PinMap = DEFAULT_PINMAP) -> int:
    """Inverse of decode_pins: field values -> sample byte."""
    return (
        ((hsync & 1) << pinmap.hsync)
        | ((vsync & 1) << pinmap.vsync)
        | (((r >> 1) & 1) << pinmap.r1) | ((r & 1) << pinmap.r0)
        | (((g >> 1) & 1) << pinmap.g1) | ((g & 1) << pinmap.g0)
        | (((b >> 1) & 1) << pinmap.b1) | ((b & 1) << pinmap.b0)
    )
