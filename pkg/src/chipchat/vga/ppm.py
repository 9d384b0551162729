"""Bit-exact image serialization: binary PPM for goldens, PNG for display.

Channel scaling is fixed: 2-bit value v maps to v * 85, i.e. {0, 85, 170,
255}. The frame digest is the SHA-256 of exactly the bytes write_ppm puts
after its header.
"""

from __future__ import annotations

import hashlib
import io

import numpy as np

from .capture import Frame


def write_ppm(frame: Frame) -> bytes:
    rgb = frame.rgb888()
    header = f"P6\n{frame.width} {frame.height}\n255\n".encode("ascii")
    return header + rgb.tobytes()


def ppm_digest(ppm: bytes) -> str:
    """Digest of a PPM's pixel payload (equals Frame.digest())."""
    header_end = 0
    for _ in range(3):
        header_end = ppm.index(b"\n", header_end) + 1
    return hashlib.sha256(ppm[header_end:]).hexdigest()


def write_png(frame: Frame) -> bytes:
    from PIL import Image

    img = Image.fromarray(frame.rgb888(), mode="RGB")
    buf = io.BytesIO()
    img.save(buf, format="PNG")
    return buf.getvalue()


def read_ppm(data: bytes) -> np.ndarray:
    """Parse a binary PPM back into (h, w, 3) uint8. Test helper."""
    parts = data.split(b"\n", 3)
    if parts[0] != b"P6":
        raise ValueError("not a binary PPM")
    w, h = (int(x) for x in parts[1].split())
    if parts[2] != b"255":
        raise ValueError("unsupported maxval")
    pixels = np.frombuffer(parts[3][: w * h * 3], dtype=np.uint8)
    return pixels.reshape(h, w, 3)
