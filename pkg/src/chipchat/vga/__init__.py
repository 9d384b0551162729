from .timing import (
    TIMING_CONTROLLER_NAME, VGA_640x480, VgaTiming, builtin_timing_controller,
    default_library, timing_controller_source,
)

__all__ = [
    "VgaTiming", "VGA_640x480", "TIMING_CONTROLLER_NAME",
    "builtin_timing_controller", "default_library", "timing_controller_source",
]
