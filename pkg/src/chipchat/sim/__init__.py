from .engine import (
    ResourceLimitError, SignalValue, SimError, SimInstance, SimLimits,
    build_sim, kernel_available,
)
from .refsim import RefSim, RefSimError

__all__ = [
    "SimInstance", "SimLimits", "SimError", "SignalValue", "ResourceLimitError",
    "build_sim", "kernel_available", "RefSim", "RefSimError",
]
