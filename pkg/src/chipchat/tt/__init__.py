from .area import AreaEstimate, DEFAULT_CAPACITY_PER_1X1, estimate_area
from .interface import ComplianceReport, check_interface

__all__ = [
    "AreaEstimate", "DEFAULT_CAPACITY_PER_1X1", "estimate_area",
    "ComplianceReport", "check_interface",
]
