"""Secure exact-repair tradeoff region: thresholds, bounds, achievable points."""

from .rational import RatePoint, RationalOverflowError, RegionError
from .tradeoff import (
    Bound,
    BoundStatus,
    SystemParams,
    check_bounds,
    corner_points,
    corner_scan,
    ell_star,
    layered_point,
    mbr_point,
    region_7661,
    srk_point,
    threshold_T,
)

__all__ = [
    "Bound",
    "BoundStatus",
    "RatePoint",
    "RationalOverflowError",
    "RegionError",
    "SystemParams",
    "check_bounds",
    "corner_points",
    "corner_scan",
    "ell_star",
    "layered_point",
    "mbr_point",
    "region_7661",
    "srk_point",
    "threshold_T",
]
