"""Machine-readable region data: JSON reports and CSV plot points."""

from __future__ import annotations

import csv
import io
from typing import Any

from ..core.persistence import json_dumps
from .rational import RatePoint, RegionError, parse_rational
from .tradeoff import (
    SystemParams,
    check_bounds,
    corner_scan,
    layered_family,
    outer_region,
    srk_point,
)

PRESETS: dict[str, SystemParams] = {
    "7661": SystemParams(7, 6, 6, 1),
}

CSV_HEADER = ("alpha_bar", "beta_bar")


def resolve_preset(name: str) -> SystemParams:
    try:
        return PRESETS[name]
    except KeyError:
        raise RegionError(f"unknown preset {name!r} (known: {', '.join(PRESETS)})") from None


def _labelled(label: str, point: RatePoint, params: SystemParams) -> dict[str, Any]:
    return {"label": label, **point.to_dict(), "bounds": check_bounds(point, params).to_dict()}


def build_region_export(params: SystemParams) -> dict[str, Any]:
    """Bounds, achievable points and outer-region corners for *params*.

    The layered family and its non-dominated scan are included only when
    k = d = n-1.
    """
    region = outer_region(params)
    points = [_labelled("SRK", srk_point(params.k, params.d, params.ell), params)]
    non_dominated: list[str] = []
    if params.is_layered:
        points.extend(_labelled(f"t={fp.t}", fp.point, params) for fp in layered_family(params.n, params.ell))
        non_dominated = [f"t={fp.t}" for fp in corner_scan(params.n, params.ell)]
    return {
        "params": params.to_dict(),
        "bounds": [b.to_dict() for b in region.facets],
        "points": points,
        "non_dominated": non_dominated,
        "corners": [c.to_dict() for c in region.corners],
    }


def export_json(export: dict[str, Any]) -> bytes:
    return json_dumps(export)


def export_csv(export: dict[str, Any]) -> str:
    """One ``alpha_bar,beta_bar`` row per point, as exact fraction strings."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for point in export["points"]:
        writer.writerow((point["alpha_bar"], point["beta_bar"]))
    return buf.getvalue()


def parse_csv(text: str) -> list[RatePoint]:
    """Read points written by ``export_csv`` back as exact rationals."""
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_HEADER:
        raise RegionError(f"expected CSV header {','.join(CSV_HEADER)}, got {reader.fieldnames}")
    return [RatePoint(parse_rational(row["alpha_bar"]), parse_rational(row["beta_bar"])) for row in reader]
