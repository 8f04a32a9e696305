"""Storage/bandwidth tradeoff geometry of secure exact-repair regenerating codes.

Everything is exact: integers for thresholds, ``Fraction`` for rates. The
outer bounds are linear facets ``a*alpha_bar + b*beta_bar >= rhs``; corner
points are pairwise facet intersections that satisfy every facet.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import StrEnum
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Any

from .rational import RatePoint, RegionError, checked, rational

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class SystemParams:
    """(n, k, d, ell) with n >= d+1 >= k+1 >= 2 and 0 <= ell < k."""

    n: int
    k: int
    d: int
    ell: int

    def __post_init__(self) -> None:
        if not self.n >= self.d + 1 >= self.k + 1 >= 2:
            raise RegionError(f"need n >= d+1 >= k+1 >= 2, got (n={self.n}, k={self.k}, d={self.d})")
        if not 0 <= self.ell < self.k:
            raise RegionError(f"need 0 <= ell < k = {self.k}, got ell={self.ell}")

    @property
    def is_layered(self) -> bool:
        """k = d = n-1, where the layered construction applies."""
        return self.k == self.d == self.n - 1

    def to_dict(self) -> dict[str, int]:
        return {"n": self.n, "k": self.k, "d": self.d, "ell": self.ell}


# ── Thresholds and points ──────────────────────────────────────────


def threshold_T(k: int, d: int, ell: int) -> int:
    """sum_{i=ell+1}^{k} (d + 1 - i)."""
    if not 0 <= ell < k <= d:
        raise RegionError(f"need 0 <= ell < k <= d, got (k={k}, d={d}, ell={ell})")
    return sum(d + 1 - i for i in range(ell + 1, k + 1))


def ell_star(k: int, d: int) -> int:
    """Smallest ell >= 1 with T_{k,d,ell} <= d + sqrt(d*ell), decided in integers."""
    if not 2 <= k <= d:
        raise RegionError(f"need 2 <= k <= d, got (k={k}, d={d})")
    for ell in range(1, k):
        excess = threshold_T(k, d, ell) - d
        if excess <= 0 or excess * excess <= d * ell:
            return ell
    raise RegionError(f"no ell in [1, {k - 1}] meets the threshold for (k={k}, d={d})")


def srk_point(k: int, d: int, ell: int) -> RatePoint:
    """(d/T, 1/T); with ell = 0 this is the MBR point."""
    T = threshold_T(k, d, ell)
    return RatePoint(rational(d, T), rational(1, T))


def mbr_point(k: int, d: int) -> RatePoint:
    return srk_point(k, d, 0)


def layered_point(n: int, ell: int, t: int) -> RatePoint:
    """Rates of the layered code with layer parameter t, k = d = n-1."""
    if ell < 0 or not 2 <= t <= n - ell:
        raise RegionError(f"need 2 <= t <= n-ell = {n - ell}, got t={t}")
    shared = comb(n - 1, t - 1)
    return RatePoint(
        rational(shared, comb(n - ell, t) * (t - 1)),
        rational(shared, comb(n - ell, t) * (n - 1)),
    )


def c3_equality_points(n: int) -> tuple[RatePoint, RatePoint]:
    """Closed forms of the t = 2 and t = 3 layered points for ell = 1; both meet C3 with equality."""
    if n < 7:
        raise RegionError(f"C3 is stated for n >= 7, got n={n}")
    return (
        RatePoint(rational(2, n - 2), rational(2, (n - 1) * (n - 2))),
        RatePoint(rational(3, 2 * (n - 3)), rational(3, (n - 1) * (n - 3))),
    )


# ── Bounds ─────────────────────────────────────────────────────────


@dataclass(frozen=True, slots=True)
class Bound:
    """Facet ``alpha_coef * alpha_bar + beta_coef * beta_bar >= rhs``."""

    name: str
    alpha_coef: Fraction
    beta_coef: Fraction
    rhs: Fraction

    def evaluate(self, point: RatePoint) -> Fraction:
        return checked(self.alpha_coef * point.alpha_bar + self.beta_coef * point.beta_bar)

    def slack(self, point: RatePoint) -> Fraction:
        return checked(self.evaluate(point) - self.rhs)

    def describe(self) -> str:
        terms = []
        if self.alpha_coef:
            terms.append(f"{self.alpha_coef}*alpha_bar")
        if self.beta_coef:
            terms.append(f"{self.beta_coef}*beta_bar")
        return f"{' + '.join(terms)} >= {self.rhs}"

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "coefficients": [str(self.alpha_coef), str(self.beta_coef)],
            "rhs": str(self.rhs),
            "text": self.describe(),
        }


class BoundStatus(StrEnum):
    SATISFIED = "satisfied"
    VIOLATED = "violated"
    NOT_APPLICABLE = "not applicable"


def _c1(params: SystemParams) -> Bound:
    return Bound("C1", Fraction(0), Fraction(1), rational(1, threshold_T(params.k, params.d, params.ell)))


def _c2(params: SystemParams) -> Bound:
    return Bound("C2", Fraction(1), Fraction(0), rational(params.d, threshold_T(params.k, params.d, params.ell)))


def _c3(params: SystemParams) -> Bound:
    n = params.n
    return Bound("C3", Fraction(n), rational((n - 1) * (n - 6), 2), Fraction(3))


def _c4(_params: SystemParams) -> Bound:
    return Bound("C4", Fraction(1), Fraction(0), rational(3, 8))


def _c2_applies(p: SystemParams) -> bool:
    return p.ell >= 1 and p.k >= 2 and p.ell >= ell_star(p.k, p.d)


def _c3_applies(p: SystemParams) -> bool:
    return p.is_layered and p.ell == 1 and p.n >= 7


def _c4_applies(p: SystemParams) -> bool:
    return (p.n, p.k, p.d, p.ell) == (7, 6, 6, 1)


_BOUNDS = (
    (_c1, lambda p: True),
    (_c2, _c2_applies),
    (_c3, _c3_applies),
    (_c4, _c4_applies),
)


def bounds_for(params: SystemParams) -> list[tuple[Bound, bool]]:
    """Every bound with whether it is proven for *params*."""
    return [(make(params), applies(params)) for make, applies in _BOUNDS]


def applicable_bounds(params: SystemParams) -> list[Bound]:
    return [bound for bound, applies in bounds_for(params) if applies]


@dataclass(frozen=True, slots=True)
class BoundCheck:
    bound: Bound
    status: BoundStatus
    slack: Fraction | None

    @property
    def name(self) -> str:
        return self.bound.name


@dataclass(frozen=True)
class BoundReport:
    point: RatePoint
    params: SystemParams
    checks: tuple[BoundCheck, ...]

    @property
    def satisfied(self) -> bool:
        return all(c.status is not BoundStatus.VIOLATED for c in self.checks)

    def get(self, name: str) -> BoundCheck:
        for check in self.checks:
            if check.name == name:
                return check
        raise KeyError(name)

    def to_dict(self) -> dict[str, Any]:
        return {
            c.name: {"status": str(c.status), "slack": None if c.slack is None else str(c.slack)} for c in self.checks
        }


def check_bounds(point: RatePoint, params: SystemParams) -> BoundReport:
    """Evaluate C1-C4 at *point*; bounds not proven for *params* are reported as not applicable."""
    checks = []
    for bound, applies in bounds_for(params):
        if not applies:
            checks.append(BoundCheck(bound, BoundStatus.NOT_APPLICABLE, None))
            continue
        slack = bound.slack(point)
        status = BoundStatus.SATISFIED if slack >= 0 else BoundStatus.VIOLATED
        checks.append(BoundCheck(bound, status, slack))
    return BoundReport(point, params, tuple(checks))


# ── Regions and corners ────────────────────────────────────────────


def _intersect(a: Bound, b: Bound) -> RatePoint | None:
    det = a.alpha_coef * b.beta_coef - b.alpha_coef * a.beta_coef
    if det == 0:
        return None
    alpha = (a.rhs * b.beta_coef - b.rhs * a.beta_coef) / det
    beta = (a.alpha_coef * b.rhs - b.alpha_coef * a.rhs) / det
    if alpha <= 0 or beta <= 0:
        return None
    return RatePoint(alpha, beta)


def corner_points(facets: list[Bound] | tuple[Bound, ...]) -> tuple[RatePoint, ...]:
    """Pairwise facet intersections lying in every facet, sorted by alpha_bar."""
    corners: set[RatePoint] = set()
    for a, b in combinations(facets, 2):
        point = _intersect(a, b)
        if point is not None and all(f.slack(point) >= 0 for f in facets):
            corners.add(point)
    return tuple(sorted(corners, key=lambda p: (p.alpha_bar, p.beta_bar)))


@dataclass(frozen=True)
class Region:
    """Intersection of the applicable outer-bound facets."""

    params: SystemParams
    facets: tuple[Bound, ...]
    corners: tuple[RatePoint, ...]

    def contains(self, point: RatePoint) -> bool:
        return all(f.slack(point) >= 0 for f in self.facets)

    def to_dict(self) -> dict[str, Any]:
        return {
            "facets": [f.to_dict() for f in self.facets],
            "corners": [c.to_dict() for c in self.corners],
        }


def outer_region(params: SystemParams) -> Region:
    facets = tuple(applicable_bounds(params))
    return Region(params, facets, corner_points(facets))


def region_7661() -> Region:
    """The full tradeoff region for (7,6,6,1): beta_bar >= 1/15, 7 alpha_bar + 3 beta_bar >= 3, alpha_bar >= 3/8."""
    return outer_region(SystemParams(7, 6, 6, 1))


# ── Layered family ─────────────────────────────────────────────────


@dataclass(frozen=True, slots=True)
class FamilyPoint:
    t: int
    point: RatePoint


def layered_family(n: int, ell: int) -> list[FamilyPoint]:
    return [FamilyPoint(t, layered_point(n, ell, t)) for t in range(2, n - ell + 1)]


def corner_scan(n: int, ell: int) -> list[FamilyPoint]:
    """Layered points not dominated by another layered point, sorted by alpha_bar.

    Of two identical points only the one with the smaller t survives.
    """
    family = layered_family(n, ell)
    survivors = []
    for candidate in family:
        dominated = any(
            other.t != candidate.t
            and other.point.dominates(candidate.point)
            and (other.point != candidate.point or other.t < candidate.t)
            for other in family
        )
        if not dominated:
            survivors.append(candidate)
    logger.debug("Corner scan n=%d ell=%d: %d of %d points survive", n, ell, len(survivors), len(family))
    return sorted(survivors, key=lambda fp: (fp.point.alpha_bar, fp.point.beta_bar))
