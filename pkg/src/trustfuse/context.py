"""Contextual weighting of observations.

Spatial, temporal and semantic context weights are combined with the
reporter's entity trust into a single observation weight by a convex
combination. The result is clamped away from {0, 1} so that downstream
evidence fusion never sees a fully certain source (two certain conflicting
sources would make Dempster's rule undefined).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable

from .errors import UnknownClass

W_MIN = 0.01
W_MAX = 0.99

COEFF_TOL = 1e-9


@dataclass(frozen=True)
class SpatialParams:
    high: float
    low: float

    def __post_init__(self):
        if not 0.0 < self.low <= self.high <= 1.0:
            raise ValueError("require 0 < low <= high <= 1")


@dataclass(frozen=True)
class TemporalParams:
    """Freshness bands: age < t1 is high, t1 <= age < t2 is mid, else low."""

    t1: float
    t2: float
    high: float
    mid: float
    low: float
    t_update: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.t1 < self.t2:
            raise ValueError("require 0 < t1 < t2")
        if not 0.0 <= self.low <= self.mid <= self.high <= 1.0:
            raise ValueError("require 0 <= low <= mid <= high <= 1")


@dataclass(frozen=True)
class WeightCoefficients:
    alpha: float
    beta: float
    theta: float

    def __post_init__(self):
        for c in (self.alpha, self.beta, self.theta):
            if c < 0.0:
                raise ValueError("coefficients must be nonnegative")
        if abs(self.alpha + self.beta + self.theta - 1.0) > COEFF_TOL:
            raise ValueError("coefficients must sum to 1")


# Default user and factor classes.
HEALTHCARE = "healthcare-professional"
VULNERABLE = "vulnerable-group"
GOVERNMENT = "government-professional"
REGULAR = "regular-people"
USER_CLASSES = (HEALTHCARE, VULNERABLE, GOVERNMENT, REGULAR)

ENV_HEALTH = "environmental-health"
URBAN_ACCESS = "urban-accessibility"
FACTOR_CLASSES = (ENV_HEALTH, URBAN_ACCESS)


@dataclass(frozen=True)
class SemanticTable:
    """Preset suitability of each user class for each factor class."""

    cells: dict[tuple[Hashable, Hashable], float] = field(default_factory=dict)

    def __post_init__(self):
        for key, v in self.cells.items():
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"semantic weight {v} for {key} outside [0,1]")

    def lookup(self, user_class: Hashable, factor_class: Hashable) -> float:
        try:
            return self.cells[(user_class, factor_class)]
        except KeyError:
            raise UnknownClass(
                f"no semantic weight for ({user_class!r}, {factor_class!r})"
            ) from None


def default_semantic_table(high: float = 1.0, mid: float = 0.8,
                           low: float = 0.6) -> SemanticTable:
    """Two factor classes, four user classes; overridable via config."""
    return SemanticTable({
        (HEALTHCARE, ENV_HEALTH): high, (HEALTHCARE, URBAN_ACCESS): mid,
        (VULNERABLE, ENV_HEALTH): mid, (VULNERABLE, URBAN_ACCESS): high,
        (GOVERNMENT, ENV_HEALTH): high, (GOVERNMENT, URBAN_ACCESS): mid,
        (REGULAR, ENV_HEALTH): low, (REGULAR, URBAN_ACCESS): low,
    })


def spatial_weight(observation_area: Hashable, home_areas: Iterable[Hashable],
                   p: SpatialParams) -> float:
    """High weight for observations made in one of the user's home areas."""
    homes = set(home_areas)
    if not homes:
        raise ValueError("home areas must be nonempty")
    return p.high if observation_area in homes else p.low


def temporal_weight(age: float, p: TemporalParams) -> float:
    """Step function of observation age; bands are left-closed/right-open."""
    if age < 0.0:
        raise ValueError("age must be nonnegative")
    if age < p.t1:
        return p.high
    if age < p.t2:
        return p.mid
    return p.low


def semantic_weight(user_class: Hashable, factor_class: Hashable,
                    table: SemanticTable) -> float:
    return table.lookup(user_class, factor_class)


def observation_weight(trust: float, mu_c: float, mu_l: float, mu_t: float,
                       c: WeightCoefficients,
                       w_min: float = W_MIN, w_max: float = W_MAX) -> float:
    """Convex combination of trust-scaled semantic, spatial and temporal weights."""
    for name, v in (("trust", trust), ("mu_c", mu_c), ("mu_l", mu_l), ("mu_t", mu_t)):
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"{name}={v} outside [0,1]")
    w = c.alpha * (trust * mu_c) + c.beta * mu_l + c.theta * mu_t
    return min(max(w, w_min), w_max)
