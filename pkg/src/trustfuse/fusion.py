"""Dempster-Shafer evidence fusion over quantized factor readings.

Each observation yields a mass function whose only focal elements are one
singleton interval and the universal set. This family is closed under
Dempster's rule (intersections are singletons, empty, or the universe), so
masses are stored sparsely and a combine costs O(number of intervals)
instead of the power-set blowup.
"""
from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field
from functools import reduce
from typing import Hashable, Iterable, Sequence

from .errors import EmptyEvidence, TotalConflict

SUM_TOL = 1e-9
EPS_CONFLICT = 1e-9


@dataclass(frozen=True)
class Frame:
    """Frame of discernment: intervals partitioning the real line.

    ``boundaries`` are the cut points; intervals are left-closed/right-open,
    indexed 1..n_intervals. Labels, if given, name the intervals.
    """

    factor_id: Hashable
    boundaries: tuple[float, ...]
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        if len(self.boundaries) < 1:
            raise ValueError("frame needs at least one boundary (two intervals)")
        if any(a >= b for a, b in zip(self.boundaries, self.boundaries[1:])):
            raise ValueError("boundaries must be strictly increasing")
        if self.labels is not None and len(self.labels) != self.n_intervals:
            raise ValueError("need one label per interval")

    @property
    def n_intervals(self) -> int:
        return len(self.boundaries) + 1

    def interval_bounds(self, gamma: int) -> tuple[float, float]:
        """(lo, hi) of interval gamma; outer intervals reach +-inf."""
        if not 1 <= gamma <= self.n_intervals:
            raise ValueError(f"interval index {gamma} out of range")
        lo = -float("inf") if gamma == 1 else self.boundaries[gamma - 2]
        hi = float("inf") if gamma == self.n_intervals else self.boundaries[gamma - 1]
        return lo, hi


def quantize(value: float, frame: Frame) -> int:
    """1-based index of the interval containing value (boundaries belong up)."""
    return bisect_right(frame.boundaries, value) + 1


@dataclass(frozen=True)
class MassFunction:
    """Sparse mass over singleton intervals plus the universal set."""

    n_intervals: int
    singletons: dict[int, float] = field(default_factory=dict)
    omega: float = 1.0

    def __post_init__(self):
        if self.omega < -SUM_TOL:
            raise ValueError("omega mass must be nonnegative")
        total = self.omega
        for gamma, m in self.singletons.items():
            if not 1 <= gamma <= self.n_intervals:
                raise ValueError(f"interval index {gamma} outside frame")
            if m < -SUM_TOL:
                raise ValueError("singleton mass must be nonnegative")
            total += m
        if abs(total - 1.0) > SUM_TOL:
            raise ValueError(f"masses sum to {total}, not 1")

    @classmethod
    def vacuous(cls, n_intervals: int) -> "MassFunction":
        return cls(n_intervals, {}, 1.0)

    def mass(self, gamma: int) -> float:
        return self.singletons.get(gamma, 0.0)


@dataclass(frozen=True)
class DataTrustVector:
    """Per-interval joint masses plus the residual mass on the universe."""

    masses: tuple[float, ...]
    residual: float

    def __post_init__(self):
        total = self.residual + sum(self.masses)
        if abs(total - 1.0) > SUM_TOL:
            raise ValueError(f"vector sums to {total}, not 1")

    @classmethod
    def from_mass(cls, m: MassFunction) -> "DataTrustVector":
        return cls(tuple(m.mass(g) for g in range(1, m.n_intervals + 1)), m.omega)


def mass_from_observation(weight: float, interval: int, frame: Frame) -> MassFunction:
    """Observation weight goes on the observed interval, the rest on the universe."""
    if not 0.0 < weight < 1.0:
        raise ValueError("weight must lie strictly inside (0,1)")
    return MassFunction(frame.n_intervals, {interval: weight}, 1.0 - weight)


def combine(a: MassFunction, b: MassFunction) -> MassFunction:
    """Dempster's rule for two singleton+universe masses on the same frame."""
    if a.n_intervals != b.n_intervals:
        raise ValueError("mass functions live on different frames")
    # Conflict: products of masses on distinct singletons.
    sa = sum(a.singletons.values())
    sb = sum(b.singletons.values())
    agree = sum(m * b.mass(g) for g, m in a.singletons.items())
    conflict = sa * sb - agree
    norm = 1.0 - conflict
    if norm <= EPS_CONFLICT:
        raise TotalConflict(f"conflict {conflict} leaves no joint mass")
    out: dict[int, float] = {}
    for g in set(a.singletons) | set(b.singletons):
        ma, mb = a.mass(g), b.mass(g)
        m = ma * mb + ma * b.omega + a.omega * mb
        if m > 0.0:
            out[g] = m
    omega = a.omega * b.omega
    # Renormalize by the realized total rather than 1-conflict so rounding
    # cannot drift the sum away from 1 over long folds.
    total = omega + sum(out.values())
    return MassFunction(a.n_intervals,
                        {g: m / total for g, m in out.items()},
                        omega / total)


def fuse_user(observation_masses: Sequence[MassFunction]) -> MassFunction:
    """Fold one user's per-observation masses into their epoch mass."""
    if not observation_masses:
        raise EmptyEvidence("user contributed no observations")
    return reduce(combine, observation_masses)


def fuse_area(user_masses: Iterable[MassFunction]) -> DataTrustVector:
    """Fuse the contributing users' masses into the area's trust vector."""
    masses = list(user_masses)
    if not masses:
        raise EmptyEvidence("no user contributed to this area")
    return DataTrustVector.from_mass(reduce(combine, masses))
