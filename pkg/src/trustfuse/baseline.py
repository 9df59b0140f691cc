"""Majority-agreement baseline scheme used for comparison runs.

Reconstruction of the weighted-sum comparison method: a user's entity
trust is an exponential moving average of whether their report matched the
majority of the *other* reports about the same area and factor, and an
area's per-interval data score is the trust mass of that interval's
supporters. The source method is only described qualitatively, so the EMA
rate and the normalized readout are this package's reconstruction; both
are config-exposed and the output metadata labels the scheme accordingly.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Hashable

from .engine import EpochReport, Observation
from .errors import EpochClosed
from .fusion import DataTrustVector, Frame, quantize


@dataclass
class BaselineUserState:
    user_id: Hashable
    trust: float = 0.5


def _majority(intervals: list[int]) -> int | None:
    """Most common interval, or None on a tie (or empty pool)."""
    if not intervals:
        return None
    counts = Counter(intervals).most_common()
    if len(counts) > 1 and counts[0][1] == counts[1][1]:
        return None
    return counts[0][0]


def baseline_update_entity(reports: dict[Hashable, int],
                           states: dict[Hashable, BaselineUserState],
                           ema: float = 0.2,
                           exclude_self: bool = True) -> None:
    """Fold each contributor's agreement with the group majority into trust.

    ``reports`` maps user id to the interval that user reported for one
    (area, factor) group. With ``exclude_self`` the majority is taken over
    the other users' reports, matching the description of comparing a
    report against the others received; a tied pool yields no update.
    """
    for user_id, interval in reports.items():
        if exclude_self:
            pool = [iv for uid, iv in reports.items() if uid != user_id]
        else:
            pool = list(reports.values())
        maj = _majority(pool)
        if maj is None:
            continue
        indicator = 1.0 if interval == maj else 0.0
        st = states[user_id]
        st.trust = (1.0 - ema) * st.trust + ema * indicator


def baseline_data_trust(reports: dict[Hashable, int],
                        states: dict[Hashable, BaselineUserState],
                        n_intervals: int,
                        normalized: bool = True) -> tuple[float, ...]:
    """Per-interval scores from the supporters' entity trusts.

    Normalized (default): score(interval) = supporter trust / total trust.
    Plain averaging: score(interval) = mean trust of supporters scaled by
    the supporter count share.
    """
    if not reports:
        raise ValueError("need at least one report")
    scores = [0.0] * n_intervals
    if normalized:
        total = sum(states[uid].trust for uid in reports)
        if total <= 0.0:
            # All-zero trusts degrade to plain vote shares.
            for interval in reports.values():
                scores[interval - 1] += 1.0 / len(reports)
            return tuple(scores)
        for uid, interval in reports.items():
            scores[interval - 1] += states[uid].trust / total
        return tuple(scores)
    n = len(reports)
    by_interval: dict[int, list[float]] = {}
    for uid, interval in reports.items():
        by_interval.setdefault(interval, []).append(states[uid].trust)
    for interval, trusts in by_interval.items():
        scores[interval - 1] = (sum(trusts) / len(trusts)) * (len(trusts) / n)
    return tuple(scores)


@dataclass
class BaselineEngine:
    """Same epoch interface as the main engine, driven by raw observations."""

    frames: dict[Hashable, Frame]
    user_ids: list[Hashable]
    ema: float = 0.2
    normalized: bool = True
    exclude_self: bool = True
    epoch: int = 1
    _states: dict[Hashable, BaselineUserState] = field(default_factory=dict)
    _buffer: list[Observation] = field(default_factory=list)
    _last_report: EpochReport | None = None

    def __post_init__(self):
        self._states = {uid: BaselineUserState(uid) for uid in self.user_ids}

    def ingest(self, observation: Observation) -> None:
        if observation.epoch != self.epoch:
            raise EpochClosed(
                f"observation stamped for epoch {observation.epoch}, "
                f"current epoch is {self.epoch}")
        self._buffer.append(observation)

    def close_epoch(self) -> EpochReport:
        groups: dict[tuple, dict[Hashable, list[int]]] = {}
        for obs in self._buffer:
            frame = self.frames[obs.factor_id]
            by_user = groups.setdefault((obs.area_id, obs.factor_id), {})
            by_user.setdefault(obs.user_id, []).append(quantize(obs.value, frame))

        data_trust: dict[tuple, DataTrustVector] = {}
        for pair, by_user in sorted(groups.items(), key=lambda kv: repr(kv[0])):
            # A user's report for the group is their modal interval.
            reports = {}
            for uid in sorted(by_user, key=repr):
                maj = _majority(by_user[uid])
                reports[uid] = maj if maj is not None else by_user[uid][0]
            baseline_update_entity(reports, self._states, self.ema,
                                   self.exclude_self)
            scores = baseline_data_trust(reports, self._states,
                                         self.frames[pair[1]].n_intervals,
                                         self.normalized)
            # Plain averaging does not sum to 1; park the remainder in the
            # residual slot so the vector invariant holds either way.
            data_trust[pair] = DataTrustVector(scores, 1.0 - sum(scores))

        report = EpochReport(
            self.epoch,
            {uid: st.trust for uid, st in self._states.items()},
            data_trust)
        self._buffer = []
        self.epoch += 1
        self._last_report = report
        return report
