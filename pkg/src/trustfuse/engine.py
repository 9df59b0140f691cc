"""Epoch-driven trust engine.

Accumulates evaluated observations during an open epoch. On close it first
refreshes every user's score distribution and entity trust from that
epoch's verdict tally, then weighs each buffered observation with the
fresh trust, and finally fuses per-user and per-area masses into
data-trustworthiness vectors. Queries are answered from the last closed
epoch only.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable

from . import context, entity_trust as et, fusion
from .errors import DegenerateEvidence, EpochClosed, TotalConflict

CORRECT = "C"
WRONG = "W"


@dataclass(frozen=True)
class Observation:
    """One reported reading; timestamp is the offset within its epoch."""

    user_id: Hashable
    area_id: Hashable
    factor_id: Hashable
    value: float
    timestamp: float
    seq_index: int
    epoch: int


@dataclass(frozen=True)
class Evaluation:
    """The service's binary verdict on one observation."""

    verdict: str

    def __post_init__(self):
        if self.verdict not in (CORRECT, WRONG):
            raise ValueError(f"verdict must be {CORRECT!r} or {WRONG!r}")


@dataclass(frozen=True)
class UserProfile:
    user_id: Hashable
    user_class: Hashable
    home_areas: frozenset


@dataclass(frozen=True)
class EpochReport:
    """Immutable snapshot of one closed epoch."""

    epoch: int
    entity_trusts: dict[Hashable, float]
    data_trust: dict[tuple[Hashable, Hashable], fusion.DataTrustVector]
    conflicts: frozenset = frozenset()


@dataclass
class EngineParams:
    levels: et.ScoreLevels
    channel: et.ChannelParams
    coefficients: context.WeightCoefficients
    spatial: context.SpatialParams
    temporal: context.TemporalParams
    semantic: context.SemanticTable
    frames: dict[Hashable, fusion.Frame]
    factor_classes: dict[Hashable, Hashable]
    # Optional truncation of the evaluation history to the last W epochs.
    # Off by default: pure recursive Bayes over the full history.
    history_window: int | None = None


class HamsEngine:
    """Single-run trust state machine; ingest/close_epoch must be serialized."""

    def __init__(self, params: EngineParams, users: list[UserProfile]):
        self.params = params
        self.users = {u.user_id: u for u in users}
        self.epoch = 1
        dist = et.init_score_distribution(params.levels)
        self._dists = {u.user_id: dist for u in users}
        self._trusts = {u.user_id: et.entity_trust(dist, params.levels)
                        for u in users}
        self._tallies: dict[Hashable, et.EvaluationTally] = {}
        self._buffer: list[Observation] = []
        self._tally_history: dict[Hashable, list[et.EvaluationTally]] = {
            u.user_id: [] for u in users}
        self._last_report: EpochReport | None = None

    def ingest(self, observation: Observation, evaluation: Evaluation) -> None:
        if observation.epoch != self.epoch:
            raise EpochClosed(
                f"observation stamped for epoch {observation.epoch}, "
                f"current epoch is {self.epoch}")
        if observation.user_id not in self.users:
            raise KeyError(f"unknown user {observation.user_id!r}")
        inc = (et.EvaluationTally(1, 0) if evaluation.verdict == CORRECT
               else et.EvaluationTally(0, 1))
        prev = self._tallies.get(observation.user_id, et.EvaluationTally(0, 0))
        self._tallies[observation.user_id] = prev + inc
        self._buffer.append(observation)

    def _update_user(self, user_id: Hashable) -> None:
        p = self.params
        tally = self._tallies.get(user_id, et.EvaluationTally(0, 0))
        self._tally_history[user_id].append(tally)
        try:
            if p.history_window is None:
                dist = et.bayes_update(self._dists[user_id], tally, p.channel,
                                       p.levels)
            else:
                # Recompute from a uniform prior over the last W epoch tallies.
                dist = et.init_score_distribution(p.levels)
                for past in self._tally_history[user_id][-p.history_window:]:
                    dist = et.bayes_update(dist, past, p.channel, p.levels)
        except DegenerateEvidence:
            # The tally has probability zero under the assumed channel (e.g.
            # a mixed tally with zero error rates): uninformative, keep prior.
            dist = self._dists[user_id]
        self._dists[user_id] = dist
        self._trusts[user_id] = et.entity_trust(dist, p.levels)

    def _weigh(self, obs: Observation) -> float:
        p = self.params
        profile = self.users[obs.user_id]
        mu_c = context.semantic_weight(
            profile.user_class, p.factor_classes[obs.factor_id], p.semantic)
        mu_l = context.spatial_weight(obs.area_id, profile.home_areas, p.spatial)
        age = p.temporal.t_update - obs.timestamp
        mu_t = context.temporal_weight(age, p.temporal)
        return context.observation_weight(
            self._trusts[obs.user_id], mu_c, mu_l, mu_t, p.coefficients)

    def close_epoch(self) -> EpochReport:
        p = self.params
        for user_id in self.users:
            self._update_user(user_id)

        # Group buffered observations by (area, factor), then by user.
        groups: dict[tuple, dict[Hashable, list[Observation]]] = {}
        for obs in self._buffer:
            by_user = groups.setdefault((obs.area_id, obs.factor_id), {})
            by_user.setdefault(obs.user_id, []).append(obs)

        data_trust: dict[tuple, fusion.DataTrustVector] = {}
        conflicts = set()
        for pair, by_user in sorted(groups.items(), key=lambda kv: repr(kv[0])):
            frame = p.frames[pair[1]]
            try:
                user_masses = []
                for user_id in sorted(by_user, key=repr):
                    # Sort by sequence index so ingest order cannot perturb
                    # the fold's floating-point rounding.
                    masses = [
                        fusion.mass_from_observation(
                            self._weigh(obs), fusion.quantize(obs.value, frame),
                            frame)
                        for obs in sorted(by_user[user_id],
                                          key=lambda o: o.seq_index)]
                    user_masses.append(fusion.fuse_user(masses))
                data_trust[pair] = fusion.fuse_area(user_masses)
            except TotalConflict:
                conflicts.add(pair)

        report = EpochReport(self.epoch, dict(self._trusts), data_trust,
                             frozenset(conflicts))
        self._tallies = {}
        self._buffer = []
        self.epoch += 1
        self._last_report = report
        return report

    def query(self, area_id: Hashable,
              factor_id: Hashable) -> fusion.DataTrustVector | None:
        """Last closed epoch's vector for the pair, or None if no contribution."""
        if self._last_report is None:
            raise EpochClosed("no epoch has been closed yet")
        return self._last_report.data_trust.get((area_id, factor_id))

    def trust_of(self, user_id: Hashable) -> float:
        return self._trusts[user_id]
