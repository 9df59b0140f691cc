"""Synthetic population, ground truth, and epoch-loop experiment driver.

Each user draws a per-epoch area, reports observations whose correctness
follows their true score, and the monitoring service's noisy verdicts are
produced through the false-positive/false-negative channel. Every user
owns an independent RNG substream, so the generated observation stream is
identical regardless of ingest order or which trust scheme consumes it
(paired-run design for scheme comparisons).
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Hashable

import numpy as np

from . import context
from .baseline import BaselineEngine
from .engine import (CORRECT, WRONG, EngineParams, EpochReport, Evaluation,
                     HamsEngine, Observation, UserProfile)
from .entity_trust import ChannelParams, ScoreLevels
from .fusion import Frame

SCHEMES = ("proposed", "baseline", "both")


@dataclass(frozen=True)
class SimConfig:
    """One run's full parameterization; defaults follow the evaluation setup."""

    n_users: int = 40
    n_areas: int = 100
    epochs: int = 30
    seed: int = 0
    pmu: float = 0.1
    ignorant_share: float = 0.0
    m_per_epoch: int = 2
    score_levels: tuple[float, ...] = (0.05, 0.5, 0.95)
    f_p: float = 0.2
    f_n: float = 0.2
    # Error rates the trust module is tuned with; None means the module
    # knows the channel's true rates. The detection-degradation sweep keeps
    # these at the nominal tuning while the channel's true rates vary.
    assumed_f_p: float | None = None
    assumed_f_n: float | None = None
    alpha: float = 0.7
    beta: float = 0.3
    theta: float = 0.0
    spatial_high: float = 1.0
    spatial_low: float = 0.4
    t_update: float = 1.0
    t1: float = 0.25
    t2: float = 0.6
    temporal_high: float = 1.0
    temporal_mid: float = 0.7
    temporal_low: float = 0.4
    semantic_high: float = 1.0
    semantic_mid: float = 0.8
    semantic_low: float = 0.6
    factor_id: str = "pm25"
    factor_class: str = context.ENV_HEALTH
    frame_boundaries: tuple[float, ...] = (35.0,)
    frame_labels: tuple[str, ...] | None = ("healthy", "unhealthy")
    p_home: float = 0.5
    # Fraction of placements routed to the tracked area; the data-trust
    # scenarios set this to 1 so a single area accrues group evidence.
    p_tracked: float = 0.0
    tracked_area: int = 1
    tracked_truth: int | None = None
    change_epoch: int | None = None
    change_new_score: float | None = None
    ema_lambda: float = 0.2
    baseline_normalized: bool = True
    history_window: int | None = None

    def __post_init__(self):
        if not 0.0 <= self.pmu <= 1.0:
            raise ValueError(f"pmu={self.pmu} outside [0,1]")
        if not 0.0 <= self.ignorant_share <= 1.0 - self.pmu:
            raise ValueError("ignorant_share must fit alongside pmu")
        if self.epochs < 0:
            raise ValueError("epochs must be nonnegative")
        if self.n_users < 1 or self.n_areas < 1 or self.m_per_epoch < 1:
            raise ValueError("n_users, n_areas, m_per_epoch must be positive")
        if self.change_epoch is not None and not (
                1 <= self.change_epoch <= self.epochs):
            raise ValueError("change_epoch must fall within the run")
        for p in (self.p_home, self.p_tracked):
            if not 0.0 <= p <= 1.0:
                raise ValueError("placement probabilities must lie in [0,1]")
        # Constructing the parameter blocks validates the remaining fields.
        self.engine_params()

    def levels(self) -> ScoreLevels:
        return ScoreLevels(self.score_levels)

    def channel(self) -> ChannelParams:
        return ChannelParams(self.f_p, self.f_n)

    def assumed_channel(self) -> ChannelParams:
        f_p = self.f_p if self.assumed_f_p is None else self.assumed_f_p
        f_n = self.f_n if self.assumed_f_n is None else self.assumed_f_n
        return ChannelParams(f_p, f_n)

    def frame(self) -> Frame:
        return Frame(self.factor_id, self.frame_boundaries, self.frame_labels)

    def engine_params(self) -> EngineParams:
        return EngineParams(
            levels=self.levels(),
            channel=self.assumed_channel(),
            coefficients=context.WeightCoefficients(self.alpha, self.beta,
                                                    self.theta),
            spatial=context.SpatialParams(self.spatial_high, self.spatial_low),
            temporal=context.TemporalParams(self.t1, self.t2,
                                            self.temporal_high,
                                            self.temporal_mid,
                                            self.temporal_low,
                                            self.t_update),
            semantic=context.default_semantic_table(self.semantic_high,
                                                    self.semantic_mid,
                                                    self.semantic_low),
            frames={self.factor_id: self.frame()},
            factor_classes={self.factor_id: self.factor_class},
            history_window=self.history_window,
        )


@dataclass(frozen=True)
class UserSpec:
    user_id: int
    true_score: float
    user_class: str
    home_areas: tuple[int, ...]
    change: tuple[int, float] | None = None

    def score_at(self, epoch: int) -> float:
        """True score in force at the given epoch (change applies after)."""
        if self.change is not None and epoch > self.change[0]:
            return self.change[1]
        return self.true_score


@dataclass(frozen=True)
class TrustLedger:
    """Everything a run produced: roster, truth, per-scheme epoch reports."""

    config: SimConfig
    users: tuple[UserSpec, ...]
    truth: dict[tuple[int, str], int]
    reports: dict[str, list[EpochReport]]


def generate_population(cfg: SimConfig, rng: np.random.Generator) -> list[UserSpec]:
    """Malicious users take the lowest score level, good users the highest."""
    n_mal = int(cfg.pmu * cfg.n_users)
    n_ign = int(cfg.ignorant_share * cfg.n_users)
    s_low, s_high = cfg.score_levels[0], cfg.score_levels[-1]
    s_mid = cfg.score_levels[len(cfg.score_levels) // 2]
    users = []
    for uid in range(1, cfg.n_users + 1):
        if uid <= n_mal:
            score = s_low
        elif uid <= n_mal + n_ign:
            score = s_mid
        else:
            score = s_high
        user_class = context.USER_CLASSES[int(rng.integers(len(context.USER_CLASSES)))]
        home = int(rng.integers(1, cfg.n_areas + 1))
        change = None
        if (cfg.change_epoch is not None and cfg.change_new_score is not None
                and score == s_high):
            change = (cfg.change_epoch, cfg.change_new_score)
        users.append(UserSpec(uid, score, user_class, (home,), change))
    return users


def generate_ground_truth(cfg: SimConfig,
                          rng: np.random.Generator) -> dict[tuple[int, str], int]:
    """Static truth interval per (area, factor); tracked area forced if asked."""
    frame = cfg.frame()
    truth = {}
    for area in range(1, cfg.n_areas + 1):
        truth[(area, cfg.factor_id)] = int(rng.integers(1, frame.n_intervals + 1))
    if cfg.tracked_truth is not None:
        truth[(cfg.tracked_area, cfg.factor_id)] = cfg.tracked_truth
    return truth


def sample_behavior(user: UserSpec, epoch: int, rng: np.random.Generator) -> str:
    """Bernoulli draw of the user's reporting behavior for one observation."""
    return CORRECT if rng.random() < user.score_at(epoch) else WRONG


def _sample_in_interval(frame: Frame, gamma: int,
                        rng: np.random.Generator) -> float:
    lo, hi = frame.interval_bounds(gamma)
    span = frame.boundaries[-1] - frame.boundaries[0]
    width = span if span > 0 else 10.0
    if lo == -float("inf"):
        lo = hi - width
    if hi == float("inf"):
        hi = lo + width
    return float(rng.uniform(lo, hi))


def synthesize_observation(user: UserSpec, area: int, factor: str,
                           behavior: str, truth: dict[tuple[int, str], int],
                           frame: Frame, seq_index: int, epoch: int,
                           t_update: float,
                           rng: np.random.Generator) -> Observation:
    """Correct behavior lands in the true interval; wrong picks another."""
    true_gamma = truth[(area, factor)]
    if behavior == CORRECT:
        gamma = true_gamma
    else:
        others = [g for g in range(1, frame.n_intervals + 1) if g != true_gamma]
        gamma = others[int(rng.integers(len(others)))]
    value = _sample_in_interval(frame, gamma, rng)
    timestamp = float(rng.uniform(0.0, t_update))
    return Observation(user.user_id, area, factor, value, timestamp,
                       seq_index, epoch)


def channel_evaluate(behavior: str, ch: ChannelParams,
                     rng: np.random.Generator) -> Evaluation:
    """Noisy verdict: flips a correct behavior with f_p, a wrong one with f_n."""
    u = rng.random()
    if behavior == CORRECT:
        return Evaluation(WRONG if u < ch.f_p else CORRECT)
    return Evaluation(CORRECT if u < ch.f_n else WRONG)


def _place_user(user: UserSpec, cfg: SimConfig,
                rng: np.random.Generator) -> int:
    if cfg.p_tracked > 0.0 and rng.random() < cfg.p_tracked:
        return cfg.tracked_area
    if rng.random() < cfg.p_home:
        return user.home_areas[int(rng.integers(len(user.home_areas)))]
    return int(rng.integers(1, cfg.n_areas + 1))


def run(cfg: SimConfig, scheme: str = "proposed") -> TrustLedger:
    """Drive the requested scheme(s) through the full epoch loop."""
    if scheme not in SCHEMES:
        raise ValueError(f"scheme must be one of {SCHEMES}")
    root = np.random.SeedSequence(cfg.seed)
    setup_seq, query_seq, *user_seqs = root.spawn(2 + cfg.n_users)
    setup_rng = np.random.default_rng(setup_seq)
    query_rng = np.random.default_rng(query_seq)
    users = generate_population(cfg, setup_rng)
    truth = generate_ground_truth(cfg, setup_rng)
    user_rngs = {u.user_id: np.random.default_rng(s)
                 for u, s in zip(users, user_seqs)}
    frame = cfg.frame()

    engines: dict[str, object] = {}
    if scheme in ("proposed", "both"):
        profiles = [UserProfile(u.user_id, u.user_class, frozenset(u.home_areas))
                    for u in users]
        engines["proposed"] = HamsEngine(cfg.engine_params(), profiles)
    if scheme in ("baseline", "both"):
        engines["baseline"] = BaselineEngine(
            frames={cfg.factor_id: frame},
            user_ids=[u.user_id for u in users],
            ema=cfg.ema_lambda, normalized=cfg.baseline_normalized)

    reports: dict[str, list[EpochReport]] = {name: [] for name in engines}
    for epoch in range(1, cfg.epochs + 1):
        for user in users:
            rng = user_rngs[user.user_id]
            area = _place_user(user, cfg, rng)
            for i in range(cfg.m_per_epoch):
                behavior = sample_behavior(user, epoch, rng)
                obs = synthesize_observation(user, area, cfg.factor_id,
                                             behavior, truth, frame, i, epoch,
                                             cfg.t_update, rng)
                verdict = channel_evaluate(behavior, cfg.channel(), rng)
                if "proposed" in engines:
                    engines["proposed"].ingest(obs, verdict)
                if "baseline" in engines:
                    engines["baseline"].ingest(obs)
        for name, eng in engines.items():
            reports[name].append(eng.close_epoch())
        # Exercise the query path; responses carry no feedback into trust.
        if "proposed" in engines:
            area = int(query_rng.integers(1, cfg.n_areas + 1))
            engines["proposed"].query(area, cfg.factor_id)

    return TrustLedger(cfg, tuple(users), truth, reports)


def run_sweep(base: SimConfig, seeds: list[int],
              scheme: str = "proposed", **overrides) -> list[TrustLedger]:
    """Convenience: one run per seed with shared overrides."""
    return [run(replace(base, seed=s, **overrides), scheme) for s in seeds]
