"""Per-user trust scores learned by discrete Bayesian updating.

Each user carries a distribution over a small set of score levels (the
probability that the user reports correctly). At the end of every epoch the
distribution is updated from the tally of correct/wrong verdicts the
monitoring service issued for that user's observations, and the scalar
entity trust is the posterior mean.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import DegenerateEvidence

SUM_TOL = 1e-9


@dataclass(frozen=True)
class ScoreLevels:
    """Ordered set of admissible score values, each strictly inside (0, 1)."""

    levels: tuple[float, ...]

    def __post_init__(self):
        if len(self.levels) < 2:
            raise ValueError("need at least two score levels")
        for s in self.levels:
            if not 0.0 < s < 1.0:
                raise ValueError(f"score level {s} outside open interval (0,1)")
        if any(a >= b for a, b in zip(self.levels, self.levels[1:])):
            raise ValueError("score levels must be strictly increasing")

    def __len__(self) -> int:
        return len(self.levels)


@dataclass(frozen=True)
class ScoreDistribution:
    """Probabilities aligned with a ScoreLevels instance; sums to one."""

    probs: tuple[float, ...]

    def __post_init__(self):
        for p in self.probs:
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"probability {p} outside [0,1]")
        if abs(sum(self.probs) - 1.0) > SUM_TOL:
            raise ValueError(f"probabilities sum to {sum(self.probs)}, not 1")


@dataclass(frozen=True)
class EvaluationTally:
    """Counts of correct/wrong verdicts a user received within one epoch."""

    n_correct: int
    n_wrong: int

    def __post_init__(self):
        if self.n_correct < 0 or self.n_wrong < 0:
            raise ValueError("tally counts must be nonnegative")

    def __add__(self, other: "EvaluationTally") -> "EvaluationTally":
        return EvaluationTally(self.n_correct + other.n_correct,
                               self.n_wrong + other.n_wrong)


@dataclass(frozen=True)
class ChannelParams:
    """False-positive / false-negative rates of the evaluation channel."""

    f_p: float
    f_n: float

    def __post_init__(self):
        for f in (self.f_p, self.f_n):
            if not 0.0 <= f < 1.0:
                raise ValueError(f"channel rate {f} outside [0,1)")


def init_score_distribution(levels: ScoreLevels) -> ScoreDistribution:
    """Uniform prior: no behavior has been observed yet."""
    j = len(levels)
    return ScoreDistribution(tuple(1.0 / j for _ in range(j)))


def epoch_likelihood(s: float, tally: EvaluationTally, ch: ChannelParams) -> float:
    """Probability of one epoch's verdict tally given a true score of s.

    Marginalizes over the user's (hidden) correct/wrong behavior: a correct
    reporter accrues wrong verdicts only through false positives, a wrong
    reporter accrues correct verdicts only through false negatives.
    """
    c, w = tally.n_correct, tally.n_wrong
    correct_branch = s * (ch.f_p ** w) * ((1.0 - ch.f_p) ** c)
    wrong_branch = (1.0 - s) * (ch.f_n ** c) * ((1.0 - ch.f_n) ** w)
    return correct_branch + wrong_branch


def bayes_update(prior: ScoreDistribution, tally: EvaluationTally,
                 ch: ChannelParams, levels: ScoreLevels) -> ScoreDistribution:
    """Posterior over score levels after one epoch of verdicts."""
    unnorm = [p * epoch_likelihood(s, tally, ch)
              for p, s in zip(prior.probs, levels.levels)]
    z = sum(unnorm)
    if z <= 0.0:
        raise DegenerateEvidence(
            "posterior mass annihilated; prior and likelihood are inconsistent")
    return ScoreDistribution(tuple(u / z for u in unnorm))


def entity_trust(dist: ScoreDistribution, levels: ScoreLevels) -> float:
    """Scalar entity trust: the mean of the score distribution."""
    return sum(s * p for s, p in zip(levels.levels, dist.probs))
