"""Seed-averaged summary metrics computed from run ledgers."""
from __future__ import annotations

from typing import Callable, Iterable

from .simulator import TrustLedger, UserSpec


def _cohort(ledger: TrustLedger,
            predicate: Callable[[UserSpec], bool]) -> list[int]:
    return [u.user_id for u in ledger.users if predicate(u)]


def good_users(ledger: TrustLedger) -> list[int]:
    top = ledger.config.score_levels[-1]
    return _cohort(ledger, lambda u: u.true_score == top)


def malicious_users(ledger: TrustLedger) -> list[int]:
    bottom = ledger.config.score_levels[0]
    return _cohort(ledger, lambda u: u.true_score == bottom)


def changed_users(ledger: TrustLedger) -> list[int]:
    return _cohort(ledger, lambda u: u.change is not None)


def trust_trajectory(ledgers: Iterable[TrustLedger],
                     cohort: Callable[[TrustLedger], list[int]],
                     scheme: str = "proposed") -> list[float]:
    """Per-epoch trust averaged over the cohort's users and all seeds."""
    ledgers = list(ledgers)
    n_epochs = len(ledgers[0].reports[scheme])
    traj = []
    for t in range(n_epochs):
        vals = []
        for led in ledgers:
            ids = cohort(led)
            report = led.reports[scheme][t]
            vals.extend(report.entity_trusts[uid] for uid in ids)
        traj.append(sum(vals) / len(vals))
    return traj


def tail_mean_trust(ledgers: Iterable[TrustLedger],
                    cohort: Callable[[TrustLedger], list[int]],
                    tail: int = 5, scheme: str = "proposed") -> float:
    traj = trust_trajectory(ledgers, cohort, scheme)
    return sum(traj[-tail:]) / tail


def trust_estimation_error(ledgers: Iterable[TrustLedger], tail: int = 5,
                           scheme: str = "proposed") -> float:
    """Mean |estimated trust - true score| over all users and tail epochs."""
    vals = []
    for led in ledgers:
        expected = {u.user_id: u.true_score for u in led.users}
        for report in led.reports[scheme][-tail:]:
            vals.extend(abs(report.entity_trusts[uid] - expected[uid])
                        for uid in expected)
    return sum(vals) / len(vals)


def convergence_epoch(traj: list[float], target: float,
                      tol: float = 0.05) -> int | None:
    """First epoch index (1-based) from which the trajectory stays in band."""
    for t in range(len(traj)):
        if all(abs(v - target) <= tol for v in traj[t:]):
            return t + 1
    return None


def true_mass_trajectory(ledgers: Iterable[TrustLedger], area: int,
                         scheme: str = "proposed") -> list[float]:
    """Per-epoch seed-averaged mass on the area's true interval.

    Epochs in which no seed produced evidence for the area yield nan.
    """
    ledgers = list(ledgers)
    factor = ledgers[0].config.factor_id
    n_epochs = len(ledgers[0].reports[scheme])
    traj = []
    for t in range(n_epochs):
        vals = []
        for led in ledgers:
            truth = led.truth[(area, factor)]
            vec = led.reports[scheme][t].data_trust.get((area, factor))
            if vec is not None:
                vals.append(vec.masses[truth - 1])
        traj.append(sum(vals) / len(vals) if vals else float("nan"))
    return traj


def tail_mean_true_mass(ledgers: Iterable[TrustLedger], area: int,
                        tail: int = 5, scheme: str = "proposed") -> float:
    traj = [v for v in true_mass_trajectory(ledgers, area, scheme)[-tail:]
            if v == v]
    return sum(traj) / len(traj)
