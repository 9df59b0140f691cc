"""Acceptance suite: the seven headline criteria, each reported as one
PASS/FAIL line in the terminal summary.

Stochastic criteria average 20 seeds with the default parameterization;
the whole module is budgeted to run in well under five minutes.
"""
import dataclasses
import itertools
import json
from functools import reduce
from pathlib import Path

import pytest

from test_entity_trust import oracle_sequence_likelihood
from test_fusion import _powerset_dempster, _random_masses, _to_powerset

from trustfuse import metrics
from trustfuse.cli import run_experiment
from trustfuse.config import PMU_SWEEP, ExperimentSpec
from trustfuse.entity_trust import (ChannelParams, EvaluationTally,
                                    ScoreDistribution, ScoreLevels,
                                    bayes_update, entity_trust,
                                    epoch_likelihood)
from trustfuse.errors import TotalConflict
from trustfuse.fusion import MassFunction, combine
from trustfuse.simulator import SimConfig, run

SEEDS = list(range(20))


def sweep(cfg: SimConfig, scheme: str = "proposed"):
    return [run(dataclasses.replace(cfg, seed=s), scheme) for s in SEEDS]


@pytest.fixture(scope="module")
def base_runs():
    """Default setup: 40 users, pmu=0.1, 30 epochs, 20 seeds."""
    return sweep(SimConfig(pmu=0.1))


def test_criterion_1_good_user_convergence(base_runs, acceptance_log):
    got = metrics.tail_mean_trust(base_runs, metrics.good_users)
    ok = abs(got - 0.95) <= 0.05
    assert acceptance_log(
        "criterion 1 (good-user convergence)", ok,
        f"good-user trust {got:.4f} vs 0.95 +/- 0.05 "
        f"(final 5 of 30 epochs, pmu=0.1, {len(SEEDS)} seeds)")


def test_criterion_2_malicious_user_convergence(base_runs, acceptance_log):
    got = metrics.tail_mean_trust(base_runs, metrics.malicious_users)
    ok = abs(got - 0.05) <= 0.05
    assert acceptance_log(
        "criterion 2 (malicious-user convergence)", ok,
        f"malicious-user trust {got:.4f} vs 0.05 +/- 0.05")


def test_criterion_3_error_vs_channel_noise(acceptance_log):
    """Channel error rates degrade while the trust module keeps its
    nominal f=0.2 tuning."""
    f_values = [0.1, 0.2, 0.3, 0.4, 0.55]
    errors = {}
    for f in f_values:
        runs = sweep(SimConfig(pmu=0.1, f_p=f, f_n=f,
                               assumed_f_p=0.2, assumed_f_n=0.2))
        errors[f] = metrics.trust_estimation_error(runs)
    seq = [errors[f] for f in f_values]
    monotone = all(b >= a - 0.03 for a, b in zip(seq, seq[1:]))
    ok = errors[0.2] <= 0.05 and errors[0.55] >= 0.4 and monotone
    detail = ", ".join(f"f={f}: {errors[f]:.4f}" for f in f_values)
    assert acceptance_log(
        "criterion 3 (error vs channel noise)", ok,
        f"{detail}; need <=0.05 at f=0.2, >=0.4 at f=0.55, "
        f"nondecreasing within 0.03")


def _epochs_to_reconverge(change_epoch: int, epochs: int):
    cfg = SimConfig(pmu=0.0, epochs=epochs, change_epoch=change_epoch,
                    change_new_score=0.05)
    runs = sweep(cfg)
    traj = metrics.trust_trajectory(runs, metrics.changed_users)
    conv = metrics.convergence_epoch(traj, 0.05, tol=0.05)
    dipped = min(traj[change_epoch:]) < 0.5
    return traj, conv, dipped


def test_criterion_4_resiliency(acceptance_log):
    traj_a, conv_a, dipped_a = _epochs_to_reconverge(10, 90)
    traj_b, conv_b, dipped_b = _epochs_to_reconverge(20, 160)
    ok = dipped_a and dipped_b and conv_a is not None and conv_b is not None
    if ok:
        delay_a, delay_b = conv_a - 10, conv_b - 20
        ok = delay_b >= 1.5 * delay_a
        detail = (f"reconvergence {delay_a} epochs after a flip at 10 vs "
                  f"{delay_b} after a flip at 20 (ratio {delay_b / delay_a:.2f}"
                  f", need >=1.5); both dip below 0.5 and settle at "
                  f"0.05 +/- 0.05")
    else:
        detail = (f"convergence epochs {conv_a}/{conv_b}, "
                  f"dips {dipped_a}/{dipped_b}")
    assert acceptance_log("criterion 4 (resiliency after behavior flip)", ok,
                          detail)


def _tracked_masses(tracked_truth: int) -> dict[float, float]:
    out = {}
    for pmu in PMU_SWEEP:
        cfg = SimConfig(pmu=pmu, p_tracked=1.0, tracked_truth=tracked_truth)
        runs = sweep(cfg)
        out[pmu] = metrics.tail_mean_true_mass(runs, cfg.tracked_area)
    return out


@pytest.mark.parametrize("tracked_truth,label", [(1, "healthy"),
                                                 (2, "unhealthy")])
def test_criterion_5_data_trust_tracks_truth(tracked_truth, label,
                                             acceptance_log):
    masses = _tracked_masses(tracked_truth)
    ok = (masses[0.1] >= 0.95 and masses[0.7] >= 0.7
          and all(m > 0.5 for m in masses.values()))
    detail = ", ".join(f"pmu={p}: {m:.4f}" for p, m in masses.items())
    assert acceptance_log(
        f"criterion 5 ({label}-area data trust)", ok,
        f"true-interval mass {detail}; need >=0.95 at 0.1, >=0.7 at 0.7, "
        f">0.5 everywhere")


def test_criterion_6_baseline_contrast(acceptance_log):
    good_b, good_p, gap = {}, {}, None
    for pmu in (0.5, 0.7):
        cfg = SimConfig(pmu=pmu, p_tracked=1.0, tracked_truth=1)
        runs = sweep(cfg, scheme="both")
        good_b[pmu] = metrics.tail_mean_trust(runs, metrics.good_users,
                                              scheme="baseline")
        good_p[pmu] = metrics.tail_mean_trust(runs, metrics.good_users,
                                              scheme="proposed")
        if pmu == 0.7:
            mass_p = metrics.tail_mean_true_mass(runs, cfg.tracked_area,
                                                 scheme="proposed")
            mass_b = metrics.tail_mean_true_mass(runs, cfg.tracked_area,
                                                 scheme="baseline")
            gap = mass_p - mass_b
    ok = (all(good_b[p] < 0.5 for p in good_b)
          and all(good_p[p] >= 0.9 for p in good_p)
          and gap >= 0.1)
    detail = (f"baseline good trust {good_b[0.5]:.3f}@0.5 / "
              f"{good_b[0.7]:.3f}@0.7 (<0.5), proposed {good_p[0.5]:.3f} / "
              f"{good_p[0.7]:.3f} (>=0.9), data-trust gap {gap:.3f} (>=0.1)")
    assert acceptance_log("criterion 6 (baseline contrast, paired streams)",
                          ok, detail)


def test_criterion_7_property_suites(acceptance_log, tmp_path):
    checks = []

    # Likelihood vs brute-force behavior enumeration, M <= 6, 1e-12.
    ch = ChannelParams(0.2, 0.2)
    worst = 0.0
    for s in (0.05, 0.5, 0.95):
        for m in range(7):
            for seq in itertools.product("CW", repeat=m):
                tally = EvaluationTally(seq.count("C"), seq.count("W"))
                worst = max(worst, abs(
                    epoch_likelihood(s, tally, ch)
                    - oracle_sequence_likelihood(seq, s, ch)))
    checks.append(("likelihood oracle", worst <= 1e-12))

    # Bayes posterior normalization + monotone evidence spot grid.
    levels = ScoreLevels((0.05, 0.5, 0.95))
    bayes_ok = True
    for c, w in itertools.product(range(5), range(5)):
        prior = ScoreDistribution((0.2, 0.5, 0.3))
        post = bayes_update(prior, EvaluationTally(c, w), ch, levels)
        bayes_ok &= abs(sum(post.probs) - 1.0) <= 1e-9
        plus = bayes_update(prior, EvaluationTally(c + 1, w), ch, levels)
        bayes_ok &= (entity_trust(plus, levels)
                     >= entity_trust(post, levels) - 1e-12)
    checks.append(("bayes normalization/monotonicity", bayes_ok))

    # Tally composition: evidence pooled within an epoch is additive.
    pooled = EvaluationTally(2, 1) + EvaluationTally(1, 3)
    comp = bayes_update(ScoreDistribution((0.2, 0.5, 0.3)), pooled, ch, levels)
    direct = bayes_update(ScoreDistribution((0.2, 0.5, 0.3)),
                          EvaluationTally(3, 4), ch, levels)
    checks.append(("tally composition", all(
        abs(a - b) <= 1e-9 for a, b in zip(comp.probs, direct.probs))))

    # Dempster fold vs power-set oracle, <= 4 masses, 3 intervals, 1e-9.
    fusion_ok = True
    pool = _random_masses(3, (0.2, 0.7))
    for k in (2, 3, 4):
        for masses in itertools.combinations(pool, k):
            got = reduce(combine, masses)
            want = reduce(_powerset_dempster, map(_to_powerset, masses))
            universe = frozenset({1, 2, 3})
            for g in (1, 2, 3):
                fusion_ok &= abs(got.mass(g)
                                 - want.get(frozenset({g}), 0.0)) <= 1e-9
            fusion_ok &= abs(got.omega - want.get(universe, 0.0)) <= 1e-9
            total = got.omega + sum(got.singletons.values())
            fusion_ok &= abs(total - 1.0) <= 1e-9
    checks.append(("fusion oracle/closure", fusion_ok))

    # Algebra: commutativity, associativity, vacuous identity, conflict.
    a = MassFunction(3, {1: 0.6}, 0.4)
    b = MassFunction(3, {2: 0.5}, 0.5)
    c = MassFunction(3, {1: 0.3, 3: 0.3}, 0.4)
    ab, ba = combine(a, b), combine(b, a)
    alg_ok = all(abs(ab.mass(g) - ba.mass(g)) <= 1e-12 for g in (1, 2, 3))
    left, right = combine(combine(a, b), c), combine(a, combine(b, c))
    alg_ok &= all(abs(left.mass(g) - right.mass(g)) <= 1e-9 for g in (1, 2, 3))
    ident = combine(a, MassFunction.vacuous(3))
    alg_ok &= abs(ident.mass(1) - 0.6) <= 1e-12
    try:
        combine(MassFunction(2, {1: 1.0}, 0.0), MassFunction(2, {2: 1.0}, 0.0))
        alg_ok = False
    except TotalConflict:
        pass
    checks.append(("dempster algebra", alg_ok))

    # End-to-end determinism: identical bytes across reruns.
    spec_a = ExperimentSpec(base=SimConfig(epochs=4, n_users=8, n_areas=5),
                            pmu_list=[0.25], seeds=[0, 1], scheme="both",
                            out_dir=tmp_path / "a")
    spec_b = dataclasses.replace(spec_a, out_dir=tmp_path / "b")
    run_experiment(spec_a)
    run_experiment(spec_b)
    same = all((tmp_path / "a" / n).read_bytes()
               == (tmp_path / "b" / n).read_bytes()
               for n in ("entity_trust.csv", "data_trust.csv"))
    sa = json.loads((tmp_path / "a" / "summary.json").read_text())
    sb = json.loads((tmp_path / "b" / "summary.json").read_text())
    sa["meta"].pop("created_unix"), sb["meta"].pop("created_unix")
    checks.append(("determinism byte-equality", same and sa == sb))

    ok = all(flag for _, flag in checks)
    detail = ", ".join(f"{name} {'ok' if flag else 'FAILED'}"
                       for name, flag in checks)
    assert acceptance_log("criterion 7 (property suites)", ok, detail)
