"""Statistical validation of the instrumented sorts against the model.

These tests use realized pivot values, so the predictions they check are
conditional expectations (no pivot-draw noise): tolerances are plain
law-of-large-numbers bounds at the stated sizes.
"""

import math

import numpy as np
import pytest

from branchlab._kernels import partition_classic_k, partition_yaroslavskiy_k
from branchlab.analysis import yqs_site_terms
from branchlab.predictors import (DEFAULT_INITIAL_STATE, Scheme,
                                  automaton_arrays, miss_rate)
from branchlab.simulate import ExperimentConfig, fit_coefficient, run_simulation
from branchlab.sorting import sample_size

N_STEP = 10 ** 5
STEPS = 100


def _fresh_predictor(scheme, n_sites):
    trans, pred = automaton_arrays(scheme)
    states = np.full(n_sites, DEFAULT_INITIAL_STATE[scheme] - 1, np.int64)
    execs = np.zeros(n_sites, np.int64)
    taken = np.zeros(n_sites, np.int64)
    misses = np.zeros(n_sites, np.int64)
    return trans, pred, states, execs, taken, misses


def test_classic_partition_frequencies_match_conditional_model():
    rng = np.random.Generator(np.random.PCG64(101))
    t = (1, 1)
    k = sample_size(t)
    for _ in range(STEPS):
        a = rng.random(N_STEP)
        samp = np.sort(a[:k])
        a[:k] = samp
        p = samp[t[0]]
        d1 = p
        trans, pred, states, execs, taken, misses = _fresh_predictor(Scheme.ONE_BIT, 2)
        partition_classic_k(a, k, N_STEP - 1, p, states, trans, pred, execs, taken, misses)
        n_ord = N_STEP - k
        assert abs(execs[0] / n_ord - d1) <= 0.02
        assert abs(execs[1] / n_ord - (1 - d1)) <= 0.02
        assert abs(execs.sum() - n_ord) <= 2
        # taken rate at each site equals the element-class probability
        assert abs(taken[0] / execs[0] - d1) <= 0.02
        assert abs(taken[1] / execs[1] - (1 - d1)) <= 0.02


def test_yaroslavskiy_partition_frequencies_match_conditional_model():
    rng = np.random.Generator(np.random.PCG64(202))
    t = (1, 1, 1)
    k = sample_size(t)
    for _ in range(STEPS):
        a = rng.random(N_STEP)
        samp = np.sort(a[:k])
        a[:k] = samp
        p, q = samp[t[0]], samp[t[0] + t[1] + 1]
        d1, d2, d3 = p, q - p, 1.0 - q
        trans, pred, states, execs, taken, misses = _fresh_predictor(Scheme.ONE_BIT, 4)
        partition_yaroslavskiy_k(a, k, N_STEP - 1, p, q, states, trans, pred,
                                 execs, taken, misses)
        n_ord = N_STEP - k
        freq = execs / n_ord
        assert abs(freq[0] - (d1 + d2)) <= 0.02
        assert abs(freq[1] - (d1 + d2) * (d2 + d3)) <= 0.02
        assert abs(freq[2] - d3) <= 0.02
        assert abs(freq[3] - d3 * (d1 + d2)) <= 0.02
        # the two scanning sites tile the segment
        assert abs(execs[0] + execs[2] - n_ord) <= 1
        theta = taken / execs
        assert abs(theta[0] - (d2 + d3)) <= 0.02
        assert abs(theta[1] - d2 / (d2 + d3)) <= 0.02
        assert abs(theta[2] - (d1 + d2)) <= 0.02
        assert abs(theta[3] - d1 / (d1 + d2)) <= 0.02


@pytest.mark.parametrize("scheme,t", [(Scheme.TWO_BIT_SC, (0, 3, 0)),
                                      (Scheme.ONE_BIT, (1, 1, 1))])
def test_single_step_miss_toll_matches_conditional_theory(scheme, t):
    # Measured per-step misses, per site, vs. execs * f(theta) with the
    # realized pivots; verifies event conventions and predictor dynamics
    # without recursion or pivot-draw noise.
    rng = np.random.Generator(np.random.PCG64(303))
    k = sample_size(t)
    n = 10 ** 5
    diffs = np.empty((STEPS, 4))
    for step in range(STEPS):
        a = rng.random(n)
        samp = np.sort(a[:k])
        a[:k] = samp
        p, q = samp[t[0]], samp[t[0] + t[1] + 1]
        d1, d2, d3 = p, q - p, 1.0 - q
        trans, pred, states, execs, taken, misses = _fresh_predictor(scheme, 4)
        partition_yaroslavskiy_k(a, k, n - 1, p, q, states, trans, pred,
                                 execs, taken, misses)
        f = lambda x: miss_rate(scheme, x)
        n_ord = n - k
        expect = np.array([(d1 + d2) * f(d2 + d3),
                           (d1 + d2) * (d2 + d3) * f(d2 / (d2 + d3)),
                           d3 * f(d1 + d2),
                           d3 * (d1 + d2) * f(d1 / (d1 + d2))])
        diffs[step] = (misses - expect * n_ord) / n_ord
    for site in range(4):
        mean = float(diffs[:, site].mean())
        se = float(diffs[:, site].std(ddof=1) / math.sqrt(STEPS))
        assert abs(mean) <= max(3 * se, 1e-3), (scheme, site)
    total = diffs.sum(axis=1)
    assert abs(total.mean()) <= max(3 * total.std(ddof=1) / math.sqrt(STEPS), 1e-3)


@pytest.mark.slow
def test_per_partition_policy_reproduces_coefficients():
    # Both predictor-table policies must land on the same leading term.
    for alg, t, scheme, expect in [
        ("cqs", (0, 0), Scheme.ONE_BIT, 2 / 3),
        ("yqs", (1, 1, 1), Scheme.ONE_BIT, 274 / 399),
    ]:
        pts = []
        for n, trials in ((10 ** 4, 300), (10 ** 5, 100), (10 ** 6, 25)):
            cfg = ExperimentConfig(algorithm=alg, t=t, scheme=scheme, sizes=(n,),
                                   trials=trials, seed=11, policy="per-partition")
            rep = run_simulation(cfg)
            pts.append((n, rep.aggregates[0]["mean_bm"]))
        fit = fit_coefficient(pts)
        assert abs(fit - expect) / expect <= 0.05, (alg, t)


@pytest.mark.slow
def test_per_site_miss_shares_match_site_coefficients():
    # Full-sort per-site BM shares vs. analytic per-site shares at n = 1e6.
    # Shares cancel the common slowly-decaying lower-order factor that every
    # site carries (the per-site leading constants themselves are pinned by
    # the single-step conditional test above).
    t = (1, 1, 1)
    scheme = Scheme.ONE_BIT
    sites = yqs_site_terms(scheme, t)
    total_term = sum(sites.values())
    cfg = ExperimentConfig(algorithm="yqs", t=t, scheme=scheme, sizes=(10 ** 6,),
                           trials=50, seed=13)
    rep = run_simulation(cfg)
    bm_total = sum(r["bm_total"] for r in rep.rows)
    for site, term in sites.items():
        measured_share = sum(r[f"bm_{site.value}"] for r in rep.rows) / bm_total
        analytic_share = term / total_term
        assert abs(measured_share - analytic_share) / analytic_share <= 0.07, (
            site, measured_share, analytic_share)
