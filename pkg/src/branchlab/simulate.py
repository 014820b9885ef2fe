"""Seeded simulation harness: sorts random permutations and counts misses.

Reproducibility contract
------------------------
Randomness enters only through the input permutations.  Trial ``i`` (the
global row index over all (size, trial) pairs, row-major) uses a fresh
numpy PCG64 generator seeded with ``splitmix64(splitmix64(seed) XOR i)``;
the input is ``Generator.permutation(n)`` cast to float64.  The seed is
whitened once before the XOR so that nearby seeds do not share substream
sets (plain ``seed XOR i`` maps adjacent small seeds onto permutations of
the same trial seeds).  The sorts themselves are deterministic, so
identical configuration and seed replay identical counts regardless of the
worker-thread count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .analysis import coefficient_report
from .errors import NumericError, ParameterError
from .predictors import (DEFAULT_INITIAL_STATE, POLICY_PERSISTENT,
                         PREDICTOR_POLICIES, Scheme, automaton_arrays)
from .sorting import (ALG_CQS, CLASSIC_SITES, YAROSLAVSKIY_SITES,
                      default_cutoff, parse_algorithm, sample_size,
                      validate_sampling_param)

_MASK64 = (1 << 64) - 1

PRNG_NAME = "numpy-pcg64"
SUBSTREAM_RULE = "splitmix64(splitmix64(seed) XOR trial_index)"


def mix64(x: int) -> int:
    """One splitmix64 output step; used to derive per-trial substream seeds."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def substream_seed(seed: int, trial_index: int) -> int:
    return mix64(mix64(seed & _MASK64) ^ (trial_index & _MASK64))


def instrumented_sort(a: np.ndarray, t, scheme: Scheme, w: int | None = None,
                      policy: str = POLICY_PERSISTENT,
                      initial_state: int | None = None) -> dict:
    """Sort ``a`` (float64 array) in place with the compiled kernel.

    Returns per-site executions/taken/misses plus swap and call counters;
    counter-compatible with the pure-Python
    :func:`branchlab.sorting.quicksort_generalized` driven by a
    :class:`branchlab.predictors.PredictorTable`.
    """
    t = validate_sampling_param(t)
    if policy not in PREDICTOR_POLICIES:
        raise ParameterError(f"unknown predictor policy: {policy!r}")
    if w is None:
        w = default_cutoff(t)
    if w < sample_size(t):
        raise ParameterError(f"cutoff w={w} must be at least the sample size {sample_size(t)}")
    trans, pred = automaton_arrays(scheme)
    init0 = (DEFAULT_INITIAL_STATE[scheme] if initial_state is None else initial_state) - 1
    sites = CLASSIC_SITES if len(t) == 2 else YAROSLAVSKIY_SITES
    execs = np.zeros(len(sites), np.int64)
    taken = np.zeros(len(sites), np.int64)
    misses = np.zeros(len(sites), np.int64)
    counters = np.zeros(3, np.int64)
    reset = policy != POLICY_PERSISTENT
    if len(t) == 2:
        _kernels.sort_classic_k(a, t[0], t[1], w, trans, pred, init0, reset,
                                execs, taken, misses, counters)
    else:
        _kernels.sort_yaroslavskiy_k(a, t[0], t[1], t[2], w, trans, pred, init0,
                                     reset, execs, taken, misses, counters)
    return {
        "sites": sites,
        "executions": dict(zip(sites, execs.tolist())),
        "taken": dict(zip(sites, taken.tolist())),
        "misses": dict(zip(sites, misses.tolist())),
        "swaps": int(counters[0]),
        "partition_calls": int(counters[1]),
        "insertion_sort_calls": int(counters[2]),
    }


@dataclass
class ExperimentConfig:
    """One simulation experiment: algorithm, sampling, predictor, sizes, seed."""

    algorithm: str
    t: tuple
    scheme: Scheme
    sizes: tuple
    trials: int
    seed: int
    w: int | None = None
    policy: str = POLICY_PERSISTENT
    output: str = "json"

    def __post_init__(self):
        self.algorithm = parse_algorithm(self.algorithm)
        self.t = validate_sampling_param(self.t, self.algorithm)
        if isinstance(self.scheme, str):
            self.scheme = Scheme.parse(self.scheme)
        self.sizes = tuple(int(n) for n in self.sizes)
        if not self.sizes or any(n < 2 for n in self.sizes):
            raise ParameterError(f"sizes must all be >= 2, got {self.sizes}")
        if self.trials < 1:
            raise ParameterError(f"trials must be >= 1, got {self.trials}")
        if self.w is None:
            self.w = default_cutoff(self.t)
        if self.w < sample_size(self.t):
            raise ParameterError(
                f"cutoff w={self.w} must be at least the sample size {sample_size(self.t)}")
        if self.policy not in PREDICTOR_POLICIES:
            raise ParameterError(f"unknown predictor policy: {self.policy!r}")
        if self.output not in ("json", "csv"):
            raise ParameterError(f"output must be json or csv, got {self.output!r}")


@dataclass
class SimulationReport:
    config: ExperimentConfig
    analytic_coefficient: float
    rows: list = field(default_factory=list)        # one dict per (n, trial)
    aggregates: list = field(default_factory=list)  # one dict per n
    fitted_coefficient: float | None = None
    metadata: dict = field(default_factory=dict)


def _worker_count(threads: int | None) -> int:
    if threads is not None:
        return max(1, int(threads))
    env = os.environ.get("BRANCHLAB_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def run_simulation(config: ExperimentConfig, threads: int | None = None) -> SimulationReport:
    """Run all trials of ``config`` and aggregate branch-miss statistics."""
    analytic = coefficient_report(config.algorithm, config.scheme, config.t).coefficient
    sites = CLASSIC_SITES if config.algorithm == ALG_CQS else YAROSLAVSKIY_SITES

    jobs = [(idx, n, trial)
            for idx, (n, trial) in enumerate(
                (n, trial) for n in config.sizes for trial in range(config.trials))]

    def run_one(job):
        idx, n, trial = job
        rng = np.random.Generator(np.random.PCG64(substream_seed(config.seed, idx)))
        a = rng.permutation(n).astype(np.float64)
        res = instrumented_sort(a, config.t, config.scheme, config.w, config.policy)
        row = {"n": n, "trial": trial}
        row["bm_total"] = sum(res["misses"].values())
        for site in sites:
            row[f"bm_{site.value}"] = res["misses"][site]
        row["comparisons"] = sum(res["executions"].values())
        row["swaps"] = res["swaps"]
        return idx, row

    workers = _worker_count(threads)
    if workers == 1:
        results = [run_one(job) for job in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_one, jobs))
    results.sort(key=lambda r: r[0])
    rows = [row for _idx, row in results]

    aggregates = []
    for n in config.sizes:
        sub = [r for r in rows if r["n"] == n]
        mean_bm = sum(r["bm_total"] for r in sub) / len(sub)
        scale = n * math.log(n)
        measured = mean_bm / scale
        aggregates.append({
            "n": n,
            "trials": len(sub),
            "mean_bm": mean_bm,
            "mean_bm_per_nlnn": measured,
            "analytic_coefficient": analytic,
            "relative_deviation": abs(measured - analytic) / analytic,
        })

    fitted = None
    if len(set(config.sizes)) >= 2:
        fitted = fit_coefficient([(agg["n"], agg["mean_bm"]) for agg in aggregates])

    metadata = {
        "prng": PRNG_NAME,
        "substream": SUBSTREAM_RULE,
        "seed": config.seed,
        "algorithm": config.algorithm,
        "t": list(config.t),
        "scheme": config.scheme.value,
        "sizes": list(config.sizes),
        "trials": config.trials,
        "w": config.w,
        "policy": config.policy,
        "threads": workers,
    }
    return SimulationReport(config=config, analytic_coefficient=analytic, rows=rows,
                            aggregates=aggregates, fitted_coefficient=fitted,
                            metadata=metadata)


def fit_coefficient(measurements) -> float:
    """Least-squares fit of c*n ln n + d*n to (n, mean cost) points.

    The d*n term soaks up the linear-order contribution so that c estimates
    the n ln n coefficient from moderate sizes.
    """
    pts = [(int(n), float(y)) for n, y in measurements]
    if len({n for n, _ in pts}) < 2:
        raise ParameterError("need measurements at >= 2 distinct sizes")
    a = np.array([[n * math.log(n), float(n)] for n, _ in pts])
    b = np.array([y for _, y in pts])
    sol, _res, rank, _sv = np.linalg.lstsq(a, b, rcond=None)
    if rank < 2:
        raise NumericError("singular fit system")
    return float(sol[0])
