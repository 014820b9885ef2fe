import math

import numpy as np
import pytest

from branchlab.errors import ParameterError
from branchlab.predictors import Scheme
from branchlab.simulate import (ExperimentConfig, fit_coefficient,
                                instrumented_sort, mix64, run_simulation,
                                substream_seed)
from branchlab.sorting import SiteId


class TestMix64:
    def test_published_vector(self):
        # First splitmix64 output for state 0.
        assert mix64(0) == 0xE220A8397B1DCDAF

    def test_substreams_distinct_for_nearby_seeds(self):
        seeds = {substream_seed(s, i) for s in (0, 1, 2, 3) for i in range(64)}
        assert len(seeds) == 4 * 64

    def test_deterministic(self):
        assert substream_seed(123, 7) == substream_seed(123, 7)


class TestFitCoefficient:
    def test_exact_leading_term(self):
        pts = [(n, 0.5 * n * math.log(n)) for n in (10 ** 3, 10 ** 4, 10 ** 5)]
        assert fit_coefficient(pts) == pytest.approx(0.5, abs=1e-9)

    def test_two_term_identifiability(self):
        pts = [(n, 0.5 * n * math.log(n) + 3.0 * n) for n in (10 ** 3, 10 ** 4, 10 ** 5)]
        assert fit_coefficient(pts) == pytest.approx(0.5, abs=1e-9)

    def test_needs_two_sizes(self):
        with pytest.raises(ParameterError):
            fit_coefficient([(1000, 5.0), (1000, 6.0)])


class TestExperimentConfig:
    def test_validation_errors(self):
        good = dict(algorithm="cqs", t=(0, 0), scheme=Scheme.ONE_BIT,
                    sizes=(100,), trials=1, seed=1)
        ExperimentConfig(**good)
        with pytest.raises(ParameterError):
            ExperimentConfig(**{**good, "t": (0, 0, 0)})
        with pytest.raises(ParameterError):
            ExperimentConfig(**{**good, "sizes": (1,)})
        with pytest.raises(ParameterError):
            ExperimentConfig(**{**good, "trials": 0})
        with pytest.raises(ParameterError):
            ExperimentConfig(**{**good, "w": 0, "t": (1, 1)})
        with pytest.raises(ParameterError):
            ExperimentConfig(**{**good, "policy": "bogus"})

    def test_scheme_string_accepted(self):
        cfg = ExperimentConfig(algorithm="yqs", t=(1, 1, 1), scheme="2bit-sc",
                               sizes=(100,), trials=1, seed=1)
        assert cfg.scheme is Scheme.TWO_BIT_SC
        assert cfg.w == 16


class TestRunSimulation:
    def _config(self, **over):
        base = dict(algorithm="cqs", t=(0, 0), scheme=Scheme.ONE_BIT,
                    sizes=(500, 2000), trials=4, seed=7)
        base.update(over)
        return ExperimentConfig(**base)

    def test_deterministic_replay(self):
        r1 = run_simulation(self._config())
        r2 = run_simulation(self._config())
        assert r1.rows == r2.rows
        assert r1.aggregates == r2.aggregates
        assert r1.fitted_coefficient == r2.fitted_coefficient

    def test_thread_count_does_not_change_results(self):
        r1 = run_simulation(self._config(), threads=1)
        r4 = run_simulation(self._config(), threads=4)
        assert r1.rows == r4.rows

    def test_env_thread_override(self, monkeypatch):
        monkeypatch.setenv("BRANCHLAB_THREADS", "2")
        rep = run_simulation(self._config())
        assert rep.metadata["threads"] == 2

    def test_per_site_misses_sum_to_total(self):
        rep = run_simulation(self._config(algorithm="yqs", t=(1, 1, 1)))
        for row in rep.rows:
            sites = sum(row[f"bm_{s.value}"] for s in
                        (SiteId.Y1, SiteId.Y2, SiteId.Y3, SiteId.Y4))
            assert sites == row["bm_total"]

    def test_report_fields(self):
        rep = run_simulation(self._config())
        assert rep.analytic_coefficient == pytest.approx(2 / 3, abs=1e-12)
        assert {a["n"] for a in rep.aggregates} == {500, 2000}
        for agg in rep.aggregates:
            assert agg["trials"] == 4
            expect = agg["mean_bm"] / (agg["n"] * math.log(agg["n"]))
            assert agg["mean_bm_per_nlnn"] == pytest.approx(expect, abs=1e-12)
        assert rep.fitted_coefficient is not None
        assert rep.metadata["prng"] == "numpy-pcg64"

    def test_different_seeds_differ(self):
        r1 = run_simulation(self._config(seed=1))
        r2 = run_simulation(self._config(seed=2))
        assert r1.rows != r2.rows


class TestInstrumentedSortValidation:
    def test_cutoff_too_small(self):
        with pytest.raises(ParameterError):
            instrumented_sort(np.zeros(10), (2, 2), Scheme.ONE_BIT, w=3)

    def test_bad_policy(self):
        with pytest.raises(ParameterError):
            instrumented_sort(np.zeros(10), (0, 0), Scheme.ONE_BIT, policy="nope")
