"""branchlab: branch-misprediction analysis and simulation for Quicksort.

The package has three legs that validate each other:

* instrumented sorts (:mod:`branchlab.sorting`, compiled twins in
  :mod:`branchlab._kernels`) that report every key-comparison branch,
* exact leading-term coefficients (:mod:`branchlab.analysis`) and a combined
  instruction/branch-miss cost model (:mod:`branchlab.costmodel`),
* independent numeric oracles (:mod:`branchlab.oracles`) gating the closed
  forms, wired together by :mod:`branchlab.verify` and the CLI.
"""

__version__ = "0.1.0"

from .errors import (BracketError, BranchLabError, DomainError, NumericError,
                     ParameterError)
from .predictors import (PredictorTable, Scheme, miss_rate, predict,
                         simulate_iid_stream, update)
from .sorting import (ALG_CQS, ALG_YQS, SiteId, SortStats, insertion_sort,
                      partition_classic, partition_yaroslavskiy,
                      quicksort_generalized, sample_size, select_pivots)
from .analysis import (CoefficientReport, a_cqs, a_star_cqs, a_star_yqs, a_yqs,
                       coefficient_report, coefficient_report_limit,
                       continuous_entropy, discrete_entropy, g,
                       geo_integral_closed, geo_expectation, harmonic,
                       leading_coefficient)
from .costmodel import (bytecode_coefficient_cqs, q_finite, q_limit,
                        t_star_finite, tau_star, xi_critical)
from .simulate import (ExperimentConfig, SimulationReport, fit_coefficient,
                       instrumented_sort, run_simulation)

__all__ = [name for name in dir() if not name.startswith("_")]
