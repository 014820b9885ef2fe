"""Canonical analytical experiments: coefficient table, sweeps, optima.

These produce plain row dictionaries (stable key order) that the CLI emits
as CSV or JSON; the test suite asserts the numbers directly.
"""

from __future__ import annotations

import numpy as np

from .analysis import coefficient_report, coefficient_report_limit
from .costmodel import (q_finite, q_limit, t_star_finite, tau_star,
                        xi_critical, xi_critical_numeric)
from .errors import ParameterError
from .predictors import Scheme
from .sorting import ALG_CQS, ALG_YQS, parse_algorithm

SCHEMES = (Scheme.ONE_BIT, Scheme.TWO_BIT_SC, Scheme.TWO_BIT_FC)

# The five standard parameter blocks of the coefficient table: no sampling,
# the two k=5 variants (balanced and maximally BM-skewed), and their
# large-sample limits.
TABLE_BLOCKS = (
    ("no-sampling", "finite", {ALG_CQS: (0, 0), ALG_YQS: (0, 0, 0)}),
    ("k5-balanced", "finite", {ALG_CQS: (2, 2), ALG_YQS: (1, 1, 1)}),
    ("k5-skewed", "finite", {ALG_CQS: (4, 0), ALG_YQS: (0, 3, 0)}),
    ("limit-balanced", "limit", {ALG_CQS: (0.5, 0.5), ALG_YQS: (1 / 3, 1 / 3, 1 / 3)}),
    ("limit-skewed", "limit", {ALG_CQS: (0.1, 0.9), ALG_YQS: (0.1, 0.8, 0.1)}),
)


def table_rows() -> list[dict]:
    """The 30 branch-miss coefficients: 5 blocks x 3 schemes x 2 algorithms."""
    rows = []
    for block, regime, params in TABLE_BLOCKS:
        for scheme in SCHEMES:
            for algorithm in (ALG_CQS, ALG_YQS):
                if regime == "finite":
                    rep = coefficient_report(algorithm, scheme, params[algorithm])
                else:
                    rep = coefficient_report_limit(algorithm, scheme, params[algorithm])
                rows.append({
                    "block": block,
                    "scheme": scheme.value,
                    "algorithm": algorithm,
                    "coefficient": rep.coefficient,
                })
    return rows


def sweep_symmetric_rows(t_max: int, schemes=SCHEMES) -> list[dict]:
    """Balanced sampling sweep: t_CQS = (3t+2, 3t+2), t_YQS = (2t+1,)*3.

    Both algorithms use sample size k = 6t + 5 (median vs. tertiles).
    """
    rows = []
    for step in range(t_max + 1):
        params = {ALG_CQS: (3 * step + 2, 3 * step + 2),
                  ALG_YQS: (2 * step + 1, 2 * step + 1, 2 * step + 1)}
        for scheme in schemes:
            for algorithm in (ALG_CQS, ALG_YQS):
                rep = coefficient_report(algorithm, scheme, params[algorithm])
                rows.append({"t": step, "k": 6 * step + 5, "scheme": scheme.value,
                             "algorithm": algorithm, "coefficient": rep.coefficient})
    return rows


def sweep_skewed_rows(t_max: int, schemes=SCHEMES) -> list[dict]:
    """Extreme-skew sweep: t_CQS = (0, 6t+4), t_YQS = (0, 6t+3, 0); k = 6t+5."""
    rows = []
    for step in range(t_max + 1):
        params = {ALG_CQS: (0, 6 * step + 4), ALG_YQS: (0, 6 * step + 3, 0)}
        for scheme in schemes:
            for algorithm in (ALG_CQS, ALG_YQS):
                rep = coefficient_report(algorithm, scheme, params[algorithm])
                rows.append({"t": step, "k": 6 * step + 5, "scheme": scheme.value,
                             "algorithm": algorithm, "coefficient": rep.coefficient})
    return rows


def qplot_rows(xis=(5.0, 15.0, 30.0, 50.0), schemes=SCHEMES,
               points: int = 99) -> list[dict]:
    """Combined-cost curves q_xi((tau, 1-tau)) on a symmetric tau grid."""
    if points < 2:
        raise ParameterError("need at least 2 grid points")
    taus = np.linspace(0.01, 0.99, points)
    rows = []
    for scheme in schemes:
        for xi in xis:
            for tau1 in taus:
                rows.append({
                    "scheme": scheme.value,
                    "xi": float(xi),
                    "tau1": float(tau1),
                    "q": q_limit(float(xi), scheme, (float(tau1), float(1.0 - tau1))),
                })
    return rows


def tau_star_rows(xi_max: float = 200.0, step: float = 1.0,
                  schemes=SCHEMES) -> list[dict]:
    """Optimal-skew curve tau*(xi) on a xi grid."""
    if step <= 0 or xi_max < 0:
        raise ParameterError("xi grid must have positive step and non-negative max")
    rows = []
    xis = np.arange(0.0, xi_max + 0.5 * step, step)
    for scheme in schemes:
        for xi in xis:
            rows.append({"scheme": scheme.value, "xi": float(xi),
                         "tau_star": tau_star(float(xi), scheme)})
    return rows


def xi_c_rows(schemes=SCHEMES) -> list[dict]:
    """Critical thresholds: closed form vs. numeric second-derivative root."""
    rows = []
    for scheme in schemes:
        closed = xi_critical(scheme)
        numeric = xi_critical_numeric(scheme)
        rows.append({"scheme": scheme.value, "xi_c_closed": closed,
                     "xi_c_numeric": numeric, "abs_diff": abs(closed - numeric)})
    return rows


def _yqs_compositions(total: int):
    for t1 in range(total + 1):
        for t2 in range(total - t1 + 1):
            yield (t1, t2, total - t1 - t2)


def opt_t_rows(xi: float, k: int, schemes=SCHEMES, algorithm: str = ALG_CQS,
               objective: str = "q") -> list[dict]:
    """Best sampling parameter for sample size k.

    For classic Quicksort ``objective`` is "q" (combined cost) or "bm"
    (branch misses only); the dual-pivot sort has no bytecode model, so only
    "bm" is supported and the argmin is over all compositions of k - 2.
    """
    algorithm = parse_algorithm(algorithm)
    if objective not in ("q", "bm"):
        raise ParameterError(f"objective must be 'q' or 'bm', got {objective!r}")
    if algorithm == ALG_YQS and objective == "q":
        raise ParameterError("no bytecode model for the dual-pivot sort; use objective='bm'")
    rows = []
    for scheme in schemes:
        if algorithm == ALG_CQS and objective == "q":
            best = t_star_finite(xi, scheme, k)
            value = q_finite(xi, scheme, best)
        else:
            if algorithm == ALG_CQS:
                candidates = [(t1, k - 1 - t1) for t1 in range(k)]
            else:
                if k < 2:
                    raise ParameterError(f"dual-pivot sample size must be >= 2, got {k}")
                candidates = list(_yqs_compositions(k - 2))
            best, value, best_key = None, None, None
            for t in candidates:
                rep = coefficient_report(algorithm, scheme, t)
                key = (rep.coefficient, max(t) - min(t), t)
                if best_key is None or key < best_key:
                    best, value, best_key = t, rep.coefficient, key
        rows.append({"scheme": scheme.value, "algorithm": algorithm,
                     "xi": float(xi), "k": k, "objective": objective,
                     "t_star": "|".join(str(x) for x in best), "value": value})
    return rows
