"""Oracle gates: every closed form must match its independent recomputation.

Each gate returns a :class:`GateResult`; the CLI ``verify`` command and the
acceptance tests share these functions.  Monte Carlo gates use fixed seeds
so the suite is deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analysis import g, geo_integral_closed
from .costmodel import xi_critical, xi_critical_numeric
from .errors import ParameterError
from .experiments import SCHEMES, table_rows
from .oracles import (dirichlet_sample_many, mc_expectation, quadrature,
                      steady_state_miss_rate_numeric)
from .predictors import Scheme, miss_rate

MC_SEED = 20240601


@dataclass
class GateResult:
    gate: str
    passed: bool
    worst: float       # worst absolute deviation or z-score seen
    tolerance: float
    detail: str = ""

    def as_row(self) -> dict:
        return {"gate": self.gate, "passed": bool(self.passed),
                "worst": float(self.worst), "tolerance": float(self.tolerance),
                "detail": self.detail}


def check_predictor_closed_forms(points: int = 99, tol: float = 1e-10) -> GateResult:
    """Closed-form miss rates vs. the stationary distribution of the chain."""
    worst = 0.0
    worst_at = ""
    for scheme in SCHEMES:
        for i in range(1, points + 1):
            p = i / (points + 1)
            diff = abs(miss_rate(scheme, p) - steady_state_miss_rate_numeric(scheme, p))
            if diff > worst:
                worst, worst_at = diff, f"{scheme.value} at p={p:.2f}"
    return GateResult("predictor-closed-forms", worst <= tol, worst, tol, worst_at)


def check_geo_integrals(max_exp: int = 20, tol: float = 1e-8) -> GateResult:
    """Closed-form geometric Beta integrals vs. adaptive quadrature."""
    worst = 0.0
    worst_at = ""
    for c in (1, 2):
        inv_c = 1.0 / c
        for a in range(max_exp + 1):
            for b in range(a + 1):
                closed = geo_integral_closed(c, a, b)
                num = quadrature(
                    lambda x, _a=a, _b=b: x ** _a * (1.0 - x) ** _b / (inv_c - x * (1.0 - x)),
                    tol=1e-11)
                diff = abs(closed - num)
                if diff > worst:
                    worst, worst_at = diff, f"c={c}, a={a}, b={b}"
    return GateResult("geo-beta-integrals", worst <= tol, worst, tol, worst_at)


def check_xi_critical(tol: float = 1e-6) -> GateResult:
    """Closed-form critical thresholds vs. numeric second-derivative roots."""
    worst = 0.0
    worst_at = ""
    for scheme in SCHEMES:
        diff = abs(xi_critical(scheme) - xi_critical_numeric(scheme))
        if diff > worst:
            worst, worst_at = diff, scheme.value
    return GateResult("xi-critical", worst <= tol, worst, tol, worst_at)


def check_table_consistency(tol: float = 1e-9) -> GateResult:
    """Table rows are finite and self-consistent across two evaluations."""
    rows = table_rows()
    again = table_rows()
    worst = 0.0
    ok = len(rows) == 30
    for r1, r2 in zip(rows, again):
        if not math.isfinite(r1["coefficient"]):
            ok = False
        worst = max(worst, abs(r1["coefficient"] - r2["coefficient"]))
    return GateResult("table-consistency", ok and worst <= tol, worst, tol,
                      f"{len(rows)} rows")


def _miss_vec(scheme: Scheme, p: np.ndarray) -> np.ndarray:
    q = p * (1.0 - p)
    if scheme is Scheme.ONE_BIT:
        return 2.0 * q
    if scheme is Scheme.TWO_BIT_SC:
        return q / (1.0 - 2.0 * q)
    return (2.0 * q * q + q) / (1.0 - q)


def check_mc_powers_to_parameters(samples: int = 10 ** 6, seed: int = MC_SEED) -> GateResult:
    """E[X1^2 X2] at (2,3) equals (a1 a2 / A(A+1)) E[X1] at (3,4)."""
    lhs, se_l = mc_expectation((2, 3), lambda x: x[:, 0] ** 2 * x[:, 1], samples, seed)
    factor = (2 * 3) / (5 * 6)
    rhs, se_r = mc_expectation((3, 4), lambda x: x[:, 0], samples, seed + 1)
    rhs *= factor
    se = math.hypot(se_l, factor * se_r)
    z = abs(lhs - rhs) / se
    return GateResult("mc-powers-to-parameters", z <= 3.0, z, 3.0,
                      f"lhs={lhs:.6f} rhs={rhs:.6f}")


def check_mc_aggregation(samples: int = 10 ** 6, seed: int = MC_SEED) -> GateResult:
    """(X1+X2, X3) at (1,2,3) matches direct (3,3) draws in mean and variance."""
    rng1 = np.random.Generator(np.random.PCG64(seed + 2))
    rng2 = np.random.Generator(np.random.PCG64(seed + 3))
    agg = dirichlet_sample_many((1, 2, 3), samples, rng1)[:, 0:2].sum(axis=1)
    direct = dirichlet_sample_many((3, 3), samples, rng2)[:, 0]
    z_mean = abs(agg.mean() - direct.mean()) / math.hypot(
        agg.std(ddof=1) / math.sqrt(samples), direct.std(ddof=1) / math.sqrt(samples))

    def var_se(x):
        centered = (x - x.mean()) ** 2
        return centered.std(ddof=1) / math.sqrt(x.size)

    z_var = abs(agg.var(ddof=1) - direct.var(ddof=1)) / math.hypot(var_se(agg), var_se(direct))
    z = max(z_mean, z_var)
    return GateResult("mc-aggregation", z <= 3.0, z, 3.0,
                      f"z_mean={z_mean:.2f} z_var={z_var:.2f}")


def check_mc_zoom(samples: int = 10 ** 6, seed: int = MC_SEED) -> GateResult:
    """Mean of X1/(X1+X2) at (2,3,4) equals 2/5."""
    mean, se = mc_expectation((2, 3, 4), lambda x: x[:, 0] / (x[:, 0] + x[:, 1]),
                              samples, seed + 4)
    z = abs(mean - 0.4) / se
    return GateResult("mc-zoom", z <= 3.0, z, 3.0, f"mean={mean:.6f}")


def check_mc_g_grid(samples: int = 10 ** 6, seed: int = MC_SEED,
                    grid: int = 4) -> GateResult:
    """g(scheme, x, y) vs. Monte Carlo E[f(X1)] for (x, y) in {1..grid}^2."""
    worst = 0.0
    worst_at = ""
    offset = 0
    for x in range(1, grid + 1):
        for y in range(1, grid + 1):
            rng = np.random.Generator(np.random.PCG64(seed + 100 + offset))
            offset += 1
            d = dirichlet_sample_many((x, y), samples, rng)[:, 0]
            for scheme in SCHEMES:
                vals = _miss_vec(scheme, d)
                se = vals.std(ddof=1) / math.sqrt(samples)
                z = abs(vals.mean() - g(scheme, x, y)) / se
                if z > worst:
                    worst, worst_at = z, f"{scheme.value} (x={x}, y={y})"
    return GateResult("mc-g-grid", worst <= 3.0, worst, 3.0, worst_at)


def check_mc_yqs_site_groups(samples: int = 10 ** 6, seed: int = MC_SEED) -> GateResult:
    """Per-site analytic groups vs. direct Dirichlet Monte Carlo."""
    from .analysis import yqs_site_terms
    from .sorting import SiteId

    worst = 0.0
    worst_at = ""
    for idx, t in enumerate([(0, 0, 0), (1, 1, 1), (0, 3, 0)]):
        rng = np.random.Generator(np.random.PCG64(seed + 500 + idx))
        d = dirichlet_sample_many(tuple(x + 1 for x in t), samples, rng)
        d1, d2, d3 = d[:, 0], d[:, 1], d[:, 2]
        for scheme in SCHEMES:
            f = lambda p: _miss_vec(scheme, p)
            groups = {
                SiteId.Y1: (d1 + d2) * f(d2 + d3),
                SiteId.Y2: (d1 + d2) * (d2 + d3) * f(d2 / (d2 + d3)),
                SiteId.Y3: d3 * f(d1 + d2),
                SiteId.Y4: d3 * (d1 + d2) * f(d1 / (d1 + d2)),
            }
            exact = yqs_site_terms(scheme, t)
            for site, vals in groups.items():
                se = vals.std(ddof=1) / math.sqrt(samples)
                z = abs(vals.mean() - exact[site]) / se
                if z > worst:
                    worst, worst_at = z, f"{scheme.value} t={t} {site.value}"
    return GateResult("mc-yqs-site-groups", worst <= 3.0, worst, 3.0, worst_at)


def run_all(samples: int = 10 ** 6, seed: int = MC_SEED) -> list[GateResult]:
    if samples < 2:
        raise ParameterError("samples must be >= 2")
    return [
        check_predictor_closed_forms(),
        check_geo_integrals(),
        check_xi_critical(),
        check_table_consistency(),
        check_mc_powers_to_parameters(samples, seed),
        check_mc_aggregation(samples, seed),
        check_mc_zoom(samples, seed),
        check_mc_g_grid(samples, seed),
        check_mc_yqs_site_groups(samples, seed),
    ]
