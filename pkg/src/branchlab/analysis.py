"""Exact leading-term coefficients for expected branch misses.

For either sort the expected number of branch misses grows like
``(a / H) * n ln n`` where ``H`` is the discrete entropy of the sampling
parameter and ``a`` the per-partitioning-step toll coefficient.  The toll
constants are built from

    g(scheme, x, y) = E[f(X)],  X ~ Beta(x, y),

the expected steady-state miss rate over a Beta-distributed branch
probability.  For the two 2-bit schemes this reduces to normalized
"geometric Beta" integrals

    J_c(a, b) = (1 / B(a,b)) * Integral_0^1 x^a (1-x)^b / (1/c - x(1-x)) dx

for which closed forms (finite telescoping sums plus residue-class
constants) are implemented below and gated against adaptive quadrature in
the test suite.  The closed forms cancel catastrophically for large
parameters, so ``g`` switches to a numerically stable Gauss-Legendre
evaluation of the Beta expectation once x + y is large.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ParameterError
from .predictors import Scheme, miss_rate
from .sorting import (ALG_CQS, ALG_YQS, SiteId, parse_algorithm,
                      sample_size, validate_sampling_param)

# Above these totals the closed-form J loses too many digits to cancellation
# (its terms stay O(1) while the integral shrinks like B(a, b)); the
# Gauss-Legendre path is ~1e-13 relative everywhere.  The 1/(1 - x(1-x))
# integrals have no 2^-i damping, so they degrade earlier.
_CLOSED_LIMIT_C2 = 40   # saturating counter: J_2(x, y) up to x + y = 40
_CLOSED_LIMIT_C1 = 18   # flip-on-consecutive: J_1 args up to (x+1) + (y+1) = 20

_GL_NODES = 2000


def harmonic(n: int) -> float:
    """n-th harmonic number; harmonic(0) = 0."""
    if n < 0 or int(n) != n:
        raise ParameterError(f"harmonic() needs a non-negative integer, got {n}")
    return math.fsum(1.0 / i for i in range(1, int(n) + 1))


def discrete_entropy(t) -> float:
    """Entropy-like constant of the subproblem-size split for finite samples.

    H(t) = sum_l (t_l + 1)/(k + 1) * (H_{k+1} - H_{t_l+1}).
    """
    t = validate_sampling_param(t)
    k = sample_size(t)
    hk = harmonic(k + 1)
    return math.fsum((tl + 1) / (k + 1) * (hk - harmonic(tl + 1)) for tl in t)


def validate_limit_ratios(tau) -> tuple[float, ...]:
    tau = tuple(float(x) for x in tau)
    if len(tau) not in (2, 3):
        raise ParameterError(f"limit ratios must have 2 or 3 components, got {len(tau)}")
    if any(x < 0 for x in tau):
        raise ParameterError(f"limit ratios must be non-negative: {tau}")
    if abs(sum(tau) - 1.0) > 1e-12:
        raise ParameterError(f"limit ratios must sum to 1: {tau}")
    return tau


def continuous_entropy(tau) -> float:
    """Shannon entropy (base e) of the limit split ratios; 0 ln 0 := 0."""
    tau = validate_limit_ratios(tau)
    return -math.fsum(x * math.log(x) for x in tau if x > 0.0)


def _beta(a: int, b: int) -> float:
    """Beta function at positive integer arguments, exact up to rounding."""
    return 1.0 / ((a + b - 1) * math.comb(a + b - 2, a - 1))


_SQRT3 = math.sqrt(3.0)
_RHO1_CASES = (2.0 * math.pi / (3.0 * _SQRT3),
               math.pi / (3.0 * _SQRT3),
               1.0 - math.pi / (3.0 * _SQRT3))
_RHO2_CASES = (math.pi, math.pi / 2.0, 1.0, 1.5 - math.pi / 4.0)


def _rho1(d: int) -> float:
    return (-1.0) ** (d // 3) * _RHO1_CASES[d % 3]


def _rho2(d: int) -> float:
    return (-0.25) ** (d // 4) * _RHO2_CASES[d % 4]


def geo_integral_closed(c: int, a: int, b: int) -> float:
    """Closed form of Integral_0^1 x^a (1-x)^b / (1/c - x(1-x)) dx, c in {1,2}.

    The integral is symmetric in (a, b); arguments are symmetrized before
    applying the telescoping formulas, which assume a >= b.
    """
    if c not in (1, 2):
        raise ParameterError(f"geometric Beta integral defined for c in {{1, 2}}, got {c}")
    if a < 0 or b < 0 or int(a) != a or int(b) != b:
        raise ParameterError(f"exponents must be non-negative integers, got a={a}, b={b}")
    a, b = max(int(a), int(b)), min(int(a), int(b))
    d = a - b
    if c == 1:
        total = -math.fsum(_beta(a - i, b - i) for i in range(b))
        total += math.fsum(
            (-1.0) ** (i - 1) * (1.0 / (d - 3 * i + 2) + 1.0 / (d - 3 * i + 1))
            for i in range(1, d // 3 + 1))
        return total + _rho1(d)
    total = -math.fsum(0.5 ** i * _beta(a - i, b - i) for i in range(b))
    tail = math.fsum(
        (-0.25) ** (i - 1)
        * (1.0 / (d - 4 * i + 3) + 1.0 / (d - 4 * i + 2) + 0.5 / (d - 4 * i + 1))
        for i in range(1, d // 4 + 1))
    return total + 0.5 ** b * (tail + _rho2(d))


def geo_expectation(c: int, a: int, b: int) -> float:
    """J_c(a, b): the geometric Beta integral normalized by B(a, b)."""
    if a < 1 or b < 1 or int(a) != a or int(b) != b:
        raise ParameterError(f"J needs positive integer arguments, got a={a}, b={b}")
    return geo_integral_closed(c, a, b) / _beta(int(a), int(b))


# Short alias matching the usual notation.
J = geo_expectation


def _miss_rate_array(scheme: Scheme, p: np.ndarray) -> np.ndarray:
    q = p * (1.0 - p)
    if scheme is Scheme.ONE_BIT:
        return 2.0 * q
    if scheme is Scheme.TWO_BIT_SC:
        return q / (1.0 - 2.0 * q)
    return (2.0 * q * q + q) / (1.0 - q)


_gl_cache: dict = {}


def _gl_rule(n: int):
    if n not in _gl_cache:
        x, w = np.polynomial.legendre.leggauss(n)
        _gl_cache[n] = (0.5 * (x + 1.0), 0.5 * w)
    return _gl_cache[n]


def _g_quadrature(scheme: Scheme, x: int, y: int) -> float:
    """E[f(X)] for X ~ Beta(x, y) via Gauss-Legendre, stable for large x, y."""
    u, w = _gl_rule(_GL_NODES)
    log_norm = math.lgamma(x + y) - math.lgamma(x) - math.lgamma(y)
    log_density = (x - 1) * np.log(u) + (y - 1) * np.log1p(-u) + log_norm
    return float(np.sum(w * np.exp(log_density) * _miss_rate_array(scheme, u)))


def g(scheme: Scheme, x: int, y: int) -> float:
    """Expected steady-state miss rate over a Beta(x, y) branch probability."""
    if x < 1 or y < 1 or int(x) != x or int(y) != y:
        raise ParameterError(f"g needs positive integer arguments, got x={x}, y={y}")
    x, y = int(min(x, y)), int(max(x, y))  # symmetric; canonical order
    rising = (x + y) * (x + y + 1)
    if scheme is Scheme.ONE_BIT:
        return 2.0 * x * y / rising
    if scheme is Scheme.TWO_BIT_SC:
        if x + y > _CLOSED_LIMIT_C2:
            return _g_quadrature(scheme, x, y)
        return 0.5 * geo_expectation(2, x, y)
    if x + y > _CLOSED_LIMIT_C1:
        return _g_quadrature(scheme, x, y)
    return (2.0 * x * y / rising) * geo_expectation(1, x + 1, y + 1) \
        + geo_expectation(1, x, y)


@dataclass
class CoefficientReport:
    """Analytic leading-term description: expected BM ~ coefficient * n ln n."""

    algorithm: str
    scheme: Scheme
    params: tuple
    regime: str                     # "finite" (params = t) | "limit" (params = tau)
    a: float                        # per-step toll coefficient
    entropy: float
    coefficient: float              # a / entropy
    per_site: dict | None = field(default=None)


def a_cqs(scheme: Scheme, t) -> float:
    """Toll coefficient of classic Quicksort: g at the shifted sample split."""
    t = validate_sampling_param(t)
    if len(t) != 2:
        raise ParameterError(f"classic Quicksort needs a length-2 sampling parameter, got {t}")
    return g(scheme, t[0] + 1, t[1] + 1)


def yqs_site_terms(scheme: Scheme, t) -> dict:
    """Per-comparison-site contributions to the dual-pivot toll coefficient."""
    t = validate_sampling_param(t)
    if len(t) != 3:
        raise ParameterError(f"dual-pivot Quicksort needs a length-3 sampling parameter, got {t}")
    p1, p2, p3 = (x + 1 for x in t)
    kp = p1 + p2 + p3
    kp2 = kp * (kp + 1)
    y1 = (p1 * g(scheme, p1 + 1, p2 + p3) + p2 * g(scheme, p1, p2 + p3 + 1)) / kp
    y2 = (p1 * p2 * g(scheme, p2 + 1, p3)
          + p1 * p3 * g(scheme, p2, p3 + 1)
          + p2 * (p2 + 1) * g(scheme, p2 + 2, p3)
          + p2 * p3 * g(scheme, p2 + 1, p3 + 1)) / kp2
    y3 = p3 * g(scheme, p1 + p2, p3 + 1) / kp
    y4 = (p1 * p3 * g(scheme, p1 + 1, p2) + p2 * p3 * g(scheme, p1, p2 + 1)) / kp2
    return {SiteId.Y1: y1, SiteId.Y2: y2, SiteId.Y3: y3, SiteId.Y4: y4}


def a_yqs(scheme: Scheme, t) -> CoefficientReport:
    """Toll coefficient of dual-pivot Quicksort with per-site breakdown."""
    sites = yqs_site_terms(scheme, t)
    t = validate_sampling_param(t)
    a = math.fsum(sites.values())
    entropy = discrete_entropy(t)
    return CoefficientReport(algorithm=ALG_YQS, scheme=scheme, params=t,
                             regime="finite", a=a, entropy=entropy,
                             coefficient=a / entropy, per_site=sites)


def a_star_cqs(scheme: Scheme, tau) -> float:
    """Large-sample limit of the classic toll coefficient: f(tau_1)."""
    tau = validate_limit_ratios(tau)
    if len(tau) != 2:
        raise ParameterError(f"classic limit needs 2 ratios, got {tau}")
    return miss_rate(scheme, tau[0])


def a_star_yqs(scheme: Scheme, tau) -> float:
    """Large-sample limit of the dual-pivot toll coefficient.

    Sum over the four comparison sites of (execution share) * f(taken
    probability); the conditional sites use the ratio arguments
    tau_2/(tau_2+tau_3) and tau_1/(tau_1+tau_2), with 0/0 read as 0.
    """
    tau = validate_limit_ratios(tau)
    if len(tau) != 3:
        raise ParameterError(f"dual-pivot limit needs 3 ratios, got {tau}")
    t1, t2, t3 = tau
    r23 = t2 / (t2 + t3) if t2 + t3 > 0 else 0.0
    r12 = t1 / (t1 + t2) if t1 + t2 > 0 else 0.0
    return ((t1 + t2) * miss_rate(scheme, t2 + t3)
            + (t1 + t2) * (t2 + t3) * miss_rate(scheme, r23)
            + t3 * miss_rate(scheme, t1 + t2)
            + t3 * (t1 + t2) * miss_rate(scheme, r12))


def leading_coefficient(a: float, entropy: float) -> float:
    """Transfer a linear partitioning toll to the n ln n coefficient: a / H."""
    if entropy <= 0.0:
        raise DomainError(f"entropy must be positive, got {entropy}")
    return a / entropy


def coefficient_report(algorithm: str, scheme: Scheme, t) -> CoefficientReport:
    """Finite-sample analytic report for either algorithm."""
    algorithm = parse_algorithm(algorithm)
    if algorithm == ALG_CQS:
        t = validate_sampling_param(t, algorithm)
        a = a_cqs(scheme, t)
        entropy = discrete_entropy(t)
        return CoefficientReport(algorithm=algorithm, scheme=scheme, params=t,
                                 regime="finite", a=a, entropy=entropy,
                                 coefficient=leading_coefficient(a, entropy))
    return a_yqs(scheme, validate_sampling_param(t, algorithm))


def coefficient_report_limit(algorithm: str, scheme: Scheme, tau) -> CoefficientReport:
    """Large-sample-limit analytic report for either algorithm."""
    algorithm = parse_algorithm(algorithm)
    tau = validate_limit_ratios(tau)
    if algorithm == ALG_CQS:
        a = a_star_cqs(scheme, tau)
    else:
        a = a_star_yqs(scheme, tau)
    entropy = continuous_entropy(tau)
    return CoefficientReport(algorithm=algorithm, scheme=scheme, params=tau,
                             regime="limit", a=a, entropy=entropy,
                             coefficient=leading_coefficient(a, entropy))
