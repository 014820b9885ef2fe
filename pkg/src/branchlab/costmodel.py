"""Combined instruction + branch-miss cost model for classic Quicksort.

Cost per element is modeled as Q = BC + xi * BM where BC is the bytecode
count of the partitioning loop and xi the machine-dependent price of one
branch miss in bytecode units.  ``q_finite``/``q_limit`` give the n ln n
coefficient of E[Q]; ``tau_star`` the cost-optimal pivot skew in the
large-sample limit; ``xi_critical`` the threshold above which the median
stops being optimal.  No bytecode model is available for the dual-pivot
sort, so optimization there is branch-miss-only (see the CLI ``opt-t``
command).
"""

from __future__ import annotations

import math

import numpy as np

from .analysis import a_cqs, continuous_entropy, discrete_entropy, validate_limit_ratios
from .errors import DomainError, ParameterError
from .oracles import find_root
from .predictors import Scheme, miss_rate
from .sorting import validate_sampling_param

_LN2 = math.log(2.0)

# tau grid used to bracket the interior minimum of q_xi.
_TAU_GRID = np.linspace(1e-4, 0.5 - 1e-6, 4096)
_DERIV_STEP = 1e-6


def bytecode_coefficient_cqs(t) -> float:
    """Linear-term coefficient of expected bytecodes per partitioning step."""
    t = validate_sampling_param(t)
    if len(t) != 2:
        raise ParameterError(f"bytecode model covers classic Quicksort only, got t={t}")
    k = t[0] + t[1] + 1
    return 6.0 + 18.0 * (t[0] + 1) * (t[1] + 1) / ((k + 1) * (k + 2))


def bytecode_coefficient_cqs_limit(tau) -> float:
    """Large-sample limit of the bytecode coefficient: 6 + 18 tau_1 tau_2."""
    tau = validate_limit_ratios(tau)
    if len(tau) != 2:
        raise ParameterError(f"bytecode model covers classic Quicksort only, got tau={tau}")
    return 6.0 + 18.0 * tau[0] * tau[1]


def q_finite(xi: float, scheme: Scheme, t) -> float:
    """n ln n coefficient of combined cost for finite sampling parameter t."""
    if xi < 0:
        raise ParameterError(f"xi must be non-negative, got {xi}")
    return (bytecode_coefficient_cqs(t) + xi * a_cqs(scheme, t)) / discrete_entropy(t)


def q_limit(xi: float, scheme: Scheme, tau) -> float:
    """n ln n coefficient of combined cost in the large-sample limit."""
    if xi < 0:
        raise ParameterError(f"xi must be non-negative, got {xi}")
    tau = validate_limit_ratios(tau)
    if len(tau) != 2:
        raise ParameterError(f"q_limit covers classic Quicksort only, got tau={tau}")
    entropy = continuous_entropy(tau)
    if entropy <= 0.0:
        raise DomainError(f"degenerate split ratios {tau}: entropy is zero")
    return (6.0 + 18.0 * tau[0] * tau[1] + xi * miss_rate(scheme, tau[0])) / entropy


def _q_of_tau(xi: float, scheme: Scheme, tau1):
    """Vector-friendly q_xi((tau, 1 - tau)) without per-point validation."""
    tau1 = np.asarray(tau1, dtype=float)
    q = tau1 * (1.0 - tau1)
    if scheme is Scheme.ONE_BIT:
        f = 2.0 * q
    elif scheme is Scheme.TWO_BIT_SC:
        f = q / (1.0 - 2.0 * q)
    else:
        f = (2.0 * q * q + q) / (1.0 - q)
    entropy = -(tau1 * np.log(tau1) + (1.0 - tau1) * np.log1p(-tau1))
    return (6.0 + 18.0 * q + xi * f) / entropy


def xi_critical(scheme: Scheme) -> float:
    """Closed-form threshold where tau = 1/2 stops being a local minimum."""
    num = 7.0 - 6.0 * _LN2
    if scheme is Scheme.ONE_BIT:
        return 3.0 * num / (2.0 * _LN2 - 1.0)
    if scheme is Scheme.TWO_BIT_SC:
        return 3.0 * num / (4.0 * _LN2 - 1.0)
    return 9.0 * num / (10.0 * _LN2 - 3.0)


def _second_derivative_at_half(xi: float, scheme: Scheme, h: float = 1e-3) -> float:
    # 5-point stencil: accurate enough to pin the root to well below 1e-6.
    pts = np.array([0.5 - 2 * h, 0.5 - h, 0.5, 0.5 + h, 0.5 + 2 * h])
    fv = _q_of_tau(xi, scheme, pts)
    return float((-fv[0] + 16 * fv[1] - 30 * fv[2] + 16 * fv[3] - fv[4]) / (12 * h * h))


def xi_critical_numeric(scheme: Scheme) -> float:
    """Threshold recomputed as the root of the numeric second derivative."""
    return find_root(lambda xi: _second_derivative_at_half(xi, scheme), 0.0, 200.0,
                     tol=1e-10)


def tau_star(xi: float, scheme: Scheme) -> float:
    """Cost-optimal pivot skew tau*(xi), reported as the solution <= 1/2.

    Equals 1/2 up to the critical threshold; beyond it, the interior
    stationary point of q_xi((tau, 1 - tau)) is located by a coarse grid
    scan plus root refinement of the central-difference derivative.
    """
    if xi < 0:
        raise ParameterError(f"xi must be non-negative, got {xi}")
    if xi <= xi_critical(scheme):
        return 0.5

    def dq(tau1: float) -> float:
        h = _DERIV_STEP
        lo, hi = tau1 - h, tau1 + h
        return float(_q_of_tau(xi, scheme, hi) - _q_of_tau(xi, scheme, lo)) / (2 * h)

    values = _q_of_tau(xi, scheme, _TAU_GRID)
    m = int(np.argmin(values))
    lo = _TAU_GRID[max(m - 1, 0)]
    hi = _TAU_GRID[min(m + 1, len(_TAU_GRID) - 1)]
    if m == len(_TAU_GRID) - 1:
        hi = 0.5 - 1e-7
    return find_root(dq, float(lo), float(hi), tol=1e-8)


def t_star_finite(xi: float, scheme: Scheme, k: int) -> tuple[int, int]:
    """Best finite sampling parameter (t1, k-1-t1) for sample size k.

    Ties are broken toward the more balanced split, then toward smaller t1;
    mirrored parameters have exactly equal cost, so the canonical
    representative is deterministic.
    """
    if k < 1 or int(k) != k:
        raise ParameterError(f"sample size must be a positive integer, got {k}")
    if xi < 0:
        raise ParameterError(f"xi must be non-negative, got {xi}")
    best = None
    best_key = None
    for t1 in range(k):
        t = (t1, k - 1 - t1)
        key = (q_finite(xi, scheme, t), abs(t[0] - t[1]), t1)
        if best_key is None or key < best_key:
            best, best_key = t, key
    return best
