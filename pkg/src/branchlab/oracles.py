"""Independent numerical checks for the closed-form machinery.

Everything here deliberately avoids the closed forms it is used to verify:
steady-state miss rates are recomputed from the predictor automaton via its
Markov chain, the geometric Beta integrals via adaptive quadrature, and the
Beta/Dirichlet expectations via Monte Carlo over the order-statistics
(spacings) construction.
"""

from __future__ import annotations

import warnings

import numpy as np
from scipy.optimize import brentq

from .errors import BracketError, NumericError, ParameterError
from .predictors import Scheme, automaton_arrays, n_states


def quadrature(fn, lo: float = 0.0, hi: float = 1.0, tol: float = 1e-10,
               max_depth: int = 50) -> float:
    """Adaptive Simpson integral of ``fn`` over [lo, hi] to absolute ``tol``."""

    def simpson(a, fa, b, fb, m, fm):
        return (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    def recurse(a, fa, b, fb, m, fm, whole, eps, depth):
        lm = 0.5 * (a + m)
        rm = 0.5 * (m + b)
        flm = fn(lm)
        frm = fn(rm)
        left = simpson(a, fa, m, fm, lm, flm)
        right = simpson(m, fm, b, fb, rm, frm)
        delta = left + right - whole
        if abs(delta) <= 15.0 * eps:
            return left + right + delta / 15.0
        if depth >= max_depth:
            raise NumericError(f"quadrature did not converge within depth {max_depth}")
        half = 0.5 * eps
        return (recurse(a, fa, m, fm, lm, flm, left, half, depth + 1)
                + recurse(m, fm, b, fb, rm, frm, right, half, depth + 1))

    fa = fn(lo)
    fb = fn(hi)
    m = 0.5 * (lo + hi)
    fm = fn(m)
    whole = simpson(lo, fa, hi, fb, m, fm)
    return recurse(lo, fa, hi, fb, m, fm, whole, tol, 0)


def transition_matrix(scheme: Scheme, p: float) -> np.ndarray:
    """Row-stochastic Markov chain of the predictor automaton.

    Rows/columns follow the 1..n state numbering (0-based here); each state
    moves to its taken-successor with probability ``p`` and to its
    not-taken-successor with probability ``1 - p``.
    """
    if not 0.0 <= p <= 1.0:
        raise ParameterError(f"branch probability must be in [0,1], got {p}")
    trans, _pred = automaton_arrays(scheme)
    n = n_states(scheme)
    m = np.zeros((n, n))
    for s in range(n):
        m[s, trans[s, 1]] += p
        m[s, trans[s, 0]] += 1.0 - p
    return m


def stationary_distribution(m: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Stationary vector pi with pi M = pi and sum(pi) = 1.

    Solved as a least-squares linear system; this also covers the reducible
    chains at branch probability 0 or 1, whose single absorbing state still
    gives a unique stationary vector (the point mass on it).  If the solve
    does not verify, the chain is followed from a uniform start instead and
    the fallback is flagged with a warning.
    """
    m = np.asarray(m, dtype=float)
    n = m.shape[0]
    if m.shape != (n, n):
        raise ParameterError(f"transition matrix must be square, got {m.shape}")
    if np.any(m < -tol) or np.any(np.abs(m.sum(axis=1) - 1.0) > 1e-9):
        raise ParameterError("matrix is not row-stochastic")
    a = np.vstack([m.T - np.eye(n), np.ones(n)])
    b = np.zeros(n + 1)
    b[n] = 1.0
    pi, *_ = np.linalg.lstsq(a, b, rcond=None)
    if np.all(pi >= -1e-9) and np.max(np.abs(pi @ m - pi)) <= 1e-9:
        pi = np.clip(pi, 0.0, None)
        return pi / pi.sum()
    # Reducible / defective case: follow the chain to its limit.
    warnings.warn("reducible transition matrix; returning the limit reached "
                  "from a uniform start", RuntimeWarning, stacklevel=2)
    pi = np.full(n, 1.0 / n)
    for _ in range(100000):
        nxt = pi @ m
        if np.max(np.abs(nxt - pi)) < tol:
            return nxt
        pi = nxt
    raise NumericError("power iteration did not converge")


def steady_state_miss_rate_numeric(scheme: Scheme, p: float) -> float:
    """Miss rate from the stationary chain: sum_s pi_s * P[miss in s].

    Independent recomputation of the closed forms in
    :func:`branchlab.predictors.miss_rate`.
    """
    trans, pred = automaton_arrays(scheme)
    pi = stationary_distribution(transition_matrix(scheme, p))
    miss = np.where(pred == 1, 1.0 - p, p)
    return float(pi @ miss)


def _validate_alpha(alpha) -> tuple[int, ...]:
    alpha = tuple(alpha)
    if len(alpha) < 2:
        raise ParameterError(f"Dirichlet parameter needs at least 2 components, got {alpha}")
    for x in alpha:
        if int(x) != x or x < 1:
            raise ParameterError(f"Dirichlet components must be integers >= 1: {alpha}")
    return tuple(int(x) for x in alpha)


def dirichlet_sample(alpha, rng: np.random.Generator) -> np.ndarray:
    """One Dirichlet(alpha) draw via uniform order-statistic spacings.

    Draws k = sum(alpha) - 1 uniforms, sorts them, keeps the order statistics
    at the cumulative positions of ``alpha`` and returns the consecutive
    spacings (prepending 0 and appending 1).
    """
    return dirichlet_sample_many(alpha, 1, rng)[0]


def dirichlet_sample_many(alpha, count: int, rng: np.random.Generator) -> np.ndarray:
    """Vectorized spacings construction; returns an array of shape (count, d)."""
    alpha = _validate_alpha(alpha)
    k = sum(alpha) - 1
    cuts = np.cumsum(alpha[:-1]) - 1            # 0-based order-statistic indices
    u = np.sort(rng.random((count, k)), axis=1)
    w = np.empty((count, len(alpha) + 1))
    w[:, 0] = 0.0
    w[:, 1:-1] = u[:, cuts]
    w[:, -1] = 1.0
    return np.diff(w, axis=1)


def mc_expectation(alpha, fn, samples: int, seed: int) -> tuple[float, float]:
    """Monte Carlo (mean, standard error) of ``fn`` over Dirichlet(alpha).

    ``fn`` receives the full (samples, d) array and must return one value
    per row.
    """
    if samples < 1:
        raise ParameterError("samples must be >= 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    x = dirichlet_sample_many(alpha, samples, rng)
    values = np.asarray(fn(x), dtype=float)
    mean = float(values.mean())
    stderr = float(values.std(ddof=1) / np.sqrt(samples)) if samples > 1 else float("inf")
    return mean, stderr


def find_root(fn, lo: float, hi: float, tol: float = 1e-12) -> float:
    """Root of ``fn`` inside the bracket [lo, hi] (sign change required)."""
    flo = fn(lo)
    fhi = fn(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise BracketError(f"no sign change on [{lo}, {hi}]: f(lo)={flo}, f(hi)={fhi}")
    return float(brentq(fn, lo, hi, xtol=tol, rtol=8.881784197001252e-16))
