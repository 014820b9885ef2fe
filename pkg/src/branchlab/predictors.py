"""Finite-state branch predictors and their steady-state miss-rate functions.

Three local adaptive schemes are modeled:

* ``ONE_BIT``      -- repeats the last observed outcome (2 states).
* ``TWO_BIT_SC``   -- saturating counter: 4 states, moves one step toward the
  observed outcome and saturates at the ends.
* ``TWO_BIT_FC``   -- flip-on-consecutive: 4 states, flips its prediction only
  after two consecutive misses (the inner states jump straight across).

States are numbered 1..n_states.  States 1..n/2 predict "taken", the rest
predict "not taken"; for the 1-bit scheme state 1 means "last outcome was
taken".  Every scheme also has a closed-form steady-state miss rate f(p) for
a branch whose outcomes are i.i.d. taken with probability p; those closed
forms are cross-checked against the Markov-chain stationary distribution in
:mod:`branchlab.oracles`.
"""

from __future__ import annotations

import enum

import numpy as np

from .errors import DomainError, ParameterError

POLICY_PERSISTENT = "persistent"
POLICY_PER_PARTITION = "per-partition"
PREDICTOR_POLICIES = (POLICY_PERSISTENT, POLICY_PER_PARTITION)


class Scheme(enum.Enum):
    """Branch-prediction scheme identifier."""

    ONE_BIT = "1bit"
    TWO_BIT_SC = "2bit-sc"
    TWO_BIT_FC = "2bit-fc"

    @classmethod
    def parse(cls, name: str) -> "Scheme":
        for scheme in cls:
            if name in (scheme.value, scheme.name, scheme.name.lower()):
                return scheme
        raise ParameterError(f"unknown prediction scheme: {name!r}")


# state -> prediction (True = taken), 1-based states.
_PREDICTS = {
    Scheme.ONE_BIT: (True, False),
    Scheme.TWO_BIT_SC: (True, True, False, False),
    Scheme.TWO_BIT_FC: (True, True, False, False),
}

# state -> (next state if taken, next state if not taken), 1-based states.
_TRANSITIONS = {
    Scheme.ONE_BIT: ((1, 2), (1, 2)),
    Scheme.TWO_BIT_SC: ((1, 2), (1, 3), (2, 4), (3, 4)),
    Scheme.TWO_BIT_FC: ((1, 2), (1, 4), (1, 4), (3, 4)),
}

# Start in the weakest "not taken" state; the steady state does not depend on
# this, it only shifts O(1) transient misses.
DEFAULT_INITIAL_STATE = {
    Scheme.ONE_BIT: 2,
    Scheme.TWO_BIT_SC: 3,
    Scheme.TWO_BIT_FC: 3,
}


def n_states(scheme: Scheme) -> int:
    return len(_PREDICTS[scheme])


def _check_state(scheme: Scheme, state: int) -> None:
    if not 1 <= state <= n_states(scheme):
        raise ParameterError(f"state {state} out of range for {scheme.value}")


def predict(scheme: Scheme, state: int) -> bool:
    """Prediction made in ``state``: True = taken."""
    _check_state(scheme, state)
    return _PREDICTS[scheme][state - 1]


def update(scheme: Scheme, state: int, taken: bool) -> tuple[bool, int]:
    """Feed one outcome to the automaton.

    Returns ``(miss, new_state)`` where ``miss`` is True iff the prediction
    made in ``state`` disagreed with ``taken``.
    """
    _check_state(scheme, state)
    miss = _PREDICTS[scheme][state - 1] != bool(taken)
    new_state = _TRANSITIONS[scheme][state - 1][0 if taken else 1]
    return miss, new_state


def miss_rate(scheme: Scheme, p: float) -> float:
    """Steady-state miss rate f(p) of ``scheme`` on an i.i.d. branch.

    The branch is taken with probability ``p`` on every execution.  All three
    functions are symmetric around 1/2, where they peak at 1/2, and vanish at
    p = 0 and p = 1.
    """
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"branch probability must be in [0,1], got {p}")
    q = p * (1.0 - p)
    if scheme is Scheme.ONE_BIT:
        return 2.0 * q
    if scheme is Scheme.TWO_BIT_SC:
        return q / (1.0 - 2.0 * q)
    if scheme is Scheme.TWO_BIT_FC:
        return (2.0 * q * q + q) / (1.0 - q)
    raise ParameterError(f"unknown scheme {scheme!r}")


def automaton_arrays(scheme: Scheme) -> tuple[np.ndarray, np.ndarray]:
    """0-based transition/prediction tables as small integer arrays.

    ``trans[state, outcome]`` is the successor state (outcome 1 = taken) and
    ``pred[state]`` the prediction, both with states 0..n-1.  This is the
    representation consumed by the compiled simulation kernels.
    """
    trans = np.array(
        [[t_not - 1, t_taken - 1] for (t_taken, t_not) in _TRANSITIONS[scheme]],
        dtype=np.int8,
    )
    pred = np.array([1 if x else 0 for x in _PREDICTS[scheme]], dtype=np.int8)
    return trans, pred


def simulate_iid_stream(scheme: Scheme, p: float, count: int, seed: int) -> float:
    """Empirical miss rate of one predictor on ``count`` i.i.d. outcomes.

    Validation harness for :func:`miss_rate`: drives a single automaton
    through Bernoulli(p) outcomes drawn from a seeded generator and returns
    misses/count.
    """
    if count < 1:
        raise ParameterError("count must be >= 1")
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"branch probability must be in [0,1], got {p}")
    from ._kernels import iid_stream_misses

    rng = np.random.Generator(np.random.PCG64(seed))
    outcomes = (rng.random(count) < p).astype(np.int8)
    trans, pred = automaton_arrays(scheme)
    state0 = DEFAULT_INITIAL_STATE[scheme] - 1
    misses = iid_stream_misses(outcomes, trans, pred, state0)
    return misses / count


class PredictorTable:
    """One independent predictor state per branch-site key.

    The table doubles as a branch sink: calling it with ``(site, taken)``
    replays the outcome through the site's automaton and counts a miss when
    the prediction disagreed.  ``policy`` selects whether states persist for
    the whole sort (hardware-like, the default) or are reset at the start of
    every partitioning step.
    """

    def __init__(self, scheme: Scheme, policy: str = POLICY_PERSISTENT,
                 initial_state: int | None = None):
        if policy not in PREDICTOR_POLICIES:
            raise ParameterError(f"unknown predictor policy: {policy!r}")
        self.scheme = scheme
        self.policy = policy
        self.initial_state = (DEFAULT_INITIAL_STATE[scheme]
                              if initial_state is None else initial_state)
        _check_state(scheme, self.initial_state)
        self.states: dict = {}
        self.misses: dict = {}
        self.events: dict = {}

    def start_partition(self) -> None:
        """Partition-step boundary hook used by the sorting driver."""
        if self.policy == POLICY_PER_PARTITION:
            self.states.clear()

    def observe(self, site, taken: bool) -> bool:
        state = self.states.get(site, self.initial_state)
        miss, new_state = update(self.scheme, state, taken)
        self.states[site] = new_state
        self.events[site] = self.events.get(site, 0) + 1
        if miss:
            self.misses[site] = self.misses.get(site, 0) + 1
        return miss

    __call__ = observe

    def total_misses(self) -> int:
        return sum(self.misses.values())
