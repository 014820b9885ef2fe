"""Compiled (numba) twins of the instrumented sorts for large simulations.

These kernels replay exactly the same comparison/event stream as the pure
Python implementations in :mod:`branchlab.sorting`: same sample handling,
same taken-direction conventions, same smallest-child-first processing
order.  The test suite asserts counter-for-counter equality between the two
paths on shared inputs; keep them in lockstep when changing either side.

Sites are indexed 0..1 (C1, C2) for classic and 0..3 (Y1..Y4) for the
dual-pivot sort.  Predictor automata arrive as small integer tables
(``trans[state, outcome] -> state``, ``pred[state] -> 0/1``, 0-based states)
produced by :func:`branchlab.predictors.automaton_arrays`.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_MAX_STACK = 192


@njit(cache=True, nogil=True)
def iid_stream_misses(outcomes, trans, pred, state0):
    """Misses of one predictor automaton over a 0/1 outcome array."""
    state = state0
    misses = 0
    for i in range(outcomes.size):
        out = outcomes[i]
        if pred[state] != out:
            misses += 1
        state = trans[state, out]
    return misses


@njit(cache=True, nogil=True)
def _insertion(a, lo, hi):
    for i in range(lo + 1, hi + 1):
        v = a[i]
        j = i
        while j > lo and v < a[j - 1]:
            a[j] = a[j - 1]
            j -= 1
        a[j] = v


@njit(cache=True, nogil=True)
def _rotate_left(a, lo, hi, shift):
    n = hi - lo + 1
    if n <= 1:
        return
    shift = shift % n
    if shift == 0:
        return
    i = lo
    j = lo + shift - 1
    while i < j:
        a[i], a[j] = a[j], a[i]
        i += 1
        j -= 1
    i = lo + shift
    j = hi
    while i < j:
        a[i], a[j] = a[j], a[i]
        i += 1
        j -= 1
    i = lo
    j = hi
    while i < j:
        a[i], a[j] = a[j], a[i]
        i += 1
        j -= 1


@njit(cache=True, nogil=True)
def partition_classic_k(a, left, right, p, states, trans, pred, execs, taken, misses):
    """Crossing-pointer partition; emits events at sites 0 (C1) and 1 (C2)."""
    k = left - 1
    g = right + 1
    swaps = 0
    while True:
        while True:
            k += 1
            if k > right:
                break
            out = 1 if a[k] < p else 0
            s = states[0]
            if pred[s] != out:
                misses[0] += 1
            states[0] = trans[s, out]
            execs[0] += 1
            taken[0] += out
            if out == 0:
                break
        while True:
            g -= 1
            if g < left:
                break
            out = 1 if a[g] > p else 0
            s = states[1]
            if pred[s] != out:
                misses[1] += 1
            states[1] = trans[s, out]
            execs[1] += 1
            taken[1] += out
            if out == 0:
                break
        if g > k:
            a[k], a[g] = a[g], a[k]
            swaps += 1
        else:
            return k, swaps


@njit(cache=True, nogil=True)
def partition_yaroslavskiy_k(a, left, right, p, q, states, trans, pred,
                             execs, taken, misses):
    """Dual-pivot partition; emits events at sites 0..3 (Y1..Y4)."""
    l = left
    g = right
    k = left
    swaps = 0
    while k <= g:
        v = a[k]
        out = 0 if v < p else 1          # Y1 taken = non-small
        s = states[0]
        if pred[s] != out:
            misses[0] += 1
        states[0] = trans[s, out]
        execs[0] += 1
        taken[0] += out
        if v < p:
            a[k], a[l] = a[l], a[k]
            swaps += 1
            l += 1
        else:
            out = 0 if v >= q else 1     # Y2 taken = medium
            s = states[1]
            if pred[s] != out:
                misses[1] += 1
            states[1] = trans[s, out]
            execs[1] += 1
            taken[1] += out
            if v >= q:
                while True:
                    gl = a[g] > q
                    out = 0 if gl else 1  # Y3 taken = non-large
                    s = states[2]
                    if pred[s] != out:
                        misses[2] += 1
                    states[2] = trans[s, out]
                    execs[2] += 1
                    taken[2] += out
                    if gl and k < g:
                        g -= 1
                    else:
                        break
                out = 1 if a[g] < p else 0  # Y4 taken = small
                s = states[3]
                if pred[s] != out:
                    misses[3] += 1
                states[3] = trans[s, out]
                execs[3] += 1
                taken[3] += out
                if a[g] < p:
                    a[k], a[g] = a[g], a[k]
                    a[k], a[l] = a[l], a[k]
                    swaps += 2
                    l += 1
                else:
                    a[k], a[g] = a[g], a[k]
                    swaps += 1
                g -= 1
        k += 1
    return l - 1, g + 1, swaps


@njit(cache=True, nogil=True)
def sort_classic_k(a, t1, t2, w, trans, pred, init_state, reset_per_partition,
                   execs, taken, misses, counters):
    """Full generalized classic Quicksort; counters = [swaps, partitions, insertions]."""
    n = a.size
    states = np.empty(2, np.int64)
    states[0] = init_state
    states[1] = init_state
    if n == 0:
        return
    kk = t1 + t2 + 1
    lo_st = np.empty(_MAX_STACK, np.int64)
    hi_st = np.empty(_MAX_STACK, np.int64)
    sp = 0
    lo_st[sp] = 0
    hi_st[sp] = n - 1
    sp += 1
    while sp > 0:
        sp -= 1
        lo = lo_st[sp]
        hi = hi_st[sp]
        if hi - lo + 1 <= w:
            _insertion(a, lo, hi)
            counters[2] += 1
            continue
        counters[1] += 1
        if reset_per_partition:
            states[0] = init_state
            states[1] = init_state
        _insertion(a, lo, lo + kk - 1)
        p = a[lo + t1]
        ip, swaps = partition_classic_k(a, lo + kk, hi, p, states, trans, pred,
                                        execs, taken, misses)
        counters[0] += swaps
        _rotate_left(a, lo + t1, ip - 1, t2 + 1)
        j = ip - t2 - 1
        s0 = j - lo
        s1 = hi - j
        if s0 <= s1:
            if s1 > 0:
                lo_st[sp] = j + 1
                hi_st[sp] = hi
                sp += 1
            if s0 > 0:
                lo_st[sp] = lo
                hi_st[sp] = j - 1
                sp += 1
        else:
            if s0 > 0:
                lo_st[sp] = lo
                hi_st[sp] = j - 1
                sp += 1
            if s1 > 0:
                lo_st[sp] = j + 1
                hi_st[sp] = hi
                sp += 1


@njit(cache=True, nogil=True)
def sort_yaroslavskiy_k(a, t1, t2, t3, w, trans, pred, init_state, reset_per_partition,
                        execs, taken, misses, counters):
    """Full generalized dual-pivot Quicksort; counters = [swaps, partitions, insertions]."""
    n = a.size
    states = np.empty(4, np.int64)
    for i in range(4):
        states[i] = init_state
    if n == 0:
        return
    kk = t1 + t2 + t3 + 2
    lo_st = np.empty(_MAX_STACK, np.int64)
    hi_st = np.empty(_MAX_STACK, np.int64)
    clo = np.empty(3, np.int64)
    chi = np.empty(3, np.int64)
    sz = np.empty(3, np.int64)
    order = np.empty(3, np.int64)
    sp = 0
    lo_st[sp] = 0
    hi_st[sp] = n - 1
    sp += 1
    while sp > 0:
        sp -= 1
        lo = lo_st[sp]
        hi = hi_st[sp]
        if hi - lo + 1 <= w:
            _insertion(a, lo, hi)
            counters[2] += 1
            continue
        counters[1] += 1
        if reset_per_partition:
            for i in range(4):
                states[i] = init_state
        _insertion(a, lo, lo + kk - 1)
        p = a[lo + t1]
        q = a[lo + t1 + t2 + 1]
        ip, iq, swaps = partition_yaroslavskiy_k(a, lo + kk, hi, p, q, states,
                                                 trans, pred, execs, taken, misses)
        counters[0] += swaps
        m_small = ip - (lo + kk) + 1
        m_medium = iq - 1 - ip
        _rotate_left(a, lo + t1, ip, kk - t1)
        j1 = lo + t1 + m_small
        _rotate_left(a, j1 + t2 + 1, j1 + t2 + 1 + t3 + m_medium, t3 + 1)
        j2 = j1 + t2 + m_medium + 1
        clo[0] = lo
        chi[0] = j1 - 1
        clo[1] = j1 + 1
        chi[1] = j2 - 1
        clo[2] = j2 + 1
        chi[2] = hi
        for i in range(3):
            sz[i] = chi[i] - clo[i] + 1
            order[i] = i
        # stable ascending sort of the three children by size
        if sz[order[1]] < sz[order[0]]:
            order[0], order[1] = order[1], order[0]
        if sz[order[2]] < sz[order[1]]:
            order[1], order[2] = order[2], order[1]
            if sz[order[1]] < sz[order[0]]:
                order[0], order[1] = order[1], order[0]
        for i in range(2, -1, -1):
            c = order[i]
            if sz[c] > 0:
                lo_st[sp] = clo[c]
                hi_st[sp] = chi[c]
                sp += 1
