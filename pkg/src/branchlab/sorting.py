"""Generalized classic and dual-pivot Quicksort with branch instrumentation.

Both sorts take a pivot-sampling parameter ``t``: a vector of non-negative
integers of length 2 (classic, one pivot) or 3 (Yaroslavskiy dual-pivot).
The sample size is ``k = sum(t) + len(t) - 1`` and the pivots are the order
statistics that split the sorted sample into regions of sizes ``t[0]``,
``t[1]`` (and ``t[2]``).  ``t = (0, 0)`` is plain Quicksort without sampling.

Every key comparison in the partitioning loops belongs to one of six fixed
comparison sites (C1/C2 for classic, Y1..Y4 for dual-pivot).  A sort can be
given a *branch sink*, a callable receiving ``(site, taken)`` for every such
comparison in execution order.  The taken-direction convention per site is
fixed so that the empirical taken frequency matches the per-site branch
probabilities used by the analytical model:

    site  comparison        emitted as taken iff     taken probability
    C1    A[k] < P          A[k] < P                 D1
    C2    A[g] > P          A[g] > P                 D2
    Y1    A[k] < P          A[k] >= P  (non-small)   D2 + D3
    Y2    A[k] >= Q         A[k] < Q   (medium)      D2 / (D2 + D3)
    Y3    A[g] > Q          A[g] <= Q  (non-large)   D1 + D2
    Y4    A[g] >= P         A[g] < P   (small)       D1 / (D1 + D2)

where (D1, D2[, D3]) are the unit-interval spacings cut by the pivot values.
Comparisons made while sorting the sample and inside Insertionsort are not
emitted; they contribute O(1) per partitioning step.

Sorting is deterministic: the sample is taken from the first k positions of
the current segment, and subsegments are processed smallest-first (ties left
to right), so identical input and parameters replay an identical event
stream.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .errors import ParameterError

ALG_CQS = "cqs"
ALG_YQS = "yqs"
_ALG_ALIASES = {
    "cqs": ALG_CQS, "classic": ALG_CQS,
    "yqs": ALG_YQS, "yaroslavskiy": ALG_YQS, "dual-pivot": ALG_YQS,
}

DEFAULT_CUTOFF = 16


class SiteId(enum.Enum):
    """Key-comparison branch sites in the partitioning loops."""

    C1 = "c1"
    C2 = "c2"
    Y1 = "y1"
    Y2 = "y2"
    Y3 = "y3"
    Y4 = "y4"


CLASSIC_SITES = (SiteId.C1, SiteId.C2)
YAROSLAVSKIY_SITES = (SiteId.Y1, SiteId.Y2, SiteId.Y3, SiteId.Y4)


def parse_algorithm(name: str) -> str:
    try:
        return _ALG_ALIASES[name.lower()]
    except KeyError:
        raise ParameterError(f"unknown algorithm: {name!r}") from None


def algorithm_sites(algorithm: str) -> tuple[SiteId, ...]:
    return CLASSIC_SITES if parse_algorithm(algorithm) == ALG_CQS else YAROSLAVSKIY_SITES


def validate_sampling_param(t, algorithm: str | None = None) -> tuple[int, ...]:
    """Check a pivot-sampling vector and return it as a tuple."""
    t = tuple(t)
    if len(t) not in (2, 3):
        raise ParameterError(f"sampling parameter must have 2 or 3 components, got {len(t)}")
    for x in t:
        if int(x) != x or x < 0:
            raise ParameterError(f"sampling parameter components must be non-negative integers: {t}")
    t = tuple(int(x) for x in t)
    if algorithm is not None:
        want = 2 if parse_algorithm(algorithm) == ALG_CQS else 3
        if len(t) != want:
            raise ParameterError(
                f"algorithm {algorithm!r} needs a length-{want} sampling parameter, got {t}")
    return t


def sample_size(t) -> int:
    """Sample size k(t) = t_1 + ... + t_s + (s - 1)."""
    t = validate_sampling_param(t)
    return sum(t) + len(t) - 1


def default_cutoff(t) -> int:
    """Default Insertionsort threshold: max(k, 16)."""
    return max(sample_size(t), DEFAULT_CUTOFF)


@dataclass
class SortStats:
    """Counters collected by one sort invocation."""

    algorithm: str
    comparisons: dict = field(default_factory=dict)   # SiteId -> executions
    taken: dict = field(default_factory=dict)         # SiteId -> taken outcomes
    swaps: int = 0
    partition_calls: int = 0
    insertion_sort_calls: int = 0

    def total_comparisons(self) -> int:
        return sum(self.comparisons.values())


def insertion_sort(a, lo: int = 0, hi: int | None = None) -> None:
    """Sort ``a[lo..hi]`` (inclusive bounds) in place; empty segments are a no-op."""
    if hi is None:
        hi = len(a) - 1
    if lo < 0 or hi >= len(a):
        raise ParameterError(f"segment [{lo},{hi}] out of bounds for length {len(a)}")
    for i in range(lo + 1, hi + 1):
        v = a[i]
        j = i
        while j > lo and v < a[j - 1]:
            a[j] = a[j - 1]
            j -= 1
        a[j] = v


def select_pivots(sample, t):
    """Pick the pivot order statistics from a full sample.

    For ``len(t) == 2`` returns the (t1+1)-st smallest value; for
    ``len(t) == 3`` returns the pair ``(P, Q)`` with P <= Q.
    """
    t = validate_sampling_param(t)
    k = sum(t) + len(t) - 1
    if len(sample) != k:
        raise ParameterError(f"sample length {len(sample)} != k(t) = {k}")
    ordered = sorted(sample)
    if len(t) == 2:
        return ordered[t[0]]
    return ordered[t[0]], ordered[t[0] + t[1] + 1]


def _resolve_emit(sink):
    if sink is None:
        return None
    if callable(sink):
        return sink
    emit = getattr(sink, "emit", None)
    if emit is None:
        raise ParameterError("sink must be callable or expose an emit(site, taken) method")
    return emit


def _check_bounds(a, left: int, right: int) -> None:
    if left > right + 1 or left < 0 or right >= len(a):
        raise ParameterError(f"invalid partition bounds [{left},{right}] for length {len(a)}")


def partition_classic(a, left: int, right: int, p, sink=None) -> int:
    """Crossing-pointer partition of ``a[left..right]`` around the value ``p``.

    Returns the split index ``i_p``: afterwards ``a[left..i_p-1] <= p`` and
    ``a[i_p..right] >= p``.  The segment must not contain the pivot slot
    itself; conceptual sentinels at ``left-1`` (smaller than all keys) and
    ``right+1`` stop the scans without emitting events.
    """
    _check_bounds(a, left, right)
    ip, _swaps = _partition_classic_impl(a, left, right, p, _resolve_emit(sink))
    return ip


def _partition_classic_impl(a, left, right, p, emit):
    k = left - 1
    g = right + 1
    swaps = 0
    while True:
        while True:
            k += 1
            if k > right:
                break
            taken = a[k] < p
            if emit is not None:
                emit(SiteId.C1, taken)
            if not taken:
                break
        while True:
            g -= 1
            if g < left:
                break
            taken = a[g] > p
            if emit is not None:
                emit(SiteId.C2, taken)
            if not taken:
                break
        if g > k:
            a[k], a[g] = a[g], a[k]
            swaps += 1
        else:
            return k, swaps


def partition_yaroslavskiy(a, left: int, right: int, p, q, sink=None) -> tuple[int, int]:
    """Dual-pivot partition of ``a[left..right]`` around values ``p <= q``.

    Returns ``(i_p, i_q)``: afterwards ``a[left..i_p] < p``,
    ``p <= a[i_p+1..i_q-1] <= q`` and ``a[i_q..right] >= q``.
    """
    _check_bounds(a, left, right)
    if p > q:
        raise ParameterError(f"pivots out of order: p={p} > q={q}")
    ip, iq, _swaps = _partition_yaroslavskiy_impl(a, left, right, p, q, _resolve_emit(sink))
    return ip, iq


def _partition_yaroslavskiy_impl(a, left, right, p, q, emit):
    l = left
    g = right
    k = left
    swaps = 0
    while k <= g:
        v = a[k]
        small = v < p
        if emit is not None:
            emit(SiteId.Y1, not small)
        if small:
            a[k], a[l] = a[l], a[k]
            swaps += 1
            l += 1
        else:
            large = v >= q
            if emit is not None:
                emit(SiteId.Y2, not large)
            if large:
                while True:
                    gl = a[g] > q
                    if emit is not None:
                        emit(SiteId.Y3, not gl)
                    if gl and k < g:
                        g -= 1
                    else:
                        break
                gsmall = a[g] < p
                if emit is not None:
                    emit(SiteId.Y4, gsmall)
                if gsmall:
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


def _reverse(a, i, j):
    while i < j:
        a[i], a[j] = a[j], a[i]
        i += 1
        j -= 1


def _rotate_left(a, lo, hi, shift):
    """Rotate ``a[lo..hi]`` left by ``shift`` positions (inclusive bounds)."""
    n = hi - lo + 1
    if n <= 1:
        return
    shift %= n
    if shift == 0:
        return
    _reverse(a, lo, lo + shift - 1)
    _reverse(a, lo + shift, hi)
    _reverse(a, lo, hi)


class _Recorder:
    """Counts per-site executions/taken and forwards events to the user sink."""

    __slots__ = ("comparisons", "taken", "emit")

    def __init__(self, stats: SortStats, emit):
        self.comparisons = stats.comparisons
        self.taken = stats.taken
        self.emit = emit

    def __call__(self, site, taken):
        self.comparisons[site] = self.comparisons.get(site, 0) + 1
        if taken:
            self.taken[site] = self.taken.get(site, 0) + 1
        if self.emit is not None:
            self.emit(site, taken)


def quicksort_generalized(a, t, w: int | None = None, algorithm: str | None = None,
                          sink=None) -> SortStats:
    """Sort ``a`` in place with generalized pivot sampling; returns counters.

    ``t`` selects classic (length 2) or dual-pivot (length 3) partitioning;
    ``algorithm``, when given, must agree with ``len(t)``.  Segments of at
    most ``w`` elements (default ``max(k, 16)``, at least k) are finished by
    Insertionsort.  In every partitioning step the sample occupies the first
    k slots of the segment, is sorted without emitting events, and its
    non-pivot elements are placed into their partitions before recursing.
    """
    t = validate_sampling_param(t, algorithm)
    alg = ALG_CQS if len(t) == 2 else ALG_YQS
    k = sum(t) + len(t) - 1
    if w is None:
        w = max(k, DEFAULT_CUTOFF)
    if w < k:
        raise ParameterError(f"cutoff w={w} must be at least the sample size k={k}")

    stats = SortStats(algorithm=alg)
    for site in (CLASSIC_SITES if alg == ALG_CQS else YAROSLAVSKIY_SITES):
        stats.comparisons[site] = 0
        stats.taken[site] = 0
    record = _Recorder(stats, _resolve_emit(sink))
    boundary = getattr(sink, "start_partition", None)

    if len(a) == 0:
        return stats
    stack = [(0, len(a) - 1)]
    while stack:
        lo, hi = stack.pop()
        n = hi - lo + 1
        if n <= w:
            insertion_sort(a, lo, hi)
            stats.insertion_sort_calls += 1
            continue
        stats.partition_calls += 1
        if boundary is not None:
            boundary()
        insertion_sort(a, lo, lo + k - 1)
        if alg == ALG_CQS:
            t1, t2 = t
            p = a[lo + t1]
            ip, swaps = _partition_classic_impl(a, lo + k, hi, p, record)
            stats.swaps += swaps
            # [P, sample-larges, ordinary-smalls] -> [ordinary-smalls, P, sample-larges]
            _rotate_left(a, lo + t1, ip - 1, t2 + 1)
            j = ip - t2 - 1
            children = [(lo, j - 1), (j + 1, hi)]
        else:
            t1, t2, t3 = t
            p = a[lo + t1]
            q = a[lo + t1 + t2 + 1]
            ip, iq, swaps = _partition_yaroslavskiy_impl(a, lo + k, hi, p, q, record)
            stats.swaps += swaps
            m_small = ip - (lo + k) + 1
            m_medium = iq - 1 - ip
            # [P, sample-mediums, Q, sample-larges, ordinary-smalls] -> smalls first
            _rotate_left(a, lo + t1, ip, k - t1)
            j1 = lo + t1 + m_small
            # [Q, sample-larges, ordinary-mediums] -> mediums first
            _rotate_left(a, j1 + t2 + 1, j1 + t2 + 1 + t3 + m_medium, t3 + 1)
            j2 = j1 + t2 + m_medium + 1
            children = [(lo, j1 - 1), (j1 + 1, j2 - 1), (j2 + 1, hi)]
        # Process the smallest child first (ties left to right): bounds the
        # pending-segment stack by O(log n) and fixes the replay order.
        children = [c for c in children if c[1] >= c[0]]
        children.sort(key=lambda c: c[1] - c[0])
        for c in reversed(children):
            stack.append(c)
    return stats
