"""Half-open interval lists on [0, 1] with exact rational endpoints.

A list is a tuple of (lo, hi) pairs with lo < hi, sorted, pairwise
disjoint, and with touching intervals merged. Boolean operations run an
endpoint sweep, so every result is again canonical and exact.
"""

from __future__ import annotations

from fractions import Fraction

ZERO = Fraction(0)
ONE = Fraction(1)

IntervalList = tuple[tuple[Fraction, Fraction], ...]


def canonical(pairs) -> IntervalList:
    """Sort, drop empty pairs, and merge overlapping or touching intervals."""
    items = sorted((a, b) for a, b in pairs if a < b)
    out: list[list[Fraction]] = []
    for lo, hi in items:
        if out and lo <= out[-1][1]:
            if hi > out[-1][1]:
                out[-1][1] = hi
        else:
            out.append([lo, hi])
    return tuple((lo, hi) for lo, hi in out)


def contains(intervals: IntervalList, x) -> bool:
    """Point membership under the half-open convention."""
    for lo, hi in intervals:
        if x < lo:
            return False
        if x < hi:
            return True
    return False


def sweep(a: IntervalList, b: IntervalList, keep) -> IntervalList:
    """Combine two canonical lists; keep(in_a, in_b) decides per segment.

    A single endpoint walk: each endpoint toggles membership in its own
    list, and the segment up to the next endpoint is kept or dropped.
    """
    events = []
    for lo, hi in a:
        events.append((lo, 0, 1))
        events.append((hi, 0, -1))
    for lo, hi in b:
        events.append((lo, 1, 1))
        events.append((hi, 1, -1))
    events.sort()
    kept: list[tuple[Fraction, Fraction]] = []
    in_a = in_b = 0
    prev = None
    for x, which, delta in events:
        if prev is not None and x != prev and keep(in_a, in_b):
            # output arrives sorted and disjoint; merge touching segments
            if kept and kept[-1][1] == prev:
                kept[-1] = (kept[-1][0], x)
            else:
                kept.append((prev, x))
        if which:
            in_b += delta
        else:
            in_a += delta
        prev = x
    return tuple(kept)


def union(a: IntervalList, b: IntervalList) -> IntervalList:
    return sweep(a, b, lambda x, y: x or y)


def intersect(a: IntervalList, b: IntervalList) -> IntervalList:
    return sweep(a, b, lambda x, y: x and y)


def difference(a: IntervalList, b: IntervalList) -> IntervalList:
    return sweep(a, b, lambda x, y: x and not y)


def is_subset(a: IntervalList, b: IntervalList) -> bool:
    """Each interval of a must sit inside a single interval of b."""
    i = 0
    n = len(b)
    for lo, hi in a:
        while i < n and b[i][1] <= lo:
            i += 1
        if i == n or b[i][0] > lo or b[i][1] < hi:
            return False
    return True


def total_length(intervals: IntervalList) -> Fraction:
    return sum((hi - lo for lo, hi in intervals), ZERO)


def clip(intervals: IntervalList, lo, hi) -> IntervalList:
    """Restrict to [lo, hi)."""
    if lo >= hi:
        return ()
    return intersect(intervals, ((lo, hi),))
