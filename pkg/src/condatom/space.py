"""Exact fibered model of a probability space with a conditioning algebra.

A FiberedSpace is a finite list of weighted fibers. Conditioning on the
fiber index plays the role of the coarse algebra, and each fiber carries
its own probability measure on [0, 1] made of point masses plus a
piecewise-constant density. Events are per-fiber interval lists together
with explicit atom picks. All masses are Fractions and every operation
is exact; nothing in this package rounds.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from .intervals import (
    ONE,
    ZERO,
    IntervalList,
    canonical,
    difference,
    intersect,
    is_subset,
    union,
)

FiberFunction = tuple[Fraction, ...]


class InvariantError(ValueError):
    """A structural invariant does not hold; the message names it."""


class MismatchError(ValueError):
    """Operands belong to structurally different spaces or grids."""


def as_fraction(value) -> Fraction:
    """Coerce to Fraction, refusing floats so exactness cannot leak away."""
    if isinstance(value, float):
        raise InvariantError(f"floating point value {value!r} is not exact")
    return Fraction(value)


@dataclass(frozen=True)
class FiberMeasure:
    """A probability measure on [0, 1]: point masses plus a step density.

    atoms are (location, weight) pairs with strictly increasing
    locations; densities[j] is the constant density on
    [breakpoints[j], breakpoints[j+1]). Atom weights plus the density
    integral must sum to exactly 1.
    """

    atoms: tuple[tuple[Fraction, Fraction], ...] = ()
    breakpoints: tuple[Fraction, ...] = (ZERO, ONE)
    densities: tuple[Fraction, ...] = (ONE,)

    def __post_init__(self):
        object.__setattr__(
            self, "atoms", tuple((as_fraction(l), as_fraction(w)) for l, w in self.atoms)
        )
        object.__setattr__(self, "breakpoints", tuple(as_fraction(x) for x in self.breakpoints))
        object.__setattr__(self, "densities", tuple(as_fraction(d) for d in self.densities))
        bps = self.breakpoints
        if len(bps) < 2 or bps[0] != 0 or bps[-1] != 1:
            raise InvariantError("breakpoints must run from 0 to 1")
        if any(a >= b for a, b in zip(bps, bps[1:])):
            raise InvariantError("breakpoints must be strictly increasing")
        if len(self.densities) != len(bps) - 1:
            raise InvariantError(
                f"expected {len(bps) - 1} densities for {len(bps)} breakpoints, "
                f"got {len(self.densities)}"
            )
        if any(d < 0 for d in self.densities):
            raise InvariantError("densities must be nonnegative")
        for loc, w in self.atoms:
            if not 0 <= loc <= 1:
                raise InvariantError(f"atom location {loc} outside [0,1]")
            if w <= 0:
                raise InvariantError(f"atom weight {w} must be positive")
        if any(a >= b for (a, _), (b, _) in zip(self.atoms, self.atoms[1:])):
            raise InvariantError("atom locations must be strictly increasing")
        total = self.atom_mass + self.diffuse_total
        if total != 1:
            raise InvariantError(f"fiber mass sums to {total}, expected 1")

    @cached_property
    def atom_mass(self) -> Fraction:
        return sum((w for _, w in self.atoms), ZERO)

    @cached_property
    def diffuse_cumulative(self) -> tuple[Fraction, ...]:
        """Diffuse mass of [0, x_j) at every breakpoint x_j."""
        out = [ZERO]
        for j, d in enumerate(self.densities):
            out.append(out[-1] + d * (self.breakpoints[j + 1] - self.breakpoints[j]))
        return tuple(out)

    @property
    def diffuse_total(self) -> Fraction:
        return self.diffuse_cumulative[-1]

    @cached_property
    def atom_weight(self) -> dict[Fraction, Fraction]:
        return dict(self.atoms)

    @property
    def atom_locations(self) -> tuple[Fraction, ...]:
        return tuple(loc for loc, _ in self.atoms)

    def pieces(self):
        for j, d in enumerate(self.densities):
            yield self.breakpoints[j], self.breakpoints[j + 1], d

    def pieces_over(self, lo, hi):
        """Constant-density subpieces of [lo, hi), in order."""
        bps = self.breakpoints
        j = bisect_right(bps, lo) - 1
        if j < 0:
            j = 0
        while j < len(self.densities) and bps[j] < hi:
            p, q = bps[j], bps[j + 1]
            if q > lo:
                yield max(p, lo), min(q, hi), self.densities[j]
            j += 1

    def prefix_diffuse(self, x) -> Fraction:
        """Diffuse mass of [0, x)."""
        if x <= 0:
            return ZERO
        if x >= 1:
            return self.diffuse_total
        j = bisect_right(self.breakpoints, x) - 1
        d = self.densities[j]
        base = self.diffuse_cumulative[j]
        return base + d * (x - self.breakpoints[j]) if d else base

    def diffuse_mass(self, intervals: IntervalList) -> Fraction:
        total = ZERO
        for lo, hi in intervals:
            total += self.prefix_diffuse(hi) - self.prefix_diffuse(lo)
        return total

    def pick_mass(self, picks) -> Fraction:
        total = ZERO
        for loc in picks:
            w = self.atom_weight.get(loc)
            if w is None:
                raise InvariantError(f"pick {loc} is not an atom location")
            total += w
        return total

    def mass(self, part: FiberSlice) -> Fraction:
        return self.diffuse_mass(part.intervals) + self.pick_mass(part.picks)


@dataclass(frozen=True)
class FiberSlice:
    """One fiber's share of an event.

    The interval part carries diffuse mass only: a point mass belongs to
    an event only through an explicit pick, so an atom location sitting
    inside an interval but not picked contributes nothing.
    """

    intervals: IntervalList = ()
    picks: tuple[Fraction, ...] = ()

    def __post_init__(self):
        raw = tuple((as_fraction(a), as_fraction(b)) for a, b in self.intervals)
        for a, b in raw:
            if a >= b:
                raise InvariantError(f"interval [{a},{b}) is empty or inverted")
            if a < 0 or b > 1:
                raise InvariantError(f"interval [{a},{b}) outside [0,1]")
        picks = tuple(sorted({as_fraction(p) for p in self.picks}))
        for p in picks:
            if not 0 <= p <= 1:
                raise InvariantError(f"pick {p} outside [0,1]")
        object.__setattr__(self, "intervals", canonical(raw))
        object.__setattr__(self, "picks", picks)

    @classmethod
    def trusted(cls, intervals: IntervalList, picks: tuple[Fraction, ...] = ()) -> FiberSlice:
        """Wrap values that are already canonical Fractions, skipping the
        constructor's coercion; internal fast path for derived slices."""
        out = object.__new__(cls)
        object.__setattr__(out, "intervals", intervals)
        object.__setattr__(out, "picks", picks)
        return out

    @property
    def empty(self) -> bool:
        return not self.intervals and not self.picks


@dataclass(frozen=True)
class EventSet:
    """An event: one canonical FiberSlice per fiber."""

    slices: tuple[FiberSlice, ...]

    def __post_init__(self):
        object.__setattr__(self, "slices", tuple(self.slices))

    @classmethod
    def empty(cls, n_fibers: int) -> EventSet:
        return cls(tuple(FiberSlice() for _ in range(n_fibers)))

    @property
    def n_fibers(self) -> int:
        return len(self.slices)

    @property
    def is_empty(self) -> bool:
        return all(s.empty for s in self.slices)

    def _check(self, other: EventSet):
        if len(self.slices) != len(other.slices):
            raise MismatchError(
                f"events span {len(self.slices)} and {len(other.slices)} fibers"
            )

    def union(self, other: EventSet) -> EventSet:
        self._check(other)
        return EventSet(
            tuple(
                FiberSlice.trusted(
                    union(a.intervals, b.intervals), tuple(sorted(set(a.picks) | set(b.picks)))
                )
                for a, b in zip(self.slices, other.slices)
            )
        )

    def intersect(self, other: EventSet) -> EventSet:
        self._check(other)
        return EventSet(
            tuple(
                FiberSlice.trusted(
                    intersect(a.intervals, b.intervals),
                    tuple(sorted(set(a.picks) & set(b.picks))),
                )
                for a, b in zip(self.slices, other.slices)
            )
        )

    def difference(self, other: EventSet) -> EventSet:
        self._check(other)
        return EventSet(
            tuple(
                FiberSlice.trusted(
                    difference(a.intervals, b.intervals),
                    tuple(sorted(set(a.picks) - set(b.picks))),
                )
                for a, b in zip(self.slices, other.slices)
            )
        )

    def symmetric_difference(self, other: EventSet) -> EventSet:
        return self.difference(other).union(other.difference(self))

    def is_subset(self, other: EventSet) -> bool:
        self._check(other)
        for a, b in zip(self.slices, other.slices):
            if a.picks and not set(a.picks) <= set(b.picks):
                return False
            if not is_subset(a.intervals, b.intervals):
                return False
        return True


def combine(op: str, a: EventSet, b: EventSet) -> EventSet:
    """Set-algebra entry point; op is one of union, intersect, difference."""
    try:
        method = {
            "union": EventSet.union,
            "intersect": EventSet.intersect,
            "difference": EventSet.difference,
        }[op]
    except KeyError:
        raise ValueError(f"unknown set operation {op!r}") from None
    return method(a, b)


@dataclass(frozen=True)
class Fiber:
    weight: Fraction
    measure: FiberMeasure

    def __post_init__(self):
        object.__setattr__(self, "weight", as_fraction(self.weight))
        if self.weight <= 0:
            raise InvariantError(f"fiber weight {self.weight} must be positive")


@dataclass(frozen=True)
class FiberedSpace:
    """Weighted fibers; weights sum to exactly 1."""

    fibers: tuple[Fiber, ...]

    def __post_init__(self):
        object.__setattr__(self, "fibers", tuple(self.fibers))
        if not self.fibers:
            raise InvariantError("a space needs at least one fiber")
        total = sum((f.weight for f in self.fibers), ZERO)
        if total != 1:
            raise InvariantError(f"fiber weights sum to {total}, expected 1")

    @property
    def n_fibers(self) -> int:
        return len(self.fibers)

    def validate_event(self, event: EventSet):
        """Check that event is structurally compatible with this space."""
        if event.n_fibers != self.n_fibers:
            raise MismatchError(
                f"event spans {event.n_fibers} fibers, space has {self.n_fibers}"
            )
        for i, (fiber, part) in enumerate(zip(self.fibers, event.slices)):
            known = fiber.measure.atom_weight
            for p in part.picks:
                if p not in known:
                    raise InvariantError(f"pick {p} on fiber {i} is not an atom location")

    def empty_event(self) -> EventSet:
        return EventSet.empty(self.n_fibers)

    def whole_event(self) -> EventSet:
        """The full space: [0, 1) plus every atom, per fiber."""
        return EventSet(
            tuple(
                FiberSlice.trusted(((ZERO, ONE),), f.measure.atom_locations)
                for f in self.fibers
            )
        )

    def cond_expectation(self, event: EventSet) -> FiberFunction:
        """Per-fiber mass of the event, i.e. the conditional expectation of
        its indicator given the fiber index."""
        self.validate_event(event)
        return tuple(f.measure.mass(s) for f, s in zip(self.fibers, event.slices))

    def measure(self, event: EventSet) -> Fraction:
        """Total probability: the weight-average of the per-fiber masses."""
        self.validate_event(event)
        return sum(
            (f.weight * f.measure.mass(s) for f, s in zip(self.fibers, event.slices)), ZERO
        )
