"""Exactly uniform variable independent of the conditioning fibers.

build_dyadic_family grows the increasing family (B_t) over dyadic levels
by repeated exact halving of the gaps between consecutive sets, so every
stored set has per-fiber mass exactly t on every fiber at once; that
constant conditional mass is what makes the family independent of the
fiber index. set_at_level produces any level in one step as a left fill,
and build_uniform packages the per-fiber conditional CDFs, whose strict
level sets reproduce the family up to null sets. level_scan finds a
level whose intersection with a given event is conditionally strictly
between empty and full.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .intervals import ONE, ZERO, clip
from .piecewise import PiecewiseLinear
from .space import (
    EventSet,
    FiberedSpace,
    FiberSlice,
    InvariantError,
    as_fraction,
)
from .splitting import HALF, AtomObstruction, atom_witness, split


@dataclass(frozen=True)
class DyadicFamily:
    """Increasing events keyed by dyadic levels k / 2**depth."""

    depth: int
    sets: dict[Fraction, EventSet]

    def __post_init__(self):
        if self.depth < 0:
            raise InvariantError(f"depth {self.depth} must be >= 0")
        if ZERO not in self.sets or ONE not in self.sets:
            raise InvariantError("family must contain levels 0 and 1")

    def grid(self) -> tuple[Fraction, ...]:
        return tuple(sorted(self.sets))

    def at(self, t) -> EventSet:
        return self.sets[as_fraction(t)]


@dataclass(frozen=True)
class UniformRV:
    """Per-fiber conditional CDFs y -> mass of [0, y); each nondecreasing."""

    cdfs: tuple[PiecewiseLinear, ...]

    def __post_init__(self):
        object.__setattr__(self, "cdfs", tuple(self.cdfs))
        for u in self.cdfs:
            if u.ys[0] != 0:
                raise InvariantError("a conditional CDF must start at 0")
            if not u.nondecreasing:
                raise InvariantError("a conditional CDF must be nondecreasing")
            if u.ys[-1] > 1:
                raise InvariantError("a conditional CDF cannot exceed 1")


def _require_atomless(space: FiberedSpace):
    w = atom_witness(space)
    if w is not None:
        raise AtomObstruction(w.fiber, w.location)


def build_dyadic_family(space: FiberedSpace, depth: int) -> DyadicFamily:
    """Grow the family level by level: halve each gap between consecutive
    sets exactly and insert the union of the lower set with the half."""
    _require_atomless(space)
    if depth < 0:
        raise InvariantError(f"depth {depth} must be >= 0")
    halves = tuple(HALF for _ in range(space.n_fibers))
    sets = {ZERO: space.empty_event(), ONE: space.whole_event()}
    for level in range(depth):
        step = Fraction(1, 2**level)
        for k in range(2**level):
            lo_t = k * step
            gap = sets[lo_t + step].difference(sets[lo_t])
            half_of_gap = split(space, gap, halves)
            sets[lo_t + step / 2] = sets[lo_t].union(half_of_gap)
    return DyadicFamily(depth, sets)


def set_at_level(space: FiberedSpace, t) -> EventSet:
    """The event of per-fiber mass exactly t, as a direct left fill."""
    t = as_fraction(t)
    if not 0 <= t <= 1:
        raise InvariantError(f"level {t} outside [0,1]")
    if t == 0:
        return space.empty_event()
    if t == 1:
        return space.whole_event()
    return split(space, space.whole_event(), tuple(t for _ in range(space.n_fibers)))


def build_uniform(space: FiberedSpace) -> UniformRV:
    """Per-fiber conditional CDFs of an atomless space."""
    _require_atomless(space)
    return UniformRV(
        tuple(
            PiecewiseLinear(f.measure.breakpoints, f.measure.diffuse_cumulative)
            for f in space.fibers
        )
    )


def _leftmost_reaching(u: PiecewiseLinear, t: Fraction) -> Fraction:
    """Smallest y with u(y) >= t; assumes 0 < t <= u(1)."""
    for j in range(1, len(u.ys)):
        if u.ys[j] >= t:
            y0, y1 = u.ys[j - 1], u.ys[j]
            x0, x1 = u.xs[j - 1], u.xs[j]
            return x0 + (t - y0) * (x1 - x0) / (y1 - y0)
    raise AssertionError("level above the CDF maximum")


def level_set(rv: UniformRV, t) -> EventSet:
    """The event {u < t}, per fiber a prefix [0, y) of the line."""
    t = as_fraction(t)
    out = []
    for u in rv.cdfs:
        if t <= 0:
            out.append(FiberSlice())
        elif t > u.ys[-1]:
            out.append(FiberSlice.trusted(((ZERO, ONE),)))
        else:
            y = _leftmost_reaching(u, t)
            out.append(FiberSlice.trusted(((ZERO, y),)) if y > 0 else FiberSlice())
    return EventSet(tuple(out))


def intersection_mass_curves(space: FiberedSpace, event: EventSet) -> tuple[PiecewiseLinear, ...]:
    """Per fiber, the map t -> mass of (event slice) inside the level set
    {u < t}, as an exact piecewise-linear function on [0, 1].

    Nodes are the CDF values at the fiber's breakpoints and at the event
    slice's endpoints; between consecutive nodes the mass grows linearly
    (at unit rate inside the slice, flat outside), so interpolation is
    exact. Requires an atomless space.
    """
    _require_atomless(space)
    space.validate_event(event)
    curves = []
    for fiber, part in zip(space.fibers, event.slices):
        m = fiber.measure
        ys = sorted(set(m.breakpoints) | {e for iv in part.intervals for e in iv})
        pts = []
        for y in ys:
            t = m.diffuse_mass(((ZERO, y),)) if y > 0 else ZERO
            v = m.diffuse_mass(clip(part.intervals, ZERO, y)) if y > 0 else ZERO
            pts.append((t, v))
        curves.append(PiecewiseLinear.from_graph(pts))
    return tuple(curves)


def level_scan(space: FiberedSpace, event: EventSet):
    """Find a level t in (0, 1) whose intersection with the event has,
    on a nonempty set of fibers, mass strictly between 0 and the slice
    mass; returns (t, fibers) or None when the event has mass 0.

    Deterministic choice: the midpoint of the first gap between curve
    nodes where the strict sandwich holds on some fiber.
    """
    cond = space.cond_expectation(event)
    if all(c == 0 for c in cond):
        return None
    curves = intersection_mass_curves(space, event)
    ts = sorted({x for curve in curves for x in curve.xs})
    for t0, t1 in zip(ts, ts[1:]):
        mid = (t0 + t1) / 2
        fibers = frozenset(
            i for i, curve in enumerate(curves) if 0 < curve.at(mid) < cond[i]
        )
        if fibers:
            return mid, fibers
    raise AssertionError("no strict level found for an event of positive mass")
