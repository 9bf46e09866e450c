"""Independent oracles for cross-checking exact results.

These deliberately avoid the library's interval algebra and prefix sums:
membership is a linear scan and masses are Riemann sums on a fixed grid,
exact whenever every endpoint involved is a multiple of the grid step.
"""

from fractions import Fraction


def point_in(intervals, x) -> bool:
    return any(a <= x < b for a, b in intervals)


def density_at(measure, x) -> Fraction:
    for j in range(len(measure.densities)):
        if measure.breakpoints[j] <= x < measure.breakpoints[j + 1]:
            return measure.densities[j]
    return Fraction(0)


def grid_mass(measure, part, k: int = 4096) -> Fraction:
    """Riemann sum on the 1/k grid plus picked atom weights."""
    total = Fraction(0)
    for j in range(k):
        x = Fraction(j, k)
        if point_in(part.intervals, x):
            total += density_at(measure, x) / k
    picked = set(part.picks)
    return total + sum((w for loc, w in measure.atoms if loc in picked), Fraction(0))


def grid_space_measure(space, event, k: int = 4096) -> Fraction:
    return sum(
        (f.weight * grid_mass(f.measure, s, k) for f, s in zip(space.fibers, event.slices)),
        Fraction(0),
    )


def staircase_value(family, fiber: int, y) -> Fraction:
    """The level-n approximant at a point: the smallest stored level whose
    set contains it."""
    for t in family.grid():
        if point_in(family.sets[t].slices[fiber].intervals, y):
            return t
    return Fraction(1)
