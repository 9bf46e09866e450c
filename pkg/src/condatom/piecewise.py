"""Piecewise-linear functions on [0, 1] with exact rational nodes."""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from .intervals import ONE, ZERO
from .space import InvariantError, as_fraction


@dataclass(frozen=True)
class PiecewiseLinear:
    """Nodes (xs, ys) with linear interpolation; xs runs from 0 to 1."""

    xs: tuple[Fraction, ...]
    ys: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "xs", tuple(as_fraction(x) for x in self.xs))
        object.__setattr__(self, "ys", tuple(as_fraction(y) for y in self.ys))
        if len(self.xs) != len(self.ys):
            raise InvariantError("node lists differ in length")
        if len(self.xs) < 2:
            raise InvariantError("need at least the two endpoint nodes")
        if self.xs[0] != 0 or self.xs[-1] != 1:
            raise InvariantError("nodes must run from 0 to 1")
        if any(a >= b for a, b in zip(self.xs, self.xs[1:])):
            raise InvariantError("nodes must be strictly increasing")

    @classmethod
    def from_graph(cls, points) -> PiecewiseLinear:
        """Build from (x, y) pairs, collapsing duplicate x nodes."""
        xs: list[Fraction] = []
        ys: list[Fraction] = []
        for x, y in sorted(points):
            if xs and x == xs[-1]:
                if y != ys[-1]:
                    raise InvariantError(f"conflicting values at node {x}")
                continue
            xs.append(x)
            ys.append(y)
        return cls(tuple(xs), tuple(ys))

    @classmethod
    def constant(cls, value) -> PiecewiseLinear:
        return cls((ZERO, ONE), (as_fraction(value), as_fraction(value)))

    @cached_property
    def nondecreasing(self) -> bool:
        return all(a <= b for a, b in zip(self.ys, self.ys[1:]))

    def at(self, x) -> Fraction:
        x = as_fraction(x)
        if not 0 <= x <= 1:
            raise ValueError(f"argument {x} outside [0,1]")
        if x == self.xs[-1]:
            return self.ys[-1]
        i = bisect_right(self.xs, x)
        x0, x1 = self.xs[i - 1], self.xs[i]
        y0, y1 = self.ys[i - 1], self.ys[i]
        return y0 + (y1 - y0) * (x - x0) / (x1 - x0)

    def definite_integral(self, lo=ZERO, hi=ONE) -> Fraction:
        """Exact integral over [lo, hi] via trapezoids on refined nodes."""
        lo, hi = as_fraction(lo), as_fraction(hi)
        if not 0 <= lo <= hi <= 1:
            raise ValueError(f"bad integration range [{lo}, {hi}]")
        pts = [lo] + [x for x in self.xs if lo < x < hi] + [hi]
        total = ZERO
        for a, b in zip(pts, pts[1:]):
            if b > a:
                total += (b - a) * (self.at(a) + self.at(b)) / 2
        return total

    def compose(self, inner: PiecewiseLinear) -> PiecewiseLinear:
        """The map y -> self(inner(y)); inner must be nondecreasing.

        New nodes are inner's nodes plus the preimages of self's nodes
        under each strictly increasing piece of inner, so the result is
        exactly linear between consecutive nodes.
        """
        if not inner.nondecreasing:
            raise ValueError("inner map must be nondecreasing")
        nodes = set(inner.xs)
        for j in range(len(inner.xs) - 1):
            x0, x1 = inner.xs[j], inner.xs[j + 1]
            v0, v1 = inner.ys[j], inner.ys[j + 1]
            if v1 == v0:
                continue
            for t in self.xs:
                if v0 < t < v1:
                    nodes.add(x0 + (t - v0) * (x1 - x0) / (v1 - v0))
        xs = tuple(sorted(nodes))
        return PiecewiseLinear(xs, tuple(self.at(inner.at(x)) for x in xs))
