from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import grid_mass

from condatom import (
    AtomObstruction,
    EventSet,
    Fiber,
    FiberedSpace,
    FiberMeasure,
    FiberSlice,
    atom_witness,
    is_conditionally_atomless,
    maximal_split_region,
    shrink_sequence,
    split,
    strict_split_witness,
)
from condatom.generate import GeneratorParams, generate_positive_event, generate_space, rng_for

F = Fraction

LEBESGUE = FiberMeasure()


def single(measure):
    return FiberedSpace((Fiber(1, measure),))


class TestAtomlessVerdict:
    def test_lebesgue_is_atomless(self):
        assert is_conditionally_atomless(single(LEBESGUE))
        assert atom_witness(single(LEBESGUE)) is None

    def test_explicit_atom_is_witnessed(self):
        m = FiberMeasure(
            atoms=((F(1, 2), F(1, 2)),), breakpoints=(0, F(1, 2), 1), densities=(1, 0)
        )
        w = atom_witness(single(m))
        assert (w.fiber, w.location, w.weight) == (0, F(1, 2), F(1, 2))
        assert not is_conditionally_atomless(single(m))

    def test_atom_instances_admit_a_defeating_event(self):
        # the witness atom alone is a positive event that cannot split
        rng = rng_for(29, "unit-converse")
        params = GeneratorParams(max_fibers=4, max_pieces=5, atom_probability=1.0)
        for _ in range(10):
            space = generate_space(rng, params)
            w = atom_witness(space)
            slices = [FiberSlice() for _ in range(space.n_fibers)]
            slices[w.fiber] = FiberSlice(picks=(w.location,))
            a = EventSet(tuple(slices))
            assert space.cond_expectation(a)[w.fiber] == w.weight > 0
            assert maximal_split_region(space, a) == frozenset()
            assert strict_split_witness(space, a) is None

    def test_random_five_fiber_atomless_instance_splits_everywhere(self):
        rng = rng_for(7, "unit-atomless")
        params = GeneratorParams(max_fibers=5, max_pieces=6, atom_probability=0.0)
        space = generate_space(rng, params)
        while space.n_fibers != 5:
            space = generate_space(rng, params)
        assert is_conditionally_atomless(space)
        for _ in range(100):
            a = generate_positive_event(rng, space, every_fiber=True)
            res = strict_split_witness(space, a)
            assert res is not None
            _, region = res
            assert region == frozenset(range(5))


class TestStrictSplitWitness:
    def test_lebesgue_left_fill(self):
        space = single(LEBESGUE)
        a = space.whole_event()
        b, region = strict_split_witness(space, a)
        assert b.slices[0].intervals == ((F(0), F(1, 2)),)
        assert region == frozenset({0})
        assert 0 < space.cond_expectation(b)[0] < 1

    def test_single_atom_slice_has_no_witness(self):
        m = FiberMeasure(atoms=((F(1, 2), F(1, 4)),), densities=(F(3, 4),))
        space = single(m)
        a = EventSet((FiberSlice(picks=(F(1, 2),)),))
        assert strict_split_witness(space, a) is None
        assert maximal_split_region(space, a) == frozenset()

    def test_empty_event_has_no_witness(self):
        space = single(LEBESGUE)
        assert strict_split_witness(space, space.empty_event()) is None

    def test_two_atoms_split_by_pick(self):
        m = FiberMeasure(atoms=((F(1, 4), F(1, 2)), (F(3, 4), F(1, 2))), densities=(0,))
        space = single(m)
        a = space.whole_event()
        b, region = strict_split_witness(space, a)
        assert region == frozenset({0})
        assert space.cond_expectation(b)[0] == F(1, 2)

    def test_mixed_slice_keeps_diffuse_part(self):
        m = FiberMeasure(atoms=((F(7, 8), F(3, 4)),), densities=(F(1, 4),))
        space = single(m)
        a = space.whole_event()
        b, region = strict_split_witness(space, a)
        cond = space.cond_expectation(b)[0]
        assert region == frozenset({0})
        assert 0 < cond < 1
        assert not b.slices[0].picks


class TestMaximalSplitRegion:
    def test_empty_event(self):
        assert maximal_split_region(single(LEBESGUE), single(LEBESGUE).empty_event()) == frozenset()

    def test_mixed_two_fiber_instance(self):
        atom_only = FiberMeasure(atoms=((F(1, 2), 1),), densities=(0,))
        space = FiberedSpace((Fiber(F(1, 2), LEBESGUE), Fiber(F(1, 2), atom_only)))
        a = EventSet(
            (FiberSlice(((0, F(1, 2)),)), FiberSlice(picks=(F(1, 2),)))
        )
        assert maximal_split_region(space, a) == frozenset({0})

    def test_dichotomy_on_atomless_space(self):
        rng = rng_for(11, "unit-dichotomy")
        params = GeneratorParams(max_fibers=4, max_pieces=5, atom_probability=0.0)
        for _ in range(20):
            space = generate_space(rng, params)
            a = generate_positive_event(rng, space, every_fiber=False)
            cond = space.cond_expectation(a)
            positive = frozenset(i for i, c in enumerate(cond) if c > 0)
            assert maximal_split_region(space, a) == positive
            assert (strict_split_witness(space, a) is None) == (not positive)

    def test_region_stays_within_positive_fibers_with_atoms(self):
        rng = rng_for(11, "unit-dichotomy-atoms")
        params = GeneratorParams(max_fibers=4, max_pieces=5, atom_probability=0.7)
        for _ in range(20):
            space = generate_space(rng, params)
            a = generate_positive_event(rng, space, every_fiber=False)
            cond = space.cond_expectation(a)
            positive = frozenset(i for i, c in enumerate(cond) if c > 0)
            region = maximal_split_region(space, a)
            assert region <= positive
            assert (strict_split_witness(space, a) is None) == (not region)


class TestSplit:
    def test_half_of_lebesgue(self):
        space = single(LEBESGUE)
        b = split(space, space.whole_event(), (F(1, 2),))
        assert b.slices[0].intervals == ((F(0), F(1, 2)),)

    def test_zero_coefficient_gives_empty(self):
        space = single(LEBESGUE)
        assert split(space, space.whole_event(), (F(0),)).is_empty

    def test_doubled_density_cut_point(self):
        m = FiberMeasure(breakpoints=(0, F(1, 2), 1), densities=(2, 0))
        space = single(m)
        c = EventSet((FiberSlice(((0, F(1, 2)),)),))
        b = split(space, c, (F(3, 4),))
        assert b.slices[0].intervals == ((F(0), F(3, 8)),)
        assert grid_mass(m, b.slices[0]) == F(3, 4)

    def test_exactness_across_gaps_and_dead_zones(self):
        m = FiberMeasure(
            breakpoints=(0, F(1, 4), F(1, 2), F(3, 4), 1), densities=(2, 0, 1, 1)
        )
        space = single(m)
        c = EventSet((FiberSlice(((F(1, 8), F(5, 8)), (F(3, 4), 1))),))
        cond_c = space.cond_expectation(c)
        for h in (F(1, 3), F(2, 5), F(15, 16)):
            b = split(space, c, (h,))
            assert space.cond_expectation(b) == (h * cond_c[0],)
            assert b.is_subset(c)

    def test_degenerate_coefficients_allowed_on_atom_slices(self):
        m = FiberMeasure(atoms=((F(1, 2), F(1, 2)),), densities=(F(1, 2),))
        space = single(m)
        c = space.whole_event()
        assert split(space, c, (F(1),)) == c
        assert split(space, c, (F(0),)).is_empty

    def test_atom_obstruction_when_target_needs_point_mass(self):
        m = FiberMeasure(atoms=((F(1, 2), F(1, 2)),), densities=(F(1, 2),))
        space = single(m)
        with pytest.raises(AtomObstruction) as exc:
            split(space, space.whole_event(), (F(3, 4),))
        assert exc.value.fiber == 0
        assert exc.value.location == F(1, 2)

    def test_reachable_target_despite_picked_atom(self):
        # diffuse mass 1/2 covers the target 3/8, so no obstruction
        m = FiberMeasure(atoms=((F(3, 4), F(1, 2)),), densities=(1, 0), breakpoints=(0, F(1, 2), 1))
        space = single(m)
        b = split(space, space.whole_event(), (F(3, 8),))
        assert space.cond_expectation(b) == (F(3, 8),)
        assert not b.slices[0].picks

    def test_coefficient_validation(self):
        space = single(LEBESGUE)
        with pytest.raises(Exception, match="outside"):
            split(space, space.whole_event(), (F(3, 2),))
        with pytest.raises(Exception, match="coefficients"):
            split(space, space.whole_event(), (F(1, 2), F(1, 2)))

    def test_left_fill_monotone_in_coefficient(self):
        m = FiberMeasure(breakpoints=(0, F(1, 3), F(2, 3), 1), densities=(1, 0, 2))
        space = single(m)
        c = space.whole_event()
        previous = space.empty_event()
        for k in range(9):
            b = split(space, c, (F(k, 8),))
            assert previous.is_subset(b)
            previous = b


class TestShrinkSequence:
    def test_lebesgue_chain(self):
        space = single(LEBESGUE)
        chain = shrink_sequence(space, space.whole_event(), frozenset({0}), 3)
        masses = [space.cond_expectation(e)[0] for e in chain]
        assert masses == [1, F(1, 2), F(1, 4), F(1, 8)]
        for small, big in zip(chain[1:], chain):
            assert small.is_subset(big)

    def test_zero_steps_returns_start(self):
        space = single(LEBESGUE)
        c = space.whole_event()
        assert shrink_sequence(space, c, frozenset({0}), 0) == [c]

    def test_two_fiber_bounds(self):
        space = FiberedSpace((Fiber(F(1, 2), LEBESGUE), Fiber(F(1, 2), LEBESGUE)))
        c = EventSet((FiberSlice(((0, 1),)), FiberSlice(((0, F(1, 2)),))))
        chain = shrink_sequence(space, c, frozenset({0, 1}), 2)
        assert space.cond_expectation(chain[2]) == (F(1, 4), F(1, 8))
        for k, event in enumerate(chain):
            cond = space.cond_expectation(event)
            assert all(0 < v <= F(1, 2**k) for v in cond)

    def test_untouched_fibers_keep_their_slice(self):
        space = FiberedSpace((Fiber(F(1, 2), LEBESGUE), Fiber(F(1, 2), LEBESGUE)))
        c = space.whole_event()
        chain = shrink_sequence(space, c, frozenset({0}), 4)
        assert all(e.slices[1] == c.slices[1] for e in chain)

    def test_zero_mass_designated_fiber_is_an_error(self):
        space = single(LEBESGUE)
        with pytest.raises(ValueError, match="zero slice mass"):
            shrink_sequence(space, space.empty_event(), frozenset({0}), 1)


densities_strategy = st.lists(
    st.integers(min_value=0, max_value=4), min_size=1, max_size=5
).filter(lambda ds: sum(ds) > 0)


@st.composite
def atomless_spaces(draw):
    cuts = draw(
        st.lists(
            st.fractions(min_value=0, max_value=1, max_denominator=12).filter(
                lambda q: 0 < q < 1
            ),
            max_size=4,
            unique=True,
        )
    )
    breakpoints = [F(0)] + sorted(cuts) + [F(1)]
    raw = draw(
        st.lists(
            st.integers(min_value=0, max_value=4),
            min_size=len(breakpoints) - 1,
            max_size=len(breakpoints) - 1,
        )
    )
    total = sum(F(d) * (b - a) for d, a, b in zip(raw, breakpoints, breakpoints[1:]))
    if total == 0:
        raw[0] = 1
        total = sum(F(d) * (b - a) for d, a, b in zip(raw, breakpoints, breakpoints[1:]))
    m = FiberMeasure(
        breakpoints=tuple(breakpoints), densities=tuple(F(d) / total for d in raw)
    )
    return single(m)


@st.composite
def events_on(draw, space):
    points = sorted(
        draw(
            st.lists(
                st.fractions(min_value=0, max_value=1, max_denominator=12),
                max_size=6,
                unique=True,
            )
        )
    )
    if len(points) % 2:
        points.pop()
    return EventSet((FiberSlice(tuple(zip(points[0::2], points[1::2]))),))


@settings(max_examples=60, deadline=None)
@given(st.data(), st.fractions(min_value=0, max_value=1, max_denominator=16))
def test_split_exactness_property(data, h):
    space = data.draw(atomless_spaces())
    c = data.draw(events_on(space))
    b = split(space, c, (h,))
    assert space.cond_expectation(b) == (h * space.cond_expectation(c)[0],)
    assert b.is_subset(c)
