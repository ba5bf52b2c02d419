"""Exhaustive oracles against naive enumeration and known answers."""

import random

import pytest

from pupsolver import (
    BinPackingInstance,
    Instance,
    SizeGuardError,
    binpack_decide,
    oracle_decide,
    oracle_min_units,
)

from datagen import naive_decide, rail_instance, random_instance


def test_oracle_single_edge():
    inst = Instance(("i1",), ("s1",), (("i1", "s1"),), 1, 1)
    assert oracle_decide(inst, 1)
    assert oracle_min_units(inst) == 1


def test_oracle_star_needs_partnered_units():
    # capacities are per side: the hub shares a unit with one sensor, the
    # second sensor forces a partnered second unit
    inst = Instance(("hub",), ("a", "b"), (("hub", "a"), ("hub", "b")), 1, 2)
    assert not oracle_decide(inst, 1)
    assert oracle_min_units(inst) == 2


def test_oracle_degree_overload_is_unsat():
    inst = Instance(("hub",), ("a", "b", "c"),
                    (("hub", "a"), ("hub", "b"), ("hub", "c")), 1, 1)
    assert oracle_min_units(inst) is None


def test_oracle_rail_minimum():
    assert oracle_min_units(rail_instance()) == 3
    assert not oracle_decide(rail_instance(), 2)
    assert oracle_decide(rail_instance(), 3)


def test_oracle_empty_instance():
    inst = Instance((), (), (), 1, 0)
    assert oracle_min_units(inst) == 0
    assert oracle_decide(inst, 1)


def test_oracle_monotone_in_unit_budget():
    rng = random.Random(11)
    for _ in range(80):
        inst = random_instance(rng, min_ind=1)
        n = len(inst.elements)
        answers = [oracle_decide(inst, k) for k in range(1, n + 1)]
        for earlier, later in zip(answers, answers[1:]):
            assert later or not earlier  # True never flips back to False


def test_oracle_agrees_with_naive_enumeration():
    """The symmetry-broken oracle and the no-symmetry-breaking product
    enumeration must decide identically on small instances."""
    rng = random.Random(20)
    for _ in range(120):
        inst = random_instance(rng, max_ind=3, max_sens=3)
        budget = max(len(inst.elements), 1)
        assert oracle_decide(inst, budget) == naive_decide(inst, budget)


def test_oracle_size_guard():
    ind = tuple(f"i{k}" for k in range(13))
    inst = Instance(ind, (), (), 2, 0)
    with pytest.raises(SizeGuardError):
        oracle_decide(inst, 13)
    # the guard is adjustable for deliberate larger runs
    assert oracle_decide(inst, 13, max_elements=13)
    with pytest.raises(ValueError):
        oracle_decide(Instance(("i1",), (), (), 1, 0), 0)


def test_binpack_known_answers():
    assert binpack_decide(BinPackingInstance((2, 2), 2, 2))
    assert not binpack_decide(BinPackingInstance((2, 2), 2, 1))
    assert not binpack_decide(BinPackingInstance((3,), 2, 5))
    assert binpack_decide(BinPackingInstance((2, 2, 3, 3), 5, 2))
    assert not binpack_decide(BinPackingInstance((2, 2, 3, 3), 5, 1))
    assert binpack_decide(BinPackingInstance((), 1, 1))


def test_binpack_guard():
    with pytest.raises(SizeGuardError):
        binpack_decide(BinPackingInstance((1,) * 11, 4, 4))
    assert binpack_decide(BinPackingInstance((1,) * 11, 4, 4), max_items=11)


def test_binpack_tight_fit():
    # needs an exact partition: 1+4, 2+3
    assert binpack_decide(BinPackingInstance((1, 2, 3, 4), 5, 2))
    assert not binpack_decide(BinPackingInstance((1, 2, 3, 4, 1), 5, 2))
