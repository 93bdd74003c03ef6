import itertools
import random
from fractions import Fraction
from math import prod

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dynlll.errors import BudgetExceeded
from dynlll.rng import DrawStream
from dynlll.variables import (
    VariableFlaw,
    VariableSpace,
    brute_force_charge,
    dependency_graph,
    mt_resample,
    priority_select,
    probability_of_flaw,
)


def table_flaw(fid, vbl, bad_rows):
    rows = frozenset(bad_rows)
    return VariableFlaw(fid, vbl, lambda combo, r=rows: combo in r)


def random_instance(rng: random.Random, max_vars=4, max_dom=3, max_flaws=3):
    n = rng.randint(1, max_vars)
    space = VariableSpace(tuple(rng.randint(2, max_dom) for _ in range(n)))
    flaws = []
    for fid in range(rng.randint(1, max_flaws)):
        size = rng.randint(1, n)
        vbl = tuple(sorted(rng.sample(range(n), size)))
        rows = [
            combo
            for combo in itertools.product(*(range(space.domains[i]) for i in vbl))
            if rng.random() < 0.4
        ]
        flaws.append(table_flaw(fid, vbl, rows))
    return space, flaws


def test_space_validation_and_size():
    with pytest.raises(ValueError):
        VariableSpace((2, 0))
    space = VariableSpace((2, 3, 2))
    assert space.size() == 12
    assert len(list(space.states())) == 12


def test_flaw_validation():
    with pytest.raises(ValueError):
        VariableFlaw(0, (), lambda c: True)
    with pytest.raises(ValueError):
        VariableFlaw(0, (1, 1), lambda c: True)


def test_probability_hand_computed():
    space = VariableSpace((2, 2))
    both_ones = table_flaw(0, (0, 1), [(1, 1)])
    assert probability_of_flaw(both_ones, space) == Fraction(1, 4)
    first_zero = table_flaw(1, (0,), [(0,)])
    assert probability_of_flaw(first_zero, space) == Fraction(1, 2)


def test_probability_budget():
    space = VariableSpace((4,) * 11)
    flaw = VariableFlaw(0, tuple(range(11)), lambda c: True)
    with pytest.raises(BudgetExceeded):
        probability_of_flaw(flaw, space)


def test_mt_resample_draw_order_and_delta():
    space = VariableSpace((3, 3, 3))
    flaw = VariableFlaw(0, (2, 0), lambda c: True)  # support stored sorted
    values = [0, 1, 2]
    rng = DrawStream(5)
    oracle = DrawStream(5)
    expected = {0: oracle.below(3), 2: oracle.below(3)}
    delta = mt_resample(values, flaw, space, rng)
    assert rng.words_drawn == 2
    assert values[0] == expected[0] and values[2] == expected[2]
    assert values[1] == 1
    for idx, old, new in delta:
        assert old != new and values[idx] == new


def test_support_check_accepts_minimal_and_rejects_padded():
    space = VariableSpace((2, 2, 2))
    genuine = table_flaw(0, (0, 1), [(1, 1)])
    assert genuine.check_support_exact(space)
    padded = table_flaw(1, (0, 1, 2), [(1, 1, 0), (1, 1, 1)])
    assert not padded.check_support_exact(space)  # variable 2 is inert
    undeclared = table_flaw(2, (0,), [(1,)])
    # Claims support {0} but secretly depends on nothing else: fine.
    assert undeclared.check_support_exact(space)


def test_dependency_graph_shared_variables():
    a = table_flaw(0, (0, 1), [(0, 0)])
    b = table_flaw(1, (1, 2), [(0, 0)])
    c = table_flaw(2, (3,), [(0,)])
    dep = dependency_graph([a, b, c])
    assert dep[0] == {0, 1}
    assert dep[1] == {0, 1}
    assert dep[2] == {2}


def test_charge_equals_probability_hand_case():
    space = VariableSpace((2, 2))
    flaw = table_flaw(0, (0, 1), [(1, 1), (0, 1)])
    assert brute_force_charge(flaw, [flaw], space) == Fraction(1, 2)


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_charge_oracle_matches_probability(seed):
    # Uniform resampling: the empty-set charge equals the flaw probability.
    rng = random.Random(seed)
    space, flaws = random_instance(rng)
    for flaw in flaws:
        gamma = brute_force_charge(flaw, flaws, space)
        assert gamma == probability_of_flaw(flaw, space)


@settings(max_examples=15, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_generalized_charge_monotone_in_required_set(seed):
    rng = random.Random(seed)
    space, flaws = random_instance(rng, max_vars=3)
    dep = dependency_graph(flaws)
    by_id = {f.id: f for f in flaws}
    for flaw in flaws:
        nbrs = sorted(dep[flaw.id])
        assert len(nbrs) <= 4
        charges = {}
        for r in range(len(nbrs) + 1):
            for combo in itertools.combinations(nbrs, r):
                charges[frozenset(combo)] = brute_force_charge(
                    flaw, flaws, space, introduced_at_least=frozenset(combo)
                )
        for s_small, g_small in charges.items():
            for s_big, g_big in charges.items():
                if s_small < s_big:
                    assert g_small >= g_big
        assert charges[frozenset()] == probability_of_flaw(flaw, space)
        assert by_id[flaw.id] is flaw


def test_charge_respects_selection_rule():
    # Under a permutation rule the flaw is only charged when it wins.
    space = VariableSpace((2,))
    always = table_flaw(0, (0,), [(0,), (1,)])
    loser = table_flaw(1, (0,), [(0,), (1,)])
    rule = priority_select({0: 0, 1: 1})
    assert brute_force_charge(always, [always, loser], space,
                              selection_rule=rule) == Fraction(1)
    assert brute_force_charge(loser, [always, loser], space,
                              selection_rule=rule) == Fraction(0)


def test_charge_budget_guard():
    space = VariableSpace((3,) * 12)
    flaw = VariableFlaw(0, tuple(range(12)), lambda c: True)
    with pytest.raises(BudgetExceeded):
        brute_force_charge(flaw, [flaw], space)


def test_restriction_probability_agrees_with_full_enumeration():
    rng = random.Random(99)
    for _ in range(20):
        space, flaws = random_instance(rng)
        for flaw in flaws:
            full = sum(1 for s in space.states() if flaw.present(s))
            assert probability_of_flaw(flaw, space) == Fraction(full, space.size())
