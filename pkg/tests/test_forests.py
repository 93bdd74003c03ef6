import pytest

from dynlll.cnf import CnfSystem
from dynlll.engine import TraceEvent, UpdateOp
from dynlll.errors import InconsistentForest, MalformedTrace
from dynlll.forests import (
    build_breakage_forest,
    is_proper,
    parse_forest,
    reconstruct_sequence,
    serialize_forest,
)
from dynlll.harness import Oblivious, gen_cnf_stream, run_stream


def ev(step, update, flaw, introduced=()):
    return TraceEvent(step=step, update=update, flaw=flaw,
                      introduced=tuple(introduced), changed=())


def test_single_update_tree_shape():
    updates = [UpdateOp("insert", (0,))]
    trace = [ev(0, 0, 0, introduced=[1, 2]),
             ev(1, 0, 1, introduced=[]),
             ev(2, 0, 2, introduced=[2]),
             ev(3, 0, 2, introduced=[])]
    # Flaws 1 and 2 hang under the root; 2's second event under its first.
    forest = build_breakage_forest(trace, updates)
    # (flaws 1, 2 must be addressable as non-roots only via introduction)
    roots = forest.slots[0]
    assert [r.flaw for r in roots] == [0]
    assert sorted(c.flaw for c in roots[0].children) == [1, 2]
    node2 = next(c for c in roots[0].children if c.flaw == 2)
    assert [g.flaw for g in node2.children] == [2]
    assert forest.size() == 4


def test_empty_updates_leave_empty_slots():
    updates = [UpdateOp("insert", (0,)), UpdateOp("delete", (0,))]
    forest = build_breakage_forest([], updates)
    assert forest.slots == [[], []]


def test_delete_update_with_events_is_malformed():
    updates = [UpdateOp("delete", (0,))]
    with pytest.raises(MalformedTrace):
        build_breakage_forest([ev(0, 0, 0)], updates)


def test_event_without_introducer_or_root_is_malformed():
    updates = [UpdateOp("insert", (0,))]
    with pytest.raises(MalformedTrace):
        build_breakage_forest([ev(0, 0, 5)], updates)


def test_unknown_update_reference_is_malformed():
    with pytest.raises(MalformedTrace):
        build_breakage_forest([ev(0, 3, 0)], [UpdateOp("insert", (0,))])


def test_reattachment_after_collateral_fix():
    # Flaw 1 is introduced, never resampled (collaterally fixed), then
    # introduced again by a later event: the second introducer wins.
    updates = [UpdateOp("requeue", (0, 2))]
    trace = [ev(0, 0, 0, introduced=[1]),
             ev(1, 0, 2, introduced=[1]),
             ev(2, 0, 1, introduced=[])]
    forest = build_breakage_forest(trace, updates)
    by_flaw = {r.flaw: r for r in forest.slots[0]}
    assert set(by_flaw) == {0, 2}
    assert by_flaw[0].children == []
    assert [c.flaw for c in by_flaw[2].children] == [1]


def test_is_proper_detects_dependent_siblings():
    updates = [UpdateOp("insert", (0,))]
    trace = [ev(0, 0, 0, introduced=[1, 2]),
             ev(1, 0, 1), ev(2, 0, 2)]
    forest = build_breakage_forest(trace, updates)
    independent = {0: {0}, 1: {1}, 2: {2}}
    assert is_proper(forest, independent)
    entangled = {0: {0}, 1: {1, 2}, 2: {1, 2}}
    assert not is_proper(forest, entangled)


def test_serialize_parse_round_trip_synthetic():
    updates = [UpdateOp("insert", (0,)), UpdateOp("requeue", (1, 2))]
    trace = [ev(0, 0, 0, introduced=[0]),
             ev(1, 0, 0),
             ev(2, 1, 2, introduced=[1]),
             ev(3, 1, 1)]
    forest = build_breakage_forest(trace, updates)
    text = serialize_forest(forest)
    parsed = parse_forest(text, len(updates))
    assert serialize_forest(parsed) == text


def test_parse_rejects_bad_lines():
    with pytest.raises(InconsistentForest):
        parse_forest("1 2 3\n", 1)
    with pytest.raises(InconsistentForest):
        parse_forest("1 0 7 0\n", 1)  # parent step 7 does not exist


def _cnf_run(seed, n=40, k=3, q=120):
    ops = gen_cnf_stream(n=n, k=k, eps=0.05, q=q, delete_ratio=0.4, seed=seed)
    system = CnfSystem(n, seed=seed + 1)
    run_stream(system, Oblivious(ops))
    return system


@pytest.mark.parametrize("seed", range(6))
def test_engine_traces_reconstruct_exactly(seed):
    system = _cnf_run(seed)
    engine = system.engine
    forest = build_breakage_forest(engine.trace, engine.updates)
    rebuilt = reconstruct_sequence(forest, priority_key=lambda fid: fid)
    assert rebuilt == engine.flaw_sequence()
    text = serialize_forest(forest)
    parsed = parse_forest(text, len(engine.updates))
    assert reconstruct_sequence(parsed, priority_key=lambda fid: fid) == rebuilt
    assert serialize_forest(parsed) == text


def test_forest_size_matches_resampling_count():
    system = _cnf_run(11)
    engine = system.engine
    forest = build_breakage_forest(engine.trace, engine.updates)
    assert forest.size() == engine.stats.resamplings == len(engine.trace)
