import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dynlll.cnf import CnfSatValidator, CnfSystem, parse_literals
from dynlll.errors import (
    BoundedDependenceViolated,
    DuplicateVariableInClause,
    StepBudgetExceeded,
    UnknownClause,
)
from dynlll.harness import Oblivious, gen_cnf_stream, run_stream


def test_parse_literals():
    assert parse_literals([1, -2, 3]) == ((0, True), (1, False), (2, True))
    with pytest.raises(DuplicateVariableInClause):
        parse_literals([1, -1])
    with pytest.raises(ValueError):
        parse_literals([0])
    with pytest.raises(ValueError):
        parse_literals([])


def test_insert_satisfies_immediately():
    system = CnfSystem(4, seed=3)
    system.insert_clause([1, 2])
    system.insert_clause([-1, -2])
    system.insert_clause([3, 4])
    assert system.satisfies_all()
    assert system.engine.is_flawless()


def test_forced_conflict_resamples():
    system = CnfSystem(1, seed=0)
    system.insert_clause([1])
    # Unit clause: variable 0 must be True now.
    assert system.assignment[0] == 1
    # x AND NOT x is unsatisfiable; the engine must hit its budget.
    small = CnfSystem(1, seed=0, step_budget=50)
    small.insert_clause([1])
    with pytest.raises(StepBudgetExceeded):
        small.insert_clause([-1])


def test_delete_then_reinsert_gets_fresh_index():
    system = CnfSystem(3, seed=1)
    idx, _ = system.insert_clause([1, 2])
    system.delete_clause(idx)
    idx2, _ = system.insert_clause([1, 2])
    assert idx2 != idx
    with pytest.raises(UnknownClause):
        system.delete_clause(idx)


def test_neighbors_include_self_and_sharers():
    system = CnfSystem(5, seed=1)
    a, _ = system.insert_clause([1, 2])
    b, _ = system.insert_clause([2, 3])
    c, _ = system.insert_clause([4, 5])
    assert system.neighbors[a] == {a, b}
    assert system.neighbors[b] == {a, b}
    assert system.neighbors[c] == {c}
    system.delete_clause(b)
    assert system.neighbors[a] == {a}
    assert system.structures_consistent()


def test_bounded_dependence_verification():
    system = CnfSystem(2, seed=1, verify_dependence=True, dependence_eps=0.0)
    # Width-2 clauses weigh 1/4; bound is 1/e ~ 0.3679, so two sharing
    # clauses (sum 1/2) must be rejected and leave no residue.
    system.insert_clause([1, 2])
    with pytest.raises(BoundedDependenceViolated):
        system.insert_clause([-1, -2])
    assert len(system.clauses) == 1
    assert system.structures_consistent()
    ok, info = system.verify_bounded_dependence(eps=0.0)
    assert ok and info["worst_sum"] == pytest.approx(0.25)


class AuditedCnfSystem(CnfSystem):
    """Cross-checks each resample's introduced set against a global scan."""

    def resample_clause(self, index, rng):
        violated_before = {j for j in self.clauses if self._violated(j)}
        introduced, delta = super().resample_clause(index, rng)
        violated_after = {j for j in self.clauses if self._violated(j)}
        expected = violated_after - violated_before
        if index in violated_after:
            expected.add(index)
        assert sorted(expected) == list(introduced)
        return introduced, delta


def test_resample_reports_true_introductions():
    system = AuditedCnfSystem(30, seed=5)
    ops = gen_cnf_stream(n=30, k=3, eps=0.05, q=200, delete_ratio=0.3, seed=6)
    def check(sys, op, segment):
        assert sys.satisfies_all()

    run_stream(system, Oblivious(ops), on_update=check)
    assert system.engine.stats.resamplings > 0


def test_recourse_counts_variable_changes():
    system = CnfSystem(1, seed=0)
    system.insert_clause([1])
    # Variable 0 was forced to True; recourse equals flips performed.
    assert system.recourse_last_update >= 0
    flips = sum(len(ev.changed) for ev in system.engine.trace)
    assert system.recourse_last_update == flips


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_validator_agrees_with_reference_evaluator(seed):
    n = 25
    ops = gen_cnf_stream(n=n, k=3, eps=0.05, q=80, delete_ratio=0.4, seed=seed)
    system = CnfSystem(n, seed=seed + 1)
    validator = CnfSatValidator(n, capacity=4, width=2)  # force growth paths

    def check(sys, op, segment):
        if op[0] == "+":
            idx = sys.next_index - 1
            validator.on_insert(idx, sys.clauses[idx].literals)
        else:
            validator.on_delete(op[1])
        assert validator.all_satisfied(sys.assignment) == sys.satisfies_all()
        assert sys.satisfies_all()

    run_stream(system, Oblivious(ops), on_update=check)


def test_validator_detects_violation():
    validator = CnfSatValidator(2)
    validator.on_insert(0, parse_literals([1, 2]))
    assert not validator.all_satisfied([0, 0])
    assert validator.all_satisfied([1, 0])
    validator.on_delete(0)
    assert validator.all_satisfied([0, 0])


def test_determinism_same_seed_same_everything():
    ops = gen_cnf_stream(n=50, k=3, eps=0.05, q=300, delete_ratio=0.3, seed=2)
    runs = []
    for _ in range(2):
        system = CnfSystem(50, seed=9)
        run_stream(system, Oblivious(ops))
        runs.append((tuple(system.assignment), tuple(system.engine.trace),
                     system.engine.rng.words_drawn))
    assert runs[0] == runs[1]
    other = CnfSystem(50, seed=10)
    run_stream(other, Oblivious(ops))
    assert (tuple(other.assignment), tuple(other.engine.trace),
            other.engine.rng.words_drawn) != runs[0]
