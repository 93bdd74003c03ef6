"""Dynamic CNF maintenance under clause insertions and deletions.

Each active clause is a flaw over the binary assignment; fixing a violated
clause redraws its variables uniformly and re-checks the variable-sharing
clauses for newly violated ones.  Occurrence lists give each clause's
neighborhood in time proportional to its variables' occurrence counts.

A clause index is assigned at insertion and never reused, so re-inserting an
identical clause yields a fresh flaw id.  Priorities equal indices: older
clauses are fixed first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .engine import Engine, FlawHandle, TraceEvent
from .errors import (
    BoundedDependenceViolated,
    DuplicateVariableInClause,
    UnknownClause,
)


@dataclass(frozen=True)
class Clause:
    index: int
    literals: tuple[tuple[int, bool], ...]  # (variable, required value)

    @property
    def width(self) -> int:
        return len(self.literals)

    def weight(self) -> float:
        return 2.0 ** -self.width


def parse_literals(dimacs_literals) -> tuple[tuple[int, bool], ...]:
    """DIMACS-style signed literals (1-based) to (0-based var, wanted value)."""
    lits = []
    seen = set()
    for lit in dimacs_literals:
        if lit == 0:
            raise ValueError("literal 0 is not allowed")
        var = abs(lit) - 1
        if var in seen:
            raise DuplicateVariableInClause(f"variable {var + 1} repeated")
        seen.add(var)
        lits.append((var, lit > 0))
    if not lits:
        raise ValueError("empty clause")
    return tuple(lits)


class CnfSystem:
    def __init__(
        self,
        n: int,
        seed: int,
        step_budget: int = 10**6,
        verify_dependence: bool = False,
        dependence_eps: float = 0.0,
        record_deltas: bool = True,
    ):
        self.n = n
        self.engine = Engine(seed, step_budget=step_budget, record_deltas=record_deltas)
        self.verify_dependence = verify_dependence
        self.dependence_eps = dependence_eps
        # Random start: the initial values might as well be random, since
        # every variable gets redrawn eventually anyway.
        self.assignment = [self.engine.rng.below(2) for _ in range(n)]
        self.clauses: dict[int, Clause] = {}
        self.occurrence: list[set[int]] = [set() for _ in range(n)]
        self.neighbors: dict[int, set[int]] = {}
        self.next_index = 0
        self.recourse_last_update = 0

    # -- flaw behavior ----------------------------------------------------

    def check_clause_flaw(self, index: int) -> bool:
        clause = self.clauses.get(index)
        if clause is None:
            raise UnknownClause(f"clause {index} not active")
        values = self.assignment
        return all(values[var] != want for var, want in clause.literals)

    def _violated(self, index: int) -> bool:
        values = self.assignment
        return all(values[var] != want for var, want in self.clauses[index].literals)

    def resample_clause(self, index: int, rng):
        clause = self.clauses[index]
        before = {j for j in self.neighbors[index] if self._violated(j)}
        delta = []
        for var in sorted(v for v, _ in clause.literals):
            old = self.assignment[var]
            new = rng.below(2)
            if new != old:
                self.assignment[var] = old = new
                delta.append((var, 1 - new, new))
        self.recourse_last_update += len(delta)
        introduced = sorted(
            j for j in self.neighbors[index] if self._violated(j) and j not in before
        )
        if self._violated(index) and index not in introduced:
            introduced = sorted(introduced + [index])
        return introduced, delta

    # -- updates ----------------------------------------------------------

    def insert_clause(self, dimacs_literals) -> tuple[int, list[TraceEvent]]:
        literals = parse_literals(dimacs_literals)
        index = self.next_index
        self.next_index += 1
        clause = Clause(index=index, literals=literals)
        neighborhood = {index}
        for var, _ in literals:
            neighborhood.update(self.occurrence[var])
        self.clauses[index] = clause
        self.neighbors[index] = neighborhood
        for var, _ in literals:
            self.occurrence[var].add(index)
        for j in neighborhood:
            if j != index:
                self.neighbors[j].add(index)
        if self.verify_dependence:
            ok, worst = self._dependence_ok_around(index)
            if not ok:
                self._unlink(index)
                self.next_index -= 1
                raise BoundedDependenceViolated(
                    f"inserting clause {index} pushes clause {worst} over the bound"
                )
        self.recourse_last_update = 0
        handle = FlawHandle(
            id=index,
            priority=index,
            check=lambda idx=index: self.check_clause_flaw(idx),
            resample=lambda rng, idx=index: self.resample_clause(idx, rng),
        )
        segment = self.engine.insert_flaw(handle)
        return index, segment

    def delete_clause(self, index: int) -> None:
        if index not in self.clauses:
            raise UnknownClause(f"clause {index} not active")
        self.engine.remove_flaw(index)
        self._unlink(index)
        self.recourse_last_update = 0

    def _unlink(self, index: int) -> None:
        clause = self.clauses.pop(index)
        for var, _ in clause.literals:
            self.occurrence[var].discard(index)
        for j in self.neighbors.pop(index):
            if j in self.neighbors:
                self.neighbors[j].discard(index)

    def apply_op(self, op) -> list[TraceEvent]:
        kind = op[0]
        if kind == "+":
            _, segment = self.insert_clause(op[1])
            return segment
        if kind == "-":
            self.delete_clause(op[1])
            return []
        raise ValueError(f"unknown op {op!r}")

    # -- verification -----------------------------------------------------

    def _dependence_sum(self, index: int) -> float:
        return sum(self.clauses[j].weight() for j in self.neighbors[index])

    def _dependence_ok_around(self, index: int):
        bound = 1.0 / math.e - self.dependence_eps
        for j in self.neighbors[index]:
            if self._dependence_sum(j) > bound:
                return False, j
        return True, None

    def verify_bounded_dependence(self, eps: float):
        """Check every active clause's neighborhood weight against 1/e - eps."""
        bound = 1.0 / math.e - eps
        worst, worst_sum = None, -1.0
        for index in self.clauses:
            s = self._dependence_sum(index)
            if s > worst_sum:
                worst, worst_sum = index, s
        return worst_sum <= bound, {"worst_clause": worst, "worst_sum": worst_sum}

    def satisfies_all(self) -> bool:
        """Independent full-formula evaluator (no shared fast paths)."""
        for clause in self.clauses.values():
            if all(self.assignment[v] != want for v, want in clause.literals):
                return False
        return True

    def rebuild_structures(self):
        """From-scratch occurrence/neighbor rebuild, for consistency checks."""
        occurrence = [set() for _ in range(self.n)]
        for idx, clause in self.clauses.items():
            for var, _ in clause.literals:
                occurrence[var].add(idx)
        neighbors = {}
        for idx, clause in self.clauses.items():
            nbrs = {idx}
            for var, _ in clause.literals:
                nbrs.update(occurrence[var])
            neighbors[idx] = nbrs
        return occurrence, neighbors

    def structures_consistent(self) -> bool:
        occurrence, neighbors = self.rebuild_structures()
        return occurrence == self.occurrence and neighbors == self.neighbors


class CnfSatValidator:
    """Vectorized satisfaction check over all active clauses.

    Kept fully separate from CnfSystem's data structures: it receives clause
    insert/delete notifications and the raw assignment, nothing else.  Rows of
    deleted or unused clauses point at a dummy always-true literal.
    """

    def __init__(self, n: int, capacity: int = 1024, width: int = 16):
        self.n = n
        self.width = width
        self.capacity = capacity
        self.vars = np.full((capacity, width), n, dtype=np.int32)
        self.want = np.zeros((capacity, width), dtype=np.int8)
        self.rows_used = 0

    def _grow(self, rows: int, width: int):
        capacity = max(self.capacity, rows)
        while capacity < rows:
            capacity *= 2
        if rows > self.capacity or width > self.width:
            new_vars = np.full((capacity, width), self.n, dtype=np.int32)
            new_want = np.zeros((capacity, width), dtype=np.int8)
            new_vars[: self.rows_used, : self.width] = self.vars[: self.rows_used]
            new_want[: self.rows_used, : self.width] = self.want[: self.rows_used]
            self.vars, self.want = new_vars, new_want
            self.capacity, self.width = capacity, width

    def on_insert(self, index: int, literals):
        if index + 1 > self.capacity or len(literals) > self.width:
            self._grow(
                max(index + 1, 2 * self.capacity), max(len(literals), self.width)
            )
        self.rows_used = max(self.rows_used, index + 1)
        row_v = np.full(self.width, self.n, dtype=np.int32)
        row_w = np.zeros(self.width, dtype=np.int8)
        for k, (var, wanted) in enumerate(literals):
            row_v[k] = var
            row_w[k] = 1 if wanted else 0
        # Pad with the first literal so padding never satisfies on its own.
        row_v[len(literals) :] = literals[0][0]
        row_w[len(literals) :] = 1 if literals[0][1] else 0
        self.vars[index] = row_v
        self.want[index] = row_w

    def on_delete(self, index: int):
        self.vars[index] = self.n
        self.want[index] = 0

    def all_satisfied(self, assignment) -> bool:
        values = np.empty(self.n + 1, dtype=np.int8)
        values[: self.n] = assignment
        values[self.n] = 0
        rows = self.rows_used
        if rows == 0:
            return True
        sat = (values[self.vars[:rows]] == self.want[:rows]).any(axis=1)
        return bool(sat.all())
