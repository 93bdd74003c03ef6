"""Update-stream generators, adversaries, and per-update metrics.

Generators emit streams that keep the relevant convergence precondition true
at every prefix: CNF streams never let any clause's neighborhood weight
exceed 1/e - eps, and graph streams stay triangle-free (via a fixed random
bipartition) and within the degree cap.

Adversaries produce one operation at a time.  Oblivious ones replay a script;
adaptive ones may inspect the live system; clairvoyant ones may additionally
replay candidate futures on a fresh copy, up to a fixed candidate budget per
step.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

from .errors import AdversaryProtocolBreach, GenerationStalled
from .rng import DrawStream

INSERT_ATTEMPT_BUDGET = 10**4
# Near saturation almost every candidate insert is rejected; after this many
# failures the generator emits a deletion instead (when possible), which
# relieves the pressure.  The full budget applies only when no deletion is
# available, and exhausting it raises GenerationStalled.
INSERT_FALLBACK_ATTEMPTS = 64
CLAIRVOYANT_CANDIDATE_BUDGET = 32


# -- metrics ---------------------------------------------------------------


@dataclass
class Metrics:
    records: list[dict] = field(default_factory=list)
    wall_times: list[float] = field(default_factory=list)  # never serialized

    def record(self, system, op, segment, elapsed: float = 0.0):
        engine = system.engine
        last = engine.updates[-1]
        self.records.append(
            {
                "update": len(self.records),
                "op": op[0],
                "resamplings": len(segment),
                "recourse": system.recourse_last_update,
                "flaw_updates": len(last.flaws),
                "queue_pushes": engine.stats.queue_pushes,
            }
        )
        self.wall_times.append(elapsed)

    def total(self, key: str) -> int:
        return sum(r[key] for r in self.records)

    def serialize(self) -> str:
        lines = [
            " ".join(f"{k}={v}" for k, v in rec.items()) for rec in self.records
        ]
        for key in ("resamplings", "recourse", "flaw_updates"):
            lines.append(f"total_{key}={self.total(key)}")
        lines.append(f"updates={len(self.records)}")
        return "\n".join(lines) + "\n"


def run_stream(system, adversary, metrics: Optional[Metrics] = None,
               on_update=None, max_ops: Optional[int] = None):
    done = 0
    while max_ops is None or done < max_ops:
        op = adversary.next_op(system)
        if op is None:
            break
        start = time.perf_counter()
        segment = system.apply_op(op)
        elapsed = time.perf_counter() - start
        if metrics is not None:
            metrics.record(system, op, segment, elapsed)
        if on_update is not None:
            on_update(system, op, segment)
        done += 1
    return done


# -- adversaries -----------------------------------------------------------


class Oblivious:
    def __init__(self, ops):
        self._ops = iter(ops)

    def next_op(self, system):
        return next(self._ops, None)


class Adaptive:
    """Policy sees the live system and the number of operations so far."""

    def __init__(self, policy: Callable):
        self.policy = policy
        self.t = 0

    def next_op(self, system):
        op = self.policy(system, self.t)
        if op is not None:
            self.t += 1
        return op


class Clairvoyant:
    """Policy may replay candidate futures on a rebuilt copy of the system.

    ``replay(extra_ops)`` rebuilds a fresh system with the same seed, applies
    the full history plus the candidate operations, and returns the total
    resamplings those candidates would trigger.  At most
    CLAIRVOYANT_CANDIDATE_BUDGET replays are allowed per step.
    """

    def __init__(self, policy: Callable, factory: Callable):
        self.policy = policy
        self.factory = factory
        self.history: list = []
        self.t = 0

    def _replay(self, extra_ops):
        self._budget -= 1
        if self._budget < 0:
            raise AdversaryProtocolBreach(
                f"more than {CLAIRVOYANT_CANDIDATE_BUDGET} replays in one step"
            )
        shadow = self.factory()
        for op in self.history:
            shadow.apply_op(op)
        before = shadow.engine.stats.resamplings
        for op in extra_ops:
            shadow.apply_op(op)
        return shadow.engine.stats.resamplings - before

    def next_op(self, system):
        self._budget = CLAIRVOYANT_CANDIDATE_BUDGET
        op = self.policy(system, self.t, self._replay)
        if op is not None:
            self.history.append(op)
            self.t += 1
        return op


def reinsert_last_fixed_cnf(base_ops):
    """Adaptive policy: whenever the engine resampled during the previous
    update, delete that clause and immediately re-insert the same literals;
    otherwise play the next scripted operation."""
    script = iter(base_ops)
    pending = []

    def policy(system, t):
        if pending:
            return pending.pop(0)
        trace = system.engine.trace
        if trace and trace[-1].update == len(system.engine.updates) - 1:
            idx = trace[-1].flaw
            clause = system.clauses.get(idx)
            if clause is not None:
                lits = tuple(
                    (var + 1) if want else -(var + 1) for var, want in clause.literals
                )
                pending.append(("+", lits))
                return ("-", idx)
        # Re-insertion renames clauses, so scripted deletions may point at
        # indices that no longer exist; skip those.
        op = next(script, None)
        while op is not None and op[0] == "-" and op[1] not in system.clauses:
            op = next(script, None)
        return op

    return Adaptive(policy)


def reinsert_last_fixed_coloring(base_ops):
    """Adaptive policy: delete and re-insert an edge at the vertex whose flaw
    was most recently resampled."""
    script = iter(base_ops)
    pending = []

    def policy(system, t):
        if pending:
            return pending.pop(0)
        trace = system.engine.trace
        if trace and trace[-1].update == len(system.engine.updates) - 1:
            v = trace[-1].flaw // 2
            if system.adj[v]:
                u = min(system.adj[v])
                pending.append(("+", min(u, v), max(u, v)))
                return ("-", min(u, v), max(u, v))
        return next(script, None)

    return Adaptive(policy)


# -- generators ------------------------------------------------------------


def _zipf_sampler(rng: DrawStream, size: int, exponent: float):
    weights = [1.0 / (r + 1) ** exponent for r in range(size)]
    total = sum(weights)
    cumulative = []
    acc = 0.0
    for w in weights:
        acc += w / total
        cumulative.append(acc)

    def sample() -> int:
        u = rng.below(1 << 53) / float(1 << 53)
        lo, hi = 0, size - 1
        while lo < hi:
            mid = (lo + hi) // 2
            if cumulative[mid] < u:
                lo = mid + 1
            else:
                hi = mid
        return lo

    return sample


def gen_cnf_stream(
    n: int,
    k: int,
    eps: float,
    q: int,
    delete_ratio: float,
    seed: int,
    zipf: Optional[float] = None,
    var_pool: Optional[list[int]] = None,
):
    """Clause stream whose every prefix keeps all neighborhood weights under
    1/e - eps.  Candidate clauses failing the bound are rejected and redrawn;
    when the pool saturates the generator falls back to a deletion."""
    rng = DrawStream(seed)
    pool = list(range(n)) if var_pool is None else list(var_pool)
    if len(pool) < k:
        raise ValueError("variable pool smaller than clause width")
    pick = (
        _zipf_sampler(rng, len(pool), zipf)
        if zipf is not None
        else (lambda: rng.below(len(pool)))
    )
    max_neighbors = int((1.0 / math.e - eps) * (1 << k))  # |N(C)|, self included
    if max_neighbors < 1:
        raise GenerationStalled("bound leaves no room for a single clause")
    occurrence: dict[int, set[int]] = {}
    clause_vars: dict[int, frozenset[int]] = {}
    nbr_count: dict[int, int] = {}
    active: list[int] = []
    slot_of: dict[int, int] = {}
    ops = []
    next_index = 0

    def try_insert(attempts):
        nonlocal next_index
        for _ in range(attempts):
            chosen: set[int] = set()
            while len(chosen) < k:
                chosen.add(pool[pick()])
            neighbors: set[int] = set()
            for var in chosen:
                neighbors |= occurrence.get(var, set())
            if len(neighbors) + 1 > max_neighbors:
                continue
            if any(nbr_count[j] + 1 > max_neighbors for j in neighbors):
                continue
            lits = tuple(
                (var + 1) if rng.below(2) else -(var + 1) for var in sorted(chosen)
            )
            idx = next_index
            next_index += 1
            clause_vars[idx] = frozenset(chosen)
            nbr_count[idx] = len(neighbors) + 1
            for j in neighbors:
                nbr_count[j] += 1
            for var in chosen:
                occurrence.setdefault(var, set()).add(idx)
            slot_of[idx] = len(active)
            active.append(idx)
            ops.append(("+", lits))
            return True
        return False

    def do_delete():
        pos = rng.below(len(active))
        idx = active[pos]
        last = active.pop()
        if last != idx:
            active[pos] = last
            slot_of[last] = pos
        del slot_of[idx]
        chosen = clause_vars.pop(idx)
        neighbors: set[int] = set()
        for var in chosen:
            occurrence[var].discard(idx)
            neighbors |= occurrence[var]
        for j in neighbors:
            nbr_count[j] -= 1
        del nbr_count[idx]
        ops.append(("-", idx))

    for _ in range(q):
        want_delete = active and rng.below(1 << 20) < int(delete_ratio * (1 << 20))
        if want_delete:
            do_delete()
        elif try_insert(INSERT_FALLBACK_ATTEMPTS if active else 0):
            pass
        elif active:
            do_delete()
        elif not try_insert(INSERT_ATTEMPT_BUDGET):
            raise GenerationStalled("cannot place any clause")
    return ops


def gen_trianglefree_stream(
    n: int,
    delta: int,
    q: int,
    delete_ratio: float,
    seed: int,
    zipf: Optional[float] = None,
    vertex_pool: Optional[list[int]] = None,
):
    """Edge stream over a random bipartition (hence triangle-free at every
    prefix) respecting the degree cap."""
    rng = DrawStream(seed)
    pool = list(range(n)) if vertex_pool is None else list(vertex_pool)
    side = [rng.below(2) for _ in pool]
    left = [v for v, s in zip(pool, side) if s == 0]
    right = [v for v, s in zip(pool, side) if s == 1]
    if not left or not right:
        raise GenerationStalled("degenerate bipartition")
    pick_left = (
        _zipf_sampler(rng, len(left), zipf) if zipf is not None
        else (lambda: rng.below(len(left)))
    )
    pick_right = (
        _zipf_sampler(rng, len(right), zipf) if zipf is not None
        else (lambda: rng.below(len(right)))
    )
    degree = {v: 0 for v in pool}
    edges: list[tuple[int, int]] = []
    slot_of: dict[tuple[int, int], int] = {}
    ops = []

    def try_insert(attempts):
        for _ in range(attempts):
            u, v = left[pick_left()], right[pick_right()]
            key = (u, v) if u < v else (v, u)
            if key in slot_of:
                continue
            if degree[u] >= delta or degree[v] >= delta:
                continue
            slot_of[key] = len(edges)
            edges.append(key)
            degree[u] += 1
            degree[v] += 1
            ops.append(("+",) + key)
            return True
        return False

    def do_delete():
        pos = rng.below(len(edges))
        key = edges[pos]
        last = edges.pop()
        if last != key:
            edges[pos] = last
            slot_of[last] = pos
        del slot_of[key]
        degree[key[0]] -= 1
        degree[key[1]] -= 1
        ops.append(("-",) + key)

    for _ in range(q):
        want_delete = edges and rng.below(1 << 20) < int(delete_ratio * (1 << 20))
        if want_delete:
            do_delete()
        elif try_insert(INSERT_FALLBACK_ATTEMPTS if edges else 0):
            pass
        elif edges:
            do_delete()
        elif not try_insert(INSERT_ATTEMPT_BUDGET):
            raise GenerationStalled("cannot place any edge")
    return ops


# -- scaling probe ---------------------------------------------------------


def linearity_probe(run_at_size: Callable[[int], int], sizes: list[int]):
    """Total work at each size plus successive ratios (0 when the smaller
    total is 0, which makes the doubling test vacuously pass)."""
    totals = [run_at_size(q) for q in sizes]
    ratios = []
    for small, big in zip(totals, totals[1:]):
        ratios.append(0.0 if small == 0 else big / small)
    return totals, ratios
