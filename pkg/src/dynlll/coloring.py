"""Dynamic list coloring of triangle-free bounded-degree graphs.

Two-layer coloring.  The first layer sigma1 is a partial proper coloring
(Blank = 0 allowed) maintained flawless by the resampling engine under two
flaw families per vertex:

  B_v  fires when fewer than ``low`` colors remain available to v
       (a color is available if Blank or unused by every neighbor);
  Z_v  fires when v has at least ``low - 1`` Blank neighbors.

Fixing either flaw redraws sigma1 on every neighbor of v, ascending vertex
id, uniformly from that neighbor's currently available colors.  The second
layer sigma2 is a full proper list coloring completed greedily from sigma1:
colored vertices keep their color, Blank vertices take the smallest available
non-Blank color unused by any neighbor's sigma2.  With both flaw families
absent, a Blank vertex has at least ``low - 1`` available non-Blank colors
and at most ``low - 2`` Blank neighbors, so the greedy step never gets stuck.

Edge updates requeue the four endpoint flaws (plus the Z flaws of any vertex
whose neighbor was Blanked to restore partial properness), re-run the engine,
then patch sigma2 on the vertices whose first layer or neighborhood changed.
"""

from __future__ import annotations

import math

import numpy as np

from .engine import Engine, FlawHandle, TraceEvent
from .errors import (
    DegenerateParameter,
    DegreeCapExceeded,
    EdgeExists,
    NoColorAvailable,
    TriangleCreated,
    UnknownEdge,
)
from .rng import DrawStream

BLANK = 0
MIN_DELTA = 100
CERT_EPS = 0.25


def parameters_for(delta: int) -> tuple[int, int]:
    """(list length, availability threshold) for maximum degree delta."""
    if delta < MIN_DELTA:
        raise DegenerateParameter(f"maximum degree must be >= {MIN_DELTA}")
    list_len = math.ceil(6 * delta / math.log(delta))
    low = math.floor(delta**0.7)
    return list_len, low


def generate_palettes(n: int, list_len: int, seed: int) -> list[tuple[int, ...]]:
    """Per-vertex sorted lists of ``list_len`` distinct colors from 1..2*list_len."""
    rng = DrawStream(seed)
    universe = 2 * list_len
    palettes = []
    for _ in range(n):
        pool = list(range(1, universe + 1))
        for k in range(list_len):
            j = k + rng.below(universe - k)
            pool[k], pool[j] = pool[j], pool[k]
        palettes.append(tuple(sorted(pool[:list_len])))
    return palettes


def lll_certificate(delta: int, eps: float = CERT_EPS):
    """Margin of the convergence certificate at maximum degree delta.

    Every flaw has charge at most delta**-3, weight 2*delta**-3, and at most
    2*(delta**2 + 1) dependent flaws, so the simplified point-to-set bound is
    (1/2) * (1 + 2*delta**-3) ** (2*delta**2 + 2) <= 1 - eps.
    """
    gamma = float(delta) ** -3
    psi = 2.0 * gamma
    degree = 2 * (delta * delta + 1)
    lhs = (gamma / psi) * (1.0 + psi) ** degree
    return (1.0 - eps) - lhs, lhs


def flaw_b(v: int) -> int:
    return 2 * v


def flaw_z(v: int) -> int:
    return 2 * v + 1


class ColoringSystem:
    def __init__(
        self,
        n: int,
        delta: int,
        palettes: list[tuple[int, ...]],
        seed: int,
        step_budget: int = 10**6,
        record_deltas: bool = True,
    ):
        list_len, low = parameters_for(delta)
        if len(palettes) != n:
            raise ValueError("need one palette per vertex")
        for pal in palettes:
            if len(set(pal)) != list_len or BLANK in pal:
                raise ValueError(
                    f"palettes must hold {list_len} distinct non-Blank colors"
                )
        self.n = n
        self.delta = delta
        self.low = low
        self.palettes = [tuple(sorted(p)) for p in palettes]
        self.palette_sets = [frozenset(p) for p in self.palettes]
        self.adj: list[set[int]] = [set() for _ in range(n)]
        self.edges: set[tuple[int, int]] = set()
        self.sigma1 = [BLANK] * n
        # blocked[v][c] = how many neighbors of v currently wear color c
        # (tracked only for c in v's palette).
        self.blocked: list[dict[int, int]] = [{} for _ in range(n)]
        self.avail_nonblank = np.full(n, list_len, dtype=np.int64)
        self.blank_nbrs = np.zeros(n, dtype=np.int64)
        self.engine = Engine(seed, step_budget=step_budget, record_deltas=record_deltas)
        for v in range(n):
            self.engine.insert_flaw(
                FlawHandle(
                    id=flaw_b(v),
                    priority=(0, v),
                    check=lambda u=v: self.check_b(u),
                    resample=lambda rng, u=v, f=flaw_b(v): self.resample_around(
                        u, f, rng
                    ),
                    kind=0,
                )
            )
            self.engine.insert_flaw(
                FlawHandle(
                    id=flaw_z(v),
                    priority=(1, v),
                    check=lambda u=v: self.check_z(u),
                    resample=lambda rng, u=v, f=flaw_z(v): self.resample_around(
                        u, f, rng
                    ),
                    kind=1,
                )
            )
        self.sigma2 = [self.palettes[v][0] for v in range(n)]
        self._changed: set[int] = set()
        self.recourse_last_update = 0
        self.sigma1_changes_last_update = 0

    # -- first-layer bookkeeping ------------------------------------------

    def check_b(self, v: int) -> bool:
        return int(self.avail_nonblank[v]) + 1 < self.low

    def check_z(self, v: int) -> bool:
        return int(self.blank_nbrs[v]) >= self.low - 1

    def available(self, v: int) -> list[int]:
        blocked = self.blocked[v]
        return [BLANK] + [c for c in self.palettes[v] if not blocked.get(c)]

    def _set_sigma1(self, v: int, new: int):
        old = self.sigma1[v]
        if new == old:
            return None
        self.sigma1[v] = new
        self.sigma1_changes_last_update += 1
        self._changed.add(v)
        for u in self.adj[v]:
            pset = self.palette_sets[u]
            blocked = self.blocked[u]
            if old != BLANK and old in pset:
                blocked[old] -= 1
                if blocked[old] == 0:
                    self.avail_nonblank[u] += 1
            if new != BLANK and new in pset:
                count = blocked.get(new, 0)
                blocked[new] = count + 1
                if count == 0:
                    self.avail_nonblank[u] -= 1
        if (old == BLANK) != (new == BLANK):
            shift = 1 if new == BLANK else -1
            for u in self.adj[v]:
                self.blank_nbrs[u] += shift
        return (v, old, new)

    def _ball2(self, v: int) -> set[int]:
        ball = {v} | self.adj[v]
        for u in self.adj[v]:
            ball |= self.adj[u]
        return ball

    def _present_in(self, ball) -> frozenset[int]:
        out = []
        for w in ball:
            if self.check_b(w):
                out.append(flaw_b(w))
            if self.check_z(w):
                out.append(flaw_z(w))
        return frozenset(out)

    def resample_around(self, v: int, fid: int, rng):
        ball = self._ball2(v)
        before = self._present_in(ball)
        delta = []
        for u in sorted(self.adj[v]):
            choices = self.available(u)
            change = self._set_sigma1(u, choices[rng.below(len(choices))])
            if change is not None:
                delta.append(change)
        after = self._present_in(ball)
        introduced = set(after - before)
        if fid in after:
            introduced.add(fid)
        return sorted(introduced), delta

    # -- edge updates ------------------------------------------------------

    def _edge_key(self, u: int, v: int) -> tuple[int, int]:
        if u == v or not (0 <= u < self.n and 0 <= v < self.n):
            raise ValueError(f"bad edge endpoints {u}, {v}")
        return (u, v) if u < v else (v, u)

    def insert_edge(self, u: int, v: int) -> list[TraceEvent]:
        key = self._edge_key(u, v)
        if key in self.edges:
            raise EdgeExists(f"edge {key} already present")
        if len(self.adj[u]) >= self.delta or len(self.adj[v]) >= self.delta:
            raise DegreeCapExceeded(f"edge {key} would exceed degree {self.delta}")
        common = self.adj[u] & self.adj[v]
        if common:
            raise TriangleCreated(f"edge {key} closes a triangle via {min(common)}")
        self._begin_update()
        self.edges.add(key)
        self.adj[u].add(v)
        self.adj[v].add(u)
        extra_requeue: list[int] = []
        conflict_fixup: set[int] = set()
        for a, b in ((u, v), (v, u)):
            cb = self.sigma1[b]
            if cb == BLANK:
                self.blank_nbrs[a] += 1
            elif cb in self.palette_sets[a]:
                count = self.blocked[a].get(cb, 0)
                self.blocked[a][cb] = count + 1
                if count == 0:
                    self.avail_nonblank[a] -= 1
        if self.sigma1[u] == self.sigma1[v] != BLANK:
            # Restore partial properness deterministically: Blank the
            # higher-id endpoint.  Its neighbors gain a Blank neighbor,
            # so their Z flaws must be reconsidered.
            blanked = max(u, v)
            self._set_sigma1(blanked, BLANK)
            extra_requeue = [flaw_z(w) for w in sorted(self.adj[blanked])]
        elif self.sigma2[u] == self.sigma2[v]:
            # Both first-layer values cannot be equal non-Blank here, so at
            # least one endpoint is Blank; its greedy color must be re-picked.
            blank_ends = [w for w in (u, v) if self.sigma1[w] == BLANK]
            conflict_fixup.add(max(blank_ends))
        segment = self.engine.requeue(
            [flaw_b(u), flaw_z(u), flaw_b(v), flaw_z(v)] + extra_requeue
        )
        self._complete_sigma2(conflict_fixup)
        return segment

    def delete_edge(self, u: int, v: int) -> list[TraceEvent]:
        key = self._edge_key(u, v)
        if key not in self.edges:
            raise UnknownEdge(f"edge {key} not present")
        self._begin_update()
        self.edges.remove(key)
        self.adj[u].discard(v)
        self.adj[v].discard(u)
        for a, b in ((u, v), (v, u)):
            cb = self.sigma1[b]
            if cb == BLANK:
                self.blank_nbrs[a] -= 1
            elif cb in self.palette_sets[a]:
                self.blocked[a][cb] -= 1
                if self.blocked[a][cb] == 0:
                    self.avail_nonblank[a] += 1
        segment = self.engine.requeue(
            [flaw_b(u), flaw_z(u), flaw_b(v), flaw_z(v)]
        )
        self._complete_sigma2(set())
        return segment

    def apply_op(self, op) -> list[TraceEvent]:
        kind, u, v = op
        if kind == "+":
            return self.insert_edge(u, v)
        if kind == "-":
            return self.delete_edge(u, v)
        raise ValueError(f"unknown op {op!r}")

    def _begin_update(self):
        self._changed = set()
        self.recourse_last_update = 0
        self.sigma1_changes_last_update = 0

    # -- second layer ------------------------------------------------------

    def _complete_sigma2(self, fixup: set[int]) -> None:
        workset = set(self._changed) | fixup
        for t in self._changed:
            for w in self.adj[t]:
                if self.sigma1[w] == BLANK:
                    workset.add(w)
        blanks = []
        for w in sorted(workset):
            if self.sigma1[w] != BLANK:
                if self.sigma2[w] != self.sigma1[w]:
                    self.sigma2[w] = self.sigma1[w]
                    self.recourse_last_update += 1
            else:
                blanks.append(w)
        for w in blanks:
            taken = {self.sigma2[t] for t in self.adj[w]}
            color = next(
                (c for c in self.available(w)[1:] if c not in taken), None
            )
            if color is None:
                raise NoColorAvailable(f"no greedy color for vertex {w}")
            if self.sigma2[w] != color:
                self.sigma2[w] = color
                self.recourse_last_update += 1

    # -- verification ------------------------------------------------------

    def sigma1_partial_proper(self) -> bool:
        return all(
            self.sigma1[a] == BLANK or self.sigma1[a] != self.sigma1[b]
            for a, b in self.edges
        )

    def sigma2_proper(self) -> bool:
        return all(self.sigma2[a] != self.sigma2[b] for a, b in self.edges)

    def sigma2_from_lists(self) -> bool:
        return all(self.sigma2[v] in self.palette_sets[v] for v in range(self.n))

    def flawless(self) -> bool:
        b_ok = bool((self.avail_nonblank + 1 >= self.low).all())
        z_ok = bool((self.blank_nbrs < self.low - 1).all())
        return b_ok and z_ok

    def counters_consistent(self) -> bool:
        """Recompute availability and Blank counters from scratch."""
        for v in range(self.n):
            worn = {
                self.sigma1[u]
                for u in self.adj[v]
                if self.sigma1[u] != BLANK
            }
            avail = sum(1 for c in self.palettes[v] if c not in worn)
            blanks = sum(1 for u in self.adj[v] if self.sigma1[u] == BLANK)
            if avail != int(self.avail_nonblank[v]):
                return False
            if blanks != int(self.blank_nbrs[v]):
                return False
        return True

    def dependency_over_flaws(self) -> dict[int, set[int]]:
        """Flaw adjacency: both flaws of every vertex within distance two."""
        dep: dict[int, set[int]] = {}
        for v in range(self.n):
            ball = self._ball2(v)
            ids = {f for w in ball for f in (flaw_b(w), flaw_z(w))}
            dep[flaw_b(v)] = set(ids)
            dep[flaw_z(v)] = set(ids)
        return dep


class ColoringValidator:
    """Vectorized properness checks, independent of ColoringSystem internals.

    Edge slots are reused via a free list; empty slots point at two sentinel
    vertices whose values always differ.
    """

    def __init__(self, n: int, capacity: int = 1024):
        self.n = n
        self.capacity = capacity
        self.eu = np.full(capacity, n, dtype=np.int64)
        self.ev = np.full(capacity, n + 1, dtype=np.int64)
        self.slot_of: dict[tuple[int, int], int] = {}
        self.free: list[int] = list(range(capacity - 1, -1, -1))

    def _grow(self):
        new_cap = 2 * self.capacity
        eu = np.full(new_cap, self.n, dtype=np.int64)
        ev = np.full(new_cap, self.n + 1, dtype=np.int64)
        eu[: self.capacity] = self.eu
        ev[: self.capacity] = self.ev
        self.free.extend(range(new_cap - 1, self.capacity - 1, -1))
        self.eu, self.ev, self.capacity = eu, ev, new_cap

    def on_insert(self, u: int, v: int):
        if not self.free:
            self._grow()
        slot = self.free.pop()
        key = (u, v) if u < v else (v, u)
        self.slot_of[key] = slot
        self.eu[slot], self.ev[slot] = key

    def on_delete(self, u: int, v: int):
        key = (u, v) if u < v else (v, u)
        slot = self.slot_of.pop(key)
        self.eu[slot], self.ev[slot] = self.n, self.n + 1
        self.free.append(slot)

    def _padded(self, colors) -> np.ndarray:
        values = np.empty(self.n + 2, dtype=np.int64)
        values[: self.n] = colors
        values[self.n] = -1
        values[self.n + 1] = -2
        return values

    def proper(self, colors) -> bool:
        values = self._padded(colors)
        return bool((values[self.eu] != values[self.ev]).all())

    def partial_proper(self, colors) -> bool:
        values = self._padded(colors)
        left = values[self.eu]
        ok = (left != values[self.ev]) | (left == BLANK)
        return bool(ok.all())
