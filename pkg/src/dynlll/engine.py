"""Generic dynamic resampling engine.

The engine owns nothing about the application state: a flaw is a handle
bundling a presence check, a randomized repair procedure, and a priority key.
Updates (insert / delete / requeue) register or drop handles and then drive
select/address until no registered flaw is present, recording a full trace.

Selection pops a lazy priority queue: entries whose flaw is gone or whose
check is now false (collaterally fixed) are discarded.  Duplicate queue
entries are allowed and harmless for the same reason.  Selection depends only
on the queue contents and the comparator, never on randomness consumed by
repairs, so two runs with the same seed and update sequence are bit-identical.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

from .errors import DuplicateFlaw, FlawNotPresent, StepBudgetExceeded, UnknownFlaw
from .rng import DrawStream

DEFAULT_STEP_BUDGET = 10**6

# ResampleFn applies the repair to the application state and reports
# (introduced flaw ids, list of (slot, old, new) deltas).  "Introduced" must
# follow the creation rule: flaws newly present after the transition, plus the
# repaired flaw itself when it is still present.
ResampleFn = Callable[[DrawStream], tuple[list[int], list[tuple[int, int, int]]]]


@dataclass(frozen=True)
class FlawHandle:
    """Identity and behavior of one constraint."""

    id: int
    priority: Any
    check: Callable[[], bool]
    resample: ResampleFn
    kind: int = 0

    def sort_key(self):
        # Ties broken by id so the order is a strict total order.
        return (self.priority, self.id)


@dataclass(frozen=True)
class TraceEvent:
    """One resampling step."""

    step: int
    update: int
    flaw: int
    introduced: tuple[int, ...]
    changed: Optional[tuple[tuple[int, int, int], ...]]


@dataclass(frozen=True)
class UpdateOp:
    """Engine-level update record: which flaw ids this update touched."""

    kind: str  # "insert" | "delete" | "requeue"
    flaws: tuple[int, ...]


@dataclass
class EngineStats:
    resamplings: int = 0
    queue_pushes: int = 0

    def snapshot(self) -> "EngineStats":
        return EngineStats(self.resamplings, self.queue_pushes)


class Engine:
    def __init__(
        self,
        seed: int,
        step_budget: int = DEFAULT_STEP_BUDGET,
        record_deltas: bool = True,
        check_selection: bool = False,
    ):
        self.rng = DrawStream(seed)
        self.step_budget = step_budget
        self.record_deltas = record_deltas
        self.check_selection = check_selection
        self.active: dict[int, FlawHandle] = {}
        self._queue: list[tuple[Any, int]] = []
        self.trace: list[TraceEvent] = []
        self.updates: list[UpdateOp] = []
        self.t = 0
        self.stats = EngineStats()
        self._current_update = -1

    # -- queue ------------------------------------------------------------

    def _push(self, fid: int) -> None:
        heapq.heappush(self._queue, (self.active[fid].sort_key(), fid))
        self.stats.queue_pushes += 1

    def select(self) -> Optional[FlawHandle]:
        """Pop queued flaws in priority order; return the first one present."""
        while self._queue:
            _, fid = heapq.heappop(self._queue)
            handle = self.active.get(fid)
            if handle is None:
                continue
            if handle.check():
                if self.check_selection:
                    self._assert_selection_sound(handle)
                return handle
        return None

    def _assert_selection_sound(self, chosen: FlawHandle) -> None:
        present = [h for h in self.active.values() if h.check()]
        best = min(present, key=FlawHandle.sort_key)
        if best.id != chosen.id:
            raise AssertionError(
                f"selection unsound: popped {chosen.id}, scan says {best.id}"
            )

    # -- resampling loop --------------------------------------------------

    def address(self, handle: FlawHandle) -> TraceEvent:
        if not handle.check():
            raise FlawNotPresent(f"flaw {handle.id} not present")
        introduced, changed = handle.resample(self.rng)
        for fid in introduced:
            if fid in self.active:
                self._push(fid)
        event = TraceEvent(
            step=self.t,
            update=self._current_update,
            flaw=handle.id,
            introduced=tuple(introduced),
            changed=tuple(changed) if self.record_deltas else None,
        )
        self.t += 1
        self.trace.append(event)
        self.stats.resamplings += 1
        return event

    def run_to_flawless(self) -> list[TraceEvent]:
        segment: list[TraceEvent] = []
        while True:
            handle = self.select()
            if handle is None:
                return segment
            if len(segment) >= self.step_budget:
                raise StepBudgetExceeded(
                    f"more than {self.step_budget} resamplings in one update"
                )
            segment.append(self.address(handle))

    # -- updates ----------------------------------------------------------

    def insert_flaw(self, handle: FlawHandle) -> list[TraceEvent]:
        if handle.id in self.active:
            raise DuplicateFlaw(f"flaw {handle.id} already active")
        self.active[handle.id] = handle
        self.updates.append(UpdateOp("insert", (handle.id,)))
        self._current_update = len(self.updates) - 1
        self._push(handle.id)
        return self.run_to_flawless()

    def remove_flaw(self, fid: int) -> None:
        # Deletion is free: no resampling, the state cannot gain a flaw.
        if fid not in self.active:
            raise UnknownFlaw(f"flaw {fid} not active")
        del self.active[fid]
        self.updates.append(UpdateOp("delete", (fid,)))
        self._current_update = len(self.updates) - 1

    def requeue(self, fids: list[int]) -> list[TraceEvent]:
        """Flaw replacement: re-enqueue live flaws whose definition changed.

        Observationally identical to remove-then-add with fresh semantics,
        since handles read live application data.
        """
        for fid in fids:
            if fid not in self.active:
                raise UnknownFlaw(f"flaw {fid} not active")
        self.updates.append(UpdateOp("requeue", tuple(fids)))
        self._current_update = len(self.updates) - 1
        for fid in fids:
            self._push(fid)
        return self.run_to_flawless()

    # -- inspection -------------------------------------------------------

    def is_flawless(self) -> bool:
        return all(not h.check() for h in self.active.values())

    def flaw_sequence(self) -> list[int]:
        return [ev.flaw for ev in self.trace]
