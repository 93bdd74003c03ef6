"""Breakage forests: per-update trees recording who introduced whom.

One slot per update.  Deletions and updates needing no resampling leave the
slot empty.  Each resampling event is attached under the most recent earlier
event (in the same update) that introduced its flaw; events with no such
introducer must be among the flaws the update itself enqueued, and become
roots.  Because flaw selection is permutation-based, a boundary-set traversal
of the forest reproduces the exact resampling sequence.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from .engine import TraceEvent, UpdateOp
from .errors import InconsistentForest, MalformedTrace


@dataclass
class ForestNode:
    step: int
    flaw: int
    update: int
    parent_step: Optional[int] = None
    children: list["ForestNode"] = field(default_factory=list)


@dataclass
class WitnessForest:
    # slots[j] holds the roots for update j, in creation order.
    slots: list[list[ForestNode]]

    def nodes(self):
        stack = [root for slot in self.slots for root in slot]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(node.children)

    def size(self) -> int:
        return sum(1 for _ in self.nodes())


def build_breakage_forest(
    trace: list[TraceEvent], updates: list[UpdateOp]
) -> WitnessForest:
    slots: list[list[ForestNode]] = [[] for _ in updates]
    by_update: dict[int, list[TraceEvent]] = {}
    for ev in trace:
        by_update.setdefault(ev.update, []).append(ev)
    for j, op in enumerate(updates):
        events = by_update.pop(j, [])
        if not events:
            continue
        if op.kind == "delete":
            raise MalformedTrace(f"deletion update {j} has resampling events")
        allowed_roots = set(op.flaws)
        pending: dict[int, ForestNode] = {}
        for ev in events:
            node = ForestNode(step=ev.step, flaw=ev.flaw, update=j)
            introducer = pending.pop(ev.flaw, None)
            if introducer is not None:
                node.parent_step = introducer.step
                introducer.children.append(node)
            elif ev.flaw in allowed_roots:
                slots[j].append(node)
            else:
                raise MalformedTrace(
                    f"event at step {ev.step}: flaw {ev.flaw} has no introducer "
                    f"and is not a root of update {j}"
                )
            for fid in ev.introduced:
                pending[fid] = node
    if by_update:
        raise MalformedTrace(f"trace references unknown updates {sorted(by_update)}")
    return WitnessForest(slots=slots)


def reconstruct_sequence(
    forest: WitnessForest, priority_key: Callable[[int], object]
) -> list[int]:
    """Replay the flaw sequence from the forest via the boundary rule.

    At every step the highest-priority flaw in the set of known-but-unvisited
    nodes is the one the selection rule must have picked; visiting it adds
    its children to the boundary.
    """
    sequence: list[int] = []
    for roots in forest.slots:
        boundary: list[ForestNode] = list(roots)
        while boundary:
            best = min(
                range(len(boundary)),
                key=lambda k: (priority_key(boundary[k].flaw), boundary[k].flaw),
            )
            node = boundary.pop(best)
            sequence.append(node.flaw)
            boundary.extend(node.children)
    return sequence


def is_proper(forest: WitnessForest, dependency: dict[int, set[int]]) -> bool:
    """No node has two children labelled with flaws that depend on each other."""
    for node in forest.nodes():
        labels = [c.flaw for c in node.children]
        for a in range(len(labels)):
            for b in range(a + 1, len(labels)):
                if labels[a] == labels[b]:
                    return False
                if labels[b] in dependency.get(labels[a], set()):
                    return False
    return True


def serialize_forest(forest: WitnessForest) -> str:
    """Line format: <step> <flaw> <parent step or 'root'> <update>."""
    lines = []
    for node in sorted(forest.nodes(), key=lambda n: n.step):
        parent = "root" if node.parent_step is None else str(node.parent_step)
        lines.append(f"{node.step} {node.flaw} {parent} {node.update}")
    return "\n".join(lines) + ("\n" if lines else "")


def parse_forest(text: str, n_updates: int) -> WitnessForest:
    slots: list[list[ForestNode]] = [[] for _ in range(n_updates)]
    by_step: dict[int, ForestNode] = {}
    parents: dict[int, int] = {}
    for raw in text.splitlines():
        raw = raw.strip()
        if not raw:
            continue
        parts = raw.split()
        if len(parts) != 4:
            raise InconsistentForest(f"bad forest line: {raw!r}")
        step, flaw, parent, update = parts
        node = ForestNode(step=int(step), flaw=int(flaw), update=int(update))
        by_step[node.step] = node
        if parent == "root":
            slots[node.update].append(node)
        else:
            node.parent_step = int(parent)
            parents[node.step] = int(parent)
    for step, parent_step in parents.items():
        if parent_step not in by_step:
            raise InconsistentForest(f"node {step} references missing parent")
        by_step[parent_step].children.append(by_step[step])
    for node in by_step.values():
        node.children.sort(key=lambda n: n.step)
    return WitnessForest(slots=slots)
