"""Product state space over finitely-valued variables.

Assignments take values[i] in [0, c_i).  Flaws are predicates over a declared
support; resampling redraws exactly the support, ascending variable index,
one draw per variable.  All oracle computations (probabilities, charges) use
exact rational arithmetic so equality tests are exact.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import prod
from typing import Callable, Optional

from .errors import BudgetExceeded
from .rng import DrawStream

ENUMERATION_BUDGET = 1 << 20
CHARGE_BUDGET = 1 << 16


@dataclass(frozen=True)
class VariableSpace:
    domains: tuple[int, ...]

    def __post_init__(self):
        if any(c < 1 for c in self.domains):
            raise ValueError("all domain sizes must be >= 1")

    @property
    def n(self) -> int:
        return len(self.domains)

    def size(self) -> int:
        return prod(self.domains)

    def states(self):
        return itertools.product(*(range(c) for c in self.domains))


class VariableFlaw:
    """A constraint determined by the variables in ``vbl``.

    ``violates`` receives the restriction of an assignment to vbl (a tuple in
    vbl order) and returns whether the flaw is present.
    """

    def __init__(self, fid: int, vbl, violates: Callable[[tuple], bool]):
        if not vbl:
            # A flaw independent of all variables is either permanently
            # present or vacuous; neither is resampleable.
            raise ValueError("flaw support must be non-empty")
        self.id = fid
        self.vbl = tuple(sorted(vbl))
        if len(set(self.vbl)) != len(self.vbl):
            raise ValueError("duplicate variable in support")
        self.violates = violates

    def present(self, values) -> bool:
        return self.violates(tuple(values[i] for i in self.vbl))

    def check_support_exact(self, space: VariableSpace) -> bool:
        """Brute-force check that vbl is exactly the minimal support."""
        if space.size() > ENUMERATION_BUDGET:
            raise BudgetExceeded("state space too large for support check")
        states = [list(s) for s in space.states()]
        # No dependence outside vbl.
        outside = [i for i in range(space.n) if i not in self.vbl]
        for sigma in states:
            base = self.present(sigma)
            for i in outside:
                for v in range(space.domains[i]):
                    if v == sigma[i]:
                        continue
                    other = list(sigma)
                    other[i] = v
                    if self.present(other) != base:
                        return False
        # Every listed variable has a witness pair.
        for i in self.vbl:
            found = False
            for sigma in states:
                for v in range(space.domains[i]):
                    if v == sigma[i]:
                        continue
                    other = list(sigma)
                    other[i] = v
                    if self.present(other) != self.present(sigma):
                        found = True
                        break
                if found:
                    break
            if not found:
                return False
        return True


def mt_resample(
    values: list[int],
    flaw: VariableFlaw,
    space: VariableSpace,
    rng: DrawStream,
) -> list[tuple[int, int, int]]:
    """Redraw the flaw's support uniformly, in place.

    Returns the (index, old, new) delta for entries that actually changed.
    A draw is consumed for every support variable regardless.
    """
    delta = []
    for i in flaw.vbl:
        old = values[i]
        new = rng.below(space.domains[i])
        if new != old:
            values[i] = new
            delta.append((i, old, new))
    return delta


def probability_of_flaw(flaw: VariableFlaw, space: VariableSpace) -> Fraction:
    """Exact probability that a uniform assignment has the flaw."""
    restriction = prod(space.domains[i] for i in flaw.vbl)
    if restriction > ENUMERATION_BUDGET:
        raise BudgetExceeded("restriction space too large")
    violating = sum(
        1
        for combo in itertools.product(*(range(space.domains[i]) for i in flaw.vbl))
        if flaw.violates(combo)
    )
    return Fraction(violating, restriction)


def dependency_graph(flaws: list[VariableFlaw]) -> dict[int, set[int]]:
    """Flaws sharing at least one variable, self included."""
    adjacency: dict[int, set[int]] = {f.id: {f.id} for f in flaws}
    for a, b in itertools.combinations(flaws, 2):
        if set(a.vbl) & set(b.vbl):
            adjacency[a.id].add(b.id)
            adjacency[b.id].add(a.id)
    return adjacency


def always_select(fid: int):
    """Selection rule under which flaw ``fid`` is chosen whenever present."""

    def rule(values, present_ids) -> Optional[int]:
        return fid if fid in present_ids else None

    return rule


def priority_select(order: dict[int, int]):
    """Permutation-based rule: smallest rank among present flaws wins."""

    def rule(values, present_ids) -> Optional[int]:
        if not present_ids:
            return None
        return min(present_ids, key=lambda i: (order[i], i))

    return rule


def brute_force_charge(
    flaw: VariableFlaw,
    flaws: list[VariableFlaw],
    space: VariableSpace,
    introduced_at_least: frozenset[int] = frozenset(),
    selection_rule=None,
) -> Fraction:
    """Exact generalized charge by full enumeration (uniform measure).

    Enumerates every state sigma where the flaw is present and selected,
    every outcome tau of its uniform support redraw, accumulates transition
    mass into tau whenever the introduced-flaw set contains
    ``introduced_at_least``, and returns the worst-case target-state mass.
    """
    if space.size() > CHARGE_BUDGET:
        raise BudgetExceeded("state space too large for charge enumeration")
    if selection_rule is None:
        selection_rule = always_select(flaw.id)
    support = flaw.vbl
    dom = [space.domains[i] for i in support]
    rho = Fraction(1, prod(dom))
    mass: dict[tuple, Fraction] = {}
    for sigma in space.states():
        present = frozenset(f.id for f in flaws if f.present(sigma))
        if flaw.id not in present:
            continue
        if selection_rule(sigma, present) != flaw.id:
            continue
        for redraw in itertools.product(*(range(c) for c in dom)):
            tau = list(sigma)
            for i, v in zip(support, redraw):
                tau[i] = v
            tau = tuple(tau)
            after = frozenset(f.id for f in flaws if f.present(tau))
            introduced = after - present
            if flaw.id in after:
                introduced = introduced | {flaw.id}
            if introduced_at_least <= introduced:
                mass[tau] = mass.get(tau, Fraction(0)) + rho
    return max(mass.values(), default=Fraction(0))
