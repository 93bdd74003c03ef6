"""Convergence condition checkers and the conversions between them.

Four successively simpler sufficient criteria for rapid convergence of the
resampling loop, checked in 64-bit floating point with a relative guard band:
an inequality that holds by less than the band is reported as marginal and
counts as a failure, keeping verdicts sound despite rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .errors import DegenerateParameter, NeighborhoodTooLarge

GUARD_BAND = 1e-9
PSI_FLOOR = 2.0**-60
FULL_FORM_NEIGHBORHOOD_CAP = 20
COND3_EPS_MAX = 0.68  # upper end of the range where ln(1-e) >= -e(1+e)


@dataclass
class ChargeProfile:
    """Charges and neighborhoods for a flaw system.

    gamma[i] is the plain charge; gamma_s, when available, maps
    (flaw id, frozenset of flaw ids) to the generalized charge.
    Neighborhoods include the flaw itself (self-introduction).
    """

    gamma: dict[int, float]
    neighborhoods: dict[int, set[int]]
    gamma_s: Optional[dict[tuple[int, frozenset[int]], float]] = None

    def restricted(self, subset: set[int]) -> "ChargeProfile":
        keep = set(subset)
        return ChargeProfile(
            gamma={i: g for i, g in self.gamma.items() if i in keep},
            neighborhoods={
                i: (nbrs & keep) | {i}
                for i, nbrs in self.neighborhoods.items()
                if i in keep
            },
            gamma_s=None
            if self.gamma_s is None
            else {
                (i, s): g
                for (i, s), g in self.gamma_s.items()
                if i in keep and s <= keep
            },
        )


@dataclass
class CheckReport:
    ok: bool
    margins: dict[int, float] = field(default_factory=dict)
    worst: Optional[int] = None

    def __bool__(self) -> bool:
        return self.ok


def _guarded_le(lhs: float, rhs: float) -> bool:
    if rhs > 0:
        return lhs <= rhs * (1.0 - GUARD_BAND)
    return lhs <= rhs


def _collect(margins: dict[int, float]) -> CheckReport:
    if not margins:
        return CheckReport(ok=True)
    worst = min(margins, key=margins.get)
    return CheckReport(ok=margins[worst] > 0, margins=margins, worst=worst)


def check_condition1(
    profile: ChargeProfile,
    psi: dict[int, float],
    eps: float,
    simplified: bool = False,
) -> CheckReport:
    """Point-to-set criterion: (1/psi_i) * sum_{S in Gamma_i} gamma_i^S Psi(S) <= 1-eps.

    The simplified form upper-bounds every gamma_i^S by gamma_i, collapsing
    the subset sum to (gamma_i/psi_i) * prod_{j in Gamma_i} (1+psi_j).
    """
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    if any(p <= 0 for p in psi.values()):
        raise ValueError("all psi must be positive")
    margins: dict[int, float] = {}
    for i, nbrs in profile.neighborhoods.items():
        if simplified or profile.gamma_s is None:
            total = float(profile.gamma[i])
            for j in nbrs:
                total *= 1.0 + psi[j]
            lhs = total / psi[i]
        else:
            members = sorted(nbrs)
            if len(members) > FULL_FORM_NEIGHBORHOOD_CAP:
                raise NeighborhoodTooLarge(
                    f"|Gamma_{i}| = {len(members)} exceeds the subset budget"
                )
            lhs = 0.0
            for mask in range(1 << len(members)):
                subset = frozenset(
                    members[b] for b in range(len(members)) if mask >> b & 1
                )
                g = profile.gamma_s.get((i, subset))
                if g is None:
                    continue
                weight = 1.0
                for j in subset:
                    weight *= psi[j]
                lhs += float(g) * weight
            lhs /= psi[i]
        rhs = 1.0 - eps
        margins[i] = rhs * (1.0 - GUARD_BAND) - lhs
    return _collect(margins)


def check_condition2(profile: ChargeProfile, x: dict[int, float], eps: float) -> CheckReport:
    """Asymmetric criterion: gamma_i <= (1-eps) * x_i * prod_{j != i} (1-x_j)."""
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    if any(not 0 <= v < 1 for v in x.values()):
        raise ValueError("all x must lie in [0, 1)")
    margins = {}
    for i, nbrs in profile.neighborhoods.items():
        rhs = (1.0 - eps) * x[i]
        for j in nbrs:
            if j != i:
                rhs *= 1.0 - x[j]
        lhs = float(profile.gamma[i])
        margins[i] = (rhs * (1.0 - GUARD_BAND) if rhs > 0 else rhs) - lhs
    return _collect(margins)


def check_condition3(profile: ChargeProfile, eps: float) -> CheckReport:
    """Local union bound: sum_{j in Gamma_i} gamma_j < 1/e - eps."""
    if not 0 < eps <= COND3_EPS_MAX:
        raise ValueError(f"eps must lie in (0, {COND3_EPS_MAX}]")
    rhs = 1.0 / math.e - eps
    margins = {}
    for i, nbrs in profile.neighborhoods.items():
        lhs = sum(float(profile.gamma[j]) for j in nbrs)
        margins[i] = (rhs * (1.0 - GUARD_BAND) if rhs > 0 else rhs) - lhs
    return _collect(margins)


def check_condition4(p: float, d: int, eps: float) -> bool:
    """Symmetric criterion: p * (d+1) * e < 1 - eps."""
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    return _guarded_le(p * (d + 1) * math.e, 1.0 - eps)


def convert3_to_2(profile: ChargeProfile) -> dict[int, float]:
    """x_i = e*gamma_i / (1 + e*gamma_i)."""
    return {
        i: math.e * float(g) / (1.0 + math.e * float(g))
        for i, g in profile.gamma.items()
    }


def convert2_to_1(x: dict[int, float]) -> dict[int, float]:
    """psi_i = x_i / (1 - x_i), floored away from zero.

    Condition 1 requires strictly positive psi; zero-charge flaws would get
    psi = 0, so those are clamped to a negligible floor.
    """
    psi = {}
    for i, v in x.items():
        if v >= 1.0:
            raise DegenerateParameter(f"x_{i} = {v} outside [0, 1)")
        psi[i] = max(v / (1.0 - v), PSI_FLOOR)
    return psi


def check_subset_closure(
    profile: ChargeProfile,
    psi: dict[int, float],
    eps: float,
    subset: set[int],
) -> CheckReport:
    """Condition 1 restricted to a subset of flaws, same parameters."""
    return check_condition1(profile.restricted(subset), psi, eps, simplified=True)
