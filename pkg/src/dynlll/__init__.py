"""Dynamic resampling engine with two applications.

Maintains a flawless state (satisfying assignment, two-layer proper list
coloring) under adversarial insertions and deletions of constraints, with
convergence-condition checkers, exact charge oracles, and breakage-forest
diagnostics.
"""

from .engine import Engine, FlawHandle, TraceEvent, UpdateOp
from .rng import DrawStream

__all__ = ["Engine", "FlawHandle", "TraceEvent", "UpdateOp", "DrawStream"]

__version__ = "0.1.0"
