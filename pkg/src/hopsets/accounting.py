"""Round and work counters for the simulated synchronous execution.

``rounds`` counts logical synchronous steps: a pulse costs its full hop
budget plus one step each for distribution and aggregation, even when the
simulation stops early at a fixpoint.  ``executed_rounds`` counts what was
actually run.  ``work`` counts record merges and relaxations.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass


@dataclass
class Counters:
    rounds: int = 0
    executed_rounds: int = 0
    work: int = 0
    pulses: int = 0

    def add_pulse(self, hopbound: int, executed: int) -> None:
        self.pulses += 1
        self.rounds += hopbound + 2
        self.executed_rounds += executed + 2

    def add_rounds(self, k: int = 1) -> None:
        self.rounds += k
        self.executed_rounds += k

    def absorb(self, other: "Counters") -> None:
        self.rounds += other.rounds
        self.executed_rounds += other.executed_rounds
        self.work += other.work
        self.pulses += other.pulses

    def to_dict(self) -> dict:
        return asdict(self)
