"""
Global DOF numbering of the coupled problem.

    [ solid u (3 per node) | beam nodes 1..n (w, theta) | lambda (3) | mu (3) ]
"""

from __future__ import annotations

from dataclasses import dataclass

N_MULTIPLIERS = 6


@dataclass(frozen=True)
class DofLayout:
    n_solid_nodes: int
    n_beam_elements: int
    n_multipliers: int = N_MULTIPLIERS

    @property
    def n_solid(self) -> int:
        return 3 * self.n_solid_nodes

    @property
    def n_beam(self) -> int:
        return 6 * self.n_beam_elements

    @property
    def n_primal(self) -> int:
        return self.n_solid + self.n_beam

    @property
    def size(self) -> int:
        return self.n_primal + self.n_multipliers

    @property
    def solid(self) -> slice:
        return slice(0, self.n_solid)

    @property
    def beam(self) -> slice:
        return slice(self.n_solid, self.n_primal)

    @property
    def multipliers(self) -> slice:
        return slice(self.n_primal, self.size)

    def beam_node(self, i: int) -> int:
        """First global DOF of beam node ``i`` (1 <= i <= n)."""
        if not 1 <= i <= self.n_beam_elements:
            raise IndexError(f"beam node {i} is clamped or out of range")
        return self.n_solid + 6 * (i - 1)

    @property
    def tip_w(self) -> slice:
        start = self.beam_node(self.n_beam_elements)
        return slice(start, start + 3)

    @property
    def tip_theta(self) -> slice:
        start = self.beam_node(self.n_beam_elements) + 3
        return slice(start, start + 3)

    def solid_dofs(self, nodes) -> list[int]:
        return [3 * int(a) + i for a in nodes for i in range(3)]

    def to_dict(self) -> dict:
        return {
            "solid": self.n_solid,
            "beam": self.n_beam,
            "multipliers": self.n_multipliers,
            "size": self.size,
        }
