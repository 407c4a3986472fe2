"""Action records produced by the low-level planners and consumed by the simulator."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .geometry import Direction


@dataclass(frozen=True)
class Target:
    """Planner objective restricted to the cost of one target region."""

    region: int


GLOBAL = "global"
Mode = Union[str, Target]


def mode_name(mode: Mode) -> str:
    return "global" if mode == GLOBAL else f"target:{mode.region}"


@dataclass(frozen=True)
class GraspAction:
    """Pick object ``object_index`` and place its center at ``placement``.

    ``region`` is the region the placed object is counted in by the planner's
    assignment; ``to_buffer`` marks a buffer placement outside all regions.
    """

    object_index: int
    placement: tuple[float, float]
    region: int
    predicted_cost: float
    grid_index: tuple[int, int] = (-1, -1)
    to_buffer: bool = False
    pseudo_buffer: bool = False

    kind = "grasp"

    def start_point(self, state) -> tuple[float, float]:
        return state.objects[self.object_index].center

    @property
    def end_point(self) -> tuple[float, float]:
        return self.placement


@dataclass(frozen=True)
class PushAction:
    """Sweep the pusher from ``alpha*d + beta*d_perp`` along ``d`` by ``distance``."""

    direction_index: int
    direction: Direction
    alpha: float
    beta: float
    distance: float
    affected: tuple[int, ...] = ()
    predicted_displacements: tuple[float, ...] = ()
    predicted_cost: float = float("nan")
    slot_index: tuple[int, int] = (-1, -1)

    kind = "push"

    @property
    def anchor(self) -> tuple[float, float]:
        d = self.direction
        return (self.alpha * d.x - self.beta * d.y, self.alpha * d.y + self.beta * d.x)

    def start_point(self, state=None) -> tuple[float, float]:
        return self.anchor

    @property
    def end_point(self) -> tuple[float, float]:
        ax, ay = self.anchor
        return (ax + self.distance * self.direction.x, ay + self.distance * self.direction.y)


Action = Union[GraspAction, PushAction]
