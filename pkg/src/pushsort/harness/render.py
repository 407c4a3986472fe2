"""Static SVG snapshots of a scene with optional action overlays."""
from __future__ import annotations

from typing import Optional, Sequence

from ..actions import Action, GraspAction, PushAction
from ..push_planner import Pusher
from ..scene import SceneState

SCALE = 400.0  # px per meter
MARGIN = 10.0
PALETTE = ("#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#b07aa1",
           "#76b7b2", "#edc948", "#ff9da7", "#9c755f", "#bab0ac")


def _f(x: float) -> str:
    s = f"{x:.3f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


class _Canvas:
    def __init__(self, bounds: tuple[float, float, float, float]):
        self.x0, self.y0, self.x1, self.y1 = bounds
        self.width = (self.x1 - self.x0) * SCALE + 2 * MARGIN
        self.height = (self.y1 - self.y0) * SCALE + 2 * MARGIN
        self.items: list[str] = []

    def pt(self, p: Sequence[float]) -> str:
        x = (p[0] - self.x0) * SCALE + MARGIN
        y = (self.y1 - p[1]) * SCALE + MARGIN  # svg y grows downward
        return f"{_f(x)},{_f(y)}"

    def polygon(self, verts, fill: str, stroke: str, width: float = 1.0, opacity: float = 1.0) -> None:
        pts = " ".join(self.pt(v) for v in verts)
        self.items.append(f'<polygon points="{pts}" fill="{fill}" fill-opacity="{_f(opacity)}" '
                          f'stroke="{stroke}" stroke-width="{_f(width)}"/>')

    def line(self, a, b, stroke: str, width: float = 1.5, marker: bool = False) -> None:
        (ax, ay), (bx, by) = self.pt(a).split(","), self.pt(b).split(",")
        end = ' marker-end="url(#arrow)"' if marker else ""
        self.items.append(f'<line x1="{ax}" y1="{ay}" x2="{bx}" y2="{by}" stroke="{stroke}" '
                          f'stroke-width="{_f(width)}"{end}/>')

    def circle(self, c, r_px: float, fill: str) -> None:
        x, y = self.pt(c).split(",")
        self.items.append(f'<circle cx="{x}" cy="{y}" r="{_f(r_px)}" fill="{fill}"/>')

    def svg(self) -> str:
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{_f(self.width)}" '
                f'height="{_f(self.height)}" viewBox="0 0 {_f(self.width)} {_f(self.height)}">')
        defs = ('<defs><marker id="arrow" markerWidth="8" markerHeight="8" refX="6" refY="3" '
                'orient="auto"><path d="M0,0 L6,3 L0,6 z" fill="#333333"/></marker></defs>')
        return "\n".join([head, defs, *self.items, "</svg>"]) + "\n"


def _bounds(state: SceneState, workspace: Optional[tuple[float, float, float, float]]):
    if workspace is not None:
        return workspace
    xs, ys = [state.gripper_pos[0]], [state.gripper_pos[1]]
    for poly in [o.polygon for o in state.objects] + [r.polygon for r in state.regions]:
        b = poly.bounds
        xs += [b[0], b[2]]
        ys += [b[1], b[3]]
    return (min(xs) - 0.05, min(ys) - 0.05, max(xs) + 0.05, max(ys) + 0.05)


def render_svg(state: SceneState, actions: Sequence[Action] = (),
               workspace: Optional[tuple[float, float, float, float]] = None,
               pusher: Pusher = Pusher()) -> str:
    """Regions outlined, objects filled by category, actions drawn on top."""
    cv = _Canvas(_bounds(state, workspace))
    x0, y0, x1, y1 = cv.x0, cv.y0, cv.x1, cv.y1
    cv.polygon([(x0, y0), (x1, y0), (x1, y1), (x0, y1)], "#ffffff", "#cccccc")
    for r in state.regions:
        cv.polygon(r.polygon.vertices.tolist(), "#eeeeee", "#333333", 2.0)
    for o in state.objects:
        cv.polygon(o.polygon.vertices.tolist(), PALETTE[(o.label - 1) % len(PALETTE)], "#222222", 0.5)
    for a in actions:
        if isinstance(a, PushAction):
            cv.polygon(pusher.polygon(a.anchor, a.direction).vertices.tolist(), "#333333", "#000000", 0.5, 0.6)
            cv.line(a.anchor, a.end_point, "#333333", 1.5, marker=True)
        elif isinstance(a, GraspAction):
            cv.circle(a.placement, 3.0, "#d62728")
    cv.circle(state.gripper_pos, 4.0, "#000000")
    return cv.svg()


def render_snapshot(state: SceneState, path: str, actions: Sequence[Action] = (),
                    workspace: Optional[tuple[float, float, float, float]] = None,
                    pusher: Pusher = Pusher()) -> None:
    text = render_svg(state, actions, workspace, pusher)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)
