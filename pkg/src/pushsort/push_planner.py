"""One-step greedy push selection under a translation-only kinematic model.

Per push direction the pusher anchor ``alpha*d + beta*d_perp`` only matters
through which objects it affects, so anchors are enumerated as slots between
support-aligned key values. Each object's post-push distance to its assigned
region is constant until the pusher reaches it (the compression distance) and
then follows the Voronoi features of the region along its path. The sum is
convex on every merged piece and is minimised there exactly.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .actions import GLOBAL, Mode, PushAction
from .assignment import Assignment, compute_cost
from .geometry import (
    EPS_GEO,
    ConvexPolygon,
    Direction,
    dist_point_polygon,
    evenly_spaced_directions,
    feature_distance_terms,
    feature_segments,
    polygons_overlap,
    raycast,
    translation_gap,
)
from .reachability import ReachabilityMap
from .scene import SceneState

_STRICT = 1e-9
_TIE = 1e-12
# overlaps this shallow count as resting contact (matches the simulator tolerance)
_CONTACT = 1e-6


@dataclass(frozen=True)
class Pusher:
    """Rectangular pusher: ``width`` across the push direction, ``thickness`` along it."""

    width: float = 0.08
    thickness: float = 0.02

    def __post_init__(self) -> None:
        if not (self.width > 0 and self.thickness > 0):
            raise ValueError("pusher dimensions must be positive")

    def polygon(self, anchor: Sequence[float], direction: Direction) -> ConvexPolygon:
        u, w = direction.vector, direction.perp
        ht, hw = self.thickness / 2.0, self.width / 2.0
        c = np.asarray(anchor, dtype=float)
        return ConvexPolygon([c - ht * u - hw * w, c + ht * u - hw * w,
                              c + ht * u + hw * w, c - ht * u + hw * w], validate=False)


@dataclass(frozen=True)
class PusherSlot:
    direction_index: int
    direction: Direction
    alpha_index: int
    alpha_interval: tuple[float, float]
    beta_index: int
    beta_interval: tuple[float, float]
    affected: tuple[int, ...]
    interference: tuple[int, ...] = ()

    @property
    def alpha(self) -> float:
        return 0.5 * (self.alpha_interval[0] + self.alpha_interval[1])

    @property
    def beta(self) -> float:
        return 0.5 * (self.beta_interval[0] + self.beta_interval[1])

    @property
    def anchor(self) -> tuple[float, float]:
        d = self.direction
        a, b = self.alpha, self.beta
        return (a * d.x - b * d.y, a * d.y + b * d.x)


# ------------------------------------------------------------------ pieces

@dataclass(frozen=True)
class CostPiece:
    """Distance of one object on ``[lo, hi]`` of push distance ``d``.

    ``kind`` is ``const`` (value ``p``), ``linear`` (``p + q*d``) or
    ``radial`` (``sqrt(d^2 + 2*p*d + q)``). ``quad`` holds the squared
    distance as ``a*d^2 + b*d + c``.
    """

    lo: float
    hi: float
    kind: str
    p: float
    q: float
    feature: str = "void"

    def value(self, d: float) -> float:
        if self.kind == "const":
            return self.p
        if self.kind == "linear":
            return max(self.p + self.q * d, 0.0)
        return math.sqrt(max(d * d + 2.0 * self.p * d + self.q, 0.0))

    @property
    def quad(self) -> tuple[float, float, float]:
        if self.kind == "const":
            return (0.0, 0.0, self.p * self.p)
        if self.kind == "linear":
            return (self.q * self.q, 2.0 * self.p * self.q, self.p * self.p)
        return (1.0, 2.0 * self.p, self.q)


class _Sum:
    """``c0 + c1*d + sum sqrt(d^2 + 2*wu*d + ww)``; convex in ``d``."""

    __slots__ = ("c0", "c1", "rad")

    def __init__(self) -> None:
        self.c0 = 0.0
        self.c1 = 0.0
        self.rad: list[tuple[float, float]] = []

    def add(self, piece: CostPiece) -> None:
        if piece.kind == "const":
            self.c0 += piece.p
        elif piece.kind == "linear":
            self.c0 += piece.p
            self.c1 += piece.q
        else:
            self.rad.append((piece.p, piece.q))

    def value(self, d: float) -> float:
        v = self.c0 + self.c1 * d
        for wu, ww in self.rad:
            v += math.sqrt(max(d * d + 2.0 * wu * d + ww, 0.0))
        return v

    def slope(self, d: float) -> float:
        g = self.c1
        for wu, ww in self.rad:
            r = math.sqrt(max(d * d + 2.0 * wu * d + ww, 0.0))
            x = d + wu
            g += x / r if r > 1e-300 else math.copysign(1.0, x)
        return g

    def argmin(self, lo: float, hi: float) -> float:
        if hi <= lo:
            return lo
        if not self.rad:
            return lo if self.c1 >= 0.0 else hi
        if self.slope(lo) >= 0.0:
            return lo
        if self.slope(hi) <= 0.0:
            return hi
        a, b = lo, hi
        for _ in range(200):
            m = 0.5 * (a + b)
            if m <= a or m >= b:
                break
            if self.slope(m) > 0.0:
                b = m
            else:
                a = m
        return a if self.value(a) <= self.value(b) else b

    def level_cross(self, lo: float, hi: float, level: float, rising: bool) -> float:
        """Point of ``[lo, hi]`` closest to the crossing of ``level`` that stays at or below it."""
        a, b = lo, hi
        for _ in range(200):
            m = 0.5 * (a + b)
            if m <= a or m >= b:
                break
            below = self.value(m) <= level
            if rising:
                a, b = (m, b) if below else (a, m)
            else:
                a, b = (a, m) if below else (m, b)
        return a if rising else b


@dataclass
class PiecewiseCost:
    """Post-push distances of the affected objects as functions of push distance.

    ``objects`` maps object index to its ordered pieces starting with the void
    piece ``[0, compression[i]]``; ``pieces`` is the merged breakpoint list.
    """

    upper: float
    objects: dict[int, list[CostPiece]]
    compression: dict[int, float]
    regions: dict[int, int]
    current: dict[int, float]
    knots: list[float] = field(default_factory=list)

    def object_value(self, i: int, d: float) -> float:
        for pc in self.objects[i]:
            if d <= pc.hi or pc is self.objects[i][-1]:
                return pc.value(min(max(d, pc.lo), pc.hi))
        return self.current[i]

    def value(self, d: float, members: Optional[Sequence[int]] = None) -> float:
        idx = self.objects.keys() if members is None else members
        return float(sum(self.object_value(i, d) for i in idx))

    def surrogate(self, d: float, members: Optional[Sequence[int]] = None) -> float:
        idx = self.objects.keys() if members is None else members
        out = 0.0
        for i in idx:
            for pc in self.objects[i]:
                if d <= pc.hi or pc is self.objects[i][-1]:
                    a, b, c = pc.quad
                    out += a * d * d + b * d + c
                    break
        return out

    def merged(self) -> list[tuple[float, float, dict[int, CostPiece]]]:
        """Merged pieces ``(lo, hi, piece per object)`` over ``[0, upper]``."""
        if not self.knots:
            ks = {0.0, self.upper}
            for ps in self.objects.values():
                for pc in ps:
                    ks.add(pc.lo)
                    ks.add(pc.hi)
            self.knots = sorted(k for k in ks if 0.0 <= k <= self.upper)
        out = []
        ptr = {i: 0 for i in self.objects}
        for lo, hi in zip(self.knots[:-1], self.knots[1:]):
            if hi - lo <= 0.0:
                continue
            mid = 0.5 * (lo + hi)
            cur = {}
            for i, ps in self.objects.items():
                k = ptr[i]
                while k + 1 < len(ps) and ps[k].hi < mid:
                    k += 1
                ptr[i] = k
                cur[i] = ps[k]
            out.append((lo, hi, cur))
        if not out:
            out.append((0.0, 0.0, {i: ps[0] for i, ps in self.objects.items()}))
        return out


def _object_pieces(center: np.ndarray, d: Direction, region: ConvexPolygon, current: float,
                   dbar: float, upper: float) -> list[CostPiece]:
    pieces = [CostPiece(0.0, min(dbar, upper), "const", current, 0.0)]
    if upper <= dbar:
        return pieces
    for seg in feature_segments(center, d, upper - dbar, region):
        kind, p, q = feature_distance_terms(center, d, seg.feature, region)
        lo, hi = seg.lo + dbar, seg.hi + dbar
        name = str(seg.feature)
        if kind == "zero":
            pieces.append(CostPiece(lo, hi, "const", 0.0, 0.0, name))
        elif kind == "linear":
            pieces.append(CostPiece(lo, hi, "linear", p - q * dbar, q, name))
        else:
            pieces.append(CostPiece(lo, hi, "radial", p - dbar, q - 2.0 * p * dbar + dbar * dbar, name))
    return pieces


# ----------------------------------------------------------- per direction

class _DirectionData:
    """Supports and cached pairwise blocking gaps of all objects along one direction."""

    def __init__(self, state: SceneState, index: int, d: Direction, pusher: Pusher):
        self.state = state
        self.index = index
        self.d = d
        self.pusher = pusher
        V = state.vertex_array
        pu = V @ d.vector
        pw = V @ d.perp
        self.dmin, self.dmax = pu.min(axis=1), pu.max(axis=1)
        self.wmin, self.wmax = pw.min(axis=1), pw.max(axis=1)
        self._gap: dict[tuple[int, int], float] = {}
        self._normals: dict[int, tuple] = {}
        self._table: Optional[tuple[np.ndarray, ...]] = None

    def normals(self, k: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Object ``k`` edge normals in (u, w) coordinates, its extents on them, and the pusher half-extent."""
        hit = self._normals.get(k)
        if hit is None:
            poly = self.state.objects[k].polygon
            u, w = self.d.vector, self.d.perp
            nu, nw = poly.normals @ u, poly.normals @ w
            proj = poly.vertices @ poly.normals.T
            r = self.pusher.thickness / 2.0 * np.abs(nu) + self.pusher.width / 2.0 * np.abs(nw)
            hit = (np.column_stack((nu, nw)), proj.min(axis=0), proj.max(axis=0), r)
            self._normals[k] = hit
        return hit

    def normal_table(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """``normals`` for every object as ``(N, V)`` arrays, padded by repeating the first edge."""
        if self._table is None:
            parts = [self.normals(k) for k in range(self.state.n_objects)]
            V = max(len(p[1]) for p in parts)
            out = [np.empty((len(parts), V)) for _ in range(5)]
            for k, (n, omin, omax, r) in enumerate(parts):
                for arr, col in zip(out, (n[:, 0], n[:, 1], omin, omax, r)):
                    arr[k, : len(col)] = col
                    arr[k, len(col):] = col[0]
            self._table = tuple(out)
        return self._table

    def gap(self, j: int, i: int) -> float:
        """Travel of ``j`` along ``d`` before it touches ``i`` (``inf`` if it never does)."""
        key = (j, i)
        g = self._gap.get(key)
        if g is None:
            lat = min(self.wmax[j], self.wmax[i]) - max(self.wmin[j], self.wmin[i])
            if lat <= EPS_GEO or self.dmin[j] >= self.dmax[i]:
                g = math.inf
            else:
                a, b = self.state.objects[j].polygon, self.state.objects[i].polygon
                # the tolerance decides whether they meet at all; the travel itself is exact
                g = translation_gap(a, b, self.d, _CONTACT)
                if math.isfinite(g):
                    g = translation_gap(a, b, self.d, 0.0)
            self._gap[key] = g
        return g


def _keys(values: np.ndarray) -> np.ndarray:
    v = np.unique(values)
    if len(v) < 2:
        return v
    keep = np.concatenate(([True], np.diff(v) > 1e-12))
    return v[keep]


def _blocked_intervals(dd: _DirectionData, b: float, band: np.ndarray) -> tuple[list[float], list[float]]:
    """Merged open alpha intervals where a pusher at lateral offset ``b`` overlaps a band object.

    Per object the overlap set is the intersection of one open interval per
    separating axis: the pusher's own ``u`` axis and each object edge normal.
    """
    if len(band) == 0:
        return [], []
    ht = dd.pusher.thickness / 2.0
    NU, NW, OMIN, OMAX, R = (x[band] for x in dd.normal_table())
    c = b * NW
    pos, neg = NU > 1e-15, NU < -1e-15
    safe = np.where(pos | neg, NU, 1.0)
    t1 = (OMIN + EPS_GEO - R - c) / safe
    t2 = (OMAX - EPS_GEO + R - c) / safe
    lo = np.where(pos, t1, np.where(neg, t2, -math.inf)).max(axis=1)
    hi = np.where(pos, t2, np.where(neg, t1, math.inf)).min(axis=1)
    # an edge normal perpendicular to u separates at every alpha or at none
    flat = ~(pos | neg)
    never = (flat & ~((c + R > OMIN + EPS_GEO) & (c - R < OMAX - EPS_GEO))).any(axis=1)
    lo = np.maximum(lo, dd.dmin[band] - ht + EPS_GEO)
    hi = np.minimum(hi, dd.dmax[band] + ht - EPS_GEO)
    keep = (lo < hi) & ~never
    los, his = [], []
    for l, h in sorted(zip(lo[keep].tolist(), hi[keep].tolist())):
        if los and l < his[-1]:
            his[-1] = max(his[-1], h)
        else:
            los.append(l)
            his.append(h)
    return los, his


def _free_alpha(amid: list[float], m_lo: int, m_hi: int, los: list[float], his: list[float]) -> int:
    """Largest alpha index in ``[m_lo, m_hi]`` whose midpoint avoids every blocked interval, or -1."""
    m = m_hi
    while m >= m_lo:
        a = amid[m]
        j = bisect.bisect_left(los, a) - 1
        if j < 0 or a >= his[j]:
            return m
        m = bisect.bisect_right(amid, los[j]) - 1
    return -1


def _slots_for_direction(dd: _DirectionData) -> tuple[list[PusherSlot], int]:
    """Distinct-affected-set slots for one direction, plus the raw slot count."""
    st, pusher = dd.state, dd.pusher
    ht, hw = pusher.thickness / 2.0, pusher.width / 2.0
    bkeys = _keys(np.concatenate((dd.wmin - hw, dd.wmin + hw, dd.wmax - hw, dd.wmax + hw)))
    akeys = _keys(np.concatenate((dd.dmin - ht, dd.dmin + ht, dd.dmax - ht, dd.dmax + ht)))
    akeys = np.concatenate(([akeys[0] - 2.0 * pusher.thickness], akeys))
    amid = 0.5 * (akeys[:-1] + akeys[1:])
    bmid = 0.5 * (bkeys[:-1] + bkeys[1:])
    alist = amid.tolist()
    raw = len(amid) * len(bmid)
    best: dict[tuple[int, ...], tuple[int, int]] = {}
    for n, b in enumerate(bmid.tolist()):
        lat = np.nonzero((dd.wmin >= b - hw - EPS_GEO) & (dd.wmax <= b + hw + EPS_GEO))[0]
        if len(lat) == 0:
            continue
        order = lat[np.lexsort((lat, dd.dmin[lat]))]
        front = dd.dmin[order]
        # objects overlapping the pusher's lateral extent, candidates for interference
        band = np.nonzero((dd.wmax > b - hw + EPS_GEO) & (dd.wmin < b + hw - EPS_GEO))[0]
        los, his = _blocked_intervals(dd, b, band)
        start = 0
        while start < len(order):
            # all objects with the same front support enter together
            lo_front = front[start - 1] if start > 0 else -math.inf
            hi_front = front[start]
            # slots with lo_front < alpha + ht <= hi_front
            m_hi = int(np.searchsorted(amid + ht, hi_front + 1e-12, side="right")) - 1
            m_lo = int(np.searchsorted(amid + ht, lo_front + 1e-12, side="right"))
            aff = tuple(sorted(order[start:].tolist()))
            if m_hi >= m_lo:
                m = _free_alpha(alist, m_lo, m_hi, los, his)
                if m >= 0:
                    prev = best.get(aff)
                    if prev is None or m > prev[0] or (m == prev[0] and n < prev[1]):
                        best[aff] = (m, n)
            nxt = start + 1
            while nxt < len(order) and front[nxt] <= hi_front + 1e-12:
                nxt += 1
            start = nxt
    slots = [
        PusherSlot(dd.index, dd.d, m, (float(akeys[m]), float(akeys[m + 1])), n,
                   (float(bkeys[n]), float(bkeys[n + 1])), aff)
        for aff, (m, n) in best.items()
    ]
    slots.sort(key=lambda s: (s.alpha_index, s.beta_index))
    return slots, raw


def enumerate_slots(state: SceneState, pusher: Pusher, direction: Direction,
                    direction_index: int = 0) -> list[PusherSlot]:
    """Interference-free slots with distinct non-empty affected sets.

    Membership is evaluated at slot midpoints: an object is affected when its
    lateral extent fits inside the pusher's and it lies wholly ahead of the
    pusher face. Among slots sharing an affected set the one closest to the
    objects (largest alpha index, then smallest beta index) is kept.
    """
    if state.n_objects == 0:
        return []
    return _slots_for_direction(_DirectionData(state, direction_index, Direction.of(direction), pusher))[0]


def raw_slot_count(state: SceneState, pusher: Pusher, direction: Direction) -> int:
    """Number of (alpha, beta) cells before filtering and deduplication."""
    if state.n_objects == 0:
        return 0
    return _slots_for_direction(_DirectionData(state, 0, Direction.of(direction), pusher))[1]


def _compressions(dd: _DirectionData, alpha: float, affected: Sequence[int]) -> dict[int, float]:
    ht = dd.pusher.thickness / 2.0
    memo: dict[int, float] = {}
    active: set[int] = set()

    def solve(i: int) -> float:
        if i in memo:
            return memo[i]
        if i in active:
            raise RuntimeError(f"cyclic blocking through object {i}")
        active.add(i)
        best = float(dd.dmin[i]) - alpha - ht
        for j in affected:
            if j != i:
                g = dd.gap(j, i)
                if g < best:
                    best = min(best, g + solve(j))
        active.discard(i)
        memo[i] = max(best, 0.0)
        return memo[i]

    return {i: solve(i) for i in affected}


def compression_distance(state: SceneState, slot: PusherSlot, i: int,
                         pusher: Pusher = Pusher()) -> float:
    """Pusher travel before object ``i`` starts moving.

    Motion is transmitted only through affected objects: ``i`` starts when the
    pusher face reaches it or when an affected object already moving reaches it.
    """
    if i not in slot.affected:
        raise ValueError(f"object {i} is not affected by this slot")
    dd = _DirectionData(state, slot.direction_index, slot.direction, pusher)
    return _compressions(dd, slot.alpha, slot.affected)[i]


def build_cost(state: SceneState, slot: PusherSlot, assignment: Assignment,
               reach_map: ReachabilityMap, pusher: Pusher = Pusher(), *,
               guard: bool = True, _dd: Optional[_DirectionData] = None) -> Optional[PiecewiseCost]:
    """Per-object piecewise post-push costs for ``slot``; ``None`` if the anchor is unreachable.

    The feasible push distance is ``[0, upper]`` where ``upper`` is the
    reachable travel of the pusher, optionally capped so no affected object
    center leaves the reachable set.
    """
    dd = _dd if _dd is not None else _DirectionData(state, slot.direction_index, slot.direction, pusher)
    anchor = slot.anchor
    if not reach_map.reach(anchor):
        return None
    upper = max(reach_map.range(anchor, dd.d)[1], 0.0)
    comp = _compressions(dd, slot.alpha, slot.affected)
    if guard:
        for i in slot.affected:
            upper = min(upper, comp[i] + reach_map.exit_distance(state.objects[i].center, dd.d))
    upper = max(upper, 0.0)
    objs, regions, current = {}, {}, {}
    for i in slot.affected:
        j = int(assignment.regions[i])
        c = float(assignment.object_costs[i])
        regions[i], current[i] = j, c
        objs[i] = _object_pieces(state.centers[i], dd.d, state.regions[j].polygon, c, comp[i], upper)
    return PiecewiseCost(upper, objs, comp, regions, current)


def minimize_piecewise(cost: PiecewiseCost, feasible: Optional[tuple[float, float]] = None,
                       members: Optional[Sequence[int]] = None) -> Optional[tuple[float, float]]:
    """Exact minimiser of the summed Euclidean distances over ``feasible``.

    Returns ``(d*, value)`` with the smallest ``d`` among equal minima, or
    ``None`` if the interval is empty.
    """
    lo, hi = (0.0, cost.upper) if feasible is None else feasible
    lo, hi = max(lo, 0.0), min(hi, cost.upper)
    if hi < lo:
        return None
    sel = None if members is None else set(members)
    best: Optional[tuple[float, float]] = None
    for plo, phi, cur in cost.merged():
        a, b = max(plo, lo), min(phi, hi)
        if b < a:
            continue
        f = _Sum()
        for i, pc in cur.items():
            if sel is None or i in sel:
                f.add(pc)
        x = f.argmin(a, b)
        v = f.value(x)
        if best is None or v < best[1] - _TIE:
            best = (x, v)
    return best


def _minimize_share(cost: PiecewiseCost, members: list[int], budget: float) -> Optional[tuple[float, float]]:
    """Minimise the ``members`` share subject to the affected total staying within ``budget``."""
    sel = set(members)
    best: Optional[tuple[float, float]] = None
    for plo, phi, cur in cost.merged():
        F, f = _Sum(), _Sum()
        for i, pc in cur.items():
            F.add(pc)
            if i in sel:
                f.add(pc)
        xf = F.argmin(plo, phi)
        if F.value(xf) > budget + _TIE:
            continue
        left = plo if F.value(plo) <= budget + _TIE else F.level_cross(plo, xf, budget + _TIE, rising=False)
        right = phi if F.value(phi) <= budget + _TIE else F.level_cross(xf, phi, budget + _TIE, rising=True)
        x = f.argmin(left, right)
        v = f.value(x)
        if best is None or v < best[1] - _TIE:
            best = (x, v)
    return best


def _settle(cost: PiecewiseCost, x: float, v: float, members: Optional[list[int]], budget: float,
            margin: float) -> float:
    """Furthest point within ``margin`` past ``x`` that keeps the objective at ``v``."""
    if margin <= 0.0 or x >= cost.upper:
        return x

    def ok(y: float) -> bool:
        if cost.value(y, members) > v + _TIE:
            return False
        return members is None or cost.value(y) <= budget + _TIE

    y = min(x + margin, cost.upper)
    if ok(y):
        return y
    lo, hi = x, y
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo


# --------------------------------------------------------------- planning

def _segment_reduction(center: np.ndarray, d: Direction, length: float, region: ConvexPolygon,
                       current: float) -> float:
    """``current - min_{0<=s<=length} dist(center + s*d, region)`` (largest possible decrease)."""
    if current <= 0.0 or length <= 0.0:
        return 0.0
    t = raycast(center, d, region)
    if t is not None and t <= length:
        return current
    end = center + length * d.vector
    m = min(current, dist_point_polygon(end, region))
    u = d.vector
    for v in region.vertices:
        s = min(max(float((v - center) @ u), 0.0), length)
        p = center + s * u
        m = min(m, float(math.hypot(v[0] - p[0], v[1] - p[1])))
    return max(current - m, 0.0)


@dataclass
class PushResult:
    action: Optional[PushAction]
    reduction: float = 0.0
    slots_evaluated: int = 0


def plan_pushes(state: SceneState, reach_map: ReachabilityMap, modes: Sequence[Mode],
                assignment: Optional[Assignment] = None, pusher: Pusher = Pusher(),
                directions: Optional[Sequence[Direction]] = None, *, guard: bool = True,
                prune: bool = True, settle: Optional[float] = None) -> dict:
    """Best push for each objective in ``modes`` from a single pass over all slots.

    Global compares slots by the predicted decrease of the affected objects'
    total distance; ``Target(j)`` by the decrease of region ``j``'s share with
    the affected total not allowed to grow. Only strict decreases are kept.

    When the optimum is a plateau the push continues along it by up to
    ``settle`` (default: the largest object radius) so objects come to rest
    inside their region rather than on its boundary.
    """
    a = compute_cost(state) if assignment is None else assignment
    dirs = tuple(directions) if directions is not None else evenly_spaced_directions(8)
    modes = list(modes)
    T = state.n_regions
    results = {m: PushResult(None) for m in modes}
    if state.n_objects == 0 or a.cost <= _STRICT:
        return results
    col = [None if m == GLOBAL else m.region for m in modes]
    for m in modes:
        if m != GLOBAL and not 0 <= m.region < T:
            raise ValueError(f"target region {m.region} out of range")
    best_val = [0.0] * len(modes)
    best_key: list[Optional[tuple]] = [None] * len(modes)
    best_act: list[Optional[PushAction]] = [None] * len(modes)
    regions = a.regions
    margin = state.max_radius if settle is None else float(settle)
    for di, d in enumerate(dirs):
        dd = _DirectionData(state, di, d, pusher)
        slots, _ = _slots_for_direction(dd)
        if not slots:
            continue
        # per-object largest possible decrease along d
        pot = np.zeros(state.n_objects)
        for i in range(state.n_objects):
            c = float(a.object_costs[i])
            if c > 0.0:
                reach = reach_map.exit_distance(state.centers[i], d)
                pot[i] = _segment_reduction(state.centers[i], d, reach, state.regions[regions[i]].polygon, c)
        potentials = []
        for s in slots:
            idx = np.array(s.affected)
            row = [float(pot[idx].sum()) if j is None else float(pot[idx][regions[idx] == j].sum())
                   for j in col]
            potentials.append(row)
        order = sorted(range(len(slots)), key=lambda k: (-max(potentials[k]), k))
        for k in order:
            s = slots[k]
            pk = potentials[k]
            top = max(pk)
            if top <= _STRICT or (prune and top < min(best_val) - _TIE):
                break
            live = [mi for mi in range(len(modes))
                    if pk[mi] > _STRICT and (not prune or pk[mi] >= best_val[mi] - _TIE)]
            if not live:
                continue
            cost = build_cost(state, s, a, reach_map, pusher, guard=guard, _dd=dd)
            if cost is None or cost.upper <= 0.0:
                continue
            for mi in range(len(modes)):
                results[modes[mi]].slots_evaluated += mi in live
            aff = list(s.affected)
            base = sum(cost.current.values())
            for mi in live:
                j = col[mi]
                if j is None:
                    sol = minimize_piecewise(cost)
                    members = aff
                else:
                    members = [i for i in aff if cost.regions[i] == j]
                    sol = _minimize_share(cost, members, base)
                if sol is None:
                    continue
                x, v = sol
                x = _settle(cost, x, v, None if j is None else members, base, margin)
                red = sum(cost.current[i] for i in members) - v
                if red <= _STRICT:
                    continue
                key = (di, s.alpha_index, s.beta_index)
                if red > best_val[mi] + _TIE or (red >= best_val[mi] - _TIE and (best_key[mi] is None or key < best_key[mi])):
                    disp = tuple(max(x - cost.compression[i], 0.0) for i in aff)
                    total = a.cost - (base - cost.value(x))
                    best_val[mi], best_key[mi] = red, key
                    best_act[mi] = PushAction(
                        direction_index=di, direction=d, alpha=s.alpha, beta=s.beta, distance=float(x),
                        affected=tuple(aff), predicted_displacements=disp, predicted_cost=float(total),
                        slot_index=(s.alpha_index, s.beta_index))
    for mi, m in enumerate(modes):
        results[m].action = best_act[mi]
        results[m].reduction = best_val[mi]
    return results


def plan_push(state: SceneState, reach_map: ReachabilityMap, mode: Mode = GLOBAL,
              assignment: Optional[Assignment] = None, pusher: Pusher = Pusher(),
              directions: Optional[Sequence[Direction]] = None, *, guard: bool = True) -> Optional[PushAction]:
    """Best single push under ``mode``; ``None`` when no slot gives a strict decrease."""
    return plan_pushes(state, reach_map, [mode], assignment, pusher, directions, guard=guard)[mode].action


def predicted_centers(state: SceneState, action: PushAction) -> np.ndarray:
    """Object centers after ``action`` under the translation-only model."""
    c = np.array(state.centers, dtype=float)
    u = action.direction.vector
    for i, s in zip(action.affected, action.predicted_displacements):
        c[i] += s * u
    return c
