"""Tree walks and their induced 1D curves.

An in-order walk of an ordered merge tree starts and ends at the root,
descends into subtrees following the leaf order, and visits every point
``deg + 1`` times.  Tracing the height function along the walk yields a 1D
curve with +inf sentinels at both ends; that curve is what the Frechet engine
consumes.

A :class:`CurveTrace` stores a curve on a tree as a sequence of breakpoints.
Between two consecutive breakpoints the curve follows the unique monotone
tree path, so one endpoint of every leg is an ancestor of the other (pauses
repeat a point).  The weak/partial/in-order classification and the
violating-subcurve machinery operate on this representation.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Sequence

from .ordering import OrderedMergeTree
from .trees import INF, MergeTree, TreePoint, VertexId


@dataclass(frozen=True)
class Curve1D:
    """Canonical 1D curve: the extrema sequence with +inf sentinel endpoints.

    Parameters are implicit and uniform; the Frechet distance does not depend
    on them.  Canonical form has strictly alternating interior minima/maxima,
    so equality of curves is equality of these tuples.
    """

    heights: tuple[float, ...]

    def __post_init__(self):
        h = self.heights
        if len(h) < 3:
            raise ValueError("a curve needs two sentinels and at least one interior sample")
        if h[0] != INF or h[-1] != INF:
            raise ValueError("curve must start and end at +inf")
        if any(not math.isfinite(x) for x in h[1:-1]):
            raise ValueError("interior heights must be finite")
        for a, b in zip(h, h[1:]):
            if a == b:
                raise ValueError("canonical curve has no repeated adjacent heights")
        for a, b, c in zip(h, h[1:], h[2:]):
            if (a < b < c) or (a > b > c):
                raise ValueError("canonical curve has no monotone interior triples")

    @classmethod
    def from_heights(cls, raw: Sequence[float]) -> "Curve1D":
        """Canonicalise a height profile: drop pauses and non-extremal samples."""
        pts: list[float] = []
        for h in raw:
            if not pts or h != pts[-1]:
                pts.append(h)
        out: list[float] = []
        for h in pts:
            while len(out) >= 2 and ((out[-2] < out[-1] < h) or (out[-2] > out[-1] > h)):
                out.pop()
            out.append(h)
        return cls(tuple(out))

    @property
    def n_segments(self) -> int:
        return len(self.heights) - 1

    def finite_heights(self) -> list[float]:
        return [h for h in self.heights if math.isfinite(h)]

    def interior_minima(self) -> list[float]:
        h = self.heights
        return [b for a, b, c in zip(h, h[1:], h[2:]) if b < a and b < c]

    def interior_maxima(self) -> list[float]:
        h = self.heights
        return [b for a, b, c in zip(h, h[1:], h[2:]) if b > a and b > c]

    def reversed(self) -> "Curve1D":
        return Curve1D(tuple(reversed(self.heights)))

    def shifted(self, c: float) -> "Curve1D":
        return Curve1D(tuple(h if h == INF else h + c for h in self.heights))


class CurveTrace:
    """A curve on a tree, stored as breakpoints joined by monotone legs."""

    def __init__(
        self,
        tree: MergeTree,
        params: Sequence[float],
        points: Sequence[TreePoint],
        validate: bool = True,
    ):
        if len(params) != len(points) or len(points) < 2:
            raise ValueError("trace needs matching params/points with at least two breakpoints")
        if validate:
            for a, b in zip(params, params[1:]):
                if b < a:
                    raise ValueError("params must be non-decreasing")
            for a, b in zip(points, points[1:]):
                if not (tree.is_ancestor(a, b) or tree.is_ancestor(b, a)):
                    raise ValueError("consecutive breakpoints must be ancestor-related")
        self.tree = tree
        self.params = list(params)
        self.points = list(points)

    def __len__(self) -> int:
        return len(self.points)

    def heights(self) -> list[float]:
        return [p.height for p in self.points]

    def curve(self) -> Curve1D:
        return Curve1D.from_heights(self.heights())

    def legs(self) -> list[tuple[TreePoint, TreePoint]]:
        return list(zip(self.points, self.points[1:]))

    def point_at(self, t: float) -> TreePoint:
        """Point of the trace at parameter ``t`` (linear height interpolation per leg).

        On a leg with an infinite endpoint the interpolation uses a finite
        surrogate one unit above the finite end; any monotone reparameterisation
        of such a leg names the same set of points.
        """
        if not self.params[0] <= t <= self.params[-1]:
            raise ValueError("parameter out of range")
        i = bisect.bisect_right(self.params, t) - 1
        if i >= len(self.points) - 1:
            return self.points[-1]
        if t == self.params[i]:
            return self.points[i]
        a, b = self.points[i], self.points[i + 1]
        pa, pb = self.params[i], self.params[i + 1]
        if pa == pb or a == b:
            return a
        ha, hb = a.height, b.height
        surrogate = min(ha, hb) + 1.0
        if ha == INF:
            ha = max(surrogate, hb)
        if hb == INF:
            hb = max(surrogate, ha)
        frac = (t - pa) / (pb - pa)
        h = ha + frac * (hb - ha)
        lo = a if a.height <= b.height else b
        hi_h = max(ha, hb)
        return self.tree.ancestor_at(lo, min(h, hi_h))

    def reparameterised_uniform(self) -> "CurveTrace":
        n = len(self.points)
        return CurveTrace(self.tree, [k / (n - 1) for k in range(n)], self.points, validate=False)

    def __repr__(self) -> str:
        return f"CurveTrace({len(self.points)} breakpoints)"


def in_order_walk(omt: OrderedMergeTree) -> CurveTrace:
    """The canonical in-order walk: root, leaves in order with LCA turns, root.

    Uniform parameters; the induced curve's interior samples are exactly the
    alternating leaf/merge heights.
    """
    tree = omt.tree
    leaves = list(tree.leaves)
    pts: list[TreePoint] = [tree.point(tree.root)]
    for i, u in enumerate(leaves):
        pts.append(tree.point(u))
        if i + 1 < len(leaves):
            pts.append(tree.lca(tree.point(u), tree.point(leaves[i + 1])))
    pts.append(tree.point(tree.root))
    n = len(pts)
    return CurveTrace(tree, [k / (n - 1) for k in range(n)], pts, validate=False)


def induced_curve(omt: OrderedMergeTree) -> Curve1D:
    return in_order_walk(omt).curve()


# -- visit accounting ------------------------------------------------------


def _leg_contains(tree: MergeTree, a: TreePoint, b: TreePoint, x: TreePoint) -> bool:
    lo, hi = (a, b) if a.height <= b.height else (b, a)
    if not lo.height <= x.height <= hi.height:
        return False
    return tree.is_ancestor(lo, x) and tree.is_ancestor(x, hi)


def count_visits(trace: CurveTrace, x: TreePoint) -> int:
    """Number of connected components of the preimage of ``x`` under the trace."""
    tree = trace.tree
    n = len(trace.points)
    covered = []
    for i in range(n - 1):
        a, b = trace.points[i], trace.points[i + 1]
        if a == b:
            if a == x:
                covered.append(i)
        elif _leg_contains(tree, a, b, x):
            covered.append(i)
    if not covered:
        return 0
    comps = 1
    for i, j in zip(covered, covered[1:]):
        if j != i + 1 or trace.points[j] != x:
            # Adjacent legs merge into one visit only through a breakpoint at x.
            comps += 1
    return comps


def _branch_contains_breakpoint(
    tree: MergeTree, trace: CurveTrace, x: TreePoint, child: VertexId
) -> bool:
    """Whether any breakpoint lies strictly inside the planted subtree T_{x,child}."""
    cpoint = tree.point(child)
    at_vertex = x.height == tree.height(x.anchor)
    for p in trace.points:
        if p == x or p.height >= x.height:
            continue
        if not tree.is_ancestor(p, x):
            continue
        if tree.is_ancestor(p, cpoint):
            return True
        # p sits on the stem between child and x.
        if at_vertex:
            if tree.child_toward(x.anchor, p) == child:
                return True
        elif p.anchor == x.anchor:
            return True
    return False


def unvisited_degree(trace: CurveTrace, x: TreePoint) -> int:
    """The trace-unvisited degree: unvisited planted subtrees rooted at ``x``.

    A planted subtree is unvisited iff no trace breakpoint lies strictly
    inside it: a monotone leg cannot dip into a subtree and come back out.
    """
    tree = trace.tree
    if x.height == tree.height(x.anchor):
        branches = list(tree.children(x.anchor))
    else:
        branches = [x.anchor]
    return sum(
        1 for c in branches if not _branch_contains_breakpoint(tree, trace, x, c)
    )


def _order_respect_witness(omt: OrderedMergeTree, trace: CurveTrace):
    """A strict layer-order violation between two crossing times, or None.

    Checked at breakpoint heights, finite vertex heights and midpoints: the
    level crossings in time order must never strictly decrease in the layer
    order.
    """
    tree = omt.tree
    hs = sorted(
        {p.height for p in trace.points if math.isfinite(p.height)}
        | set(tree.finite_heights())
    )
    levels = sorted(set(hs) | {(a + b) / 2 for a, b in zip(hs, hs[1:])})
    for h in levels:
        crossings: list[TreePoint] = []
        for i in range(len(trace.points) - 1):
            a, b = trace.points[i], trace.points[i + 1]
            if a == b:
                if a.height == h:
                    crossings.append(a)
                continue
            lo, hi = (a, b) if a.height <= b.height else (b, a)
            if lo.height <= h <= hi.height:
                crossings.append(tree.ancestor_at(lo, h))
        prev = None
        for pt in crossings:
            if prev is not None and prev != pt and omt.compare(prev, pt) > 0:
                return (prev, pt, h)
            prev = pt
    return None


def _visit_witnesses(trace: CurveTrace) -> list[TreePoint]:
    """Vertices plus per-edge interior samples separating the trace's critical heights."""
    tree = trace.tree
    bp_heights = sorted({p.height for p in trace.points if math.isfinite(p.height)})
    top = (bp_heights[-1] + 1.0) if bp_heights else 1.0
    witnesses: list[TreePoint] = [tree.point(v) for v in tree.vertices]
    for v in tree.vertices:
        p = tree.parent(v)
        if p is None:
            continue
        lo, hi = tree.height(v), tree.height(p)
        upper = hi if hi != INF else max(lo + 1.0, top)
        cuts = [lo] + [h for h in bp_heights if lo < h < upper] + [upper]
        for a, b in zip(cuts, cuts[1:]):
            witnesses.append(TreePoint(v, (a + b) / 2))
        for h in bp_heights:
            if lo < h < upper:
                witnesses.append(TreePoint(v, h))
    return witnesses


def classify_curve(omt: OrderedMergeTree, trace: CurveTrace) -> str:
    """Strongest curve class satisfied: 'in_order', 'partial', 'weak' or 'none'.

    Property 1 (order respect) is checked on level crossings; property 2
    (visit count ``deg + 1 - kappa``) at all vertices and per-edge interior
    witnesses; property 3 additionally requires every leaf to be visited.

    A point with zero visits never violates property 2 on its own: by
    continuity the unvisited region is a union of unvisited planted subtrees,
    and the count at each attach point already budgets for them through kappa.
    """
    tree = trace.tree
    root_point = tree.point(tree.root)
    if trace.points[0] != root_point or trace.points[-1] != root_point:
        raise ValueError("trace must start and end at the root")

    if _order_respect_witness(omt, trace) is not None:
        return "none"

    for x in _visit_witnesses(trace):
        visits = count_visits(trace, x)
        if visits and visits != tree.deg(x) + 1 - unvisited_degree(trace, x):
            return "weak"
    visited_leaves = {
        p.anchor
        for p in trace.points
        if tree.is_leaf(p.anchor) and p.height == tree.height(p.anchor)
    }
    return "in_order" if visited_leaves == set(tree.leaves) else "partial"


# -- violating subcurves ---------------------------------------------------


@dataclass(frozen=True)
class ViolatingSubcurve:
    left: float
    right: float
    point: TreePoint


def _crossing(trace: CurveTrace, leg: int, c: float, rising: bool) -> tuple[float, TreePoint]:
    """Param and exact point where a straddling leg meets level ``c``."""
    a, b = trace.points[leg], trace.points[leg + 1]
    pa, pb = trace.params[leg], trace.params[leg + 1]
    lo = a if a.height <= b.height else b
    point = trace.tree.ancestor_at(lo, c)
    ha, hb = a.height, b.height
    if ha == hb:
        return (pa if rising else pb), point
    if ha == INF:
        return pa, point
    if hb == INF:
        return pb, point
    frac = min(1.0, max(0.0, (c - ha) / (hb - ha)))
    return pa + frac * (pb - pa), point


def find_violating_subcurves(trace: CurveTrace) -> list[ViolatingSubcurve]:
    """All maximal violating subcurves of a trace, in time order.

    A violating subcurve leaves a point and returns to that same point while
    staying strictly above it.  Maximal ones are pairwise interior-disjoint.
    Candidate base levels are the breakpoint heights and the finite vertex
    heights: a maximal subcurve is pinned either by a strict local minimum of
    the height profile (a breakpoint) or by a branching vertex of the tree.
    """
    tree = trace.tree
    heights = [p.height for p in trace.points]
    levels = sorted({h for h in heights if math.isfinite(h)} | set(tree.finite_heights()))
    found: list[ViolatingSubcurve] = []

    def covered(l: float, r: float) -> bool:
        return any(v.left <= l and r <= v.right for v in found)

    n = len(trace.points)
    for c in levels:
        above = [h > c for h in heights]
        i = 0
        while i < n:
            if not above[i]:
                i += 1
                continue
            j = i
            while j + 1 < n and above[j + 1]:
                j += 1
            if i > 0 and j < n - 1:
                l_param, lp = _crossing(trace, i - 1, c, rising=True)
                r_param, rp = _crossing(trace, j, c, rising=False)
                if lp == rp and l_param < r_param and not covered(l_param, r_param):
                    found.append(ViolatingSubcurve(l_param, r_param, lp))
            i = j + 1
    found.sort(key=lambda v: (v.left, -v.right))
    out: list[ViolatingSubcurve] = []
    for v in found:
        if out and v.left >= out[-1].left and v.right <= out[-1].right:
            continue
        out.append(v)
    return out


def contract_violating(trace: CurveTrace) -> tuple[CurveTrace, list[tuple[float, float]]]:
    """Flatten every maximal violating subcurve to its base point.

    Returns the contracted trace and the paused param intervals.  On a weak
    in-order curve the result is a partial in-order curve.
    """
    violating = find_violating_subcurves(trace)
    if not violating:
        return trace, []
    params: list[float] = []
    points: list[TreePoint] = []
    n = len(trace.points)
    i = 0
    paused: list[tuple[float, float]] = []
    for v in violating:
        while i < n and trace.params[i] < v.left:
            params.append(trace.params[i])
            points.append(trace.points[i])
            i += 1
        params.extend([v.left, v.right])
        points.extend([v.point, v.point])
        paused.append((v.left, v.right))
        while i < n and trace.params[i] <= v.right:
            i += 1
    while i < n:
        params.append(trace.params[i])
        points.append(trace.points[i])
        i += 1
    return CurveTrace(trace.tree, params, points), paused


# -- matched pairs ---------------------------------------------------------


class MatchedTraces:
    """Two traces on different trees sharing one parameterisation."""

    def __init__(self, left: CurveTrace, right: CurveTrace):
        if len(left.points) != len(right.points):
            raise ValueError("matched traces need aligned breakpoints")
        if left.params != right.params:
            raise ValueError("matched traces must share their parameterisation")
        self.left = left
        self.right = right

    def cost(self) -> float:
        """Realised matching cost: max height gap over aligned breakpoints.

        Heights interpolate linearly on the shared parameter, so each leg's
        maximum gap is attained at its endpoints.
        """
        worst = 0.0
        for a, b in zip(self.left.points, self.right.points):
            ha, hb = a.height, b.height
            if ha == INF and hb == INF:
                continue
            worst = max(worst, abs(ha - hb))
        return worst

    def worst_param(self) -> float:
        worst, at = -1.0, 0.0
        for t, a, b in zip(self.left.params, self.left.points, self.right.points):
            ha, hb = a.height, b.height
            gap = 0.0 if (ha == INF and hb == INF) else abs(ha - hb)
            if gap > worst:
                worst, at = gap, t
        return at

    def reparameterised_uniform(self) -> "MatchedTraces":
        n = len(self.left.points)
        ps = [k / (n - 1) for k in range(n)]
        return MatchedTraces(
            CurveTrace(self.left.tree, ps, self.left.points, validate=False),
            CurveTrace(self.right.tree, ps, self.right.points, validate=False),
        )

    def swapped(self) -> "MatchedTraces":
        return MatchedTraces(self.right, self.left)


def curve_to_rows(curve: Curve1D) -> list[tuple[float, float]]:
    """(param, height) rows with uniform parameters; +inf stays infinite."""
    n = len(curve.heights)
    return [(k / (n - 1), h) for k, h in enumerate(curve.heights)]
