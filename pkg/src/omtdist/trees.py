"""Merge trees as topological spaces.

A merge tree is a rooted tree with a height function that strictly increases
towards a root at +infinity.  Distances in this package are defined on the
topological realisation of the tree, so points interior to edges are
first-class citizens: a :class:`TreePoint` names a spot on an edge by the
vertex below it and an absolute height.

The tree itself is immutable after construction and all queries are
read-only, so instances may be shared freely between threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Hashable, Mapping, Sequence

INF = math.inf

VertexId = Hashable


class InvalidTreeError(ValueError):
    """The input cannot be interpreted as a rooted tree at all."""


@dataclass(frozen=True)
class Violation:
    """First merge-tree invariant violated by a structure, with a witness."""

    code: str
    vertex: VertexId | None = None
    detail: str = ""

    def __str__(self) -> str:
        where = f" at vertex {self.vertex!r}" if self.vertex is not None else ""
        tail = f": {self.detail}" if self.detail else ""
        return f"{self.code}{where}{tail}"


@dataclass(frozen=True)
class TreePoint:
    """A point of the topological realisation.

    ``anchor`` names a vertex; the point sits on the edge from ``anchor``
    towards its parent, at absolute height ``height``.  Canonical form anchors
    a point that coincides with a vertex at that vertex, so two canonical
    points are the same point of the realisation iff they compare equal.
    """

    anchor: VertexId
    height: float

    def is_vertex_of(self, tree: "MergeTree") -> bool:
        return self.height == tree.height(self.anchor)


class MergeTree:
    """Rooted tree with heights, queried through its realisation.

    Parameters
    ----------
    parent:
        Maps every vertex id to its parent id, or ``None`` for the root.
    height:
        Maps every vertex id to a height; the root carries ``math.inf``.
    children_order:
        Optional explicit child sequence per vertex.  Defaults to the order in
        which children appear in ``parent``.  The child order is what a later
        leaf-order alignment permutes.

    Construction only rejects structures that are not trees (unknown parents,
    cycles, empty input).  Whether the result is a valid *merge* tree is the
    business of :func:`validate_tree`; all point queries assume validity.
    """

    def __init__(
        self,
        parent: Mapping[VertexId, VertexId | None],
        height: Mapping[VertexId, float],
        children_order: Mapping[VertexId, Sequence[VertexId]] | None = None,
    ):
        if not parent:
            raise InvalidTreeError("empty vertex set")
        if set(parent) != set(height):
            raise InvalidTreeError("parent and height maps disagree on the vertex set")
        self._parent: dict[VertexId, VertexId | None] = dict(parent)
        self._height: dict[VertexId, float] = {v: float(h) for v, h in height.items()}
        for v, p in self._parent.items():
            if p is not None and p not in self._parent:
                raise InvalidTreeError(f"vertex {v!r} has unknown parent {p!r}")

        children: dict[VertexId, list[VertexId]] = {v: [] for v in self._parent}
        for v, p in self._parent.items():
            if p is not None:
                children[p].append(v)
        if children_order is not None:
            for v, order in children_order.items():
                if sorted(map(repr, order)) != sorted(map(repr, children[v])):
                    raise InvalidTreeError(f"children_order for {v!r} is not a permutation")
                children[v] = list(order)
        self._children: dict[VertexId, tuple[VertexId, ...]] = {
            v: tuple(cs) for v, cs in children.items()
        }

        self._roots = tuple(v for v, p in self._parent.items() if p is None)
        if not self._roots:
            raise InvalidTreeError("no parentless vertex (cycle)")

        # Depth-first order doubles as a cycle check: every vertex must be
        # reachable from some root.
        order: list[VertexId] = []
        depth: dict[VertexId, int] = {}
        for r in self._roots:
            stack = [(r, 0)]
            while stack:
                v, d = stack.pop()
                order.append(v)
                depth[v] = d
                stack.extend((c, d + 1) for c in reversed(self._children[v]))
        if len(order) != len(self._parent):
            raise InvalidTreeError("cycle detected: not all vertices reachable from a root")
        self._preorder = tuple(order)
        self._depth = depth
        self._leaves = tuple(v for v in self._preorder if not self._children[v])
        self._span_cache: dict[VertexId, tuple[int, int]] | None = None

    # -- structure ---------------------------------------------------------

    @property
    def vertices(self) -> tuple[VertexId, ...]:
        return self._preorder

    @property
    def leaves(self) -> tuple[VertexId, ...]:
        """Leaves in depth-first order of the stored child lists."""
        return self._leaves

    @property
    def root(self) -> VertexId:
        if len(self._roots) != 1:
            raise InvalidTreeError("tree does not have a unique root")
        return self._roots[0]

    def parent(self, v: VertexId) -> VertexId | None:
        return self._parent[v]

    def height(self, v: VertexId) -> float:
        return self._height[v]

    def children(self, v: VertexId) -> tuple[VertexId, ...]:
        return self._children[v]

    def is_leaf(self, v: VertexId) -> bool:
        return not self._children[v]

    def finite_heights(self) -> list[float]:
        """Sorted distinct finite vertex heights."""
        return sorted({h for h in self._height.values() if math.isfinite(h)})

    def subtree_vertices(self, v: VertexId) -> list[VertexId]:
        """Vertices of the subtree rooted at ``v`` in depth-first pre-order."""
        out = []
        stack = [v]
        while stack:
            u = stack.pop()
            out.append(u)
            stack.extend(reversed(self._children[u]))
        return out

    def subtree_leaves(self, v: VertexId) -> list[VertexId]:
        return [u for u in self.subtree_vertices(v) if self.is_leaf(u)]

    def leaf_span(self, v: VertexId) -> tuple[int, int]:
        """Half-open index interval of ``v``'s subtree leaves in ``self.leaves``.

        Only meaningful when the subtree leaves are contiguous, which holds for
        leaf-order-aligned trees.
        """
        if self._span_cache is None:
            rank = {u: i for i, u in enumerate(self._leaves)}
            spans: dict[VertexId, tuple[int, int]] = {}
            for v_ in reversed(self._preorder):
                if self.is_leaf(v_):
                    spans[v_] = (rank[v_], rank[v_] + 1)
                else:
                    los, his = zip(*(spans[c] for c in self._children[v_]))
                    spans[v_] = (min(los), max(his))
            self._span_cache = spans
        return self._span_cache[v]

    # -- points ------------------------------------------------------------

    def point(self, v: VertexId) -> TreePoint:
        return TreePoint(v, self._height[v])

    def contains_point(self, x: TreePoint) -> bool:
        if x.anchor not in self._parent:
            return False
        hv = self._height[x.anchor]
        if x.height == hv:
            return True
        p = self._parent[x.anchor]
        return p is not None and hv < x.height < self._height[p]

    def deg(self, x: TreePoint) -> int:
        """Down-degree of a point: child count at a vertex, 1 inside an edge."""
        if x.height == self._height[x.anchor]:
            return len(self._children[x.anchor])
        return 1

    def ancestor_at(self, x: TreePoint, h: float) -> TreePoint:
        """The unique ancestor of ``x`` at height ``h`` (requires ``h >= height(x)``)."""
        if h < x.height:
            raise ValueError(f"ancestor height {h} below point height {x.height}")
        if h == INF:
            return self.point(self.root)
        cur = x.anchor
        while True:
            p = self._parent[cur]
            if p is None:
                break
            hp = self._height[p]
            if h < hp:
                break
            cur = p
            if self._height[cur] == h:
                break
        return TreePoint(cur, h)

    def is_ancestor(self, below: TreePoint, above: TreePoint) -> bool:
        """True iff ``below`` precedes ``above`` in the ancestor order (incl. equality)."""
        if above.height < below.height:
            return False
        return self.ancestor_at(below, above.height) == above

    def lca(self, x: TreePoint, y: TreePoint) -> TreePoint:
        if self.is_ancestor(x, y):
            return y
        if self.is_ancestor(y, x):
            return x
        # Neither is an ancestor of the other, so the paths meet at a vertex.
        a, b = x.anchor, y.anchor
        da, db = self._depth[a], self._depth[b]
        while da > db:
            a = self._parent[a]
            da -= 1
        while db > da:
            b = self._parent[b]
            db -= 1
        while a != b:
            a = self._parent[a]
            b = self._parent[b]
        return self.point(a)

    def lca_height(self, x: TreePoint, y: TreePoint) -> float:
        return self.lca(x, y).height

    def level_set(self, h: float) -> list[TreePoint]:
        """All points at height ``h``, one per crossing edge plus exact vertices.

        Emission follows the depth-first order of the stored child lists, which
        realises the layer-order on aligned trees.
        """
        if not math.isfinite(h):
            raise ValueError("level_set expects a finite height")
        pts: list[TreePoint] = []
        for v in self._preorder:
            hv = self._height[v]
            if hv == h:
                pts.append(TreePoint(v, h))
            else:
                p = self._parent[v]
                if p is not None and hv < h < self._height[p]:
                    pts.append(TreePoint(v, h))
        return pts

    def child_toward(self, v: VertexId, x: TreePoint) -> VertexId:
        """The child of vertex ``v`` whose planted subtree contains ``x`` (with ``x`` strictly below ``v``)."""
        cur = x.anchor
        while self._parent[cur] != v:
            cur = self._parent[cur]
            if cur is None:
                raise ValueError("point is not strictly below the vertex")
        return cur

    # -- rebuilding --------------------------------------------------------

    def with_children_order(self, children_order: Mapping[VertexId, Sequence[VertexId]]) -> "MergeTree":
        merged = {v: children_order.get(v, self._children[v]) for v in self._parent}
        return MergeTree(self._parent, self._height, merged)

    def shifted(self, c: float) -> "MergeTree":
        """Heights shifted by ``c`` (the root stays at +inf)."""
        h = {v: (hv if hv == INF else hv + c) for v, hv in self._height.items()}
        return MergeTree(self._parent, h, self._children)

    def normalised_to_zero(self) -> "MergeTree":
        """Shift heights so the lowest leaf sits at exactly 0."""
        base = min(self._height[u] for u in self._leaves)
        return self.shifted(-base)

    def normalised(self) -> "MergeTree":
        """Contract interior degree-1 vertices; the realisation is unchanged."""
        unary = {
            v
            for v in self._preorder
            if self._parent[v] is not None and len(self._children[v]) == 1
        }
        if not unary:
            return self
        parent: dict[VertexId, VertexId | None] = {}
        children: dict[VertexId, list[VertexId]] = {}
        for v in self._preorder:
            if v in unary:
                continue
            p = self._parent[v]
            while p in unary:
                p = self._parent[p]
            parent[v] = p
            children[v] = []
        for v in parent:
            if parent[v] is not None:
                children[parent[v]].append(v)
        # Preserve the surviving relative child order.
        order: dict[VertexId, list[VertexId]] = {v: [] for v in parent}

        def descend(v: VertexId) -> VertexId:
            while v in unary:
                v = self._children[v][0]
            return v

        for v in parent:
            for c in self._children[v]:
                order[v].append(descend(c))
        height = {v: self._height[v] for v in parent}
        return MergeTree(parent, height, order)

    def __repr__(self) -> str:
        return f"MergeTree({len(self._parent)} vertices, {len(self._leaves)} leaves)"


def validate_tree(tree: MergeTree) -> Violation | None:
    """Check the merge-tree invariants, returning the first violation or None.

    Checked in order: a unique root at +inf, a single trunk edge below the
    root, finite heights elsewhere, strict height increase along every edge,
    and no interior degree-1 vertices (canonical form).
    """
    roots = [v for v in tree.vertices if tree.parent(v) is None]
    infs = [v for v in tree.vertices if tree.height(v) == INF]
    if len(roots) > 1 or len(infs) > 1:
        return Violation("multiple-roots", (roots + infs)[1], "more than one root/+inf vertex")
    if len(infs) == 0:
        return Violation("no-root", roots[0], "root height must be +inf")
    if roots[0] != infs[0]:
        return Violation("multiple-roots", infs[0], "+inf height on a non-root vertex")
    root = roots[0]
    if len(tree.children(root)) != 1:
        return Violation("root-degree", root, "root must have exactly one child")
    for v in tree.vertices:
        if v == root:
            continue
        if not math.isfinite(tree.height(v)):
            return Violation("nonfinite-height", v)
        if not tree.height(v) < tree.height(tree.parent(v)):
            return Violation("non-strict-height", v, "height must strictly increase towards the root")
    for v in tree.vertices:
        if v != root and len(tree.children(v)) == 1:
            return Violation("unary-vertex", v, "interior degree-1 vertex (not canonical)")
    return None


def snap_height(tree: MergeTree, h: float, tol: float = 1e-9) -> float:
    """Replace ``h`` by an exactly matching vertex height within ``tol``.

    Composed float sums like ``f(lca) - delta`` can land one ulp off a vertex
    height; level-set queries at such values would miss the vertex (and, at a
    leaf, the whole level).  Snapping keeps every derived level combinatorially
    faithful on inputs whose heights are separated by more than ``tol``.
    """
    if not math.isfinite(h):
        return h
    best = None
    for hv in tree.finite_heights():
        gap = abs(hv - h)
        if gap <= tol and (best is None or gap < best[0]):
            best = (gap, hv)
    return best[1] if best is not None else h


def points_close(tree: MergeTree, x: TreePoint, y: TreePoint, tol: float = 1e-9) -> bool:
    """Whether two points coincide up to a height tolerance along a shared root path.

    Exact equality is plain ``==`` on canonical points; this variant absorbs
    last-ulp height noise from composed float arithmetic in certificate checks.
    """
    if x == y:
        return True
    if abs(x.height - y.height) > tol:
        return False
    lo, hi = (x, y) if x.height <= y.height else (y, x)
    return tree.ancestor_at(lo, hi.height) == hi
