"""Order structures on merge trees.

Two equivalent ways to order a merge tree: a *layer-order* (one total order
per level set, consistent under taking ancestors) and a *leaf-order* (a total
order on the leaves that separates subtrees).  The two determine each other,
and this module provides both directions plus the validators.

The canonical in-memory representation is :class:`OrderedMergeTree`: the leaf
order is stored explicitly and the tree's child lists are permuted once so a
plain depth-first traversal realises it.  The induced layer comparison then
reduces to comparing subtree leaf intervals.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .trees import MergeTree, TreePoint, VertexId


class OrderError(ValueError):
    """A leaf order or layer comparator is structurally unusable."""


@dataclass(frozen=True)
class LeafOrder:
    sequence: tuple[VertexId, ...]

    def index(self, leaf: VertexId) -> int:
        return self.sequence.index(leaf)

    def __iter__(self):
        return iter(self.sequence)

    def __len__(self) -> int:
        return len(self.sequence)


@dataclass(frozen=True)
class ViolatingTriple:
    """Witness that a leaf order fails to separate subtrees: u sits between u1, u2
    in the order but outside the subtree of lca(u1, u2)."""

    u1: VertexId
    u: VertexId
    u2: VertexId


LayerComparator = Callable[[TreePoint, TreePoint], int]


def check_leaf_order(tree: MergeTree, order: LeafOrder | Sequence[VertexId]) -> ViolatingTriple | None:
    """Validate the separating-subtrees property; None means the order is fine.

    A leaf order separates subtrees iff every vertex's subtree leaves form a
    contiguous block of the order, so the scan is linear in the tree.
    """
    seq = tuple(order.sequence if isinstance(order, LeafOrder) else order)
    if sorted(map(repr, seq)) != sorted(map(repr, tree.leaves)):
        raise OrderError("leaf order is not a permutation of the leaves")
    rank = {u: i for i, u in enumerate(seq)}
    for v in tree.vertices:
        if tree.is_leaf(v):
            continue
        below = tree.subtree_leaves(v)
        ranks = sorted(rank[u] for u in below)
        if ranks[-1] - ranks[0] + 1 == len(ranks):
            continue
        # Find the gap and produce a witness triple.
        inside = set(ranks)
        gap = next(i for i in range(ranks[0], ranks[-1]) if i not in inside)
        u1 = seq[max(i for i in inside if i < gap)]
        u2 = seq[min(i for i in inside if i > gap)]
        return ViolatingTriple(u1, seq[gap], u2)
    return None


class OrderedMergeTree:
    """A merge tree together with a subtree-separating leaf order.

    The stored tree has its child lists aligned to the leaf order, so
    ``tree.leaves`` equals the order and depth-first traversals are in-order
    walks.  Instances are immutable.
    """

    def __init__(self, tree: MergeTree, leaf_order: LeafOrder | Sequence[VertexId]):
        order = leaf_order if isinstance(leaf_order, LeafOrder) else LeafOrder(tuple(leaf_order))
        bad = check_leaf_order(tree, order)
        if bad is not None:
            raise OrderError(f"leaf order does not separate subtrees: {bad}")
        rank = {u: i for i, u in enumerate(order.sequence)}
        children_order = {}
        for v in tree.vertices:
            cs = tree.children(v)
            if len(cs) > 1:
                children_order[v] = sorted(
                    cs, key=lambda c: min(rank[u] for u in tree.subtree_leaves(c))
                )
        aligned = tree.with_children_order(children_order)
        assert aligned.leaves == order.sequence
        self.tree = aligned
        self.leaf_order = order

    @property
    def root_point(self) -> TreePoint:
        return self.tree.point(self.tree.root)

    def leaf_rank(self, leaf: VertexId) -> int:
        return self.tree.leaf_span(leaf)[0]

    def compare(self, x1: TreePoint, x2: TreePoint) -> int:
        """Induced layer comparison of two equal-height points (-1, 0, +1)."""
        if x1.height != x2.height:
            raise ValueError("layer comparison requires equal heights")
        if x1 == x2:
            return 0
        lo1 = self.tree.leaf_span(x1.anchor)[0]
        lo2 = self.tree.leaf_span(x2.anchor)[0]
        assert lo1 != lo2, "distinct equal-height points must root disjoint subtrees"
        return -1 if lo1 < lo2 else 1

    def compare_points(self, x1: TreePoint, x2: TreePoint) -> int:
        """Global point order: compare ancestors at the higher of the two heights.

        Returns 0 when the points are equal or ancestor-related.
        """
        h = max(x1.height, x2.height)
        a1 = self.tree.ancestor_at(x1, h)
        a2 = self.tree.ancestor_at(x2, h)
        if a1 == a2:
            return 0
        return self.compare(a1, a2)

    def level_set(self, h: float) -> list[TreePoint]:
        """Level set in layer order."""
        return self.tree.level_set(h)

    def layer_comparator(self) -> LayerComparator:
        return self.compare

    def __repr__(self) -> str:
        return f"OrderedMergeTree({len(self.tree.vertices)} vertices, order={self.leaf_order.sequence!r})"


def induced_layer_compare(omt: OrderedMergeTree, x1: TreePoint, x2: TreePoint) -> int:
    return omt.compare(x1, x2)


def induced_leaf_order(tree: MergeTree, layer_cmp: LayerComparator) -> LeafOrder:
    """Recover the leaf order from a layer comparator.

    Two leaves are compared by lifting the lower one to the height of the
    higher and applying the layer comparison there.  The comparator is
    validated pairwise afterwards: any antisymmetry or transitivity defect
    surfaces as an :class:`OrderError`.
    """
    leaves = list(tree.leaves)

    @functools.lru_cache(maxsize=None)
    def leaf_cmp(u1: VertexId, u2: VertexId) -> int:
        h = max(tree.height(u1), tree.height(u2))
        a1 = tree.ancestor_at(tree.point(u1), h)
        a2 = tree.ancestor_at(tree.point(u2), h)
        return layer_cmp(a1, a2)

    for i, u1 in enumerate(leaves):
        for u2 in leaves[i + 1 :]:
            c, d = leaf_cmp(u1, u2), leaf_cmp(u2, u1)
            if c == 0 or d == 0 or c == d:
                raise OrderError(
                    f"inconsistent comparator: leaves {u1!r}, {u2!r} compare ({c}, {d})"
                )

    ordered = sorted(leaves, key=functools.cmp_to_key(leaf_cmp))
    for i, u1 in enumerate(ordered):
        for u2 in ordered[i + 1 :]:
            if leaf_cmp(u1, u2) != -1:
                raise OrderError(
                    f"inconsistent comparator: no total order places {u1!r} before {u2!r}"
                )
    return LeafOrder(tuple(ordered))


def induced_ordered_tree(tree: MergeTree, layer_cmp: LayerComparator) -> OrderedMergeTree:
    """The ordered merge tree determined by a consistent layer comparator."""
    return OrderedMergeTree(tree, induced_leaf_order(tree, layer_cmp))


@dataclass(frozen=True)
class ConsistencyWitness:
    kind: str
    height_low: float
    height_high: float
    x1: TreePoint
    x2: TreePoint


def _sample_heights(tree: MergeTree, extra: Iterable[float]) -> list[float]:
    hs = set(tree.finite_heights())
    hs.update(h for h in extra if math.isfinite(h))
    hs = sorted(hs)
    mids = [(a + b) / 2 for a, b in zip(hs, hs[1:])]
    return sorted(set(hs) | set(mids))


def check_layer_consistency(
    tree: MergeTree,
    layer_cmp: LayerComparator,
    sample_heights: Sequence[float] = (),
) -> ConsistencyWitness | None:
    """Verify that a layer comparator behaves like a consistent layer-order.

    Checks, at every vertex height, midpoint, and extra sample: the total-order
    axioms on the level set, upward consistency between consecutive sampled
    heights, and the downward strictness of distinct branches.  Between
    consecutive vertex heights the level-set combinatorics are constant, so
    these samples are exhaustive.
    """
    heights = _sample_heights(tree, sample_heights)
    min_leaf = min(tree.height(u) for u in tree.leaves)
    heights = [h for h in heights if h >= min_leaf]

    for h in heights:
        pts = tree.level_set(h)
        for i, a in enumerate(pts):
            if layer_cmp(a, a) != 0:
                return ConsistencyWitness("irreflexive", h, h, a, a)
            for b in pts[i + 1 :]:
                c, d = layer_cmp(a, b), layer_cmp(b, a)
                if c == 0 or d == 0 or c == d:
                    return ConsistencyWitness("antisymmetry", h, h, a, b)
        for a in pts:
            for b in pts:
                for c_ in pts:
                    if layer_cmp(a, b) <= 0 and layer_cmp(b, c_) <= 0 and layer_cmp(a, c_) > 0:
                        return ConsistencyWitness("transitivity", h, h, a, c_)

    for h1, h2 in zip(heights, heights[1:]):
        pts = tree.level_set(h1)
        for i, a in enumerate(pts):
            for b in pts[i + 1 :]:
                c1 = layer_cmp(a, b)
                ua = tree.ancestor_at(a, h2)
                ub = tree.ancestor_at(b, h2)
                if ua == ub:
                    continue
                c2 = layer_cmp(ua, ub)
                # Upward consistency and downward strictness coincide here:
                # distinct ancestors must be ordered exactly like the pair below.
                if c1 != c2:
                    return ConsistencyWitness("consistency", h1, h2, a, b)
    return None


def check_omt_consistency(omt: OrderedMergeTree, sample_heights: Sequence[float] = ()) -> ConsistencyWitness | None:
    return check_layer_consistency(omt.tree, omt.compare, sample_heights)
