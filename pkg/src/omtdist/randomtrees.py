"""Synthetic ordered merge trees for tests and experiments.

Heights are drawn from a dyadic grid so that every derived quantity the
pipeline compares (vertex differences, their halves, sums with deltas) is
exactly representable in binary floating point; distinct Frechet candidates
then differ by at least half a grid step.
"""

from __future__ import annotations

import random

from .ordering import OrderedMergeTree
from .trees import INF, MergeTree


def random_omt(
    rng: random.Random,
    min_leaves: int = 1,
    max_leaves: int = 12,
    grid: int = 64,
    multi_child_prob: float = 0.15,
) -> OrderedMergeTree:
    """A random ordered merge tree with dyadic heights.

    Adjacent active subtrees merge bottom-up, so the construction order is the
    leaf order; occasionally three merge at once to exercise higher-degree
    vertices.
    """
    n = rng.randint(min_leaves, max_leaves)
    parent: dict[str, str | None] = {}
    height: dict[str, float] = {}
    children: dict[str, list[str]] = {}
    active: list[tuple[str, float]] = []
    for i in range(n):
        h = rng.randrange(grid) / grid
        parent[f"u{i}"] = None
        height[f"u{i}"] = h
        active.append((f"u{i}", h))
    counter = 0
    while len(active) > 1:
        k = 3 if len(active) >= 3 and rng.random() < multi_child_prob else 2
        pos = rng.randrange(len(active) - k + 1)
        group = active[pos : pos + k]
        top = max(h for _, h in group)
        merge_h = top + rng.randint(1, grid // 4) / grid
        vid = f"m{counter}"
        counter += 1
        parent[vid] = None
        height[vid] = merge_h
        children[vid] = [v for v, _ in group]
        for v, _ in group:
            parent[v] = vid
        active[pos : pos + k] = [(vid, merge_h)]
    parent["root"] = None
    height["root"] = INF
    parent[active[0][0]] = "root"
    children["root"] = [active[0][0]]
    tree = MergeTree(parent, height, children)
    return OrderedMergeTree(tree, tree.leaves)


def random_pair(rng: random.Random, **kwargs) -> tuple[OrderedMergeTree, OrderedMergeTree]:
    return random_omt(rng, **kwargs), random_omt(rng, **kwargs)


def caterpillar(n_leaves: int) -> OrderedMergeTree:
    """A spine tree: each new leaf merges into the spine a quarter step higher."""
    if n_leaves < 1:
        raise ValueError("need at least one leaf")
    parent: dict[str, str | None] = {"root": None}
    height: dict[str, float] = {"root": INF}
    for i in range(n_leaves):
        parent[f"u{i}"] = None
        height[f"u{i}"] = (i % 16) / 32.0
    if n_leaves == 1:
        parent["u0"] = "root"
        tree = MergeTree(parent, height)
        return OrderedMergeTree(tree, tree.leaves)
    children: dict[str, list[str]] = {}
    spine_prev = "u0"
    for i in range(1, n_leaves):
        vid = f"m{i}"
        parent[vid] = None
        height[vid] = 1.0 + (i - 1) * 0.25
        parent[spine_prev] = vid
        parent[f"u{i}"] = vid
        children[vid] = [spine_prev, f"u{i}"]
        spine_prev = vid
    parent[spine_prev] = "root"
    children["root"] = [spine_prev]
    tree = MergeTree(parent, height, children)
    return OrderedMergeTree(tree, tree.leaves)


def tree_a() -> OrderedMergeTree:
    """Two leaves at heights 0 and 1 merging at 3, ordered low-high."""
    tree = MergeTree(
        {"root": None, "v": "root", "u1": "v", "u2": "v"},
        {"root": INF, "v": 3.0, "u1": 0.0, "u2": 1.0},
    )
    return OrderedMergeTree(tree, ("u1", "u2"))


def tree_b() -> OrderedMergeTree:
    """The order mirror of :func:`tree_a`: heights 1 and 0 merging at 3."""
    tree = MergeTree(
        {"root": None, "v": "root", "w1": "v", "w2": "v"},
        {"root": INF, "v": 3.0, "w1": 1.0, "w2": 0.0},
    )
    return OrderedMergeTree(tree, ("w1", "w2"))


def shifted(omt: OrderedMergeTree, c: float) -> OrderedMergeTree:
    return OrderedMergeTree(omt.tree.shifted(c), omt.leaf_order)
