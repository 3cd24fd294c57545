import random

import pytest

from omtdist.ordering import OrderedMergeTree
from omtdist.trees import INF, MergeTree


def build_tree(spec: dict[str, tuple[str | None, float]], order=None) -> OrderedMergeTree:
    """Tiny builder: vertex -> (parent, height); child order follows dict order."""
    parent = {v: p for v, (p, _) in spec.items()}
    height = {v: h for v, (_, h) in spec.items()}
    tree = MergeTree(parent, height)
    return OrderedMergeTree(tree, order if order is not None else tree.leaves)


@pytest.fixture
def tree_a():
    from omtdist.randomtrees import tree_a as make

    return make()


@pytest.fixture
def tree_b():
    from omtdist.randomtrees import tree_b as make

    return make()


@pytest.fixture
def caterpillar3():
    """Leaves a, b under v1 (h=2); leaf c joins at v2 (h=4)."""
    return build_tree(
        {
            "root": (None, INF),
            "v2": ("root", 4.0),
            "v1": ("v2", 2.0),
            "a": ("v1", 0.0),
            "b": ("v1", 0.0),
            "c": ("v2", 0.0),
        }
    )


@pytest.fixture
def rng():
    return random.Random(20260810)
