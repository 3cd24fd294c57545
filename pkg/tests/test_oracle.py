import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from omtdist.curves import induced_curve
from omtdist.frechet import compute_frechet_value
from omtdist.oracle import (
    PartitionInstance,
    all_order_curves,
    brute_force_min_over_orders,
    build_partition_reduction,
    discrete_frechet_refined,
)
from omtdist.randomtrees import random_omt, random_pair, tree_a, tree_b
from omtdist.trees import validate_tree


def test_discrete_identical_is_zero():
    p = induced_curve(tree_a())
    assert discrete_frechet_refined(p, p, 0.1) == 0.0


def test_discrete_mirror_pair_brackets_one():
    p, q = induced_curve(tree_a()), induced_curve(tree_b())
    approx = discrete_frechet_refined(p, q, 0.01)
    assert 1.0 <= approx <= 1.02


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6))
def test_refinement_monotone(seed):
    rand = random.Random(seed)
    a, b = random_pair(rand, min_leaves=1, max_leaves=6)
    p, q = induced_curve(a), induced_curve(b)
    for r in (0.2, 0.1):
        coarse = discrete_frechet_refined(p, q, r)
        fine = discrete_frechet_refined(p, q, r / 2)
        assert fine <= coarse + r + 1e-12


def test_brute_force_self_is_zero():
    t = tree_a().tree
    assert brute_force_min_over_orders(t, t) == 0.0


def test_brute_force_finds_aligning_order():
    # Unordered, the two example trees are isomorphic: some order pair aligns.
    assert brute_force_min_over_orders(tree_a().tree, tree_b().tree) == 0.0


def test_brute_force_lower_bounds_fixed_order():
    a, b = tree_a(), tree_b()
    fixed = compute_frechet_value(induced_curve(a), induced_curve(b))
    assert brute_force_min_over_orders(a.tree, b.tree) <= fixed


def test_brute_force_budget():
    t = random_omt(random.Random(1), min_leaves=9, max_leaves=9).tree
    with pytest.raises(ValueError):
        brute_force_min_over_orders(t, t, max_leaves=8)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6))
def test_order_curves_cover_the_walk(seed):
    rand = random.Random(seed)
    omt = random_omt(rand, min_leaves=1, max_leaves=6)
    curves = all_order_curves(omt.tree)
    assert induced_curve(omt).heights in curves


def test_partition_instance_validation():
    with pytest.raises(ValueError):
        PartitionInstance((1, 1, 1), 2)  # non-integral group sum
    with pytest.raises(ValueError):
        PartitionInstance((1, 1, 2), 2, lam=8.0)  # scale too small
    assert PartitionInstance((1, 1, 2), 2).mu == 2


def test_reduction_structure():
    t, tp = build_partition_reduction(PartitionInstance((1, 1, 2), 2, 9.0))
    assert validate_tree(t) is None and validate_tree(tp) is None
    assert len(t.leaves) == 4 and len(tp.leaves) == 4
    assert all(t.height(u) == 0.0 for u in t.leaves)
    assert all(tp.height(u) == 1.0 for u in tp.leaves)
    # Three value groups on one side, two groups of mu leaves on the other.
    r = t.children(t.root)[0]
    assert t.height(r) == 11.0 and len(t.children(r)) == 3
    rp = tp.children(tp.root)[0]
    assert tp.height(rp) == 12.0 and len(tp.children(rp)) == 2
    assert all(len(tp.children(q)) == 2 for q in tp.children(rp))


def test_reduction_leaf_counts_match_sum():
    inst = PartitionInstance((2, 3, 1), 3, 9.0)
    t, tp = build_partition_reduction(inst)
    assert len(t.leaves) == sum(inst.values)
    assert len(tp.leaves) == inst.groups * inst.mu == sum(inst.values)


def test_reduction_yes_instance_has_cheap_order():
    t, tp = build_partition_reduction(PartitionInstance((1, 1, 2), 2, 9.0))
    assert brute_force_min_over_orders(t, tp) <= 1.0 + 1e-9
