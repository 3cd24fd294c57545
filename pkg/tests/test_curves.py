import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from omtdist.curves import (
    Curve1D,
    CurveTrace,
    classify_curve,
    contract_violating,
    count_visits,
    find_violating_subcurves,
    in_order_walk,
    induced_curve,
)
from omtdist.randomtrees import random_omt
from omtdist.trees import INF, TreePoint
from conftest import build_tree


def test_walk_tree_a(tree_a):
    assert induced_curve(tree_a).heights == (INF, 0.0, 3.0, 1.0, INF)


def test_walk_tree_b(tree_b):
    assert induced_curve(tree_b).heights == (INF, 1.0, 3.0, 0.0, INF)


def test_walk_single_leaf():
    omt = build_tree({"root": (None, INF), "u": ("root", 0.0)})
    assert induced_curve(omt).heights == (INF, 0.0, INF)


def test_walk_multi_child_merge():
    omt = build_tree(
        {
            "root": (None, INF),
            "v": ("root", 2.0),
            "a": ("v", 0.0),
            "b": ("v", 0.5),
            "c": ("v", 0.25),
        }
    )
    # A 3-child merge appears twice between its child excursions.
    assert induced_curve(omt).heights == (INF, 0.0, 2.0, 0.5, 2.0, 0.25, INF)


def test_canonicalisation_drops_pauses_and_collinear():
    c = Curve1D.from_heights([INF, 3.0, 1.0, 1.0, 2.0, 3.0, 0.5, INF])
    assert c.heights == (INF, 1.0, 3.0, 0.5, INF)


def test_curve_rejects_interior_inf():
    with pytest.raises(ValueError):
        Curve1D((INF, 1.0, INF, 0.5, INF))


def test_classify_walk_is_in_order(tree_a, caterpillar3):
    for omt in (tree_a, caterpillar3):
        assert classify_curve(omt, in_order_walk(omt)) == "in_order"


def test_classify_deleted_excursion_is_partial(caterpillar3):
    tree = caterpillar3.tree
    # Walk of (a, b, c) skipping leaf b's excursion entirely.
    pts = [
        tree.point("root"),
        tree.point("a"),
        tree.point("v2"),
        tree.point("c"),
        tree.point("root"),
    ]
    trace = CurveTrace(tree, [k / 4 for k in range(5)], pts)
    assert classify_curve(caterpillar3, trace) == "partial"


def _excursion_trace(tree, heights_up):
    """root -> a -> (a-edge at h) -> a -> ... -> root on a two-leaf tree."""
    pts = [tree.point("root"), tree.point("a")]
    for h in heights_up:
        pts.append(TreePoint("a", h))
        pts.append(tree.point("a"))
    pts.append(tree.point("root"))
    n = len(pts)
    return CurveTrace(tree, [k / (n - 1) for k in range(n)], pts)


@pytest.fixture
def two_leaf():
    return build_tree(
        {"root": (None, INF), "m": ("root", 2.0), "a": ("m", 0.0), "b": ("m", 0.0)}
    )


def test_classify_reentry_is_weak(two_leaf):
    trace = _excursion_trace(two_leaf.tree, [1.0])
    assert classify_curve(two_leaf, trace) == "weak"


def test_violating_subcurves_on_walk_empty(tree_a, caterpillar3):
    for omt in (tree_a, caterpillar3):
        assert find_violating_subcurves(in_order_walk(omt)) == []


def test_violating_subcurve_single(two_leaf):
    trace = _excursion_trace(two_leaf.tree, [1.0])
    found = find_violating_subcurves(trace)
    assert len(found) == 1
    v = found[0]
    assert v.point == two_leaf.tree.point("a")
    assert trace.point_at(v.left) == v.point and trace.point_at(v.right) == v.point


def test_violating_subcurves_two_disjoint(two_leaf):
    trace = _excursion_trace(two_leaf.tree, [1.0, 1.5])
    found = find_violating_subcurves(trace)
    assert len(found) == 2
    assert found[0].right <= found[1].left


def test_contract_partial_unchanged(tree_a):
    walk = in_order_walk(tree_a)
    out, paused = contract_violating(walk)
    assert paused == [] and out.points == walk.points


def test_contract_flattens_excursion(two_leaf):
    trace = _excursion_trace(two_leaf.tree, [1.0])
    out, paused = contract_violating(trace)
    assert len(paused) == 1
    assert all(p.height <= 0.0 or p.height == INF or p == two_leaf.tree.point("m") for p in out.points if p.anchor == "a")
    assert classify_curve(two_leaf, out) == "partial"


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_subcurves_stay_below_lca(seed):
    rand = random.Random(seed)
    omt = random_omt(rand, min_leaves=2, max_leaves=10)
    trace = in_order_walk(omt)
    tree = omt.tree
    for _ in range(5):
        t1, t2 = sorted((rand.random(), rand.random()))
        top = tree.lca(trace.point_at(t1), trace.point_at(t2))
        for t in (t1 + (t2 - t1) * k / 6 for k in range(7)):
            pt = trace.point_at(t)
            # Interpolated sample heights carry last-ulp noise; containment in
            # the subtree is what matters.
            assert tree.lca(pt, top).height <= top.height + 1e-9


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_curve_extrema_structure(seed):
    rand = random.Random(seed)
    omt = random_omt(rand, min_leaves=2, max_leaves=12)
    tree = omt.tree
    curve = induced_curve(omt)
    leaf_heights = [tree.height(u) for u in tree.leaves]
    assert curve.interior_minima() == leaf_heights
    expected_maxima = sorted(
        h
        for v in tree.vertices
        if tree.parent(v) is not None and len(tree.children(v)) >= 2
        for h in [tree.height(v)] * (len(tree.children(v)) - 1)
    )
    assert sorted(curve.interior_maxima()) == expected_maxima


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6))
def test_reparameterisation_invariance(seed):
    rand = random.Random(seed)
    omt = random_omt(rand, min_leaves=1, max_leaves=10)
    walk = in_order_walk(omt)
    warped = [t**2 for t in walk.params]
    warped[-1] = 1.0
    other = CurveTrace(omt.tree, warped, walk.points)
    assert other.curve() == walk.curve()


def test_visit_counts_match_definition(tree_a):
    walk = in_order_walk(tree_a)
    tree = tree_a.tree
    assert count_visits(walk, tree.point("v")) == 3
    assert count_visits(walk, tree.point("u1")) == 1
    assert count_visits(walk, TreePoint("u1", 2.0)) == 2
    assert count_visits(walk, tree.point("root")) == 2
