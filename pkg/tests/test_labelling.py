import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from omtdist.interleaving import (
    CertificateError,
    check_interleaving,
    check_monotone,
    monotone_interleaving_distance,
)
from omtdist.labelling import (
    Labelling,
    check_monotone_labelling,
    good_to_labelling,
    induced_matrix,
    label_distance,
    labelling_to_interleaving,
)
from omtdist.randomtrees import random_pair
from omtdist.trees import TreePoint


def test_induced_matrix_examples(tree_a, tree_b):
    m = induced_matrix(tree_a.tree, (TreePoint("u1", 0.0), TreePoint("u2", 1.0)))
    assert m.tolist() == [[0.0, 3.0], [3.0, 1.0]]
    mp = induced_matrix(tree_b.tree, (TreePoint("w1", 1.0), TreePoint("w2", 0.0)))
    assert mp.tolist() == [[1.0, 3.0], [3.0, 0.0]]
    single = induced_matrix(tree_a.tree, (TreePoint("v", 3.0),))
    assert single.tolist() == [[3.0]]
    assert label_distance(m, mp) == 1.0


def test_label_distance_basics():
    m = np.array([[0.0, 3.0], [3.0, 1.0]])
    assert label_distance(m, m) == 0.0
    assert label_distance(m, m + 2.5) == 2.5
    with pytest.raises(ValueError):
        label_distance(m, np.zeros((3, 3)))


def test_identity_labelling(tree_a):
    _, (alpha, _) = monotone_interleaving_distance(tree_a, tree_a)
    lab = good_to_labelling(alpha)
    assert lab.size == 4
    assert lab.distance() == 0.0
    assert check_monotone_labelling(lab) is None


def test_example_pair_labelling(tree_a, tree_b):
    delta, (alpha, _) = monotone_interleaving_distance(tree_a, tree_b)
    lab = good_to_labelling(alpha)
    assert lab.size == len(tree_a.tree.leaves) + len(tree_b.tree.leaves)
    assert lab.distance() <= delta
    assert check_monotone_labelling(lab) is None


def test_crossed_labelling_witnessed(tree_a, tree_b):
    lab = Labelling(
        tree_a,
        tree_b,
        (TreePoint("u1", 0.0), TreePoint("u2", 1.0)),
        (TreePoint("w2", 0.0), TreePoint("w1", 1.0)),
    )
    bad = check_monotone_labelling(lab)
    assert bad is not None and bad.condition == "monotone-labelling"


def test_single_label_vacuous():
    # One label on single-leaf trees: monotone holds vacuously.
    import omtdist.trees as T
    from omtdist.ordering import OrderedMergeTree

    t = T.MergeTree({"root": None, "u": "root"}, {"root": T.INF, "u": 0.0})
    omt = OrderedMergeTree(t, t.leaves)
    lab = Labelling(omt, omt, (t.point("u"),), (t.point("u"),))
    assert check_monotone_labelling(lab) is None


def test_labelling_to_interleaving_identity(tree_a):
    pts = tuple(tree_a.tree.point(u) for u in tree_a.tree.leaves)
    lab = Labelling(tree_a, tree_a, pts, pts)
    alpha, beta = labelling_to_interleaving(lab, 0.0)
    assert check_interleaving(alpha, beta) is None


def test_labelling_to_interleaving_example(tree_a, tree_b):
    delta, (alpha, _) = monotone_interleaving_distance(tree_a, tree_b)
    lab = good_to_labelling(alpha)
    a2, b2 = labelling_to_interleaving(lab, delta)
    assert check_interleaving(a2, b2) is None
    assert check_monotone(a2) is None and check_monotone(b2) is None


def test_labelling_to_interleaving_rejects_large_distance(tree_a, tree_b):
    delta, (alpha, _) = monotone_interleaving_distance(tree_a, tree_b)
    lab = good_to_labelling(alpha)
    with pytest.raises(CertificateError):
        labelling_to_interleaving(lab, delta / 4)


def test_good_to_labelling_requires_monotone(tree_a, tree_b):
    from omtdist.interleaving import ShiftMap

    crossed = ShiftMap(
        tree_a,
        tree_b,
        1.0,
        {"u1": TreePoint("w2", 1.0), "u2": TreePoint("w1", 2.0)},
    )
    with pytest.raises(CertificateError):
        good_to_labelling(crossed)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_pipeline_fixed_point(seed):
    rand = random.Random(seed)
    a, b = random_pair(rand, min_leaves=1, max_leaves=8)
    delta, (alpha, beta) = monotone_interleaving_distance(a, b)
    lab = good_to_labelling(alpha)
    assert check_monotone_labelling(lab) is None
    assert lab.distance() <= delta + 1e-12
    a2, b2 = labelling_to_interleaving(lab, delta)
    assert check_interleaving(a2, b2) is None
    assert check_monotone(a2) is None and check_monotone(b2) is None
    # Relabelling the rebuilt pair keeps everything monotone at the same delta.
    lab2 = good_to_labelling(a2)
    assert lab2.distance() <= delta + 1e-12
