"""Independent reference implementations used to validate the main pipeline.

Nothing here shares code with the production Frechet engine: the discrete
Frechet oracle runs its own dense dynamic program on resampled curves with
its own sentinel handling, and the order exhauster enumerates leaf orders
directly from child permutations.

Also home to the balanced-partition reduction that builds tree pairs whose
interleaving distance separates yes- from no-instances; those trees feed the
gap sanity tests.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .curves import Curve1D
from .frechet import compute_frechet_value
from .trees import INF, MergeTree, VertexId

try:
    from numba import njit
except ImportError:  # pragma: no cover
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(f):
            return f

        return wrap


@njit(cache=True)
def _dfd_kernel(a, b):  # pragma: no cover - exercised via discrete_frechet_refined
    n = a.shape[0]
    m = b.shape[0]
    prev = np.empty(m, dtype=np.float64)
    cur = np.empty(m, dtype=np.float64)
    prev[0] = abs(a[0] - b[0])
    for j in range(1, m):
        d = abs(a[0] - b[j])
        prev[j] = prev[j - 1] if prev[j - 1] > d else d
    for i in range(1, n):
        d = abs(a[i] - b[0])
        cur[0] = prev[0] if prev[0] > d else d
        for j in range(1, m):
            best = prev[j]
            if prev[j - 1] < best:
                best = prev[j - 1]
            if cur[j - 1] < best:
                best = cur[j - 1]
            d = abs(a[i] - b[j])
            cur[j] = best if best > d else d
        prev, cur = cur, prev
    return prev[m - 1]


def _oracle_capped(P: Curve1D, Q: Curve1D) -> tuple[list[float], list[float]]:
    finite = P.finite_heights() + Q.finite_heights()
    top = max(finite) + (max(finite) - min(finite)) + 1.0
    cap = lambda hs: [top if h == INF else h for h in hs]
    return cap(P.heights), cap(Q.heights)


def _resample(heights: list[float], resolution: float) -> np.ndarray:
    out = [heights[0]]
    for a, b in zip(heights, heights[1:]):
        steps = max(1, math.ceil(abs(b - a) / resolution))
        for k in range(1, steps + 1):
            out.append(a + (b - a) * k / steps)
    return np.asarray(out, dtype=np.float64)


def discrete_frechet_refined(P: Curve1D, Q: Curve1D, resolution: float) -> float:
    """Discrete Frechet distance on curves resampled to steps <= resolution.

    Always an upper bound on the continuous distance, and at most
    ``2 * resolution`` above it.
    """
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    p, q = _oracle_capped(P, Q)
    return float(_dfd_kernel(_resample(p, resolution), _resample(q, resolution)))


# -- exhaustive order search -------------------------------------------------


def all_order_curves(tree: MergeTree) -> set[tuple[float, ...]]:
    """Induced-curve height tuples over every subtree-separating leaf order.

    Valid leaf orders correspond exactly to choices of a child permutation at
    every vertex, so the walk profiles are generated by direct DFS over those
    choices.
    """
    internal = [v for v in tree.vertices if len(tree.children(v)) > 1]
    perms = [list(itertools.permutations(tree.children(v))) for v in internal]
    out: set[tuple[float, ...]] = set()
    for choice in itertools.product(*perms):
        order = dict(zip(internal, choice))

        def profile(v: VertexId) -> list[float]:
            cs = order.get(v, tree.children(v))
            if not cs:
                return [tree.height(v)]
            parts = [profile(c) for c in cs]
            merged = parts[0]
            for nxt in parts[1:]:
                merged = merged + [tree.height(v)] + nxt
            return merged

        heights = [INF] + profile(tree.children(tree.root)[0]) + [INF]
        out.add(tuple(Curve1D.from_heights(heights).heights))
    return out


def brute_force_min_over_orders(tree: MergeTree, other: MergeTree, max_leaves: int = 8) -> float:
    """Minimum monotone interleaving distance over all valid leaf-order pairs.

    Exhausts per-vertex child permutations on both trees; orders inducing the
    same 1D curve are collapsed before the pairwise distance computations.
    """
    if len(tree.leaves) > max_leaves or len(other.leaves) > max_leaves:
        raise ValueError(f"trees exceed the brute-force budget of {max_leaves} leaves")
    curves_a = [Curve1D(h) for h in all_order_curves(tree)]
    curves_b = [Curve1D(h) for h in all_order_curves(other)]
    return min(
        compute_frechet_value(pa, pb) for pa in curves_a for pb in curves_b
    )


# -- balanced-partition reduction ---------------------------------------------


@dataclass(frozen=True)
class PartitionInstance:
    """A balanced-partition instance (X, m) with the reduction's scale constant."""

    values: tuple[int, ...]
    groups: int
    lam: float = 9.0

    def __post_init__(self):
        if self.groups < 1:
            raise ValueError("need at least one group")
        if any(v < 1 for v in self.values):
            raise ValueError("values must be positive integers")
        if not self.lam > 8:
            raise ValueError("the scale constant must exceed 8")
        if sum(self.values) % self.groups != 0:
            raise ValueError("group sum must be integral for a candidate instance")

    @property
    def mu(self) -> int:
        return sum(self.values) // self.groups


def build_partition_reduction(inst: PartitionInstance) -> tuple[MergeTree, MergeTree]:
    """The two reduction trees for a balanced-partition instance.

    The first tree hangs ``a_i`` leaves at height 0 below a vertex at
    ``lam`` for each value, joined through vertices at ``lam + 1`` into a
    common vertex at ``lam + 2``.  The second tree groups ``mu`` leaves at
    height 1 below vertices at ``lam + 1`` joined at ``lam + 3``.  The raw
    construction contains chain vertices, which are contracted; contraction
    does not move any point of the realisation.
    """
    lam = inst.lam
    parent: dict[str, str | None] = {"root": None, "r": "root"}
    height: dict[str, float] = {"root": INF, "r": lam + 2.0}
    for i, a in enumerate(inst.values):
        parent[f"p{i}"] = "r"
        height[f"p{i}"] = lam + 1.0
        parent[f"phat{i}"] = f"p{i}"
        height[f"phat{i}"] = lam
        for k in range(a):
            parent[f"u{i}.{k}"] = f"phat{i}"
            height[f"u{i}.{k}"] = 0.0
    t = MergeTree(parent, height).normalised()

    parent2: dict[str, str | None] = {"root": None, "r": "root"}
    height2: dict[str, float] = {"root": INF, "r": lam + 3.0}
    for j in range(inst.groups):
        parent2[f"q{j}"] = "r"
        height2[f"q{j}"] = lam + 1.0
        for k in range(inst.mu):
            parent2[f"w{j}.{k}"] = f"q{j}"
            height2[f"w{j}.{k}"] = 1.0
    t_prime = MergeTree(parent2, height2).normalised()
    return t, t_prime
