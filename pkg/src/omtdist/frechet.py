"""Exact Frechet distance between 1D piecewise-linear curves.

The decision procedure propagates reachable intervals through the free-space
diagram of the two curves (one cell per segment pair).  For 1D segments the
per-cell free region is a band between two parallel lines, hence convex, so
the classical interval propagation is exact.

Boundary intervals are represented in *height space* along the edge they live
on, oriented by the edge direction, which keeps the whole decision free of
divisions: on inputs whose heights are dyadic rationals every comparison is
exact.  Divisions only appear when a witness matching is materialised, where
parameters are cosmetic.

The exact optimum is the smallest feasible value among the finite critical
candidates: all vertex-vertex height differences between the curves, plus all
half differences of vertex heights within each curve (the 1D form of the
monotonicity events; the optimum of two curves can be such a half difference,
so vertex-vertex differences alone are not enough).

The +inf sentinels are replaced, here only, by a finite cap exceeding every
achievable distance; the result is cap-invariant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curves import Curve1D
from .trees import INF

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(f):
            return f

        return wrap


def cap_height(P: Curve1D, Q: Curve1D) -> float:
    """Finite stand-in for the +inf sentinels of a curve pair.

    Any cap at least ``max + achievable distance`` leaves the Frechet distance
    unchanged; ``max + range + 1`` clears that bar because the distance never
    exceeds the joint height range.
    """
    finite = P.finite_heights() + Q.finite_heights()
    mx, mn = max(finite), min(finite)
    return mx + (mx - mn) + 1.0


def capped_arrays(P: Curve1D, Q: Curve1D, cap: float | None = None):
    H = cap_height(P, Q) if cap is None else float(cap)
    finite = P.finite_heights() + Q.finite_heights()
    if H <= max(finite):
        raise ValueError("cap must exceed every finite height")
    p = np.array([H if h == INF else h for h in P.heights], dtype=np.float64)
    q = np.array([H if h == INF else h for h in Q.heights], dtype=np.float64)
    return p, q, H


@njit(cache=True)
def _decide_kernel(p, q, delta):  # pragma: no cover - exercised via decide_frechet
    N = p.shape[0] - 1
    M = q.shape[0] - 1
    if abs(p[0] - q[0]) > delta or abs(p[N] - q[M]) > delta:
        return False

    v_ok = np.zeros(M, dtype=np.bool_)
    v_lo = np.zeros(M, dtype=np.float64)
    full_below = True
    for j in range(M):
        start_in = abs(p[0] - q[j]) <= delta
        v_ok[j] = full_below and start_in
        v_lo[j] = q[j] if q[j + 1] > q[j] else -q[j]
        full_below = full_below and start_in and (abs(p[0] - q[j + 1]) <= delta)

    bottom_full = abs(p[0] - q[0]) <= delta
    h_ok = False
    h_lo = 0.0
    for i in range(N):
        start_in = abs(p[i] - q[0]) <= delta
        h_ok = bottom_full and start_in
        h_lo = p[i] if p[i + 1] > p[i] else -p[i]
        bottom_full = bottom_full and start_in and (abs(p[i + 1] - q[0]) <= delta)
        for j in range(M):
            left_ok = v_ok[j]
            left_lo = v_lo[j]

            b0 = q[j]
            b1 = q[j + 1]
            bmin = b0 if b0 < b1 else b1
            bmax = b0 if b0 > b1 else b1
            ylo = p[i + 1] - delta
            if bmin > ylo:
                ylo = bmin
            yhi = p[i + 1] + delta
            if bmax < yhi:
                yhi = bmax
            if ylo <= yhi and (h_ok or left_ok):
                if b1 > b0:
                    klo = ylo
                    khi = yhi
                else:
                    klo = -yhi
                    khi = -ylo
                if h_ok:
                    v_ok[j] = True
                    v_lo[j] = klo
                else:
                    nv = left_lo if left_lo > klo else klo
                    v_ok[j] = nv <= khi
                    v_lo[j] = nv
            else:
                v_ok[j] = False

            a0 = p[i]
            a1 = p[i + 1]
            amin = a0 if a0 < a1 else a1
            amax = a0 if a0 > a1 else a1
            xlo = q[j + 1] - delta
            if amin > xlo:
                xlo = amin
            xhi = q[j + 1] + delta
            if amax < xhi:
                xhi = amax
            if xlo <= xhi and (left_ok or h_ok):
                if a1 > a0:
                    kplo = xlo
                    kphi = xhi
                else:
                    kplo = -xhi
                    kphi = -xlo
                if left_ok:
                    h_ok = True
                    h_lo = kplo
                else:
                    nh = h_lo if h_lo > kplo else kplo
                    h_ok = nh <= kphi
                    h_lo = nh
            else:
                h_ok = False
    return v_ok[M - 1] or h_ok


@njit(cache=True)
def _reach_tables(p, q, delta):  # pragma: no cover - exercised via extract_matching
    N = p.shape[0] - 1
    M = q.shape[0] - 1
    v_ok = np.zeros((N + 1, M), dtype=np.bool_)
    v_lo = np.zeros((N + 1, M), dtype=np.float64)
    h_ok = np.zeros((N, M + 1), dtype=np.bool_)
    h_lo = np.zeros((N, M + 1), dtype=np.float64)
    if abs(p[0] - q[0]) > delta:
        return v_ok, v_lo, h_ok, h_lo

    full_below = True
    for j in range(M):
        start_in = abs(p[0] - q[j]) <= delta
        v_ok[0, j] = full_below and start_in
        v_lo[0, j] = q[j] if q[j + 1] > q[j] else -q[j]
        full_below = full_below and start_in and (abs(p[0] - q[j + 1]) <= delta)
    bottom_full = True
    for i in range(N):
        start_in = abs(p[i] - q[0]) <= delta
        h_ok[i, 0] = bottom_full and start_in
        h_lo[i, 0] = p[i] if p[i + 1] > p[i] else -p[i]
        bottom_full = bottom_full and start_in and (abs(p[i + 1] - q[0]) <= delta)

    for i in range(N):
        for j in range(M):
            left_ok = v_ok[i, j]
            left_lo = v_lo[i, j]
            bot_ok = h_ok[i, j]
            bot_lo = h_lo[i, j]

            b0 = q[j]
            b1 = q[j + 1]
            bmin = b0 if b0 < b1 else b1
            bmax = b0 if b0 > b1 else b1
            ylo = p[i + 1] - delta
            if bmin > ylo:
                ylo = bmin
            yhi = p[i + 1] + delta
            if bmax < yhi:
                yhi = bmax
            if ylo <= yhi and (bot_ok or left_ok):
                if b1 > b0:
                    klo = ylo
                    khi = yhi
                else:
                    klo = -yhi
                    khi = -ylo
                if bot_ok:
                    v_ok[i + 1, j] = True
                    v_lo[i + 1, j] = klo
                else:
                    nv = left_lo if left_lo > klo else klo
                    v_ok[i + 1, j] = nv <= khi
                    v_lo[i + 1, j] = nv

            a0 = p[i]
            a1 = p[i + 1]
            amin = a0 if a0 < a1 else a1
            amax = a0 if a0 > a1 else a1
            xlo = q[j + 1] - delta
            if amin > xlo:
                xlo = amin
            xhi = q[j + 1] + delta
            if amax < xhi:
                xhi = amax
            if xlo <= xhi and (left_ok or bot_ok):
                if a1 > a0:
                    kplo = xlo
                    kphi = xhi
                else:
                    kplo = -xhi
                    kphi = -xlo
                if left_ok:
                    h_ok[i, j + 1] = True
                    h_lo[i, j + 1] = kplo
                else:
                    nh = bot_lo if bot_lo > kplo else kplo
                    h_ok[i, j + 1] = nh <= kphi
                    h_lo[i, j + 1] = nh
    return v_ok, v_lo, h_ok, h_lo


def decide_frechet(P: Curve1D, Q: Curve1D, delta: float, cap: float | None = None) -> bool:
    """Whether the Frechet distance of the two curves is at most ``delta``."""
    if delta < 0:
        raise ValueError("delta must be non-negative")
    p, q, _ = capped_arrays(P, Q, cap)
    return bool(_decide_kernel(p, q, float(delta)))


def frechet_candidates(P: Curve1D, Q: Curve1D, cap: float | None = None) -> np.ndarray:
    """Sorted distinct critical values: cross differences and in-curve half differences."""
    p, q, _ = capped_arrays(P, Q, cap)
    cross = np.abs(p[:, None] - q[None, :]).ravel()
    half_p = (np.abs(p[:, None] - p[None, :]) * 0.5).ravel()
    half_q = (np.abs(q[:, None] - q[None, :]) * 0.5).ravel()
    return np.unique(np.concatenate([cross, half_p, half_q]))


def compute_frechet_value(P: Curve1D, Q: Curve1D, cap: float | None = None) -> float:
    """Exact Frechet distance: binary search of the decision over the candidates."""
    p, q, _ = capped_arrays(P, Q, cap)
    cands = frechet_candidates(P, Q, cap)
    if _decide_kernel(p, q, float(cands[0])):
        return float(cands[0])
    lo, hi = 0, len(cands) - 1
    if not _decide_kernel(p, q, float(cands[hi])):
        raise AssertionError("largest candidate must be feasible")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _decide_kernel(p, q, float(cands[mid])):
            hi = mid
        else:
            lo = mid
    return float(cands[hi])


@dataclass(frozen=True)
class MatchStep:
    """One breakpoint of a matching path.

    ``s``/``t`` are in cell units (segment index plus fraction); ``hp``/``hq``
    are the exact curve heights there.  Sample indices are set when the step
    sits on a curve vertex, edge indices when strictly inside a segment.
    """

    s: float
    t: float
    hp: float
    hq: float
    p_index: int | None = None
    q_index: int | None = None
    p_edge: int | None = None
    q_edge: int | None = None


@dataclass(frozen=True)
class Matching:
    """A monotone free-space path, materialised as matched breakpoints.

    The path is non-decreasing in both coordinates; segments that pause one
    curve are flagged rather than perturbed, encoding the limit of strictly
    increasing bijections.
    """

    steps: tuple[MatchStep, ...]
    delta: float
    n_cells: tuple[int, int]
    cap: float

    def cost(self) -> float:
        worst = 0.0
        for st in self.steps:
            worst = max(worst, abs(st.hp - st.hq))
        return worst

    def pause_flags(self) -> list[str | None]:
        """Per-segment degeneracy: 'p' pauses the first curve, 'q' the second."""
        flags: list[str | None] = []
        for a, b in zip(self.steps, self.steps[1:]):
            if a.s == b.s:
                flags.append("p")
            elif a.t == b.t:
                flags.append("q")
            else:
                flags.append(None)
        return flags

    def normalised_path(self) -> list[tuple[float, float]]:
        """Matched (param-on-P, param-on-Q) breakpoints scaled to [0, 1]."""
        n, m = self.n_cells
        return [(st.s / n, st.t / m) for st in self.steps]

    def verify_monotone(self) -> bool:
        return all(
            b.s >= a.s and b.t >= a.t and (b.s > a.s or b.t > a.t)
            for a, b in zip(self.steps, self.steps[1:])
        )


def _q_point(q: np.ndarray, j: int, kappa: float) -> tuple[float, float]:
    y = kappa if q[j + 1] > q[j] else -kappa
    t = j + (y - q[j]) / (q[j + 1] - q[j])
    return float(t), float(y)


def _p_point(p: np.ndarray, i: int, kappa: float) -> tuple[float, float]:
    x = kappa if p[i + 1] > p[i] else -kappa
    s = i + (x - p[i]) / (p[i + 1] - p[i])
    return float(s), float(x)


def extract_matching(P: Curve1D, Q: Curve1D, delta: float, cap: float | None = None) -> Matching:
    """A delta-matching witnessing ``decide_frechet(P, Q, delta)``.

    Backtracks the reachability tables from the top-right corner.  Each cell is
    entered exactly the way its exit boundary was justified during propagation
    (bottom entry preferred for a right-boundary exit, left entry preferred for
    a top-boundary exit), which keeps the path monotone.
    """
    if delta < 0:
        raise ValueError("delta must be non-negative")
    p, q, H = capped_arrays(P, Q, cap)
    N = len(p) - 1
    M = len(q) - 1
    v_ok, v_lo, h_ok, h_lo = _reach_tables(p, q, float(delta))
    corner_free = abs(p[N] - q[M]) <= delta
    if not corner_free or not (v_ok[N, M - 1] or h_ok[N - 1, M]):
        raise ValueError(f"delta={delta} is not feasible for this curve pair")

    steps: list[MatchStep] = [
        MatchStep(float(N), float(M), float(p[N]), float(q[M]), p_index=N, q_index=M)
    ]
    i, j = N - 1, M - 1
    exit_kind = "v" if v_ok[N, M - 1] else "h"
    while True:
        if exit_kind == "v":
            use_bottom = bool(h_ok[i, j])
        else:
            use_bottom = not bool(v_ok[i, j])
        if use_bottom:
            if not h_ok[i, j]:
                raise AssertionError("backtrack entered an unreachable bottom boundary")
            s_val, hp = _p_point(p, i, h_lo[i, j])
            steps.append(MatchStep(s_val, float(j), hp, float(q[j]), p_edge=i, q_index=j))
            if j == 0:
                for ii in range(i, 0, -1):
                    steps.append(MatchStep(float(ii), 0.0, float(p[ii]), float(q[0]), p_index=ii, q_index=0))
                break
            j -= 1
            exit_kind = "h"
        else:
            if not v_ok[i, j]:
                raise AssertionError("backtrack entered an unreachable left boundary")
            t_val, hq = _q_point(q, j, v_lo[i, j])
            steps.append(MatchStep(float(i), t_val, float(p[i]), hq, p_index=i, q_edge=j))
            if i == 0:
                for jj in range(j, 0, -1):
                    steps.append(MatchStep(0.0, float(jj), float(p[0]), float(q[jj]), p_index=0, q_index=jj))
                break
            i -= 1
            exit_kind = "v"
    steps.append(MatchStep(0.0, 0.0, float(p[0]), float(q[0]), p_index=0, q_index=0))
    steps.reverse()

    deduped: list[MatchStep] = []
    for st in steps:
        if deduped and st.s == deduped[-1].s and st.t == deduped[-1].t:
            continue
        deduped.append(st)
    matching = Matching(tuple(deduped), float(delta), (N, M), H)
    assert matching.verify_monotone()
    return matching


def compute_frechet(P: Curve1D, Q: Curve1D, cap: float | None = None) -> tuple[float, Matching]:
    """Exact distance together with a witness matching attaining it."""
    value = compute_frechet_value(P, Q, cap)
    return value, extract_matching(P, Q, value, cap)
