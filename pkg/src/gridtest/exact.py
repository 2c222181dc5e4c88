"""Exact reference computations on small grids.

Everything here is exponential or low-polynomial brute force, intended as
ground truth for the sublinear testers: appearance enumeration, matchings,
deletion/Hamming distances, the f* completion, the baseline birthday-paradox
tester, and fork detection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    FORK123,
    Appearance,
    GridFunction,
    Pattern,
    TesterConfig,
    Verdict,
    is_appearance,
    make_appearance,
    precedes,
)

MAX_EXACT_POINTS = 10_000
MAX_EXACT_APPEARANCES = 1_000_000


class ResourceCapExceeded(RuntimeError):
    pass


def _domain_points(f) -> tuple[list[tuple[int, ...]], list[float]]:
    pts = f.all_points()
    if f.erased_mask is not None:
        keep = ~f.erased_at(pts)
        pts = pts[keep]
    vals = f.value_at(pts)
    order = np.lexsort(tuple(pts[:, i] for i in range(pts.shape[1] - 1, -1, -1)))
    pts = pts[order]
    vals = vals[order]
    return [tuple(int(c) for c in p) for p in pts], [float(v) for v in vals]


def _pairwise_ok(vals, perm, i, j) -> bool:
    if vals[i] == vals[j]:
        return False
    return (vals[i] < vals[j]) == (perm[i] < perm[j])


def _chain_dfs(pts, vals, perm, limit, excluded=None, start_cache=None):
    """Enumerate perm-appearances among lexicographically sorted points.

    Any chain p1 < p2 < ... under the grid order is also lexicographically
    increasing, so scanning candidates by lex index yields each appearance
    exactly once, in lexicographic order.
    """
    k = len(perm)
    npts = len(pts)
    out = []
    chain_pts: list[tuple[int, ...]] = []
    chain_idx: list[int] = []

    def extend(pos, lo):
        for idx in range(lo, npts):
            if excluded is not None and idx in excluded:
                continue
            p = pts[idx]
            if chain_pts:
                q = chain_pts[-1]
                if not (p != q and all(a <= b for a, b in zip(q, p))):
                    continue
            ok = True
            for jpos, jidx in enumerate(chain_idx):
                v1, v2 = vals[jidx], vals[idx]
                if v1 == v2 or (v1 < v2) != (perm[jpos] < perm[pos]):
                    ok = False
                    break
            if not ok:
                continue
            chain_pts.append(p)
            chain_idx.append(idx)
            if pos + 1 == k:
                out.append(tuple(chain_idx))
                if len(out) >= limit:
                    chain_pts.pop()
                    chain_idx.pop()
                    return True
            else:
                if extend(pos + 1, idx + 1):
                    chain_pts.pop()
                    chain_idx.pop()
                    return True
            chain_pts.pop()
            chain_idx.pop()
        return False

    extend(0, 0)
    return out


def _fork_enumerate(pts, vals, limit, excluded=None):
    """Fork appearances as (p1, p2, p3) leg-ordered index triples."""
    npts = len(pts)
    out = []
    for i2 in range(npts):
        if excluded is not None and i2 in excluded:
            continue
        p2 = pts[i2]
        v2 = vals[i2]
        lows, highs = [], []
        for j in range(npts):
            if j == i2 or (excluded is not None and j in excluded):
                continue
            q = pts[j]
            if not all(a <= b for a, b in zip(p2, q)):
                continue
            if vals[j] < v2:
                lows.append(j)
            elif vals[j] > v2:
                highs.append(j)
        for i1 in lows:
            p1 = pts[i1]
            for i3 in highs:
                p3 = pts[i3]
                if all(a <= b for a, b in zip(p1, p3)) or all(
                    a <= b for a, b in zip(p3, p1)
                ):
                    continue
                out.append((i1, i2, i3))
                if len(out) >= limit:
                    return out
    return out


def enumerate_appearances(
    f,
    pat: Pattern,
    limit: int | None = None,
    *,
    max_points: int = MAX_EXACT_POINTS,
    max_appearances: int = MAX_EXACT_APPEARANCES,
) -> list[Appearance]:
    """All (or the first `limit`) appearances, deterministic lexicographic order."""
    pts, vals = _domain_points(f)
    if len(pts) > max_points:
        raise ResourceCapExceeded(f"{len(pts)} domain points exceeds exact-mode cap")
    cap = max_appearances if limit is None else min(limit, max_appearances)
    if pat.kind == "fork123":
        triples = _fork_enumerate(pts, vals, cap)
    else:
        triples = _chain_dfs(pts, vals, pat.perm, cap)
    if limit is None and len(triples) >= max_appearances:
        raise ResourceCapExceeded("appearance count exceeds exact-mode cap")
    return [make_appearance([pts[i] for i in tri], pat) for tri in triples]


def is_free(f, pat: Pattern, excluded_points=None) -> bool:
    """Freeness check with optional point deletions (used by the solvers)."""
    pts, vals = _domain_points(f)
    excluded = None
    if excluded_points:
        excl = {tuple(int(c) for c in p) for p in excluded_points}
        excluded = {i for i, p in enumerate(pts) if p in excl}
    if pat.kind == "fork123":
        return not _fork_enumerate(pts, vals, 1, excluded)
    return not _chain_dfs(pts, vals, pat.perm, 1, excluded)


# ---------------------------------------------------------------------------
# In-set detectors (shared with the testers)
# ---------------------------------------------------------------------------


class _MinBIT:
    """Fenwick tree over ranks holding (min value, argmin index)."""

    def __init__(self, size):
        self.n = size
        self.val = [math.inf] * (size + 1)
        self.arg = [-1] * (size + 1)

    def update(self, i, v, a):
        i += 1
        while i <= self.n:
            if v < self.val[i]:
                self.val[i] = v
                self.arg[i] = a
            i += i & (-i)

    def query(self, i):
        i += 1
        best, barg = math.inf, -1
        while i > 0:
            if self.val[i] < best:
                best, barg = self.val[i], self.arg[i]
            i -= i & (-i)
        return best, barg


def _dedupe_points(pts: np.ndarray, vals: np.ndarray):
    uniq, idx = np.unique(pts, axis=0, return_index=True)
    return uniq, vals[idx]


def _dominance_min(pts: np.ndarray, vals: np.ndarray):
    """For each point: (min value, index) over its strict predecessors in the set."""
    s = len(pts)
    minv = np.full(s, np.inf)
    mini = np.full(s, -1, dtype=np.int64)
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    yr = {y: r for r, y in enumerate(np.unique(pts[:, 1]))}
    bit = _MinBIT(len(yr))
    for i in order:
        r = yr[pts[i, 1]]
        v, a = bit.query(r)
        minv[i], mini[i] = v, a
        bit.update(r, vals[i], i)
    return minv, mini


def _detect_12(pts, vals):
    """Indices (i, j) with pts[i] strictly preceding pts[j], vals[i] < vals[j]."""
    if len(pts) < 2:
        return None
    pts, vals = _dedupe_points(np.asarray(pts), np.asarray(vals, dtype=np.float64))
    minv, mini = _dominance_min(pts, vals)
    cand = np.flatnonzero(minv < vals)
    if len(cand) == 0:
        return None
    j = int(cand[0])
    return pts, vals, int(mini[j]), j


def _detect_123(pts, vals):
    pts = np.asarray(pts)
    vals = np.asarray(vals, dtype=np.float64)
    if len(pts) < 3:
        return None
    pts, vals = _dedupe_points(pts, vals)
    minv, mini = _dominance_min(pts, vals)
    maxv, maxi = _dominance_min(-pts[:, ::-1], -vals)  # successors via reflection
    maxv = -maxv
    cand = np.flatnonzero((minv < vals) & (vals < maxv))
    if len(cand) == 0:
        return None
    q = int(cand[0])
    return pts, vals, (int(mini[q]), q, int(maxi[q]))


def _detect_132(pts, vals, max_pairs=30_000_000):
    """(1,3,2): i < j < l in chain order with vals[i] < vals[l] < vals[j]."""
    pts = np.asarray(pts)
    vals = np.asarray(vals, dtype=np.float64)
    if len(pts) < 3:
        return None
    pts, vals = _dedupe_points(pts, vals)
    minv, mini = _dominance_min(pts, vals)
    s = len(pts)
    have_pred = minv < vals
    rows = np.flatnonzero(have_pred)
    if len(rows) == 0:
        return None
    chunk = max(1, int(max_pairs // max(s, 1)))
    for lo in range(0, len(rows), chunk):
        rr = rows[lo : lo + chunk]
        le = (pts[rr, None, 0] <= pts[None, :, 0]) & (pts[rr, None, 1] <= pts[None, :, 1])
        ne = (pts[rr, None, 0] != pts[None, :, 0]) | (pts[rr, None, 1] != pts[None, :, 1])
        good = le & ne & (vals[rr, None] > vals[None, :]) & (minv[rr, None] < vals[None, :])
        hit = np.argwhere(good)
        if len(hit):
            a, l = int(rr[hit[0, 0]]), int(hit[0, 1])
            # 1-leg: predecessor of a with value below vals[l]
            pred = (
                (pts[:, 0] <= pts[a, 0])
                & (pts[:, 1] <= pts[a, 1])
                & ((pts[:, 0] != pts[a, 0]) | (pts[:, 1] != pts[a, 1]))
                & (vals < vals[l])
            )
            i = int(np.flatnonzero(pred)[np.argmin(vals[pred])])
            return pts, vals, (i, a, l)
    return None


def find_pattern_in_set(pts, vals, pat: Pattern):
    """Search a point multiset for a pat-appearance.

    Returns the appearance's points as an (k, d) array in leg-position order,
    or None.  S2/S3 patterns reduce to the (1,2)/(1,2,3)/(1,3,2) detectors by
    negating values and/or reflecting coordinates; others fall back to DFS.
    """
    pts = np.asarray(pts, dtype=np.int64)
    vals = np.asarray(vals, dtype=np.float64)
    if len(pts) == 0:
        return None
    keep = ~np.isnan(vals)
    pts, vals = pts[keep], vals[keep]
    if len(pts) < pat.k:
        return None

    def via(detect, reflect=False, negate=False):
        p = -pts if reflect else pts
        v = -vals if negate else vals
        res = detect(p, v)
        if res is None:
            return None
        dpts, _, idx = res
        sel = dpts[list(idx)]
        if reflect:
            sel = -sel[::-1]
        return sel

    if pat.kind == "perm":
        perm = pat.perm
        if perm == (1, 2):
            res = _detect_12(pts, vals)
            return None if res is None else res[0][[res[2], res[3]]]
        if perm == (2, 1):
            res = _detect_12(pts, -vals)
            return None if res is None else res[0][[res[2], res[3]]]
        if perm == (1, 2, 3):
            return via(_detect_123)
        if perm == (3, 2, 1):
            return via(_detect_123, negate=True)
        if perm == (1, 3, 2):
            return via(_detect_132)
        if perm == (3, 1, 2):
            return via(_detect_132, negate=True)
        if perm == (2, 3, 1):
            return via(_detect_132, reflect=True)
        if perm == (2, 1, 3):
            return via(_detect_132, reflect=True, negate=True)
    # generic fallback: DFS over the (deduplicated, lex-sorted) set
    upts, uvals = _dedupe_points(pts, vals)
    lpts = [tuple(int(c) for c in p) for p in upts]
    lvals = [float(v) for v in uvals]
    if pat.kind == "fork123":
        tri = _fork_enumerate(lpts, lvals, 1)
    else:
        tri = _chain_dfs(lpts, lvals, pat.perm, 1)
    if not tri:
        return None
    return np.array([lpts[i] for i in tri[0]], dtype=np.int64)


# ---------------------------------------------------------------------------
# Matchings and distances
# ---------------------------------------------------------------------------


@dataclass
class Matching:
    appearances: list[Appearance]

    def __post_init__(self):
        used = set()
        for a in self.appearances:
            for p in a.points:
                if p in used:
                    raise ValueError("matching appearances must be point-disjoint")
                used.add(p)

    def __len__(self):
        return len(self.appearances)

    def points(self) -> set[tuple[int, ...]]:
        return {p for a in self.appearances for p in a.points}


def greedy_matching(f, pat: Pattern, **caps) -> Matching:
    """Maximal (not maximum) matching, built greedily in lexicographic order."""
    apps = enumerate_appearances(f, pat, **caps)
    used: set[tuple[int, ...]] = set()
    chosen = []
    for a in apps:
        if all(p not in used for p in a.points):
            chosen.append(a)
            used.update(a.points)
    return Matching(chosen)


def _greedy_disjoint_count(apps, banned) -> int:
    used = set()
    cnt = 0
    for a in apps:
        if any(p in banned for p in a):
            continue
        if all(p not in used for p in a):
            cnt += 1
            used.update(a)
    return cnt


def deletion_distance(f, pat: Pattern, *, node_cap: int = 2_000_000, **caps) -> int:
    """Minimum hitting set over all appearances, by branch and bound."""
    apps = [a.points for a in enumerate_appearances(f, pat, **caps)]
    if not apps:
        return 0

    # greedy max-degree incumbent
    def greedy_cover():
        remaining = list(apps)
        cover = set()
        while remaining:
            deg: dict[tuple, int] = {}
            for a in remaining:
                for p in a:
                    deg[p] = deg.get(p, 0) + 1
            best = max(deg, key=lambda p: (deg[p], p))
            cover.add(best)
            remaining = [a for a in remaining if best not in a]
        return cover

    best = [len(greedy_cover())]
    nodes = [0]

    def bound_and_branch(chosen: set):
        nodes[0] += 1
        if nodes[0] > node_cap:
            raise ResourceCapExceeded("deletion-distance branch-and-bound node cap")
        uncovered = [a for a in apps if all(p not in chosen for p in a)]
        if not uncovered:
            if len(chosen) < best[0]:
                best[0] = len(chosen)
            return
        lb = len(chosen) + _greedy_disjoint_count(uncovered, chosen)
        if lb >= best[0]:
            return
        pivot = min(uncovered, key=len)
        for p in pivot:
            chosen.add(p)
            bound_and_branch(chosen)
            chosen.remove(p)

    bound_and_branch(set())
    return best[0]


def _candidate_values(existing: list[float]) -> list[float]:
    """Finite value palette: existing values, interior rationals, sentinels.

    Appearance predicates depend only on the relative order of values, so an
    optimal modification normalizes onto this set (tie-making included).
    """
    uniq = sorted(set(existing))
    cands = list(uniq)
    for a, b in zip(uniq, uniq[1:]):
        for t in (0.25, 0.5, 0.75):
            cands.append(a + (b - a) * t)
    lo, hi = uniq[0], uniq[-1]
    for j in (1.0, 2.0, 3.0):
        cands.append(lo - j)
        cands.append(hi + j)
    return sorted(set(cands))


def _chain_dfs_through(pts, vals, perm, anchor: int, limit: int):
    """perm-appearances (as index tuples) that contain the anchor index."""
    k = len(perm)
    npts = len(pts)
    out = []
    chain_pts: list[tuple[int, ...]] = []
    chain_idx: list[int] = []

    def extend(pos, lo):
        for idx in range(lo, npts):
            if idx > anchor and anchor not in chain_idx:
                return False
            p = pts[idx]
            if chain_pts:
                q = chain_pts[-1]
                if not (p != q and all(a <= b for a, b in zip(q, p))):
                    continue
            ok = True
            for jpos, jidx in enumerate(chain_idx):
                v1, v2 = vals[jidx], vals[idx]
                if v1 == v2 or (v1 < v2) != (perm[jpos] < perm[pos]):
                    ok = False
                    break
            if not ok:
                continue
            chain_pts.append(p)
            chain_idx.append(idx)
            if pos + 1 == k:
                if anchor in chain_idx:
                    out.append(tuple(chain_idx))
                    if len(out) >= limit:
                        chain_pts.pop()
                        chain_idx.pop()
                        return True
            else:
                if extend(pos + 1, idx + 1):
                    chain_pts.pop()
                    chain_idx.pop()
                    return True
            chain_pts.pop()
            chain_idx.pop()
        return False

    extend(0, 0)
    return out


def hamming_distance(f, pat: Pattern, *, max_h: int | None = None,
                     node_cap: int = 500_000, **caps) -> int:
    """Minimum number of value changes producing a pat-free function.

    Replacement values come from the finite candidate palette (existing
    values, interior rationals, sentinels); the search is conflict-driven:
    branch on an unfixed point of a currently violated appearance times a
    candidate value, pruning with a disjoint-violation lower bound.
    """
    apps0 = [a.points for a in enumerate_appearances(f, pat, **caps)]
    if not apps0:
        return 0
    delta = deletion_distance(f, pat, **caps)
    pts, vals = _domain_points(f)
    pindex = {p: i for i, p in enumerate(pts)}
    orig = [tuple(pindex[p] for p in a) for a in apps0]
    cands = _candidate_values(vals)
    if max_h is None:
        max_h = delta + 8
    nodes = [0]
    VIOL_CAP = 600

    def current_vals(assigned):
        work = list(vals)
        for i, v in assigned.items():
            work[i] = v
        return work

    def violated(assigned):
        vio = [a for a in orig if not any(i in assigned for i in a)]
        if len(vio) >= VIOL_CAP:
            return vio[:VIOL_CAP]
        work = current_vals(assigned)
        seen = set(vio)
        for i in assigned:
            if pat.kind == "fork123":
                found = [t for t in _fork_enumerate(pts, work, VIOL_CAP) if i in t]
            else:
                found = _chain_dfs_through(pts, work, pat.perm, i, VIOL_CAP)
            for t in found:
                if t not in seen:
                    seen.add(t)
                    vio.append(t)
            if len(vio) >= VIOL_CAP:
                break
        return vio

    def disjoint_lb(vio, assigned) -> int:
        used = set()
        cnt = 0
        for a in vio:
            free = [i for i in a if i not in assigned]
            if not free:
                return 10**9  # an all-fixed appearance is violated: dead branch
            if all(i not in used for i in free):
                cnt += 1
                used.update(free)
        return cnt

    def ordered_candidates(i, assigned):
        work = current_vals(assigned)
        p = pts[i]
        preds = [work[j] for j, q in enumerate(pts)
                 if q != p and all(a <= b for a, b in zip(q, p))]
        guess = min(preds) if preds else max(vals) + 1.0
        ties = [v for v in cands if v in set(vals)]
        rest = [v for v in cands if v not in set(vals)]
        order = [guess] + ties + rest
        seen = set()
        out = []
        for v in order:
            if v not in seen and v != vals[i]:
                seen.add(v)
                out.append(v)
        return out

    def solve(assigned: dict, budget: int) -> bool:
        nodes[0] += 1
        if nodes[0] > node_cap:
            raise ResourceCapExceeded("hamming-distance search node cap")
        vio = violated(assigned)
        if not vio:
            return True
        if budget == 0:
            return False
        lb = disjoint_lb(vio, assigned)
        if lb > budget:
            return False
        pivot = min(vio, key=lambda a: sum(1 for i in a if i not in assigned))
        free = [i for i in pivot if i not in assigned]
        if not free:
            return False
        for i in free:
            for v in ordered_candidates(i, assigned):
                assigned[i] = v
                ok = solve(assigned, budget - 1)
                del assigned[i]
                if ok:
                    return True
        return False

    for h in range(delta, max_h + 1):
        if solve({}, h):
            return h
    raise ResourceCapExceeded(f"hamming distance exceeds search cap {max_h}")


# ---------------------------------------------------------------------------
# f* completion
# ---------------------------------------------------------------------------


def _reflect_grid(f: GridFunction) -> GridFunction:
    vals = f.values[tuple(slice(None, None, -1) for _ in f.dims)].copy()
    return GridFunction(f.dims, vals)


def _normalize_perm(perm, reflect, negate):
    k = len(perm)
    p = tuple(perm)
    if reflect:
        p = p[::-1]
    if negate:
        p = tuple(k + 1 - r for r in p)
    return p


def fstar_completion(f: GridFunction, S, pat: Pattern) -> GridFunction:
    """Complete f on S by the min-over-predecessors rule; output is pat-free.

    The construction anchors at patterns with perm[0] == 1; the other
    anchored cases ({perm[0], perm[-1]} meets {1, k}) reduce to it by point
    reflection of the domain and/or negating all values.
    """
    if pat.kind != "perm":
        raise ValueError("fstar_completion handles permutation patterns")
    k = pat.k
    perm = pat.perm
    if perm[0] == 1:
        reflect, negate = False, False
    elif perm[0] == k:
        reflect, negate = False, True
    elif perm[-1] == 1:
        reflect, negate = True, False
    elif perm[-1] == k:
        reflect, negate = True, True
    else:
        raise ValueError("pattern is not anchored; completion rule does not apply")

    work = _reflect_grid(f) if reflect else f.copy()
    Sset = {tuple(int(c) for c in p) for p in S}
    if reflect:
        Sset = {tuple(n + 1 - c for n, c in zip(f.dims, p)) for p in Sset}
    if negate:
        work = GridFunction(work.dims, -work.values)
    norm_pat = Pattern("perm", _normalize_perm(perm, reflect, negate))

    if not is_free(work, norm_pat, excluded_points=Sset):
        raise ValueError("restriction of f outside S is not pat-free")

    allpts = [tuple(int(c) for c in p) for p in work.all_points()]
    non_s_vals = [float(work.values[tuple(c - 1 for c in p)]) for p in allpts if p not in Sset]
    out = work.copy()
    for s in sorted(Sset):
        pred_vals = []
        for p in allpts:
            if p == s or not all(a <= b for a, b in zip(p, s)):
                continue
            if p in Sset and p > s:
                continue  # unprocessed S-predecessor cannot exist in lex order
            pred_vals.append(float(out.values[tuple(c - 1 for c in p)]))
        if pred_vals:
            v = min(pred_vals)
        else:
            v = (max(non_s_vals) if non_s_vals else 0.0)
        out.values[tuple(c - 1 for c in s)] = v

    if negate:
        out = GridFunction(out.dims, -out.values)
    if reflect:
        out = _reflect_grid(out)
    return out


# ---------------------------------------------------------------------------
# Baseline nonadaptive sampler and fork detection
# ---------------------------------------------------------------------------


def baseline_sampler_tester(oracle, pat: Pattern, cfg: TesterConfig) -> Verdict:
    """Birthday-paradox tester: uniform sample, exact search in the sample."""
    d = oracle.d
    n = max(oracle.dims)
    k = pat.k
    m = math.ceil(cfg.c("baseline") * n ** (d * (1.0 - 1.0 / k)) / cfg.epsilon ** (1.0 / k))
    rng = cfg.rng(0xBA5E)
    pts = np.stack([rng.integers(1, nn + 1, size=m) for nn in oracle.dims], axis=1)
    vals, er = oracle.query_batch(pts)
    sel = find_pattern_in_set(pts[~er], vals[~er], pat)
    if sel is not None and is_appearance(oracle.f, sel, pat):
        return Verdict.reject(oracle.f, sel, pat)
    return Verdict.accept()


def detect_fork(f) -> Appearance | None:
    """Exact fork search over the whole grid (d=2, desk scale)."""
    if f.d != 2:
        raise ValueError("detect_fork requires d=2")
    if f.size > MAX_EXACT_POINTS:
        raise ResourceCapExceeded("grid exceeds exact-mode cap")
    nx, ny = f.dims
    vals = f.values
    for x2 in range(1, nx + 1):
        for y2 in range(1, ny + 1):
            v2 = vals[x2 - 1, y2 - 1]
            sub = vals[x2 - 1 :, y2 - 1 :]
            low = sub < v2
            high = sub > v2
            if not low.any() or not high.any():
                continue
            hit = _incomparable_pair(low, high)
            if hit is None:
                continue
            (ax, ay), (bx, by) = hit
            p1 = (x2 + ax, y2 + ay)
            p3 = (x2 + bx, y2 + by)
            app = make_appearance([p1, (x2, y2), p3], FORK123)
            if is_appearance(f, app.points, FORK123):
                return app
    return None


def _incomparable_pair(low: np.ndarray, high: np.ndarray):
    """A (low-point, high-point) pair with both coordinates strictly mixed."""
    w, h = low.shape
    if w == 0 or h == 0:
        return None
    NEG = -1
    col_max_low = np.where(low.any(axis=1), h - 1 - np.argmax(low[:, ::-1], axis=1), NEG)
    col_min_low = np.where(low.any(axis=1), np.argmax(low, axis=1), h)
    pref = np.full(w, NEG)
    run = NEG
    for x in range(w):
        pref[x] = run
        run = max(run, col_max_low[x])
    suf = np.full(w, h)
    run = h
    for x in range(w - 1, -1, -1):
        suf[x] = run
        run = min(run, col_min_low[x])
    hx, hy = np.nonzero(high)
    left_above = pref[hx] > hy
    right_below = suf[hx] < hy
    good = left_above | right_below
    if not good.any():
        return None
    i = int(np.argmax(good))
    bx, by = int(hx[i]), int(hy[i])
    lx, ly = np.nonzero(low)
    if left_above[i]:
        sel = (lx < bx) & (ly > by)
    else:
        sel = (lx > bx) & (ly < by)
    j = int(np.argmax(sel))
    return (int(lx[j]), int(ly[j])), (bx, by)
