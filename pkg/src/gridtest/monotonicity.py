"""Bucketed (1,2)/(2,1)-freeness testers: total, partial-function and
erasure-resilient modes, every dimension.

A pair p < q is bucketed per axis by the coarsest dyadic partition that
separates the two coordinates (level 0 when they coincide).  For a bucket,
the domain splits into boxes; each box B has a diagonally adjacent box B'
such that every bucketed pair with 1-leg in B has its 2-leg in B', and
*every* point of B precedes every point of B'.  A violation therefore lives
between a sampled B-side value and a larger sampled B'-side value, which is
what the batched executor below looks for.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

import numpy as np

from .core import (
    OracleView,
    P12,
    P21,
    Pattern,
    Rect,
    Region,
    TesterConfig,
    Verdict,
    is_appearance,
    next_pow2,
    precedes,
    region_from_mask,
    resolve_to_base,
    root_oracle,
    stochastic_round,
)


# ---------------------------------------------------------------------------
# Buckets and boxes
# ---------------------------------------------------------------------------


def bucket_of_pair(p, q, n: int) -> tuple[int, ...]:
    """Per-axis coarsest separating level; 0 where coordinates coincide."""
    if len(p) != len(q):
        raise ValueError("dimension mismatch")
    if not precedes(p, q):
        raise ValueError("bucket_of_pair requires p strictly preceding q")
    N = next_pow2(n)
    L = N.bit_length() - 1
    levels = []
    for a, b in zip(p, q):
        if a == b:
            levels.append(0)
        else:
            diff = ((a - 1) ^ (b - 1)).bit_length() - 1
            levels.append(L - diff)
    return tuple(levels)


def part_of(coord: int, level: int, N: int) -> int:
    if level == 0:
        return coord - 1
    return (coord - 1) // (N >> level)


def part_span(part: int, level: int, N: int) -> tuple[int, int]:
    """Inclusive 1-based coordinate range of a part."""
    if level == 0:
        return part + 1, part + 1
    w = N >> level
    return part * w + 1, part * w + w


def num_parts(level: int, N: int) -> int:
    return N if level == 0 else (1 << level)


@dataclass(frozen=True)
class BoxPair:
    """A box and its diagonally adjacent partner (d=2)."""

    box: Rect
    adjacent: Rect


def box_pair_for_parts(px: int, py: int, bucket: tuple[int, int], dims) -> BoxPair:
    Nx, Ny = next_pow2(dims[0]), next_pow2(dims[1])
    ax, ay = bucket
    bx0, bx1 = part_span(px, ax, Nx)
    by0, by1 = part_span(py, ay, Ny)
    cx = px + 1 if ax >= 1 else px
    cy = py + 1 if ay >= 1 else py
    if cx >= num_parts(ax, Nx) or cy >= num_parts(ay, Ny):
        adj = Rect(1, 0, 1, 0)
    else:
        qx0, qx1 = part_span(cx, ax, Nx)
        qy0, qy1 = part_span(cy, ay, Ny)
        adj = Rect(qx0, min(qx1, dims[0]), qy0, min(qy1, dims[1]))
    box = Rect(bx0, min(bx1, dims[0]), by0, min(by1, dims[1]))
    return BoxPair(box, adj)


def test_star_budget(eps1: float, c_boxes: float = 20.0, c_points: float = 4.0) -> float:
    """Ideal (un-rounded) TEST* query total: sum_k r_k * 2 q_k.

    With the reference constants (20, 4) this equals 320 r^2 / eps1, the
    arithmetic behind the stated per-bucket complexity bound.
    """
    r = math.log2(4.0 / eps1)
    total = 0.0
    for k in range(1, int(math.ceil(2 * r)) + 1):
        rk = c_boxes * r / (2**k * eps1)
        qk = c_points * 2**k
        total += rk * 2 * qk
    return total


# ---------------------------------------------------------------------------
# Array plans and the batched (B, B') executor
# ---------------------------------------------------------------------------


@dataclass
class ViolationPair:
    one_leg: tuple[int, int]
    two_leg: tuple[int, int]
    values: tuple[float, float]


_COLS = ("bx0", "bx1", "by0", "by1", "cx0", "cx1", "cy0", "cy1", "q")


class _Plan:
    """Column arrays describing (B, B') sampling entries with per-entry q."""

    def __init__(self, **cols):
        if cols:
            for name in _COLS:
                setattr(self, name, np.asarray(cols[name], dtype=np.int64))
        else:
            for name in _COLS:
                setattr(self, name, np.empty(0, dtype=np.int64))

    def __len__(self):
        return len(self.q)

    @staticmethod
    def concat(plans: list["_Plan"]) -> "_Plan":
        plans = [p for p in plans if len(p)]
        if not plans:
            return _Plan()
        return _Plan(**{c: np.concatenate([getattr(p, c) for p in plans]) for c in _COLS})

    @staticmethod
    def from_pairs(pairs: list[BoxPair], qs: list[int]) -> "_Plan":
        return _Plan(
            bx0=[p.box.x0 for p in pairs], bx1=[p.box.x1 for p in pairs],
            by0=[p.box.y0 for p in pairs], by1=[p.box.y1 for p in pairs],
            cx0=[p.adjacent.x0 for p in pairs], cx1=[p.adjacent.x1 for p in pairs],
            cy0=[p.adjacent.y0 for p in pairs], cy1=[p.adjacent.y1 for p in pairs],
            q=qs,
        )


def _plan_from_parts(px, py, ax, ay, qk, dims) -> _Plan:
    """Vectorized plan rows from part indices and per-axis levels."""
    px = np.asarray(px, dtype=np.int64)
    py = np.asarray(py, dtype=np.int64)
    ax = np.asarray(ax, dtype=np.int64)
    ay = np.asarray(ay, dtype=np.int64)
    Nx, Ny = next_pow2(dims[0]), next_pow2(dims[1])
    wx = np.where(ax == 0, 1, Nx >> ax)
    wy = np.where(ay == 0, 1, Ny >> ay)
    bx0 = px * wx + 1
    by0 = py * wy + 1
    bx1 = np.minimum(bx0 + wx - 1, dims[0])
    by1 = np.minimum(by0 + wy - 1, dims[1])
    px2 = px + (ax >= 1)
    py2 = py + (ay >= 1)
    cx0 = px2 * wx + 1
    cy0 = py2 * wy + 1
    cx1 = np.minimum(cx0 + wx - 1, dims[0])
    cy1 = np.minimum(cy0 + wy - 1, dims[1])
    dead = (
        ((ax >= 1) & (px2 >= np.left_shift(1, ax)))
        | ((ay >= 1) & (py2 >= np.left_shift(1, ay)))
        | (cx0 > dims[0])
        | (cy0 > dims[1])
    )
    cx1 = np.where(dead, cx0 - 1, cx1)
    qs = np.full(len(px), qk, dtype=np.int64) if np.isscalar(qk) else np.asarray(qk)
    return _Plan(bx0=bx0, bx1=bx1, by0=by0, by1=by1,
                 cx0=cx0, cx1=cx1, cy0=cy0, cy1=cy1, q=qs)


def _sample_in_rects(rng, x0, x1, y0, y1, counts, region: Region | None):
    """counts[i] points from rect i (intersected with region if given).

    Returns (points, ok); slots that cannot be filled come back ok=False.
    """
    E = len(x0)
    total = int(np.sum(counts))
    out = np.ones((total, 2), dtype=np.int64)
    ok = np.zeros(total, dtype=bool)
    if total == 0:
        return out, ok
    ends = np.cumsum(counts)
    starts = ends - counts
    eid = np.repeat(np.arange(E), counts)
    valid = (x1 >= x0) & (y1 >= y0)
    pending = valid[eid]
    rounds = 1 if region is None else 8
    for _ in range(rounds):
        idx = np.flatnonzero(pending & ~ok)
        if len(idx) == 0:
            break
        e = eid[idx]
        xs = rng.integers(x0[e], x1[e] + 1)
        ys = rng.integers(y0[e], y1[e] + 1)
        cand = np.stack([xs, ys], axis=1)
        good = region.contains_rows(cand) if region is not None else np.ones(len(cand), bool)
        hit = idx[good]
        out[hit] = cand[good]
        ok[hit] = True
    if region is not None:
        open_entries = np.unique(eid[pending & ~ok])
        for i in open_entries:
            sl = slice(starts[i], ends[i])
            missing = np.flatnonzero(~ok[sl])
            sub = region.intersect_rect(Rect(int(x0[i]), int(x1[i]), int(y0[i]), int(y1[i])))
            if sub.empty:
                continue
            pts = sub.sample(rng, len(missing))
            out[starts[i] + missing] = pts
            ok[starts[i] + missing] = True
    return out, ok


def _query_with_redraw(oracle, pts, ok, rects, eid, region, mode, cfg, rng):
    """Query points; in ER mode redraw erased slots up to the cap."""
    vals = np.full(len(pts), np.nan)
    live = np.flatnonzero(ok)
    if len(live) == 0:
        return vals
    v, er = oracle.query_batch(pts[live])
    vals[live] = np.where(er, np.nan, v)
    if mode != "er":
        return vals
    x0, x1, y0, y1 = rects
    N = max(oracle.dims)
    cap = math.ceil(cfg.c("redraw") / (1.0 - cfg.delta) * math.log2(max(N, 2)))
    for _ in range(cap):
        bad = np.flatnonzero(ok & np.isnan(vals))
        if len(bad) == 0:
            break
        e = bad if eid is None else eid[bad]
        pts2, ok2 = _sample_in_rects(
            rng, x0[e], x1[e], y0[e], y1[e], np.ones(len(bad), dtype=np.int64), region
        )
        live2 = np.flatnonzero(ok2)
        if len(live2) == 0:
            break
        v2, er2 = oracle.query_batch(pts2[live2])
        tgt = bad[live2]
        pts[tgt] = pts2[live2]
        vals[tgt] = np.where(er2, np.nan, v2)
    return vals


def _execute_plan(
    oracle,
    plan: _Plan,
    *,
    mode: str,
    region: Region | None,
    value_range: tuple[float, float] | None,
    sense: str,
    cfg: TesterConfig,
    rng: np.random.Generator,
) -> ViolationPair | None:
    """Run a (B, B') sampling plan and return one violation, if any.

    sense "12" looks for f(B-point) < f(B'-point); sense "21" the reverse.
    value_range keeps only queried values inside the interval (lo, hi].
    """
    if len(plan) == 0:
        return None
    counts = plan.q
    # Entries whose partner region is empty keep their budget (sampling inside
    # B instead) so the nonadaptive query count does not depend on P; their
    # values are masked out of the evaluation below.
    cpts, cok = _sample_in_rects(rng, plan.cx0, plan.cx1, plan.cy0, plan.cy1, counts, region)
    ends = np.cumsum(counts)
    starts = ends - counts
    have_partner = np.add.reduceat(cok.astype(np.int64), starts) > 0
    inert = ~have_partner
    if inert.any():
        cx0 = np.where(inert, plan.bx0, plan.cx0)
        cx1 = np.where(inert, plan.bx1, plan.cx1)
        cy0 = np.where(inert, plan.by0, plan.cy0)
        cy1 = np.where(inert, plan.by1, plan.cy1)
        redo = np.repeat(inert, counts)
        pts2, ok2 = _sample_in_rects(
            rng, cx0[inert], cx1[inert], cy0[inert], cy1[inert],
            counts[inert], region,
        )
        cpts[redo] = pts2
        cok[redo] = ok2
    else:
        cx0, cx1, cy0, cy1 = plan.cx0, plan.cx1, plan.cy0, plan.cy1
    bcounts = counts
    bpts, bok = _sample_in_rects(rng, plan.bx0, plan.bx1, plan.by0, plan.by1, bcounts, region)
    eid_c = np.repeat(np.arange(len(plan)), counts)
    eid_b = np.repeat(np.arange(len(plan)), bcounts)
    cvals = _query_with_redraw(
        oracle, cpts, cok, (cx0, cx1, cy0, cy1), eid_c, region, mode, cfg, rng
    )
    bvals = _query_with_redraw(
        oracle, bpts, bok, (plan.bx0, plan.bx1, plan.by0, plan.by1), eid_b, region, mode, cfg, rng
    )
    if inert.any():
        cvals[np.repeat(inert, counts)] = np.nan
    if value_range is not None:
        lo, hi = value_range
        cvals = np.where((cvals > lo) & (cvals <= hi), cvals, np.nan)
        bvals = np.where((bvals > lo) & (bvals <= hi), bvals, np.nan)
    if sense == "21":
        cvals, bvals = -cvals, -bvals
    bends = np.cumsum(bcounts)
    bstarts = bends - bcounts
    nonempty = bcounts > 0
    if not nonempty.any():
        return None
    bmin = np.full(len(plan), np.inf)
    cmax = np.full(len(plan), -np.inf)
    bmin[nonempty] = np.fmin.reduceat(np.where(np.isnan(bvals), np.inf, bvals), bstarts[nonempty])
    cmax[nonempty] = np.fmax.reduceat(np.where(np.isnan(cvals), -np.inf, cvals), starts[nonempty])
    viol = np.flatnonzero(bmin < cmax)
    if len(viol) == 0:
        return None
    e = int(viol[0])
    vb = bvals[bstarts[e] : bends[e]]
    vc = cvals[starts[e] : ends[e]]
    mx = np.nanmax(vc)
    elig = np.flatnonzero(vb < mx)
    i = int(rng.choice(elig))
    elig2 = np.flatnonzero(vc > vb[i])
    j = int(rng.choice(elig2))
    p = tuple(int(c) for c in bpts[bstarts[e] : bends[e]][i])
    qpt = tuple(int(c) for c in cpts[starts[e] : ends[e]][j])
    v1, v2 = float(vb[i]), float(vc[j])
    if sense == "21":
        v1, v2 = -v1, -v2
    return ViolationPair(p, qpt, (v1, v2))


# ---------------------------------------------------------------------------
# Public tester operations (d = 2 fast path)
# ---------------------------------------------------------------------------


def _region_for(oracle, mode: str, region: Region | None) -> Region | None:
    if region is not None:
        return region
    f = root_oracle(oracle).f
    if mode == "partial":
        if f.domain_mask is None:
            return Region.full(oracle.dims)
        cached = getattr(f, "_region_cache", None)
        if cached is None:
            cached = region_from_mask(f.domain_mask)
            f._region_cache = cached
        return cached
    return None


def _ell2(dims) -> float:
    out = 1.0
    for n in dims:
        out *= math.log2(next_pow2(n)) + 1
    return out


def effective_eps1(proximity: float, dims, mode: str, delta: float) -> float:
    eps1 = proximity / _ell2(dims)
    if mode == "er":
        eps1 *= 1.0 - delta
    return eps1


def test_box_pair(
    oracle,
    pair: BoxPair,
    gamma: float,
    mode: str = "total",
    cfg: TesterConfig | None = None,
    rng: np.random.Generator | None = None,
    region: Region | None = None,
    value_range=None,
    sense: str = "12",
) -> ViolationPair | None:
    """Sample ~4/gamma points per side of (B, B') and report one violation."""
    cfg = cfg or TesterConfig()
    rng = rng if rng is not None else cfg.rng(0xB0)
    if not (0.0 < gamma <= 1.0):
        raise ValueError("gamma must be in (0,1]")
    q = max(4, math.ceil(cfg.c("box_pair_points") * 4.0 / gamma))
    region = _region_for(oracle, mode, region)
    if mode == "partial" and region is not None:
        if region.intersect_rect(pair.box).empty:
            return None
    plan = _Plan.from_pairs([pair], [q])
    return _execute_plan(
        oracle, plan, mode=mode, region=region, value_range=value_range,
        sense=sense, cfg=cfg, rng=rng,
    )


def _levels_schedule(eps1: float, cfg: TesterConfig, rng, boxes_const: float):
    """(k, Tk, qk) rows with stochastically rounded box counts."""
    r = math.log2(4.0 / eps1)
    rows = []
    for k in range(1, int(math.ceil(2 * r)) + 1):
        Tk = stochastic_round(boxes_const * r / (2**k * eps1), rng)
        if Tk > 0:
            qk = max(1, math.ceil(cfg.c("star_points") * 4.0 * 2**k))
            rows.append((k, Tk, qk))
    return rows


def _bucket_parts(rng, region, use_anchors, count, bucket, dims):
    Nx, Ny = next_pow2(dims[0]), next_pow2(dims[1])
    ax, ay = bucket
    if use_anchors:
        anchors = region.sample(rng, count)
        if ax == 0:
            px = anchors[:, 0] - 1
        else:
            px = (anchors[:, 0] - 1) // (Nx >> ax)
        if ay == 0:
            py = anchors[:, 1] - 1
        else:
            py = (anchors[:, 1] - 1) // (Ny >> ay)
    else:
        px = rng.integers(0, num_parts(ax, Nx), size=count)
        py = rng.integers(0, num_parts(ay, Ny), size=count)
    return px, py


def improved_scale_tester(
    oracle,
    bucket: tuple[int, int],
    cfg: TesterConfig,
    mode: str = "total",
    region: Region | None = None,
    proximity: float | None = None,
    rng: np.random.Generator | None = None,
    value_range=None,
    sense: str = "12",
) -> ViolationPair | None:
    """Level-scheduled TEST* for one bucket.

    For k = 1..2r it samples ~c*r/(2^k eps1) boxes (uniformly in total/ER
    mode, by P-mass in partial mode) and 4*2^k points per side, querying the
    whole plan nonadaptively before evaluating.
    """
    rng = rng if rng is not None else cfg.rng(0x5CA1E, bucket[0], bucket[1])
    region = _region_for(oracle, mode, region)
    prox = proximity if proximity is not None else cfg.epsilon
    eps1 = effective_eps1(prox, oracle.dims, mode, cfg.delta)
    use_anchors = mode == "partial" and region is not None and not region.empty
    plans = []
    for _, Tk, qk in _levels_schedule(eps1, cfg, rng, cfg.c("star_boxes")):
        px, py = _bucket_parts(rng, region, use_anchors, Tk, bucket, oracle.dims)
        ax = np.full(Tk, bucket[0])
        ay = np.full(Tk, bucket[1])
        plans.append(_plan_from_parts(px, py, ax, ay, qk, oracle.dims))
    return _execute_plan(
        oracle, _Plan.concat(plans), mode=mode, region=region,
        value_range=value_range, sense=sense, cfg=cfg, rng=rng,
    )


def pair_search(
    oracle,
    cfg: TesterConfig,
    *,
    proximity: float,
    mode: str = "partial",
    region: Region | None = None,
    value_range=None,
    sense: str = "12",
    rng: np.random.Generator | None = None,
) -> ViolationPair | None:
    """Flattened bucket-sampling pair finder used inside the 3-pattern testers.

    Equivalent to running the per-bucket tester with a uniformly random
    bucket per box draw: each draw independently picks a bucket and a box
    (by P mass via a uniform anchor point), so the total budget keeps the
    log^2(1/eps1)/eps1 shape while all buckets share one plan.
    """
    rng = rng if rng is not None else cfg.rng(0xF1A7)
    region = _region_for(oracle, mode, region) or Region.full(oracle.dims)
    if region.empty:
        return None
    dims = oracle.dims
    eps1 = effective_eps1(proximity, dims, mode, cfg.delta)
    Nx, Ny = next_pow2(dims[0]), next_pow2(dims[1])
    Lx, Ly = int(math.log2(Nx)), int(math.log2(Ny))
    plans = []
    for _, Tk, qk in _levels_schedule(eps1, cfg, rng, cfg.c("flat_boxes")):
        anchors = region.sample(rng, Tk)
        ax = rng.integers(0, Lx + 1, size=Tk)
        ay = rng.integers(0, Ly + 1, size=Tk)
        keep = (ax > 0) | (ay > 0)
        ax, ay, anchors = ax[keep], ay[keep], anchors[keep]
        px = np.where(ax == 0, anchors[:, 0] - 1, (anchors[:, 0] - 1) >> (Lx - ax))
        py = np.where(ay == 0, anchors[:, 1] - 1, (anchors[:, 1] - 1) >> (Ly - ay))
        plans.append(_plan_from_parts(px, py, ax, ay, qk, dims))
    return _execute_plan(
        oracle, _Plan.concat(plans), mode=mode, region=region,
        value_range=value_range, sense=sense, cfg=cfg, rng=rng,
    )


def weighted_box_sample(region: Region, bucket: tuple[int, int], dims, rng) -> BoxPair:
    """Box drawn with probability |P and B| / |P| via a uniform anchor point."""
    if region.empty:
        raise ValueError("empty domain")
    anchor = region.sample(rng, 1)[0]
    Nx, Ny = next_pow2(dims[0]), next_pow2(dims[1])
    px = part_of(int(anchor[0]), bucket[0], Nx)
    py = part_of(int(anchor[1]), bucket[1], Ny)
    return box_pair_for_parts(px, py, bucket, dims)


# ---------------------------------------------------------------------------
# Full testers (any d)
# ---------------------------------------------------------------------------


def _buckets_for_dims(dims):
    sets = [range(int(math.log2(next_pow2(n))) + 1) for n in dims]
    for levels in product(*sets):
        if any(levels):
            yield levels


def _amplification_reps(cfg: TesterConfig, dims, mode: str) -> int:
    if cfg.amplification > 0:
        return cfg.amplification
    eps1 = cfg.epsilon / _ell2(dims)
    if mode == "er":
        eps1 *= 1.0 - cfg.delta
    n = max(dims)
    reps = math.ceil(cfg.c("amplify") / eps1 * math.log2(max(2.0, math.log2(max(n, 4)))))
    return int(min(200, max(1, reps)))


def _all_bucket_plan(oracle, cfg, mode, region, rng, proximity) -> _Plan:
    """One merged nonadaptive plan covering every bucket (d=2)."""
    dims = oracle.dims
    eps1 = effective_eps1(proximity, dims, mode, cfg.delta)
    Nx, Ny = next_pow2(dims[0]), next_pow2(dims[1])
    buckets = np.array(list(_buckets_for_dims(dims)), dtype=np.int64)
    B = len(buckets)
    use_anchors = mode == "partial" and region is not None and not region.empty
    plans = []
    for _, Tk, qk in _levels_schedule(eps1, cfg, rng, cfg.c("star_boxes")):
        count = B * Tk
        ax = np.repeat(buckets[:, 0], Tk)
        ay = np.repeat(buckets[:, 1], Tk)
        if use_anchors:
            anchors = region.sample(rng, count)
            xs, ys = anchors[:, 0] - 1, anchors[:, 1] - 1
        else:
            xs = rng.integers(0, Nx, size=count)
            ys = rng.integers(0, Ny, size=count)
        Lx, Ly = int(math.log2(Nx)), int(math.log2(Ny))
        px = np.where(ax == 0, xs, xs >> (Lx - ax))
        py = np.where(ay == 0, ys, ys >> (Ly - ay))
        plans.append(_plan_from_parts(px, py, ax, ay, qk, dims))
    return _Plan.concat(plans)


def _generic_scale_tester(oracle, levels, cfg, mode, rng, sense="12"):
    """General-d TEST* on dense (small) grids; partial mode uses the mask."""
    f = root_oracle(oracle).f
    dims = oracle.dims
    d = len(dims)
    Ns = [next_pow2(n) for n in dims]
    eps1 = cfg.epsilon / _ell2(dims)
    if mode == "er":
        eps1 *= 1.0 - cfg.delta
    mask = f.domain_mask if (mode == "partial" and f.domain_mask is not None) else None
    if mask is not None:
        pool = np.argwhere(mask) + 1
        if len(pool) == 0:
            return None
    for k, Tk, qk in _levels_schedule(eps1, cfg, rng, cfg.c("star_boxes")):
        for _ in range(Tk):
            if mask is not None:
                anchor = pool[rng.integers(0, len(pool))]
                parts = [part_of(int(anchor[i]), levels[i], Ns[i]) for i in range(d)]
            else:
                parts = [int(rng.integers(0, num_parts(levels[i], Ns[i]))) for i in range(d)]
            spans_b, spans_c, dead = [], [], False
            for i in range(d):
                lo, hi = part_span(parts[i], levels[i], Ns[i])
                spans_b.append((lo, min(hi, dims[i])))
                if levels[i] >= 1:
                    if parts[i] + 1 >= num_parts(levels[i], Ns[i]):
                        dead = True
                        break
                    lo2, hi2 = part_span(parts[i] + 1, levels[i], Ns[i])
                else:
                    lo2, hi2 = lo, hi
                if lo2 > dims[i]:
                    dead = True
                    break
                spans_c.append((lo2, min(hi2, dims[i])))
            if dead:
                continue
            bpts = _sample_box_points(rng, spans_b, qk, mask)
            cpts = _sample_box_points(rng, spans_c, qk, mask)
            if bpts is None or cpts is None:
                continue
            found = _check_generic(oracle, bpts, cpts, mode, cfg, rng, sense)
            if found is not None:
                return found
    return None


def _sample_box_points(rng, spans, q, mask):
    pts = np.stack([rng.integers(lo, hi + 1, size=q) for lo, hi in spans], axis=1)
    if mask is None:
        return pts
    keep = mask[tuple(pts[:, i] - 1 for i in range(pts.shape[1]))]
    if keep.any():
        return pts[keep]
    sl = tuple(slice(lo - 1, hi) for lo, hi in spans)
    local = np.argwhere(mask[sl])
    if len(local) == 0:
        return None
    sel = local[rng.integers(0, len(local), size=q)]
    return sel + np.array([lo for lo, _ in spans])


def _check_generic(oracle, bpts, cpts, mode, cfg, rng, sense):
    bv, ber = oracle.query_batch(bpts)
    cv, cer = oracle.query_batch(cpts)
    bv = np.where(ber, np.nan, bv)
    cv = np.where(cer, np.nan, cv)
    if sense == "21":
        bv, cv = -bv, -cv
    if np.all(np.isnan(bv)) or np.all(np.isnan(cv)):
        return None
    bmin = np.nanmin(bv)
    cmax = np.nanmax(cv)
    if not bmin < cmax:
        return None
    elig = np.flatnonzero(bv < cmax)
    i = int(rng.choice(elig))
    elig2 = np.flatnonzero(cv > bv[i])
    j = int(rng.choice(elig2))
    v1, v2 = float(bv[i]), float(cv[j])
    if sense == "21":
        v1, v2 = -v1, -v2
    return ViolationPair(tuple(int(c) for c in bpts[i]), tuple(int(c) for c in cpts[j]), (v1, v2))


def monotonicity_tester(
    oracle,
    cfg: TesterConfig,
    mode: str = "total",
    pattern: Pattern = P21,
    region: Region | None = None,
) -> Verdict:
    """One-sided tester for (1,2)- or (2,1)-freeness over all buckets.

    (2,1)-freeness is monotone-nondecreasing testing; it is run as the
    (1,2)-tester on the negated view.  Rejects only with a witness that
    re-verifies against the underlying function.
    """
    if pattern == P21:
        view = OracleView(oracle, negate=True) if oracle.d == 2 else None
        sense = "21"
    elif pattern == P12:
        view = oracle if oracle.d == 2 else None
        sense = "12"
    else:
        raise ValueError("monotonicity_tester handles (1,2)/(2,1) only")
    dims = oracle.dims
    reps = _amplification_reps(cfg, dims, mode)
    if oracle.d == 2:
        region = _region_for(oracle, mode, region)
        for rep in range(reps):
            rng = cfg.rng(0x3107, rep)
            plan = _all_bucket_plan(view, cfg, mode, region, rng, cfg.epsilon)
            found = _execute_plan(
                view, plan, mode=mode, region=region, value_range=None,
                sense="12", cfg=cfg, rng=rng,
            )
            if found is not None:
                root, pts, pat = resolve_to_base(view, [found.one_leg, found.two_leg], P12)
                return Verdict.reject(root.f, pts, pat)
        return Verdict.accept()
    for rep in range(reps):
        for bucket in _buckets_for_dims(dims):
            rng = cfg.rng(0x3107, rep, *bucket)
            found = _generic_scale_tester(oracle, bucket, cfg, mode, rng, sense)
            if found is not None:
                pts = [found.one_leg, found.two_leg]
                pat = P21 if sense == "21" else P12
                if is_appearance(root_oracle(oracle).f, pts, pat):
                    return Verdict.reject(root_oracle(oracle).f, pts, pat)
    return Verdict.accept()
