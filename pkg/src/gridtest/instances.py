"""Instance generators: free functions, planted-far families for every
tester case, the intersection-search reduction, both lower-bound
distributions, birthday search, the distance-gap matrices, and the
adversarial erasure post-processor.

Planted instances embed disjoint appearances into a strictly decreasing
background.  Planted legs take values from global per-rank bands placed
above the background; within a band values decrease along the grid order, so
a band contributes no appearance legs beyond its rank role.  Any mix of
planted legs with increasing rank bands along a chain forms an appearance,
which is what makes the per-case completion sampling effective.  The
returned matching is the farness certificate: its appearances are pairwise
disjoint, so the deletion distance is at least the matching size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import (
    FORK123,
    GridFunction,
    FormulaGridFunction,
    P12,
    P21,
    Pattern,
    make_appearance,
)
from .exact import Matching


# ---------------------------------------------------------------------------
# Backgrounds and value bands
# ---------------------------------------------------------------------------


def _background(n: int) -> np.ndarray:
    """Strictly decreasing along the grid order, all values negative."""
    x = np.arange(1, n + 1, dtype=np.int64)[:, None]
    y = np.arange(1, n + 1, dtype=np.int64)[None, :]
    return (-((x + y) * (2 * n + 2) + x)).astype(np.float64)


def band_value(rank: int, x, y, n: int):
    """Value for a planted leg of the given rank band.

    Bands are globally ordered; within one band values strictly decrease
    along the grid order, so planted points of equal rank never form an
    increasing pair among themselves.
    """
    big = 2.0 * (n + 1) ** 2
    return rank * big + (2 * n - x - y) * (n + 1.0) + x


def gen_free(n: int, pat: Pattern, seed: int = 0, randomized: bool = False) -> GridFunction:
    """A pat-free function: strictly decreasing along the grid order.

    No comparable pair has increasing values, so every pattern that needs
    f(x_i) < f(x_j) for some i < j (any k >= 2 permutation, and the fork) is
    absent.  The randomized variant jitters values without breaking the
    strict decrease.
    """
    vals = _background(n)
    if randomized:
        rng = np.random.default_rng(seed)
        vals = vals + rng.uniform(0.05, 0.45, size=vals.shape)
    return GridFunction((n, n), vals)


# ---------------------------------------------------------------------------
# Planted monotone ((1,2)/(2,1)) instances
# ---------------------------------------------------------------------------


def _column_background(n: int) -> np.ndarray:
    """Per-column value bands decreasing in x; within a column decreasing in y."""
    x = np.arange(1, n + 1, dtype=np.int64)[:, None]
    y = np.arange(1, n + 1, dtype=np.int64)[None, :]
    return ((n - x) * (8.0 * n) + (n - y) * 4.0).astype(np.float64)


@dataclass
class PlantedInstance:
    f: GridFunction
    matching: Matching
    pattern: Pattern
    meta: dict = field(default_factory=dict)


def gen_planted_monotone(
    n: int,
    epsilon: float,
    seed: int = 0,
    pattern: Pattern = P12,
    gap: int | None = None,
    pairs: int | None = None,
    p_frac: float = 1.0,
) -> PlantedInstance:
    """Pairs planted inside columns, straddling one dyadic y-boundary.

    Each pair ((x,y), (x,y+gap)) lives in the bucket (0, log2(n/gap)); the
    1-leg value dips just below the 2-leg.  With p_frac < 1 the domain mask
    keeps only the planted column slabs (a partial-function instance whose
    relative distance matches epsilon).
    """
    if gap is None:
        gap = max(2, n // 16)
    if n % (2 * gap) != 0:
        raise ValueError("2*gap must divide n")
    slab_h = 2 * gap
    slabs_per_col = n // slab_h
    vals = _column_background(n)
    rng = np.random.default_rng(seed)

    if p_frac >= 1.0:
        slab_list = [(x, 1 + t * slab_h) for x in range(1, n + 1) for t in range(slabs_per_col)]
        domain = None
    else:
        want = max(1, int(round(p_frac * n * n / slab_h)))
        allp = [(x, 1 + t * slab_h) for x in range(1, n + 1) for t in range(slabs_per_col)]
        idx = rng.choice(len(allp), size=min(want, len(allp)), replace=False)
        slab_list = [allp[i] for i in sorted(idx)]
        domain = np.zeros((n, n), dtype=bool)
        for x, y0 in slab_list:
            domain[x - 1, y0 - 1 : y0 - 1 + slab_h] = True

    dom_size = n * n if domain is None else int(domain.sum())
    target = pairs if pairs is not None else math.ceil(1.15 * epsilon * dom_size)
    per_slab = math.ceil(target / len(slab_list))
    if per_slab > gap:
        raise ValueError("epsilon too large for the slab layout")
    chosen = []
    # round-robin over slabs so adversarial erasure leaves spread survivors
    for j in range(per_slab):
        for x, y0 in slab_list:
            if len(chosen) >= target:
                break
            chosen.append((x, y0 + j))
        if len(chosen) >= target:
            break
    apps = []
    for x, y in chosen:
        y2 = y + gap
        vals[x - 1, y - 1] = vals[x - 1, y2 - 1] - 2.0
        apps.append(make_appearance([(x, y), (x, y2)], P12))
    if pattern == P21:
        vals = -vals
        apps = [make_appearance(a.points, P21) for a in apps]
    elif pattern != P12:
        raise ValueError("monotone shapes support (1,2)/(2,1) patterns")
    f = GridFunction((n, n), vals, domain_mask=domain)
    return PlantedInstance(f, Matching(apps), pattern, {"gap": gap, "slab_h": slab_h})


def erase_adversarially(inst: PlantedInstance, delta: float, seed: int = 0) -> PlantedInstance:
    """Erase up to delta*n^2 points, targeting planted 1-legs first.

    Returns the instance with an erased mask and the surviving matching
    (pairs whose legs are all unerased).
    """
    f = inst.f
    if f.domain_mask is not None:
        raise ValueError("erasures apply only to total-function mode")
    n = f.dims[0]
    budget = int(delta * f.size)
    erased = np.zeros(f.dims, dtype=bool)
    survivors = []
    killed = 0
    for a in inst.matching.appearances:
        if killed < budget:
            x, y = a.points[0]
            erased[x - 1, y - 1] = True
            killed += 1
        else:
            survivors.append(a)
    rng = np.random.default_rng(seed)
    if killed < budget:
        flat = np.flatnonzero(~erased.reshape(-1))
        planted = {p for ap in inst.matching.appearances for p in ap.points}
        free_idx = [i for i in flat if (i // n + 1, i % n + 1) not in planted]
        extra = rng.choice(free_idx, size=min(budget - killed, len(free_idx)), replace=False)
        er = erased.reshape(-1)
        er[extra] = True
        erased = er.reshape(f.dims)
    g = GridFunction(f.dims, f.values, erased_mask=erased)
    return PlantedInstance(g, Matching(survivors), inst.pattern, dict(inst.meta, delta=delta))


# ---------------------------------------------------------------------------
# Box-grid geometry shared by the 3-pattern shapes
# ---------------------------------------------------------------------------


class ShapeGrid:
    def __init__(self, n: int, m: int):
        self.n = n
        self.m = m
        self.edges = [round(i * n / m) for i in range(m + 1)]

    def span(self, i: int) -> tuple[int, int]:
        return self.edges[i] + 1, self.edges[i + 1]

    def side(self, i: int) -> int:
        lo, hi = self.span(i)
        return hi - lo + 1


def _rank_bands_for(pat: Pattern):
    if pat.kind == "fork123":
        return (1, 2, 3)
    return pat.perm


def _plant_triples(vals, triples, pat: Pattern, n: int):
    ranks = _rank_bands_for(pat)
    apps = []
    for tri in triples:
        for i, (x, y) in enumerate(tri):
            vals[x - 1, y - 1] = band_value(ranks[i], x, y, n)
        apps.append(make_appearance(tri, pat))
    return apps


def _plant_helpers(vals, pts, rank, n):
    for x, y in pts:
        vals[x - 1, y - 1] = band_value(rank, x, y, n)


def _lattice(x0, x1, y0, y1, pitch_x, pitch_y, limit=None):
    pts = [
        (x, y)
        for x in range(x0, x1 + 1, pitch_x)
        for y in range(y0, y1 + 1, pitch_y)
    ]
    return pts if limit is None else pts[:limit]


# ---------------------------------------------------------------------------
# (1,2,3) shapes
# ---------------------------------------------------------------------------


SHAPES_123 = ("m0", "m11", "m12", "m22", "m23", "m3g", "m3ig")


def gen_planted_123(n, epsilon, shape, seed=0, m=None, pat=None) -> PlantedInstance:
    pat = pat or Pattern("perm", (1, 2, 3))
    m = m or max(2, int(round(math.sqrt(n))))
    if shape == "m3ig":
        inst = gen_planted_123(n, epsilon, "m3g", seed=seed, m=m, pat=pat)
        vals = inst.f.values.T.copy()
        apps = [
            make_appearance([(y, x) for x, y in a.points], pat)
            for a in inst.matching.appearances
        ]
        return PlantedInstance(GridFunction((n, n), vals), Matching(apps), pat, {"shape": shape, "m": m})
    grid = ShapeGrid(n, m)
    vals = _background(n)
    target = math.ceil(1.1 * epsilon * n * n)
    builders = {
        "m0": _shape_m0,
        "m11": _shape_m11,
        "m12": _shape_m12,
        "m22": _shape_m22,
        "m23": _shape_m23,
        "m3g": _shape_m3g,
    }
    if shape not in builders:
        raise ValueError(f"unknown 123 shape {shape!r}")
    triples = builders[shape](grid, vals, target, n)
    if len(triples) < target:
        raise ValueError(f"epsilon={epsilon} infeasible for shape {shape} at n={n}")
    apps = _plant_triples(vals, triples, pat, n)
    return PlantedInstance(GridFunction((n, n), vals), Matching(apps), pat, {"shape": shape, "m": m})


def _boxes(grid, pred):
    return [(i, j) for i in range(grid.m) for j in range(grid.m) if pred(i, j)]


def _shape_m0(grid, vals, target, n):
    """All legs of each triple inside one box: short diagonal chains."""
    triples = []
    boxes = _boxes(grid, lambda i, j: True)
    per_box = math.ceil(target / len(boxes))
    for i, j in boxes:
        x0, x1 = grid.span(i)
        y0, y1 = grid.span(j)
        slots = _lattice(x0, x1 - 2, y0, y1 - 2, 4, 4, per_box)
        for x, y in slots:
            triples.append(((x, y), (x + 1, y + 1), (x + 2, y + 2)))
            if len(triples) >= target:
                return triples
    return triples


def _strip(grid, j, t, h):
    """y-range of strip t (height h) within box row j."""
    y0, _ = grid.span(j)
    return y0 + t * h, y0 + (t + 1) * h - 1


def _shape_m11(grid, vals, target, n):
    """(1,2)-legs share a box left of the 3-leg's box; small 1-2 y-spacing.

    Pairs live in strip 0 of every box, 3-legs in strip 1; helper pairs
    densify the pair strips so the in-strip search has constant density.
    """
    m = grid.m
    h = max(2, grid.side(0) // 4)
    loaded = _boxes(grid, lambda i, j: i >= 1)
    per_box = math.ceil(target / len(loaded))
    triples = []
    for i, j in loaded:
        sy0, sy1 = _strip(grid, j, 0, h)
        px0, px1 = grid.span(i - 1)
        pair_slots = _lattice(px0, px1 - 1, sy0, sy1 - 1, 2, 2)
        ty0, ty1 = _strip(grid, j, 1, h)
        bx0, bx1 = grid.span(i)
        leg3_slots = _lattice(bx0, bx1, ty0, ty1, 1, 1)
        cnt = min(per_box, len(pair_slots), len(leg3_slots))
        for t in range(cnt):
            (x, y) = pair_slots[t]
            p3 = leg3_slots[t]
            triples.append(((x, y), (x + 1, y + 1), p3))
        # helper pairs fill the rest of the strip
        helpers = pair_slots[cnt : cnt + max(0, len(pair_slots) // 2 - cnt)]
        for x, y in helpers:
            _plant_helpers(vals, [(x, y)], 1, n)
            _plant_helpers(vals, [(x + 1, y + 1)], 2, n)
    return triples[:target] if len(triples) >= target else triples


def _shape_m12(grid, vals, target, n):
    """(1,2)-legs inside the box with a large y-spacing; 3-leg to the right
    in the strip just above the 2-leg's strip."""
    m = grid.m
    b = grid.side(0)
    h = max(2, b // 4)
    loaded = _boxes(grid, lambda i, j: i <= m - 2)
    per_box = math.ceil(target / len(loaded))
    triples = []
    for i, j in loaded:
        bx0, bx1 = grid.span(i)
        s0y0, _ = _strip(grid, j, 0, h)
        s2y0, s2y1 = _strip(grid, j, 2, h)
        rx0, rx1 = grid.span(i + 1)
        s3y0, s3y1 = _strip(grid, j, 3, h)
        p1s = _lattice(bx0, bx1 - 1, s0y0, s0y0, 2, 1)
        p2s = [(x + 1, s2y1) for x, _ in p1s]
        p3s = _lattice(rx0, rx1, s3y0, s3y1, 1, 1)
        cnt = min(per_box, len(p1s), len(p3s))
        for t in range(cnt):
            triples.append((p1s[t], p2s[t], p3s[t]))
        helpers = p3s[cnt : cnt + len(p3s) // 2]
        _plant_helpers(vals, helpers, 3, n)
        # extra in-box pairs keep the in-box pair density constant
        for x, y in p1s[cnt : cnt + max(0, len(p1s) // 2 - cnt)]:
            _plant_helpers(vals, [(x, y)], 1, n)
            _plant_helpers(vals, [(x + 1, s2y1)], 2, n)
    return triples[:target] if len(triples) >= target else triples


def _shape_m22(grid, vals, target, n):
    """1-leg in the box left-below, 2-leg in B, 3-leg in the box right of B."""
    m = grid.m
    loaded = _boxes(grid, lambda i, j: 1 <= i <= m - 2 and j >= 1)
    per_box = math.ceil(target / len(loaded))
    triples = []
    for i, j in loaded:
        bx0, bx1 = grid.span(i)
        by0, by1 = grid.span(j)
        lx0, lx1 = grid.span(i - 1)
        ly0, ly1 = grid.span(j - 1)
        rx0, rx1 = grid.span(i + 1)
        p1s = _lattice(lx0, lx1, ly0, ly1, 2, 2)
        p2s = _lattice(bx0, bx1, by0, by1, 2, 2)
        p3s = _lattice(rx0, rx1, by0, by1, 2, 2)
        cnt = min(per_box, len(p1s), len(p2s), len(p3s))
        for t in range(cnt):
            triples.append((p1s[t], p2s[t], p3s[t]))
        _plant_helpers(vals, p1s[cnt : cnt + len(p1s) // 3], 1, n)
        _plant_helpers(vals, p3s[cnt : cnt + len(p3s) // 3], 3, n)
    return triples[:target] if len(triples) >= target else triples


def _shape_m23(grid, vals, target, n):
    """As m22 but the 3-leg sits right-and-above B (3 rows, 3 columns)."""
    m = grid.m
    loaded = _boxes(grid, lambda i, j: 1 <= i <= m - 2 and 1 <= j <= m - 2)
    per_box = math.ceil(target / len(loaded))
    triples = []
    for i, j in loaded:
        bx0, bx1 = grid.span(i)
        by0, by1 = grid.span(j)
        lx0, lx1 = grid.span(i - 1)
        ly0, ly1 = grid.span(j - 1)
        rx0, rx1 = grid.span(i + 1)
        ry0, ry1 = grid.span(j + 1)
        p1s = _lattice(lx0, lx1, ly0, ly1, 2, 2)
        p2s = _lattice(bx0, bx1, by0, by1, 2, 2)
        p3s = _lattice(rx0, rx1, ry0, ry1, 2, 2)
        cnt = min(per_box, len(p1s), len(p2s), len(p3s))
        for t in range(cnt):
            triples.append((p1s[t], p2s[t], p3s[t]))
        _plant_helpers(vals, p1s[cnt : cnt + len(p1s) // 3], 1, n)
        _plant_helpers(vals, p3s[cnt : cnt + len(p3s) // 3], 3, n)
    return triples[:target] if len(triples) >= target else triples


def _shape_m3g(grid, vals, target, n):
    """Gamma shape: 1,2-legs share an x-column, 2,3-legs share a box row.

    2-legs spread over the x-columns of B; their 1-legs stack directly below
    (subcolumn width 1), 3-legs in the box to the right.  Helper 1-legs
    densify each used subcolumn below the box.
    """
    m = grid.m
    loaded = _boxes(grid, lambda i, j: i <= m - 2 and j >= 1)
    per_box = math.ceil(target / len(loaded))
    triples = []
    for i, j in loaded:
        bx0, bx1 = grid.span(i)
        by0, by1 = grid.span(j)
        ly0, ly1 = grid.span(j - 1)
        rx0, rx1 = grid.span(i + 1)
        p3s = _lattice(rx0, rx1, by0, by1, 2, 2)
        cols = list(range(bx0, bx1 + 1))
        cnt = min(per_box, len(cols), len(p3s))
        for t in range(cnt):
            x2 = cols[t]
            p2 = (x2, by0 + (t % grid.side(j)))
            p1 = (x2, ly0 + (t % grid.side(j)))
            triples.append((p1, p2, p3s[t]))
            helper_ys = range(ly0, ly1 + 1, 3)
            _plant_helpers(vals, [(x2, hy) for hy in helper_ys if (x2, hy) != p1], 1, n)
        if len(triples) >= target:
            break
    return triples[:target] if len(triples) >= target else triples


def gen_m0_chain(n: int, epsilon: float = 0.05) -> FormulaGridFunction:
    """Vertical in-column triples tiled with period 4: the legs of every
    triple land inside a single box at every power-of-two box scale, so the
    instance drives the recursive tester's M0 path all the way down."""
    stride = max(1, int(round(0.15 / epsilon)))
    big = 2.0 * (n + 1) ** 2

    def fn(pts):
        x = pts[:, 0]
        y = pts[:, 1]
        slot = (y - 1) % 4
        planted = (x % stride == 1 if stride > 1 else np.ones(len(x), bool)) & (slot < 3)
        rank = slot + 1.0
        inband = (2 * n - x - y) * (n + 1.0) + x
        bg = -((x + y) * (2.0 * n + 2) + x)
        return np.where(planted, rank * big + inband, bg)

    return FormulaGridFunction((n, n), fn)


# ---------------------------------------------------------------------------
# Intersection search, lower bounds, birthday search
# ---------------------------------------------------------------------------


@dataclass
class IntersectionInstance:
    n: int
    A: np.ndarray
    B: np.ndarray
    gamma: float
    solution_set: list  # [( (i1,i2), (j1,j2) ), ...] hidden from solvers


@dataclass
class BirthdayInstance:
    m: int
    piA: np.ndarray
    piB: np.ndarray


def gen_nonadaptive_lb(n: int, seed: int = 0) -> IntersectionInstance:
    """Arrays with exactly n^2 common values at secret shifted positions."""
    rng = np.random.default_rng(seed)
    X = rng.integers(0, 2, size=(3 * n, 3 * n), dtype=np.int64)
    flat = rng.choice(4 * n * n, size=n * n, replace=False)
    S = np.zeros((2 * n, 2 * n), dtype=bool)
    S[flat // (2 * n), flat % (2 * n)] = True
    k1, k2 = int(rng.integers(1, n + 1)), int(rng.integers(1, n + 1))
    I1, I2 = np.meshgrid(np.arange(1, 3 * n + 1), np.arange(1, 3 * n + 1), indexing="ij")
    A = 6 * n * (I1 + I2) + 2 * I1 + X
    J1 = I1 - k1
    J2 = I2 - k2
    inside = (J1 >= 1) & (J1 <= 3 * n) & (J2 >= 1) & (J2 <= 3 * n)
    Xs = np.zeros_like(X)
    Xs[inside] = X[J1[inside] - 1, J2[inside] - 1]
    in_s = np.zeros_like(inside)
    cond = inside & (J1 <= 2 * n) & (J2 <= 2 * n)
    in_s[cond] = S[J1[cond] - 1, J2[cond] - 1]
    bit = np.where(in_s, Xs, np.where(inside, 1 - Xs, 0))
    B = 6 * n * (J1 + J2) + 2 * J1 + bit
    sols = []
    for a, b in zip(*np.nonzero(S)):
        sols.append(((int(a + 1), int(b + 1)), (int(a + 1 + k1), int(b + 1 + k2))))
    return IntersectionInstance(n, A, B, float(len(sols)) / (9 * n * n), sols)


def gen_adaptive_lb(n: int, seed: int = 0) -> IntersectionInstance:
    """Per-antichain permuted arrays; all solutions live inside antichains."""
    rng = np.random.default_rng(seed)
    i1 = np.arange(1, 3 * n + 1)[:, None]
    i2 = np.arange(1, 3 * n + 1)[None, :]
    A = 6 * n * (i1 + i2) + 2 * i1
    B = 6 * n * (i1 + i2) + 2 * i1 + 1
    sols = []
    for r in range(n + 2, 3 * n + 2):
        lo = max(1, r - 3 * n)
        hi = min(3 * n, r - 1)
        idx = np.arange(lo, hi + 1)
        perm = rng.permutation(idx)
        for j1, target in zip(idx, perm):
            j2 = r - j1
            B[j1 - 1, j2 - 1] = 6 * n * r + 2 * int(target)
            sols.append(((int(target), int(r - target)), (int(j1), int(j2))))
    return IntersectionInstance(n, A, B, float(len(sols)) / (9 * n * n), sols)


def reduce_intersection_to_132(inst: IntersectionInstance) -> GridFunction:
    """The four-branch embedding of intersection search into (1,3,2)-freeness.

    Every solution (i, j) corresponds to exactly one (1,3,2)-appearance: the
    doubled A-column pair at values y -/+ 1/4 and the B-cell at value y.
    """
    n = inst.n
    N = 9 * n
    vals = np.zeros((N, N), dtype=np.float64)
    Ar = inst.A[::-1, ::-1]
    i1 = np.arange(1, 3 * n + 1)
    vals[2 * i1[:, None] - 2, : 3 * n] = Ar - 0.25
    vals[2 * i1[:, None] - 1, : 3 * n] = Ar + 0.25
    vals[6 * n :, 6 * n :] = inst.B
    return GridFunction((N, N), vals)


def canonical_reduction_triple(inst: IntersectionInstance, sol) -> tuple:
    (i1, i2), (j1, j2) = sol
    n = inst.n
    r1, r2 = 3 * n - i1 + 1, 3 * n - i2 + 1
    return ((2 * r1 - 1, r2), (2 * r1, r2), (6 * n + j1, 6 * n + j2))


def intersection_attack(
    inst: IntersectionInstance, q: int, strategy: str = "uniform", seed: int = 0
):
    """q-query attack on intersection search; returns a solution or None."""
    rng = np.random.default_rng(seed)
    N = 3 * inst.n
    qa = q // 2
    qb = q - qa
    if strategy == "uniform":
        ia = rng.integers(0, N, size=(qa, 2))
        ib = rng.integers(0, N, size=(qb, 2))
    elif strategy == "antichain":
        # adaptive birthday-style attack concentrated on the largest antichain
        r = N + 1  # indices with i1 + i2 = r, the main diagonal
        ja = rng.choice(N, size=min(qa, N), replace=False) + 1
        jb = rng.choice(N, size=min(qb, N), replace=False) + 1
        ia = np.stack([ja, r - ja], axis=1) - 1
        ib = np.stack([jb, r - jb], axis=1) - 1
    else:
        raise ValueError(strategy)
    va = inst.A[ia[:, 0], ia[:, 1]]
    vb = inst.B[ib[:, 0], ib[:, 1]]
    common, ca, cb = np.intersect1d(va, vb, return_indices=True)
    if len(common) == 0:
        return None
    a = ia[ca[0]]
    b = ib[cb[0]]
    return ((int(a[0] + 1), int(a[1] + 1)), (int(b[0] + 1), int(b[1] + 1)))


def gen_birthday(m: int, seed: int = 0) -> BirthdayInstance:
    rng = np.random.default_rng(seed)
    return BirthdayInstance(m, rng.permutation(m) + 1, rng.permutation(m) + 1)


def birthday_search_attack(
    inst: BirthdayInstance, q: int, strategy: str = "uniform", seed: int = 0
):
    """Collision search with q total queries split across the two arrays."""
    if q > 2 * inst.m:
        q = 2 * inst.m
    rng = np.random.default_rng(seed)
    qa = q // 2
    qb = q - qa
    if strategy == "uniform":
        ia = rng.integers(0, inst.m, size=qa)
        ib = rng.integers(0, inst.m, size=qb)
    elif strategy == "adaptive":
        ia = rng.choice(inst.m, size=min(qa, inst.m), replace=False)
        ib = rng.choice(inst.m, size=min(qb, inst.m), replace=False)
    else:
        raise ValueError(strategy)
    va = inst.piA[ia]
    vb = inst.piB[ib]
    common, ca, cb = np.intersect1d(va, vb, return_indices=True)
    if len(common) == 0:
        return None
    return int(ia[ca[0]]), int(ib[cb[0]])


# ---------------------------------------------------------------------------
# Distance-gap matrices
# ---------------------------------------------------------------------------


def gen_gap_2413(n: int) -> GridFunction:
    """The (2,4,1,3) gap layout: one bold 4 at a row/column crossing.

    The bold cell is the 4-leg of every row appearance and the 1-leg of
    every column appearance, so deleting it removes all appearances but no
    single value change can.
    """
    if n < 10:
        raise ValueError("layout needs n >= 10")
    xs = n // 3 + 1
    ys = n - n // 3
    a = (n - xs) // 2
    b = (ys - 1) // 2
    vals = np.full((n, n), 8.0)
    vals[: xs - 1, ys - 1] = 2.0
    vals[xs : xs + a, ys - 1] = 1.0
    vals[xs + a :, ys - 1] = 3.0
    vals[xs - 1, ys:] = 6.0
    vals[xs - 1, ys - 1 - b : ys - 1] = 7.0
    vals[xs - 1, : ys - 1 - b] = 5.0
    vals[xs - 1, ys - 1] = 4.0
    return GridFunction((n, n), vals)


def gen_gap_fork(n: int) -> GridFunction:
    """The fork gap layout with the bold 3 shared by both appearance families."""
    if n < 5:
        raise ValueError("layout needs n >= 5")
    vals = np.full((n, n), 5.0)
    vals[: n - 2, n - 1] = 1.0
    vals[n - 2 :, n - 1] = 4.0
    vals[: n - 2, n - 2] = 2.0
    vals[n - 1, n - 2] = 2.0
    vals[n - 2, n - 2] = 3.0
    vals[n - 2, : n - 2] = 4.0
    vals[n - 1, : n - 2] = 5.0
    return GridFunction((n, n), vals)


def gen_typicality_instance(legs: int = 20, n: int = 64, gap: int = 16):
    """A single box pair with exactly `legs` planted pairs on a known bucket.

    All B-side values sit below all B'-side values, so every sampled B-side
    point participates in a violation; used for the 1-leg uniformity test.
    """
    vals = _column_background(n)
    domain = np.zeros((n, n), dtype=bool)
    rng = np.random.default_rng(7)
    xs = rng.choice(n, size=legs, replace=False) + 1
    pairs = []
    for t, x in enumerate(sorted(xs)):
        y = 1 + (t % gap)
        y2 = y + gap
        vals[x - 1, y - 1] = vals[x - 1, y2 - 1] - 2.0
        domain[x - 1, y - 1] = True
        domain[x - 1, y2 - 1] = True
        pairs.append(((int(x), int(y)), (int(x), int(y2))))
    # normalize: every 1-leg below every 2-leg
    lo = min(vals[x - 1, y - 1] for (x, y), _ in pairs)
    hi = max(vals[x - 1, y - 1] for _, (x, y) in pairs)
    for (x, y), _ in pairs:
        vals[x - 1, y - 1] -= hi - lo + 1
    f = GridFunction((n, n), vals, domain_mask=domain)
    apps = Matching([make_appearance(p, P12) for p in pairs])
    return PlantedInstance(f, apps, P12, {"gap": gap})
