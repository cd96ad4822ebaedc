"""Constructive covering pipeline.

Four layers, from cheap to expensive:

* easy_cover - at min cross-degree >= ceil(3N/4) a perfect cover always
  exists: take a perfect matching between classes 1 and 2 (degrees are
  above N/2), then match class 0 against the matched edges; a vertex is
  adjacent to an edge when it is adjacent to both endpoints.  Both
  matchings are guaranteed by the Konig-Hall degree corollary.

* greedy_partial_cover - randomized maximal initializer.

* augment_once - one exchange-augmentation step: given a partial cover
  with at least four uncovered vertices per class, either produce a
  strictly larger cover that replaces at most 15 triangles, or exhibit
  three sets of size floor(N/3), one per class, with pairwise density
  below the configured threshold (the extreme case).  The search
  escalates from cheap moves to expensive ones: direct extension, single
  exchanges, the relay through a third-class triangle, and finally the
  six-pinned-edge phase with its intersection and triangle hunts.

* solve - driver: easy path, greedy + augmentation loop, extreme-case
  classification and cover, with the exact oracle as the fallback for
  desk-size instances.  A returned NoFactor is always oracle-confirmed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .config import Config
from .errors import (
    InternalHallFailureError,
    NoTriangleExistsError,
    PreconditionDegreeError,
    PreconditionDivisibilityError,
    PreconditionViolatedError,
    SizeBandViolatedError,
    WitnessInvalidError,
)
from .exact import COVER, NO_FACTOR, exact_factor
from .graph import (
    Triangle,
    TriangleCover,
    TripartiteGraph,
    iter_bits,
    mask_of,
    verify_cover,
)
from .matching import BipartiteView, max_matching

MAX_REPLACED = 15  # hard cap on |T \ T0| per augmentation step


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


# ---------------------------------------------------------------------------
# easy cover (3/4 threshold)
# ---------------------------------------------------------------------------


def easy_cover(g: TripartiteGraph, cfg: Optional[Config] = None) -> TriangleCover:
    """Perfect cover under min cross-degree >= ceil(3N/4)."""
    n = g.n
    need = _ceil_div(3 * n, 4)
    if g.min_cross_degree() < need:
        raise PreconditionDegreeError(
            f"min cross-degree {g.min_cross_degree()} below ceil(3N/4) = {need}")
    full = (1 << n) - 1
    cover = match_triple_cover(g, full, full, full)
    if cover is None:
        raise InternalHallFailureError("guaranteed matching not found")
    return cover


def match_triple_cover(g: TripartiteGraph, m0: int, m1: int, m2: int
                       ) -> Optional[TriangleCover]:
    """Double-matching cover of the induced triple, or None if some matching
    is imperfect.  Sizes of the three masks must agree."""
    l1 = list(iter_bits(m1))
    l2 = list(iter_bits(m2))
    l0 = list(iter_bits(m0))
    if not (len(l0) == len(l1) == len(l2)):
        raise ValueError("masks must have equal sizes")
    if not l0:
        return TriangleCover([])

    bv12 = BipartiteView(l1, l2, lambda i: iter_bits(g.nbr_mask(1, i, 2) & m2))
    mr = max_matching(bv12)
    if not mr.left_perfect:
        return None
    edge_list = list(mr.pairs)

    def edge_nbrs(v0):
        row1 = g.nbr_mask(0, v0, 1)
        row2 = g.nbr_mask(0, v0, 2)
        return [k for k, (i, j) in enumerate(edge_list)
                if row1 >> i & 1 and row2 >> j & 1]

    bv0e = BipartiteView(l0, range(len(edge_list)), edge_nbrs)
    mr2 = max_matching(bv0e)
    if not mr2.left_perfect:
        return None
    tris = [Triangle(v0, *edge_list[k]) for v0, k in mr2.pairs]
    return TriangleCover(tris)


# ---------------------------------------------------------------------------
# greedy initializer
# ---------------------------------------------------------------------------


def greedy_partial_cover(g: TripartiteGraph, seed: int = 0) -> TriangleCover:
    """Maximal-by-inclusion disjoint triangle set; deterministic per seed.

    Availability only shrinks as triangles are added, so one shuffled pass
    over class-0 vertices already yields a maximal set.
    """
    n = g.n
    order = list(range(n))
    random.Random(f"greedy:{seed}").shuffle(order)
    full = (1 << n) - 1
    u1, u2 = full, full
    tris = []
    for v0 in order:
        row1 = g.nbr_mask(0, v0, 1) & u1
        if not row1:
            continue
        base2 = g.nbr_mask(0, v0, 2) & u2
        if not base2:
            continue
        for v1 in iter_bits(row1):
            opts = base2 & g.nbr_mask(1, v1, 2)
            if opts:
                v2 = (opts & -opts).bit_length() - 1
                tris.append(Triangle(v0, v1, v2))
                u1 &= ~(1 << v1)
                u2 &= ~(1 << v2)
                break
    return TriangleCover(tris)


# ---------------------------------------------------------------------------
# extreme witness
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExtremeWitness:
    """Three sets of size floor(N/3), one per class, pairwise sparse."""

    sets: tuple          # three sorted index tuples
    densities: tuple     # d(S0,S1), d(S0,S2), d(S1,S2) as Fractions

    def masks(self) -> tuple[int, int, int]:
        return tuple(mask_of(s) for s in self.sets)

    def recheck(self, g: TripartiteGraph) -> tuple[Fraction, Fraction, Fraction]:
        m = self.masks()
        return (g.density_masks(0, m[0], 1, m[1]),
                g.density_masks(0, m[0], 2, m[2]),
                g.density_masks(1, m[1], 2, m[2]))


def finish_extreme_witness(g: TripartiteGraph, masks, cfg: Config
                           ) -> Optional[ExtremeWitness]:
    """Resize a candidate sparse triple to exactly floor(N/3) per class and
    certify pairwise densities < delta0.

    Oversized sets drop their highest-cross-degree vertices first (those
    contribute the most density); undersized ones pad with the outside
    vertices least adjacent to the other two sets.
    """
    n = g.n
    target = n // 3
    if target == 0:
        return None
    cur = list(masks)

    def deg_into_others(c: int, i: int, who) -> int:
        d = 0
        for cp in range(3):
            if cp != c:
                d += (g.nbr_mask(c, i, cp) & who[cp]).bit_count()
        return d

    for c in range(3):
        members = list(iter_bits(cur[c]))
        while len(members) > target:
            worst = max(members, key=lambda i: (deg_into_others(c, i, cur), i))
            members.remove(worst)
            cur[c] &= ~(1 << worst)
        if len(members) < target:
            outside = [i for i in range(n) if not cur[c] >> i & 1]
            outside.sort(key=lambda i: (deg_into_others(c, i, cur), i))
            for i in outside[: target - len(members)]:
                cur[c] |= 1 << i
    dens = (g.density_masks(0, cur[0], 1, cur[1]),
            g.density_masks(0, cur[0], 2, cur[2]),
            g.density_masks(1, cur[1], 2, cur[2]))
    if max(dens) >= cfg.delta0_frac:
        return None
    return ExtremeWitness(tuple(tuple(iter_bits(m)) for m in cur), dens)


# ---------------------------------------------------------------------------
# augmentation
# ---------------------------------------------------------------------------


@dataclass
class AugmentState:
    """Mutable bookkeeping for one exchange-augmentation step."""

    cover: TriangleCover
    uncovered: tuple
    a_sets: dict = field(default_factory=dict)
    b_sets: dict = field(default_factory=dict)
    c_sets: dict = field(default_factory=dict)
    pinned: dict = field(default_factory=dict)   # e1,e2,f1,f3,g2,g3 -> edge

    @classmethod
    def from_cover(cls, g: TripartiteGraph, cover: TriangleCover) -> "AugmentState":
        return cls(cover, tuple(cover.uncovered_mask(g.n, c) for c in range(3)))


@dataclass(frozen=True)
class Improved:
    cover: TriangleCover
    replaced: int          # |T \ T0|


@dataclass(frozen=True)
class Extreme:
    witness: ExtremeWitness


@dataclass(frozen=True)
class Stuck:
    reason: str


class _Work:
    """Current cover as a vertex -> triangle index, supporting exchanges."""

    def __init__(self, g: TripartiteGraph, cover: TriangleCover):
        self.g = g
        self.n = g.n
        self.full = (1 << g.n) - 1
        self.tris: set[Triangle] = set(cover.triangles)
        self.baseline = frozenset(cover.triangles)
        self.owner: list[dict[int, Triangle]] = [{}, {}, {}]
        for t in self.tris:
            for c, i in enumerate(t):
                self.owner[c][i] = t

    def unc(self, c: int) -> int:
        return self.full ^ mask_of(self.owner[c].keys())

    def replace(self, removed, added) -> None:
        for t in removed:
            self.tris.remove(t)
            for c, i in enumerate(t):
                del self.owner[c][i]
        for t in added:
            assert self.g.triangle_exists(t), f"exchange built a non-triangle {t}"
            self.tris.add(t)
            for c, i in enumerate(t):
                assert i not in self.owner[c], "exchange broke disjointness"
                self.owner[c][i] = t

    def replaced_count(self) -> int:
        return len(self.tris - self.baseline)

    def to_cover(self) -> TriangleCover:
        return TriangleCover(sorted(self.tris))


def _exchange_sets(g: TripartiteGraph, work: _Work, ca: int, xa: int,
                   cb: int, xb: int, cc: int):
    """Triangles exchangeable with xa (A) and with xb (B); C is the rest.

    A triangle is in A when xa is adjacent to both its vertices outside
    class ca, so xa can replace its class-ca vertex without shrinking the
    cover; B is the mirror image for xb.
    """
    a_tris, b_tris, c_tris = [], [], []
    for t in work.tris:
        pa, pb, pc = t[ca], t[cb], t[cc]
        in_a = (g.nbr_mask(ca, xa, cb) >> pb & 1) and (g.nbr_mask(ca, xa, cc) >> pc & 1)
        in_b = (g.nbr_mask(cb, xb, ca) >> pa & 1) and (g.nbr_mask(cb, xb, cc) >> pc & 1)
        if in_a:
            a_tris.append(t)
        if in_b:
            b_tris.append(t)
        if not in_a and not in_b:
            c_tris.append(t)
    return a_tris, b_tris, c_tris


def _with_slot(t: Triangle, c: int, v: int) -> Triangle:
    parts = list(t)
    parts[c] = v
    return Triangle(*parts)


def _pin_edge(g: TripartiteGraph, work: _Work, state: AugmentState,
              ca: int, cb: int, pinned_mask: list[int], cfg: Config):
    """Produce one edge between uncovered, unpinned vertices of (ca, cb).

    Returns ('edge', (u, v)) on success, ('extreme', masks) when the failed
    exchange certifies the sparse triple candidate, or ('stuck', reason).
    """
    cc = 3 - ca - cb
    ua = work.unc(ca) & ~pinned_mask[ca]
    ub = work.unc(cb) & ~pinned_mask[cb]

    # an edge may already be present
    for ia in iter_bits(ua):
        m = g.nbr_mask(ca, ia, cb) & ub
        if m:
            return "edge", ((ca, ia), (cb, (m & -m).bit_length() - 1))

    first_failure = None
    for xa in iter_bits(ua):
        for xb in iter_bits(ub):
            res = _exchange_for_edge(g, work, ca, xa, cb, xb, cc, ub, ua)
            if res is not None:
                return "edge", res
            if first_failure is None:
                a_tris, b_tris, c_tris = _exchange_sets(g, work, ca, xa, cb, xb, cc)
                state.a_sets[(ca, cb)] = mask_of(t[ca] for t in a_tris)
                state.b_sets[(ca, cb)] = mask_of(t[cb] for t in b_tris)
                state.c_sets[(ca, cb)] = mask_of(t[cc] for t in c_tris)
                cand = [0, 0, 0]
                cand[ca] = state.a_sets[(ca, cb)]
                cand[cb] = state.b_sets[(ca, cb)]
                cand[cc] = state.c_sets[(ca, cb)]
                first_failure = tuple(cand)
    if first_failure is not None:
        return "extreme", first_failure
    return "stuck", "no uncovered candidates"


def _exchange_for_edge(g: TripartiteGraph, work: _Work, ca: int, xa: int,
                       cb: int, xb: int, cc: int, ub: int, ua: int):
    """One (x_a, x_b) exchange attempt; mutates the cover on success and
    returns the created uncovered edge."""
    a_tris, b_tris, c_tris = _exchange_sets(g, work, ca, xa, cb, xb, cc)

    # (a) a vertex freed from an A-triangle already sees uncovered cb-vertices
    for t in a_tris:
        x = t[ca]
        m = g.nbr_mask(ca, x, cb) & ub
        if m:
            work.replace([t], [_with_slot(t, ca, xa)])
            return ((ca, x), (cb, (m & -m).bit_length() - 1))
    # (b) mirror image for B
    for t in b_tris:
        y = t[cb]
        m = g.nbr_mask(cb, y, ca) & ua
        if m:
            work.replace([t], [_with_slot(t, cb, xb)])
            return ((ca, (m & -m).bit_length() - 1), (cb, y))
    # (c) an edge between a freed A-vertex and a freed B-vertex
    b_by_vertex = {t[cb]: t for t in b_tris}
    b_mask = mask_of(b_by_vertex.keys())
    for t in a_tris:
        x = t[ca]
        m = g.nbr_mask(ca, x, cb) & b_mask
        for y in iter_bits(m):
            tb = b_by_vertex[y]
            if tb is t:
                continue
            work.replace([t, tb], [_with_slot(t, ca, xa), _with_slot(tb, cb, xb)])
            return ((ca, x), (cb, y))
    # (d) relay: x in A frees a third triangle's ca-vertex adjacent to xb
    res = _relay(g, work, a_tris, c_tris, ca, xa, cb, xb, cc)
    if res is not None:
        return res
    # (e) relay on the B side
    res = _relay(g, work, b_tris, c_tris, cb, xb, ca, xa, cc)
    if res is not None:
        ((c1, v1), (c2, v2)) = res
        return ((c2, v2), (c1, v1)) if c1 == cb else res
    return None


def _relay(g: TripartiteGraph, work: _Work, side_tris, c_tris,
           cs: int, xs: int, co: int, xo: int, cc: int):
    """Figure-2 style relay: x from the exchange set enters a C-triangle
    whose cs-vertex is adjacent to the opposite uncovered vertex xo.

    Two triangles are replaced: xs enters x's triangle and x enters the
    relay triangle, freeing its cs-vertex next to xo.
    """
    if not c_tris:
        return None
    for t in side_tris:
        x = t[cs]
        row_o = g.nbr_mask(cs, x, co)
        row_c = g.nbr_mask(cs, x, cc)
        for tp in c_tris:
            if not (row_o >> tp[co] & 1 and row_c >> tp[cc] & 1):
                continue
            xprime = tp[cs]
            if not g.nbr_mask(co, xo, cs) >> xprime & 1:
                continue
            work.replace([t, tp], [_with_slot(t, cs, xs), _with_slot(tp, cs, x)])
            return ((cs, xprime), (co, xo))
    return None


PIN_ORDER = (("e1", 0, 1), ("e2", 0, 1), ("f1", 0, 2), ("f3", 0, 2),
             ("g2", 1, 2), ("g3", 1, 2))


def augment_once(g: TripartiteGraph, state: AugmentState, cfg: Config):
    """One exchange-augmentation step: Improved, Extreme, or Stuck."""
    n = g.n
    cover = state.cover
    if cover.size >= n - 3:
        raise PreconditionViolatedError("cover too large for the exchange step")
    for c in range(3):
        if cover.uncovered_mask(n, c).bit_count() < 4:
            raise PreconditionViolatedError("need at least 4 uncovered vertices per class")
    floor_frac = Fraction(2, 3) - cfg.eps_prime_frac
    if g.min_cross_degree() < floor_frac * n:
        raise PreconditionViolatedError("min cross-degree below (2/3 - eps')N")

    work = _Work(g, cover)

    def improved_or_stuck():
        if work.replaced_count() > MAX_REPLACED:
            return Stuck(f"improvement needs {work.replaced_count()} replacements")
        new_cover = work.to_cover()
        assert len(new_cover.triangles) > cover.size
        assert verify_cover(g, new_cover).ok
        return Improved(new_cover, work.replaced_count())

    # phase 1: direct extension
    t = g.find_triangle(work.unc(0), work.unc(1), work.unc(2))
    if t is not None:
        work.replace([], [t])
        return improved_or_stuck()

    # phases 2-3: create six disjoint pinned edges in the uncovered sets
    pinned_mask = [0, 0, 0]
    for label, ca, cb in PIN_ORDER:
        kind, payload = _pin_edge(g, work, state, ca, cb, pinned_mask, cfg)
        if kind == "extreme":
            witness = finish_extreme_witness(g, payload, cfg)
            if witness is not None:
                return Extreme(witness)
            return Stuck("exchange failed and the sparse triple did not certify")
        if kind == "stuck":
            return Stuck(payload)
        (cu, iu), (cv, iv) = payload
        state.pinned[label] = payload
        pinned_mask[cu] |= 1 << iu
        pinned_mask[cv] |= 1 << iv
        # an exchange may have opened a direct extension; take it eagerly
        t = g.find_triangle(work.unc(0), work.unc(1), work.unc(2))
        if t is not None:
            work.replace([], [t])
            return improved_or_stuck()

    return _pinned_phase(g, work, state, cfg)


def _pinned_phase(g: TripartiteGraph, work: _Work, state: AugmentState, cfg: Config):
    """The six-pinned-edge endgame: redefined A/B/C sets, their pairwise
    intersections, and the triangle hunt over (B0+C0, A1+C1, A2+B2)."""
    pin = state.pinned
    e1, e2, f1, f3, g2, g3 = (pin[k] for k in ("e1", "e2", "f1", "f3", "g2", "g3"))

    def sees(c: int, v: int, edge) -> bool:
        (cx, ix), (cy, iy) = edge
        return bool(g.nbr_mask(c, v, cx) >> ix & 1 and g.nbr_mask(c, v, cy) >> iy & 1)

    sets: dict[str, dict[int, Triangle]] = {k: {} for k in
                                            ("A1", "A2", "B0", "B2", "C0", "C1")}
    for t in work.tris:
        if sees(0, t.i0, g2):
            sets["A1"][t.i1] = t
        if sees(0, t.i0, g3):
            sets["A2"][t.i2] = t
        if sees(1, t.i1, f1):
            sets["B0"][t.i0] = t
        if sees(1, t.i1, f3):
            sets["B2"][t.i2] = t
        if sees(2, t.i2, e1):
            sets["C0"][t.i0] = t
        if sees(2, t.i2, e2):
            sets["C1"][t.i1] = t

    def tri_from_edge(edge, c: int, v: int) -> Triangle:
        parts = [None, None, None]
        (cx, ix), (cy, iy) = edge
        parts[cx], parts[cy], parts[c] = ix, iy, v
        return Triangle(*parts)

    # pairwise intersections give an immediate +1
    for k1, k2, comp1, comp2 in (("B0", "C0", (1, f1), (2, e1)),
                                 ("A1", "C1", (0, g2), (2, e2)),
                                 ("A2", "B2", (0, g3), (1, f3))):
        common = set(sets[k1]) & set(sets[k2])
        for v in sorted(common):
            t = sets[k1][v]
            (s1, edge1), (s2, edge2) = comp1, comp2
            add1 = tri_from_edge(edge1, s1, t[s1])
            add2 = tri_from_edge(edge2, s2, t[s2])
            if g.triangle_exists(add1) and g.triangle_exists(add2):
                work.replace([t], [add1, add2])
                return _finish_improved(g, work, state)

    companions = {
        0: (("B0", 1, f1), ("C0", 2, e1)),
        1: (("A1", 0, g2), ("C1", 2, e2)),
        2: (("A2", 0, g3), ("B2", 1, f3)),
    }
    m0 = mask_of(set(sets["B0"]) | set(sets["C0"]))
    m1 = mask_of(set(sets["A1"]) | set(sets["C1"]))
    m2 = mask_of(set(sets["A2"]) | set(sets["B2"]))

    plan = _hunt_plan(g, work, sets, companions, m0, m1, m2)
    if plan is not None:
        removed, added = plan
        work.replace(removed, added)
        return _finish_improved(g, work, state)

    # no triangle in the triple: classify it as an approximate theta 3x2
    # structure and hand back the sparse same-column triple
    witness = _theta_triple_witness(g, (m0, m1, m2), cfg)
    if witness is not None:
        return Extreme(witness)
    return Stuck("pinned phase failed and no sparse triple certified")


def _finish_improved(g, work, state):
    if work.replaced_count() > MAX_REPLACED:
        return Stuck(f"improvement needs {work.replaced_count()} replacements")
    new_cover = work.to_cover()
    assert verify_cover(g, new_cover).ok
    return Improved(new_cover, work.replaced_count())


def _hunt_plan(g: TripartiteGraph, work: _Work, sets, companions, m0, m1, m2):
    """Search a triangle in the (B0+C0, A1+C1, A2+B2) triple together with a
    vertex-disjoint companion assignment; returns (removed, added) or None."""
    r01, r02, r12 = g._rows[(0, 1)], g._rows[(0, 2)], g._rows[(1, 2)]
    for z0 in iter_bits(m0):
        cand1 = r01[z0] & m1
        if not cand1:
            continue
        base2 = r02[z0] & m2
        if not base2:
            continue
        for z1 in iter_bits(cand1):
            for z2 in iter_bits(base2 & r12[z1]):
                plan = _companion_plan(g, work, sets, companions, (z0, z1, z2))
                if plan is not None:
                    return plan
    return None


def _companion_plan(g, work, sets, companions, zs):
    """Companion triangles for one hunt candidate; each removed triangle
    must be paid for by one companion, and everything must stay disjoint."""
    hunt = Triangle(*zs)
    removed = []
    for c, z in enumerate(zs):
        t = work.owner[c][z]
        if t not in removed:
            removed.append(t)
    if len(removed) == 1:
        return None  # the hunt triangle is an existing cover triangle

    options = []
    for c, z in enumerate(zs):
        opts = []
        for key, slot, edge in companions[c]:
            t = sets[key].get(z)
            if t is not None and t is work.owner[c][z]:
                v = t[slot]
                if v not in (hunt[slot],):
                    (cx, ix), (cy, iy) = edge
                    parts = [None, None, None]
                    parts[cx], parts[cy], parts[slot] = ix, iy, v
                    cand = Triangle(*parts)
                    if g.triangle_exists(cand):
                        opts.append(cand)
        options.append(opts)

    need = len(removed)
    # choose a subset of companions, at most one per hunt vertex, that is
    # vertex-disjoint from the hunt triangle and from each other
    best = None
    import itertools
    for choice in itertools.product(*[opts + [None] for opts in options]):
        chosen = [c for c in choice if c is not None]
        if len(chosen) < need:
            continue
        added = [hunt] + chosen
        used = [0, 0, 0]
        ok = True
        for t in added:
            for c, i in enumerate(t):
                bit = 1 << i
                if used[c] & bit:
                    ok = False
                    break
                used[c] |= bit
            if not ok:
                break
        if not ok:
            continue
        # additions may only reuse vertices of removed triangles or pins
        removed_masks = [0, 0, 0]
        for t in removed:
            for c, i in enumerate(t):
                removed_masks[c] |= 1 << i
        conflict = False
        for t in added:
            for c, i in enumerate(t):
                if i in work.owner[c] and not removed_masks[c] >> i & 1:
                    conflict = True
                    break
            if conflict:
                break
        if conflict:
            continue
        if best is None or len(added) > len(best[1]):
            best = (removed, added)
    return best


def _trim_to_sparse(g: TripartiteGraph, masks: list[int], thr: int) -> list[int]:
    """Repeatedly expel the vertex most adjacent to the other sets until
    every remaining vertex sees fewer than thr vertices in each other set.

    Expelling the worst offender first matters: a few dense interlopers can
    otherwise push genuinely sparse vertices over the threshold."""
    cur = list(masks)
    while True:
        worst, worst_key = None, None
        for c in range(3):
            for v in iter_bits(cur[c]):
                degs = [(g.nbr_mask(c, v, cp) & cur[cp]).bit_count()
                        for cp in range(3) if cp != c]
                if max(degs) >= thr:
                    key = (sum(degs), c, v)
                    if worst_key is None or key > worst_key:
                        worst_key, worst = key, (c, v)
        if worst is None:
            return cur
        c, v = worst
        cur[c] &= ~(1 << v)


def _theta_triple_witness(g: TripartiteGraph, masks, cfg: Config):
    """Extract a sparse same-column triple from the failed pinned phase, the
    anchor-based opening of the theta-structure argument."""
    m0, m1, m2 = masks
    if not (m0 and m1 and m2):
        return None
    t_scale = max(1, g.n // 3)
    thr = max(2, int(cfg.delta0 * t_scale) + 1)
    for w in iter_bits(m2):
        a0 = g.nbr_mask(2, w, 0) & m0
        a1 = g.nbr_mask(2, w, 1) & m1
        if not a0 or not a1:
            continue
        a0, a1, _ = _trim_to_sparse(g, [a0, a1, 0], thr)
        if not a0 or not a1:
            continue
        a2 = 0
        for v in iter_bits(m2):
            d0 = (g.nbr_mask(2, v, 0) & a0).bit_count()
            d1 = (g.nbr_mask(2, v, 1) & a1).bit_count()
            if d0 < thr and d1 < thr:
                a2 |= 1 << v
        if not a2:
            continue
        triple = _trim_to_sparse(g, [a0, a1, a2], thr)
        if not all(triple):
            continue
        witness = finish_extreme_witness(g, triple, cfg)
        if witness is not None:
            return witness
    return None


# ---------------------------------------------------------------------------
# driver
# ---------------------------------------------------------------------------


@dataclass
class AugmentStepRecord:
    old_size: int
    new_size: int
    replaced: int


@dataclass
class SolveOutcome:
    kind: str                     # cover | extreme | nofactor | indeterminate
    cover: Optional[TriangleCover] = None
    witness: Optional[ExtremeWitness] = None
    structure: Optional[object] = None
    source: str = ""
    reason: str = ""
    steps: list = field(default_factory=list)

    def has_factor_decision(self) -> Optional[bool]:
        return {"cover": True, "nofactor": False}.get(self.kind)


def solve(g: TripartiteGraph, cfg: Optional[Config] = None,
          mode: str = "auto", budget: Optional[int] = None) -> SolveOutcome:
    """Full pipeline; outcome encodes the trichotomy.

    NoFactor is only ever returned with exact-oracle confirmation; above
    the oracle range an unresolved extreme case is reported as such.
    """
    cfg = cfg or Config()
    if mode not in ("auto", "exact", "constructive"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "exact":
        return _exact_outcome(g, cfg, [], budget=budget)

    n = g.n
    steps: list[AugmentStepRecord] = []
    dmin = g.min_cross_degree()

    if dmin >= _ceil_div(3 * n, 4):
        return SolveOutcome("cover", cover=easy_cover(g, cfg), source="easy")

    if n % 3:
        if dmin >= _ceil_div(2 * n, 3):
            out = _solve_via_reduction(g, cfg, mode)
            if out is not None:
                return out
        return _fallback(g, cfg, mode, steps, reason="n-not-divisible-by-3",
                         budget=budget)

    cover = greedy_partial_cover(g, cfg.seed)
    witness = None
    floor_frac = Fraction(2, 3) - cfg.eps_prime_frac
    if dmin >= floor_frac * n:
        while cover.size < n:
            if cover.size >= n - 3:
                break
            if min(cover.uncovered_mask(n, c).bit_count() for c in range(3)) < 4:
                break
            state = AugmentState.from_cover(g, cover)
            out = augment_once(g, state, cfg)
            if isinstance(out, Improved):
                steps.append(AugmentStepRecord(cover.size, out.cover.size, out.replaced))
                cover = out.cover
                continue
            if isinstance(out, Extreme):
                witness = out.witness
                resolved = _extreme_path(g, witness, cfg, steps)
                if resolved is not None:
                    return resolved
            break
        if cover.size == n:
            assert verify_cover(g, cover, require_perfect=True).ok
            return SolveOutcome("cover", cover=cover, source="constructive", steps=steps)

    return _fallback(g, cfg, mode, steps, witness=witness, budget=budget)


def _exact_outcome(g, cfg, steps, witness=None, structure=None,
                   source="exact-oracle", budget=None):
    res = exact_factor(g, budget=budget)
    if res.status == COVER:
        return SolveOutcome("cover", cover=res.cover, source=source, steps=steps,
                            witness=witness, structure=structure)
    if res.status == NO_FACTOR:
        return SolveOutcome("nofactor", source="exact-oracle", steps=steps,
                            witness=witness, structure=structure)
    return SolveOutcome("indeterminate", reason="budget", steps=steps)


def _fallback(g, cfg, mode, steps, witness=None, reason="stuck", budget=None):
    if mode != "constructive" and g.n <= cfg.exact_limit:
        return _exact_outcome(g, cfg, steps, witness=witness,
                              source="exact-fallback", budget=budget)
    if witness is not None:
        return SolveOutcome("extreme", witness=witness, steps=steps, reason=reason)
    return SolveOutcome("indeterminate", reason=reason, steps=steps)


def _extreme_path(g, witness: ExtremeWitness, cfg: Config, steps):
    """Classify the witness, discriminate gamma vs theta, and run the
    extreme-case cover.  Returns a SolveOutcome or None to fall back."""
    from . import extremal

    try:
        ep = extremal.classify_extreme_partition(g, witness, cfg.theta)
    except SizeBandViolatedError:
        return None
    sw = extremal.discriminate_gamma_vs_theta(g, ep, delta=cfg.delta0)
    if sw is None:
        return None
    try:
        result = extremal.extreme_cover(g, sw, cfg)
    except WitnessInvalidError:
        return None
    if result.kind == "cover":
        assert verify_cover(g, result.cover, require_perfect=True).ok
        return SolveOutcome("cover", cover=result.cover, witness=witness,
                            structure=sw, source="extreme-cover", steps=steps)
    # exact gamma3 with odd scale: the one genuinely uncoverable family
    if g.n <= cfg.exact_limit:
        return _exact_outcome(g, cfg, steps, witness=witness, structure=sw)
    return SolveOutcome("indeterminate", reason="gamma3-witness",
                        witness=witness, structure=sw, steps=steps)


# ---------------------------------------------------------------------------
# N not divisible by 3
# ---------------------------------------------------------------------------


@dataclass
class ReduceResult:
    graph: TripartiteGraph
    removed: list            # triangles of g, original indices
    maps: list               # per class: new index -> old index


def reduce_mod3(g: TripartiteGraph, cfg: Optional[Config] = None) -> ReduceResult:
    """Remove 1 (N=3t+1) or 2 (N=3t+2) disjoint triangles, choosing at each
    step the triangle whose removal keeps the minimum cross-degree largest
    (ties broken lexicographically)."""
    n = g.n
    if n % 3 == 0:
        raise PreconditionDivisibilityError("N is divisible by 3")
    need = _ceil_div(2 * n, 3)
    if g.min_cross_degree() < need:
        raise PreconditionDegreeError(
            f"reduction needs min cross-degree >= ceil(2N/3) = {need}")
    removed: list[Triangle] = []
    keep = [(1 << n) - 1] * 3
    for _ in range(n % 3):
        best, best_score = None, None
        for t in _iter_triangles_within(g, keep):
            score = _min_degree_after(g, keep, t)
            if best_score is None or score > best_score:
                best, best_score = t, score
        if best is None:
            raise NoTriangleExistsError("no disjoint triangle available")
        removed.append(best)
        for c, i in enumerate(best):
            keep[c] &= ~(1 << i)
    sub, maps = g.induce(keep)
    t = n // 3
    assert sub.min_cross_degree() >= 2 * t, "reduction lost too much degree"
    return ReduceResult(sub, removed, maps)


def _iter_triangles_within(g, keep):
    r01, r02, r12 = g._rows[(0, 1)], g._rows[(0, 2)], g._rows[(1, 2)]
    for v0 in iter_bits(keep[0]):
        for v1 in iter_bits(r01[v0] & keep[1]):
            for v2 in iter_bits(r02[v0] & r12[v1] & keep[2]):
                yield Triangle(v0, v1, v2)


def _min_degree_after(g, keep, t) -> int:
    masks = [keep[c] & ~(1 << t[c]) for c in range(3)]
    best = g.n
    for a in range(3):
        for b in range(3):
            if a == b:
                continue
            rows = g._rows[(a, b)]
            for i in iter_bits(masks[a]):
                d = (rows[i] & masks[b]).bit_count()
                if d < best:
                    best = d
    return best


def _solve_via_reduction(g: TripartiteGraph, cfg: Config, mode: str
                         ) -> Optional[SolveOutcome]:
    from . import extremal

    red = reduce_mod3(g, cfg)
    sub_out = solve(red.graph, cfg, mode)
    if sub_out.kind == "cover":
        lifted = [Triangle(*(red.maps[c][t[c]] for c in range(3)))
                  for t in sub_out.cover.triangles]
        cover = TriangleCover(lifted + red.removed)
        assert verify_cover(g, cover, require_perfect=True).ok
        return SolveOutcome("cover", cover=cover, source="reduction",
                            steps=sub_out.steps)
    if sub_out.kind == "nofactor":
        # the reduced graph may be the exceptional odd gamma3; then the
        # removed vertices can be traded against one of its triangles
        assignment = extremal.is_exact_gamma3(red.graph)
        if assignment is not None and (red.graph.n // 3) % 2 == 1:
            cover = _gamma_swap_cover(g, red, assignment, cfg)
            if cover is not None:
                return SolveOutcome("cover", cover=cover, source="reduction-swap")
    return None


def _gamma_swap_cover(g: TripartiteGraph, red: ReduceResult, assignment,
                      cfg: Config) -> Optional[TriangleCover]:
    """The removed-triangle trade: when the reduced graph is exactly the odd
    gamma3 blow-up, every reduced vertex is adjacent to all removed vertices
    in the other classes, so one column-2 triangle plus three removed-vertex
    triangles peel the graph down to the even blow-up."""
    from . import extremal

    gp = red.graph
    t = gp.n // 3
    cols = [[0, 0, 0] for _ in range(3)]     # cols[class][col] = mask in gp
    for (c, i), (_, col) in assignment.items():
        cols[c][col] |= 1 << i

    star, rest = red.removed[0], red.removed[1:]
    consumed = [0, 0, 0]
    tris: list[Triangle] = []

    def to_g(c, i):
        return red.maps[c][i]

    def pick(c, col):
        m = cols[c][col] & ~consumed[c]
        if not m:
            return None
        i = (m & -m).bit_length() - 1
        consumed[c] |= 1 << i
        return i

    # one triangle inside the last column
    trans = [pick(c, 2) for c in range(3)]
    if None in trans:
        return None
    # removed vertex r_c + an edge of gp spanning the right columns
    edge_cols = {0: ((1, 0), (2, 1)), 1: ((0, 1), (2, 0)), 2: ((0, 0), (1, 1))}
    r_parts = []
    for c in range(3):
        (c1, col1), (c2, col2) = edge_cols[c]
        i1, i2 = pick(c1, col1), pick(c2, col2)
        if i1 is None or i2 is None:
            return None
        parts = [None, None, None]
        parts[c] = star[c]
        parts[c1] = to_g(c1, i1)
        parts[c2] = to_g(c2, i2)
        r_parts.append(Triangle(*parts))
    gi_trans = Triangle(*(to_g(c, trans[c]) for c in range(3)))
    candidate = [gi_trans] + r_parts + list(rest)
    for tri in candidate:
        if not g.triangle_exists(tri):
            return None
    tris.extend(candidate)

    keep = [((1 << gp.n) - 1) & ~consumed[c] for c in range(3)]
    core, core_maps = gp.induce(keep)
    if t - 1 == 0:
        inner = []
    else:
        core_assignment = extremal.is_exact_gamma3(core)
        if core_assignment is None:
            return None
        sw = extremal.witness_from_assignment(core, "gamma3", core_assignment)
        try:
            result = extremal.extreme_cover(core, sw, cfg)
        except WitnessInvalidError:
            return None
        if result.kind != "cover":
            return None
        inner = [Triangle(*(to_g(c, core_maps[c][tri[c]]) for c in range(3)))
                 for tri in result.cover.triangles]
    cover = TriangleCover(tris + inner)
    if not verify_cover(g, cover, require_perfect=True).ok:
        return None
    return cover
