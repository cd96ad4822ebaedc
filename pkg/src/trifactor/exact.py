"""Exhaustive backtracking oracle for perfect triangle factors.

The decision problem is 3-dimensional matching restricted to a tripartite
graph, so the search assigns each class-0 vertex a (class-1, class-2)
neighbor pair via bitset intersections.  Branching picks the uncovered
class-0 vertex with the fewest remaining completions; a node is pruned as
soon as any uncovered vertex (in any class) has no completion left.

Two additional, decision-preserving reductions keep structured extremal
instances (the gamma/theta blow-up families) tractable:

* twin collapsing - vertices with identical adjacency rows are
  interchangeable, so only one representative per (twin, twin) completion
  pair is branched on;
* failure memoization keyed by per-twin-group covered counts - two states
  that agree on those counts are automorphic images of each other.

Both are disabled in counting mode, where every leaf must be visited.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

from .errors import BudgetExceededError
from .graph import Triangle, TriangleCover, TripartiteGraph, iter_bits, verify_cover

DEFAULT_NODE_BUDGET = 10**8

COVER = "cover"
NO_FACTOR = "nofactor"
BUDGET = "budget"


@dataclass
class SearchStats:
    nodes_expanded: int = 0
    max_depth: int = 0
    elapsed: float = 0.0


@dataclass
class ExactResult:
    status: str                      # COVER | NO_FACTOR | BUDGET
    cover: Optional[TriangleCover] = None
    count: Optional[int] = None
    stats: SearchStats = field(default_factory=SearchStats)


class _Budget(Exception):
    pass


class _Searcher:
    def __init__(self, g: TripartiteGraph, budget: int, count_mode: bool,
                 twin_pruning: bool):
        self.g = g
        self.n = g.n
        self.full = (1 << g.n) - 1
        self.budget = budget
        self.count_mode = count_mode
        self.twin_pruning = twin_pruning and not count_mode
        self.stats = SearchStats()
        r = g._rows
        self.r01, self.r02, self.r12 = r[(0, 1)], r[(0, 2)], r[(1, 2)]
        self.r10, self.r20, self.r21 = r[(1, 0)], r[(2, 0)], r[(2, 1)]
        self.count = 0
        self.solution: Optional[list[Triangle]] = None
        if self.twin_pruning:
            self.groups = self._twin_groups()
            self.failed: set = set()
        else:
            self.groups = None

    def _twin_groups(self) -> list[list[int]]:
        """groups[c][i] = twin id of vertex i of class c (identical rows)."""
        keysets = (
            [(self.r01[i], self.r02[i]) for i in range(self.n)],
            [(self.r10[i], self.r12[i]) for i in range(self.n)],
            [(self.r20[i], self.r21[i]) for i in range(self.n)],
        )
        out = []
        for keys in keysets:
            ids: dict = {}
            out.append([ids.setdefault(k, len(ids)) for k in keys])
        return out

    def _state_key(self, cov0: int, cov1: int, cov2: int):
        counts = []
        for c, cov in ((0, cov0), (1, cov1), (2, cov2)):
            gids = self.groups[c]
            cnt = [0] * (max(gids) + 1)
            for i in iter_bits(cov):
                cnt[gids[i]] += 1
            counts.append(tuple(cnt))
        return tuple(counts)

    def _completions(self, v0: int, cov1: int, cov2: int) -> int:
        total = 0
        free2 = ~cov2
        base2 = self.r02[v0] & free2 & self.full
        if not base2:
            return 0
        for v1 in iter_bits(self.r01[v0] & ~cov1 & self.full):
            total += (base2 & self.r12[v1]).bit_count()
        return total

    def _stuck_elsewhere(self, cov0: int, cov1: int, cov2: int) -> bool:
        """True if some uncovered class-1/2 vertex has no completion left."""
        free0 = ~cov0 & self.full
        free1 = ~cov1 & self.full
        free2 = ~cov2 & self.full
        for v1 in iter_bits(free1):
            row12 = self.r12[v1]
            for v0 in iter_bits(self.r10[v1] & free0):
                if self.r02[v0] & row12 & free2:
                    break
            else:
                return True
        for v2 in iter_bits(free2):
            row21 = self.r21[v2]
            for v0 in iter_bits(self.r20[v2] & free0):
                if self.r01[v0] & row21 & free1:
                    break
            else:
                return True
        return False

    def run(self) -> None:
        start = time.perf_counter()
        try:
            self._dfs(0, 0, 0, [])
        except _Budget:
            self.stats.elapsed = time.perf_counter() - start
            raise
        self.stats.elapsed = time.perf_counter() - start

    def _dfs(self, cov0: int, cov1: int, cov2: int, acc: list[Triangle]) -> bool:
        """Returns True when a perfect factor was found (and not counting)."""
        if cov0 == self.full:
            if self.count_mode:
                self.count += 1
                return False
            self.solution = list(acc)
            return True

        self.stats.nodes_expanded += 1
        if self.stats.nodes_expanded > self.budget:
            raise _Budget
        depth = len(acc)
        if depth > self.stats.max_depth:
            self.stats.max_depth = depth

        if self.twin_pruning:
            key = self._state_key(cov0, cov1, cov2)
            if key in self.failed:
                return False

        # fail-first: class-0 vertex with fewest remaining completions
        best_v0, best_cnt = -1, None
        for v0 in iter_bits(~cov0 & self.full):
            cnt = self._completions(v0, cov1, cov2)
            if cnt == 0:
                if self.twin_pruning:
                    self.failed.add(key)
                return False
            if best_cnt is None or cnt < best_cnt:
                best_v0, best_cnt = v0, cnt
                if cnt == 1:
                    break

        if self._stuck_elsewhere(cov0, cov1, cov2):
            if self.twin_pruning:
                self.failed.add(key)
            return False

        v0 = best_v0
        seen_pairs = set() if self.twin_pruning else None
        g1, g2 = (self.groups[1], self.groups[2]) if self.twin_pruning else (None, None)
        bit0 = 1 << v0
        base2 = self.r02[v0] & ~cov2 & self.full
        for v1 in iter_bits(self.r01[v0] & ~cov1 & self.full):
            opts2 = base2 & self.r12[v1]
            if not opts2:
                continue
            bit1 = 1 << v1
            for v2 in iter_bits(opts2):
                if seen_pairs is not None:
                    pk = (g1[v1], g2[v2])
                    if pk in seen_pairs:
                        continue
                    seen_pairs.add(pk)
                acc.append(Triangle(v0, v1, v2))
                if self._dfs(cov0 | bit0, cov1 | bit1, cov2 | (1 << v2), acc):
                    return True
                acc.pop()
        if self.twin_pruning:
            self.failed.add(key)
        return False


def exact_factor(g: TripartiteGraph, count_mode: bool = False,
                 budget: Optional[int] = None,
                 twin_pruning: bool = True) -> ExactResult:
    """Decide (or count) perfect triangle factors by exhaustive search.

    A COVER result always passes verify_cover; NO_FACTOR means the search
    space was exhausted.  Running out of the node budget is reported as the
    distinct BUDGET status, never as NO_FACTOR.
    """
    budget = DEFAULT_NODE_BUDGET if budget is None else budget
    s = _Searcher(g, budget, count_mode, twin_pruning)
    try:
        s.run()
    except _Budget:
        return ExactResult(BUDGET, stats=s.stats)
    if count_mode:
        status = COVER if s.count > 0 else NO_FACTOR
        return ExactResult(status, count=s.count, stats=s.stats)
    if s.solution is not None:
        cover = TriangleCover(s.solution)
        verdict = verify_cover(g, cover, require_perfect=True)
        assert verdict.ok, f"oracle produced an invalid cover: {verdict.reason}"
        return ExactResult(COVER, cover=cover, stats=s.stats)
    return ExactResult(NO_FACTOR, stats=s.stats)


def has_factor(g: TripartiteGraph, budget: Optional[int] = None) -> bool:
    res = exact_factor(g, budget=budget)
    if res.status == BUDGET:
        raise BudgetExceededError(f"node budget exhausted after {res.stats.nodes_expanded}")
    return res.status == COVER
