"""Generators for the extremal families and benchmark instances.

Columns are 0-indexed internally: in the grid families below, column 0 of
gamma_k plays the special role (descriptions that start counting at 1
call it column 1).  Only the 3-class members downcast to TripartiteGraph; the
generators themselves emit a small abstract multi-class graph so the m x n /
k x k families can be stated in full generality.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from .errors import NotANonEdgeError
from .graph import TripartiteGraph, VertexRef, build_graph, iter_bits


Vertex = tuple[int, int]  # (class_id, index within class)


@dataclass
class MultiClassGraph:
    """Abstract graph on k vertex classes; edges only run between classes."""

    sizes: list[int]
    edges: set[frozenset]

    def add_edge(self, u: Vertex, v: Vertex) -> None:
        if u[0] == v[0]:
            raise ValueError("within-class edge")
        self.edges.add(frozenset((u, v)))

    def has_edge(self, u: Vertex, v: Vertex) -> bool:
        return frozenset((u, v)) in self.edges

    @property
    def num_classes(self) -> int:
        return len(self.sizes)

    def to_tripartite(self) -> TripartiteGraph:
        if self.num_classes != 3 or len(set(self.sizes)) != 1:
            raise ValueError("not a balanced 3-class graph")
        pairs = []
        for e in self.edges:
            u, v = sorted(e)
            pairs.append((VertexRef(*u), VertexRef(*v)))
        return build_graph(self.sizes[0], pairs)


def gen_theta(m: int, n: int) -> MultiClassGraph:
    """Grid graph on m classes of n: h_{i,j} ~ h_{i',j'} iff i != i' and j != j'.

    gen_theta(3, 2) is triangle-free; it is the extremal obstruction that the
    covering machinery has to recognize.
    """
    if m < 2 or n < 1:
        raise ValueError("need m >= 2, n >= 1")
    g = MultiClassGraph([n] * m, set())
    for i in range(m):
        for ip in range(i + 1, m):
            for j in range(n):
                for jp in range(n):
                    if j != jp:
                        g.add_edge((i, j), (ip, jp))
    return g


def gen_gamma(k: int) -> MultiClassGraph:
    """The gamma_k family on k classes of k vertices.

    h_{i,j} ~ h_{i',j'} iff i != i' and either (j != j' and one of j,j' lies
    in the first k-2 columns) or (j = j' and j is one of the last two
    columns).  For k = 3 the blow-ups gamma3(t) admit a perfect K_3 factor
    exactly when t is even.
    """
    if k < 3:
        raise ValueError("need k >= 3")
    special = {k - 2, k - 1}  # last two columns, 0-indexed
    g = MultiClassGraph([k] * k, set())
    for i in range(k):
        for ip in range(i + 1, k):
            for j in range(k):
                for jp in range(k):
                    if j != jp and (j not in special or jp not in special):
                        g.add_edge((i, j), (ip, jp))
                    elif j == jp and j in special:
                        g.add_edge((i, j), (ip, jp))
    return g


def blow_up(g, t: int):
    """Replace each vertex by t clones and each edge by a complete t x t
    bipartite graph.  Accepts either graph kind and returns the same kind."""
    if t < 1:
        raise ValueError("t must be >= 1")
    if isinstance(g, TripartiteGraph):
        base = MultiClassGraph([g.n] * 3, set())
        for u, v in g.edges():
            base.add_edge(tuple(u), tuple(v))
        blown, _ = _blow_up_multi(base, [[t] * g.n] * 3)
        return blown.to_tripartite()
    blown, _ = _blow_up_multi(g, [[t] * s for s in g.sizes])
    return blown


def _blow_up_multi(g: MultiClassGraph, cluster_sizes: list[list[int]]
                   ) -> tuple[MultiClassGraph, dict[Vertex, Vertex]]:
    """Blow up with per-vertex cluster sizes; returns (graph, clone -> base)."""
    offsets = []
    for c in range(g.num_classes):
        offs, acc = [], 0
        for s in cluster_sizes[c]:
            offs.append(acc)
            acc += s
        offsets.append((offs, acc))
    out = MultiClassGraph([offsets[c][1] for c in range(g.num_classes)], set())
    assignment: dict[Vertex, Vertex] = {}
    for c in range(g.num_classes):
        offs, _ = offsets[c]
        for j, s in enumerate(cluster_sizes[c]):
            for r in range(s):
                assignment[(c, offs[j] + r)] = (c, j)
    for e in g.edges:
        (cu, ju), (cv, jv) = sorted(e)
        ou, su = offsets[cu][0][ju], cluster_sizes[cu][ju]
        ov, sv = offsets[cv][0][jv], cluster_sizes[cv][jv]
        for a in range(su):
            for b in range(sv):
                out.add_edge((cu, ou + a), (cv, ov + b))
    return out, assignment


@dataclass
class ApproxBlowUp:
    """A perturbed blow-up together with its planted ground truth."""

    graph: object                      # TripartiteGraph for 3-class bases
    assignment: dict                   # clone vertex -> base vertex
    cluster_sizes: list[list[int]]
    realized_eps: float
    nonedge_densities: dict = field(default_factory=dict)

    @property
    def max_nonedge_density(self) -> Fraction:
        if not self.nonedge_densities:
            return Fraction(0)
        return max(self.nonedge_densities.values())


def approx_blow_up(g: MultiClassGraph, t: int, eps: float, delta_density: float,
                   seed: int) -> ApproxBlowUp:
    """(eps, delta)-approximate blow-up.

    Cluster sizes are drawn uniformly from the integers in
    [(1-eps)t, (1+eps)t]; when every class has the same number of base
    vertices the draw is adjusted so all class totals agree (the downstream
    graph type is balanced).  Model edges become complete bipartite blocks;
    model non-edges get independent noise edges with probability
    delta_density.  Realized per-pair densities are reported alongside so
    tests can assert against what actually happened, not the target.
    """
    if t < 1:
        raise ValueError("t must be >= 1")
    if not (0 <= eps < 1 and 0 <= delta_density <= 1):
        raise ValueError("bad noise parameters")
    rng = random.Random(f"approx-blow-up:{seed}")
    lo = max(1, _ceil_frac(Fraction(str(1 - eps)) * t))
    hi = max(lo, _floor_frac(Fraction(str(1 + eps)) * t))
    sizes = [[rng.randint(lo, hi) for _ in range(s)] for s in g.sizes]

    if len(set(g.sizes)) == 1:
        # equalize class totals so the result is balanced
        totals = [sum(row) for row in sizes]
        target = sorted(totals)[len(totals) // 2]
        target = min(max(target, g.sizes[0] * lo), g.sizes[0] * hi)
        for c, row in enumerate(sizes):
            while sum(row) > target:
                j = rng.randrange(len(row))
                if row[j] > lo:
                    row[j] -= 1
            while sum(row) < target:
                j = rng.randrange(len(row))
                if row[j] < hi:
                    row[j] += 1

    blown, assignment = _blow_up_multi(g, sizes)

    # noise on model non-edges (cross-class only)
    members: dict[Vertex, list[Vertex]] = {}
    for clone, base in assignment.items():
        members.setdefault(base, []).append(clone)
    densities = {}
    k = g.num_classes
    for c in range(k):
        for cp in range(c + 1, k):
            for j in range(g.sizes[c]):
                for jp in range(g.sizes[cp]):
                    if g.has_edge((c, j), (cp, jp)):
                        continue
                    added = 0
                    us, vs = members[(c, j)], members[(cp, jp)]
                    for u in us:
                        for v in vs:
                            if rng.random() < delta_density:
                                blown.add_edge(u, v)
                                added += 1
                    densities[((c, j), (cp, jp))] = Fraction(added, len(us) * len(vs))

    realized_eps = max(abs(s - t) / t for row in sizes for s in row) if t else 0.0
    graph = blown.to_tripartite() if (k == 3 and len(set(blown.sizes)) == 1) else blown
    return ApproxBlowUp(graph, assignment, sizes, realized_eps, densities)


def _ceil_frac(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def _floor_frac(x: Fraction) -> int:
    return x.numerator // x.denominator


# -- convenience 3-class instances ------------------------------------------


def theta32(t: int = 1) -> TripartiteGraph:
    return blow_up(gen_theta(3, 2), t).to_tripartite()


def theta33(t: int = 1) -> TripartiteGraph:
    return blow_up(gen_theta(3, 3), t).to_tripartite()


def gamma3(t: int = 1) -> TripartiteGraph:
    return blow_up(gen_gamma(3), t).to_tripartite()


def complete_tripartite(n: int) -> TripartiteGraph:
    g = TripartiteGraph.empty(n)
    full = (1 << n) - 1
    for key in g._rows:
        g._rows[key] = [full] * n
    return g


def grid_cluster_mask(t: int, col: int) -> int:
    """Index mask of column `col` inside any class of a t-blow-up of a
    3-column family (clusters are laid out contiguously by column)."""
    return ((1 << t) - 1) << (col * t)


def gen_random_min_degree(n: int, delta_frac: float, seed: int) -> TripartiteGraph:
    """Random instance satisfying min cross-degree >= ceil(delta_frac * n).

    Each cross pair starts as an Erdos-Renyi bipartite graph with edge
    probability delta_frac, then is greedily repaired: the most deficient
    vertex (lowest degree, ties by class then index) gets an edge to its
    lowest-degree non-neighbor.  Deterministic for a given seed.
    """
    if not 0 <= delta_frac <= 1:
        raise ValueError("delta_frac must be in [0,1]")
    rng = random.Random(f"random-min-degree:{seed}")
    target = _ceil_frac(Fraction(str(delta_frac)) * n)
    g = TripartiteGraph.empty(n)
    rows = g._rows
    for a, b in ((0, 1), (0, 2), (1, 2)):
        for i in range(n):
            for j in range(n):
                if rng.random() < delta_frac:
                    rows[(a, b)][i] |= 1 << j
                    rows[(b, a)][j] |= 1 << i
        full = (1 << n) - 1
        while True:
            worst, worst_key = None, None
            for side, (ca, cb) in enumerate(((a, b), (b, a))):
                for i in range(n):
                    d = rows[(ca, cb)][i].bit_count()
                    if d < target:
                        key = (d, ca, i)
                        if worst_key is None or key < worst_key:
                            worst_key, worst = key, (ca, cb, i)
            if worst is None:
                break
            ca, cb, i = worst
            non = full & ~rows[(ca, cb)][i]
            j = min(iter_bits(non), key=lambda j: (rows[(cb, ca)][j].bit_count(), j))
            rows[(ca, cb)][i] |= 1 << j
            rows[(cb, ca)][j] |= 1 << i
    return g


def mutate_add_edge(g: TripartiteGraph, u, v) -> TripartiteGraph:
    """Copy of g with the cross-class non-edge (u, v) added."""
    cu, iu = u
    cv, iv = v
    if cu == cv:
        raise NotANonEdgeError("endpoints lie in the same class")
    g._check_vertex(cu, iu)
    g._check_vertex(cv, iv)
    if g.has_edge(u, v):
        raise NotANonEdgeError(f"{u}-{v} is already an edge")
    return g.with_extra_edge(u, v)


def non_edges(g: TripartiteGraph) -> list[tuple[VertexRef, VertexRef]]:
    out = []
    for a, b in ((0, 1), (0, 2), (1, 2)):
        for i in range(g.n):
            row = g._rows[(a, b)][i]
            for j in range(g.n):
                if not row >> j & 1:
                    out.append((VertexRef(a, i), VertexRef(b, j)))
    return out
