"""Cover pipeline: easy cover, greedy, augmentation, solve, reduction."""

import pytest

from trifactor.config import Config
from trifactor.cover import (
    AugmentState,
    Extreme,
    Improved,
    augment_once,
    easy_cover,
    finish_extreme_witness,
    greedy_partial_cover,
    reduce_mod3,
    solve,
)
from trifactor.errors import (
    PreconditionDegreeError,
    PreconditionDivisibilityError,
    PreconditionViolatedError,
)
from trifactor.exact import COVER, exact_factor
from trifactor.families import (
    complete_tripartite,
    gamma3,
    gen_random_min_degree,
    theta32,
)
from trifactor.graph import Triangle, TriangleCover, build_graph, verify_cover


def all_cross_edges(n, skip=lambda a, b, i, j: False):
    out = []
    for a, b in ((0, 1), (0, 2), (1, 2)):
        for i in range(n):
            for j in range(n):
                if not skip(a, b, i, j):
                    out.append(((a, i), (b, j)))
    return out


def blocked_theta_pads(q, p):
    """Theta columns of size q (cross-column complete) plus p pad vertices
    per class, complete to the theta part, all other pairs void.  The only
    triangles use exactly one pad, so the maximum cover size is 3p."""
    n = 2 * q + p
    edges = []
    for a in range(3):
        for b in range(a + 1, 3):
            for i in range(q):
                for j in range(q):
                    edges.append(((a, i), (b, q + j)))
                    edges.append(((a, q + i), (b, j)))
            for i in range(p):
                for j in range(2 * q):
                    edges.append(((a, 2 * q + i), (b, j)))
                    edges.append(((a, j), (b, 2 * q + i)))
    return build_graph(n, edges)


# -- easy_cover --------------------------------------------------------------


def test_easy_cover_complete():
    g = complete_tripartite(4)
    c = easy_cover(g)
    assert c.size == 4
    assert verify_cover(g, c, require_perfect=True).ok


def test_easy_cover_k8_minus_matching():
    # remove a perfect matching between classes 1 and 2: min degree 7 >= 6
    g = build_graph(8, all_cross_edges(8, skip=lambda a, b, i, j:
                                       (a, b) == (1, 2) and i == j))
    assert g.min_cross_degree() == 7
    c = easy_cover(g)
    assert verify_cover(g, c, require_perfect=True).ok


def test_easy_cover_gate():
    # one vertex one edge short of ceil(3M/4)
    n = 8
    need = 6
    g = build_graph(n, all_cross_edges(n, skip=lambda a, b, i, j:
                                       (a, b) == (0, 1) and i == 0 and j >= need - 1))
    assert g.cross_degree((0, 0), 1) == need - 1
    with pytest.raises(PreconditionDegreeError):
        easy_cover(g)


@pytest.mark.parametrize("n", [8, 12, 16])
@pytest.mark.parametrize("seed", range(5))
def test_easy_cover_random(n, seed):
    g = gen_random_min_degree(n, 0.75, seed)
    c = easy_cover(g)
    assert verify_cover(g, c, require_perfect=True).ok


# -- greedy ------------------------------------------------------------------


def test_greedy_triangle_free_empty():
    assert greedy_partial_cover(theta32(2), 0).size == 0


@pytest.mark.parametrize("n", range(2, 11))
def test_greedy_complete_perfect(n):
    g = complete_tripartite(n)
    c = greedy_partial_cover(g, seed=1)
    assert c.size == n
    assert verify_cover(g, c, require_perfect=True).ok


def test_greedy_deterministic_per_seed():
    g = gen_random_min_degree(9, 0.7, 4)
    assert greedy_partial_cover(g, 7).triangles == greedy_partial_cover(g, 7).triangles


def test_greedy_is_maximal():
    g = gen_random_min_degree(9, 0.6, 8)
    c = greedy_partial_cover(g, 3)
    masks = [c.uncovered_mask(g.n, cl) for cl in range(3)]
    assert g.find_triangle(*masks) is None


# -- augment_once ------------------------------------------------------------


def test_augment_direct_extension():
    g = complete_tripartite(6)
    cover = TriangleCover([Triangle(0, 0, 0), Triangle(1, 1, 1)])
    out = augment_once(g, AugmentState.from_cover(g, cover), Config())
    assert isinstance(out, Improved)
    assert out.cover.size == 3
    assert out.replaced == 1


def test_augment_preconditions():
    g = complete_tripartite(4)
    cover = TriangleCover([Triangle(0, 0, 0)])
    with pytest.raises(PreconditionViolatedError):
        # only 3 uncovered per class
        augment_once(g, AugmentState.from_cover(g, cover), Config())
    g = theta32(3)  # min degree t = half of the requirement
    with pytest.raises(PreconditionViolatedError):
        augment_once(g, AugmentState.from_cover(g, TriangleCover([])), Config())


def test_augment_loop_improves_until_extreme():
    """On the padded-columns graph the maximum cover leaves 6 uncovered per
    class, so augmentation must end in a certified extreme triple."""
    cfg = Config(eps_prime=0.08)
    g = blocked_theta_pads(6, 3)   # N = 15, max cover 9
    cover = greedy_partial_cover(g, 0)
    saw_extreme = False
    while cover.size < g.n - 3 and \
            min(cover.uncovered_mask(g.n, c).bit_count() for c in range(3)) >= 4:
        out = augment_once(g, AugmentState.from_cover(g, cover), cfg)
        if isinstance(out, Improved):
            assert out.cover.size == cover.size + 1
            assert out.replaced <= 15
            cover = out.cover
            continue
        assert isinstance(out, Extreme)
        w = out.witness
        assert [len(s) for s in w.sets] == [5, 5, 5]
        assert all(d <= cfg.delta0_frac for d in w.densities)
        assert w.recheck(g) == w.densities
        saw_extreme = True
        break
    assert saw_extreme
    assert cover.size == 9  # the true maximum


def test_augment_improves_padded_instance_with_factor():
    """Balanced pads admit a perfect cover; every augmentation step must
    strictly improve within the 15-replacement budget (or legitimately
    certify an extreme triple, which the step's contract also allows)."""
    cfg = Config()
    g = blocked_theta_pads(4, 4)   # N = 12, perfect covers exist
    assert exact_factor(g).status == COVER
    cover = greedy_partial_cover(g, 1)
    while cover.size < g.n:
        if cover.size >= g.n - 3 or \
                min(cover.uncovered_mask(g.n, c).bit_count() for c in range(3)) < 4:
            res = exact_factor(g)
            cover = res.cover
            break
        out = augment_once(g, AugmentState.from_cover(g, cover), cfg)
        if isinstance(out, Improved):
            assert out.cover.size > cover.size
            assert out.replaced <= 15
            cover = out.cover
        elif isinstance(out, Extreme):
            assert all(d <= cfg.delta0_frac for d in out.witness.densities)
            cover = exact_factor(g).cover
            break
        else:
            cover = exact_factor(g).cover
            break
    assert verify_cover(g, cover, require_perfect=True).ok


def test_finish_extreme_witness_certifies_or_rejects():
    cfg = Config()
    g = blocked_theta_pads(6, 3)
    # the three column-1 sets are pairwise void
    col1 = sum(1 << (6 + i) for i in range(6))
    w = finish_extreme_witness(g, (col1, col1, col1), cfg)
    assert w is not None
    assert all(d == 0 for d in w.densities)
    # a dense triple cannot certify
    g2 = complete_tripartite(6)
    full = (1 << 6) - 1
    assert finish_extreme_witness(g2, (full, full, full), cfg) is None


# -- solve -------------------------------------------------------------------


def test_solve_easy_path():
    out = solve(complete_tripartite(5))
    assert out.kind == "cover" and out.source == "easy"


def test_solve_gamma3_odd_is_oracle_confirmed_nofactor():
    out = solve(gamma3(3))
    assert out.kind == "nofactor"
    assert out.source == "exact-oracle"


def test_solve_never_contradicts_oracle_mini_sweep():
    cfg = Config()
    checked = 0
    for n in (6, 9, 12):
        for frac in (0.5, 2 / 3, 0.75, 0.9):
            for seed in range(4):
                g = gen_random_min_degree(n, frac, seed)
                out = solve(g, cfg.with_seed(seed))
                want = exact_factor(g).status == COVER
                assert out.has_factor_decision() == want, (n, frac, seed)
                if out.cover is not None:
                    assert verify_cover(g, out.cover, require_perfect=True).ok
                checked += 1
    assert checked == 48


def test_solve_steps_strictly_increase():
    cfg = Config()
    for seed in range(6):
        g = gen_random_min_degree(12, 2 / 3, seed)
        out = solve(g, cfg.with_seed(seed))
        for s in out.steps:
            assert s.new_size == s.old_size + 1
            assert s.replaced <= 15


def test_solve_constructive_mode_never_uses_oracle():
    g = gamma3(3)
    out = solve(g, Config(), mode="constructive")
    assert out.kind in ("extreme", "indeterminate")


def test_solve_exact_mode():
    out = solve(gamma3(2), Config(), mode="exact")
    assert out.kind == "cover" and out.source == "exact-oracle"


# -- reduce_mod3 -------------------------------------------------------------


def test_reduce_requires_nondivisible():
    with pytest.raises(PreconditionDivisibilityError):
        reduce_mod3(complete_tripartite(3))


def test_reduce_requires_degree():
    g = gen_random_min_degree(10, 0.3, 0)
    if g.min_cross_degree() >= 7:
        pytest.skip("random repair overshot the floor")
    with pytest.raises(PreconditionDegreeError):
        reduce_mod3(g)


def test_reduce_k4():
    g = complete_tripartite(4)
    red = reduce_mod3(g)
    assert len(red.removed) == 1
    assert red.graph.n == 3
    assert red.graph.min_cross_degree() >= 2
    out = solve(g)
    assert out.kind == "cover" and out.cover.size == 4


@pytest.mark.parametrize("n", [10, 11])
@pytest.mark.parametrize("seed", range(5))
def test_reduce_end_to_end(n, seed):
    g = gen_random_min_degree(n, 0.7, seed)
    removed = n % 3
    red = reduce_mod3(g)
    assert len(red.removed) == removed
    assert red.graph.min_cross_degree() >= 2 * (n // 3)
    out = solve(g, Config().with_seed(seed))
    want = exact_factor(g).status == COVER
    assert out.has_factor_decision() == want
    if out.cover:
        assert verify_cover(g, out.cover, require_perfect=True).ok


def test_reduction_swap_on_augmented_gamma():
    """A gamma3(3) blow-up plus one universal vertex per class: the removed
    triangle is forced through the universal vertices whenever the reduced
    graph must be the exceptional odd gamma."""
    base = gamma3(3)
    n = base.n + 1
    edges = [((u.class_id, u.index), (v.class_id, v.index))
             for u, v in base.edges()]
    for a in range(3):
        for b in range(3):
            if a < b:
                for j in range(n):
                    edges.append(((a, base.n), (b, j)))
                    if j < base.n:
                        edges.append(((a, j), (b, base.n)))
    g = build_graph(n, edges)
    assert g.min_cross_degree() >= -(-2 * n // 3)
    out = solve(g)
    assert out.kind == "cover"
    assert verify_cover(g, out.cover, require_perfect=True).ok


def test_solve_budget_exhaustion_is_indeterminate():
    # constructive paths are skipped at this density, and the tiny budget
    # makes the oracle fallback indeterminate rather than wrong
    g = gen_random_min_degree(9, 0.5, 0)
    out = solve(g, Config(), budget=1)
    assert out.kind == "indeterminate"
    assert out.reason == "budget"


def test_solve_reports_extreme_above_oracle_range():
    # N = 18 > exact_limit: the padded-columns obstruction cannot be decided
    # exactly, so solve must surface the certified extreme witness itself
    cfg = Config(eps_prime=0.06, exact_limit=15)
    g = blocked_theta_pads(7, 4)  # N = 18, max cover 12
    out = solve(g, cfg)
    assert out.kind == "extreme"
    assert out.witness is not None
    assert all(d < cfg.delta0_frac for d in out.witness.densities)
    assert [len(s) for s in out.witness.sets] == [6, 6, 6]
