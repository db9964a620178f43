"""Local search for packings of stars with at least k satellites."""

import pytest
from hypothesis import given, settings, strategies as st

from starpack.errors import IterationLimitError
from starpack.generate import gnp, pull_gadget
from starpack.graph import Graph, mask_of
from starpack.kplus import (
    COLLECT,
    GENERAL,
    PULL_K,
    PULL_K_KP1,
    PULL_KK,
    PULL_KKK,
    PULL_SAT,
    TWO_PLUS_EXTRA,
    collect,
    extend_centers,
    extraction_search,
    locally_optimal_violation,
    run_local_search_kplus,
    try_pull_kstar,
    try_pull_pair_k_big,
    try_pull_pair_kk,
    try_pull_satellite,
    try_pull_triple_kkk,
)
from starpack.model import KPLUS, Constraint, Packing, Star, rebuild_state, validate
from starpack.oracle import oracle_max_packing

P5 = Graph(5, [(1, 2), (2, 3), (3, 4), (4, 5)])
C6 = Graph(6, [(1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 1)])
K13 = Graph(4, [(1, 2), (1, 3), (1, 4)])
K15 = Graph(6, [(1, i) for i in range(2, 7)])


def fresh(g):
    return rebuild_state(g, Packing())


class TestCollect:
    def test_whole_star(self):
        state = fresh(K15)
        star = collect(state, 3, 1)
        assert star == Star(1, (2, 3, 4, 5, 6))
        assert state.coverage == 6

    def test_p5_interior(self):
        state = fresh(P5)
        star = collect(state, 2, 2)
        assert star == Star(2, (1, 3))
        assert sorted(v for v in range(1, 6) if state.rem >> v & 1) == [4, 5]

    def test_c6_two_collects(self):
        state = fresh(C6)
        collect(state, 2, 1)
        collect(state, 2, 4)
        assert state.coverage == 6
        assert oracle_max_packing(C6, Constraint(KPLUS, 2)).opt == 6

    def test_degree_too_small_rejected(self):
        state = fresh(P5)
        with pytest.raises(AssertionError):
            collect(state, 2, 1)  # endpoint has remainder degree 1

    def test_covered_vertex_rejected(self):
        state = fresh(P5)
        collect(state, 2, 2)
        with pytest.raises(AssertionError):
            collect(state, 2, 3)


class TestExtendCenters:
    def test_no_neighbor_to_absorb(self):
        g = Graph(4, [(1, 2), (2, 3), (3, 4)])
        state = rebuild_state(g, Packing([Star(2, (1, 3))]))
        assert extend_centers(state) == 0

    def test_absorbs_into_star(self):
        state = rebuild_state(K13, Packing([Star(1, (2, 3))]))
        assert extend_centers(state) == 1
        assert state.packing.stars[0] == Star(1, (2, 3, 4))

    def test_empty_remainder(self):
        state = rebuild_state(K13, Packing([Star(1, (2, 3, 4))]))
        assert extend_centers(state) == 0


class TestExtractionSearch:
    def test_single_collect_reachable(self):
        state = fresh(P5)
        gain, plan = extraction_search(state, 2, mask_of([2]))
        assert gain >= 3 and plan

    def test_barren_seed(self):
        g = Graph(4, [(1, 2), (2, 3), (3, 4)])
        state = rebuild_state(g, Packing([Star(2, (1, 3))]))
        # vertex 4 sees only a satellite, and its remainder degree is below k
        gain, plan = extraction_search(state, 2, mask_of([4]))
        assert (gain, plan) == (0, ())

    def test_pure_extend_counted(self):
        # a seed vertex adjacent to an internal center is recovered by the
        # closing extend pass even with no collect available
        state = rebuild_state(K13, Packing([Star(1, (2, 3))]))
        gain, plan = extraction_search(state, 2, mask_of([4]))
        assert (gain, plan) == (1, ())

    def test_two_disjoint_stars_found(self):
        # the trade shape: freed 4-star plus one freed satellite of the big
        # star admits two fresh 4-stars centered at the outside hubs 7 and 12
        g = pull_gadget(4, "k_kp1")
        state = rebuild_state(g, Packing([Star(1, (3, 4, 5, 6)), Star(2, (7, 8, 9, 10, 11))]))
        state.remove_star(0)
        state.replace_star(0, Star(2, (8, 9, 10, 11)))
        gain, plan = extraction_search(state, 4, mask_of([1, 3, 4, 5, 6, 7]))
        assert gain == 10
        assert sorted(plan) == [7, 12]


class TestPullSatellite:
    def test_accepts_with_pendant_pair(self):
        g = Graph(7, [(1, 2), (1, 3), (1, 4), (1, 5), (2, 6), (2, 7)])
        state = rebuild_state(g, Packing([Star(1, (2, 3, 4, 5))]))
        ev = try_pull_satellite(state, 2, 0, 2)
        assert ev is not None and ev.kind == PULL_SAT
        assert state.coverage == 7
        assert sorted((s.center, s.satellites) for s in state.packing) == [
            (1, (3, 4, 5)),
            (2, (6, 7)),
        ]
        assert oracle_max_packing(g, Constraint(KPLUS, 2)).opt == 7

    def test_rejects_without_outside_material(self):
        state = rebuild_state(K13, Packing([Star(1, (2, 3, 4))]))
        before = state.snapshot()
        for v in (2, 3, 4):
            assert try_pull_satellite(state, 2, 0, v) is None
        assert state.snapshot() == before

    def test_accepts_next_to_outside_small_star(self):
        # k=3: satellite 2 is adjacent to the hub of an outside 2-star, so
        # pulling it yields a fresh 3-star with 2 riding as a satellite
        g = Graph(8, [(1, 2), (1, 3), (1, 4), (1, 5), (2, 6), (6, 7), (6, 8)])
        state = rebuild_state(g, Packing([Star(1, (2, 3, 4, 5))]))
        ev = try_pull_satellite(state, 3, 0, 2)
        assert ev is not None
        assert Star(6, (2, 7, 8)) in state.packing.stars
        assert state.coverage == 8

    def test_precondition_star_too_small(self):
        state = rebuild_state(K13, Packing([Star(1, (2, 3))]))
        with pytest.raises(AssertionError):
            try_pull_satellite(state, 2, 0, 2)


class TestPullKStar:
    def test_p5_rejects(self):
        state = rebuild_state(P5, Packing([Star(2, (1, 3))]))
        assert try_pull_kstar(state, 2, 0) is None
        assert state.packing.stars == [Star(2, (1, 3))]

    def test_accepts_satellite_with_k_uncovered(self):
        g = Graph(5, [(1, 2), (1, 3), (2, 4), (2, 5)])
        state = rebuild_state(g, Packing([Star(1, (2, 3))]))
        ev = try_pull_kstar(state, 2, 0)
        assert ev is not None and ev.kind == PULL_K
        assert ev.after >= ev.before + 1
        assert state.packing.stars == [Star(2, (1, 4, 5))]

    def test_accepts_two_disjoint_replacements(self):
        g = Graph(
            10,
            [(1, 2), (1, 3), (1, 4), (2, 5), (5, 6), (5, 7), (3, 8), (8, 9), (8, 10)],
        )
        state = rebuild_state(g, Packing([Star(1, (2, 3, 4))]))
        ev = try_pull_kstar(state, 3, 0)
        assert ev is not None
        assert state.coverage == 8
        assert sorted(s.center for s in state.packing) == [5, 8]

    def test_precondition_wrong_size(self):
        state = rebuild_state(K13, Packing([Star(1, (2, 3, 4))]))
        with pytest.raises(AssertionError):
            try_pull_kstar(state, 2, 0)


class TestPullPairKBig:
    def setup_k_kp1(self, k):
        g = pull_gadget(k, "k_kp1")
        if k == 4:
            packing = Packing([Star(1, (3, 4, 5, 6)), Star(2, (7, 8, 9, 10, 11))])
        else:
            packing = Packing([Star(1, (3, 4)), Star(2, (5, 6, 7))])
        return g, rebuild_state(g, packing)

    def test_k_kp1_gadget_k4_accepts(self):
        g, state = self.setup_k_kp1(4)
        ev = try_pull_pair_k_big(state, 4, 0, 1, 7)
        assert ev is not None and ev.kind == PULL_K_KP1
        centers = sorted(s.center for s in state.packing)
        assert 7 in centers and 12 in centers
        assert state.coverage == 15

    def test_k_kp1_gadget_k2_gain(self):
        g, state = self.setup_k_kp1(2)
        before = state.coverage
        ev = try_pull_pair_k_big(state, 2, 0, 1, 5)
        assert ev is not None
        assert state.coverage - before >= 2

    def test_disjoint_components_reject(self):
        g = Graph(8, [(1, 2), (1, 3), (4, 5), (4, 6), (4, 7), (4, 8)])
        state = rebuild_state(g, Packing([Star(1, (2, 3)), Star(4, (5, 6, 7, 8))]))
        before = state.snapshot()
        for v in (5, 6, 7, 8):
            assert try_pull_pair_k_big(state, 2, 0, 1, v) is None
        assert state.snapshot() == before

    def test_preconditions(self):
        g, state = self.setup_k_kp1(4)
        with pytest.raises(AssertionError):
            try_pull_pair_k_big(state, 4, 1, 0, 3)  # first star is not the k-star


class TestPullPairKK:
    def test_kk_gadget_k4_accepts(self):
        g = pull_gadget(4, "kk")
        state = rebuild_state(g, Packing([Star(1, (3, 4, 5, 6)), Star(2, (7, 8, 9, 10))]))
        ev = try_pull_pair_kk(state, 4, 0, 1)
        assert ev is not None and ev.kind == PULL_KK
        assert state.coverage == 11
        sizes = sorted(s.size for s in state.packing)
        assert sizes == [4, 5]

    def test_kk_gadget_k2_gain_one(self):
        g = pull_gadget(2, "kk")
        state = rebuild_state(g, Packing([Star(1, (3, 4)), Star(2, (5, 6))]))
        before = state.coverage
        ev = try_pull_pair_kk(state, 2, 0, 1)
        assert ev is not None
        assert state.coverage == before + 1

    def test_saturated_pair_rejects(self):
        g = Graph(6, [(1, 2), (1, 3), (4, 5), (4, 6)])
        state = rebuild_state(g, Packing([Star(1, (2, 3)), Star(4, (5, 6))]))
        assert try_pull_pair_kk(state, 2, 0, 1) is None

    def test_preconditions(self):
        g = Graph(6, [(1, 2), (1, 3), (4, 5), (4, 6)])
        state = rebuild_state(g, Packing([Star(1, (2, 3)), Star(4, (5, 6))]))
        with pytest.raises(AssertionError):
            try_pull_pair_kk(state, 3, 0, 1)  # both stars are 2-stars, not 3-stars


class TestPullTripleKKK:
    def test_kkk_gadget_accepts(self):
        g = pull_gadget(2, "kkk")
        state = rebuild_state(
            g, Packing([Star(1, (4, 5)), Star(2, (6, 7)), Star(3, (8, 9))])
        )
        before = state.coverage
        ev = try_pull_triple_kkk(state, 2, 0, 1, 2)
        assert ev is not None and ev.kind == PULL_KKK
        assert state.coverage == 10 and before == 9
        sizes = sorted(s.size for s in state.packing)
        assert sizes[:2] == [2, 2] and sizes[2] >= 3

    def test_remote_triple_rejects(self):
        g = Graph(9, [(1, 2), (1, 3), (4, 5), (4, 6), (7, 8), (7, 9)])
        state = rebuild_state(
            g, Packing([Star(1, (2, 3)), Star(4, (5, 6)), Star(7, (8, 9))])
        )
        assert try_pull_triple_kkk(state, 2, 0, 1, 2) is None

    def test_k_not_two_rejected(self):
        state = rebuild_state(K15, Packing([Star(1, (2, 3, 4))]))
        with pytest.raises(ValueError):
            try_pull_triple_kkk(state, 3, 0, 0, 0)

    def test_accepted_calls_strictly_gain(self):
        g = pull_gadget(2, "kkk")
        state = rebuild_state(
            g, Packing([Star(1, (4, 5)), Star(2, (6, 7)), Star(3, (8, 9))])
        )
        ev = try_pull_triple_kkk(state, 2, 0, 1, 2)
        assert ev.after >= ev.before + 1


class TestRunner:
    def test_k13(self):
        p, rep = run_local_search_kplus(K13, 2, GENERAL)
        assert p.coverage == 4
        assert rep.kinds() == [COLLECT]

    def test_p5_both_variants(self):
        for variant in (GENERAL, TWO_PLUS_EXTRA):
            p, rep = run_local_search_kplus(P5, 2, variant)
            assert p.coverage == 3
            assert validate(P5, p, Constraint(KPLUS, 2)) == []

    def test_gadget_traces(self):
        expectations = [
            (2, "k_kp1", GENERAL, PULL_K_KP1, 9),
            (2, "kk", GENERAL, PULL_KK, 7),
            (4, "k_kp1", GENERAL, PULL_K_KP1, 15),
            (4, "kk", GENERAL, PULL_KK, 11),
            (2, "kkk", TWO_PLUS_EXTRA, PULL_KKK, 10),
        ]
        for k, which, variant, kind, cov in expectations:
            g = pull_gadget(k, which)
            p, rep = run_local_search_kplus(g, k, variant, shadow_check=True)
            assert kind in rep.kinds(), (which, k)
            assert p.coverage == cov, (which, k)
            assert p.coverage == oracle_max_packing(g, Constraint(KPLUS, k), max_n=18).opt

    def test_trace_shape(self):
        g = pull_gadget(2, "k_kp1")
        p, rep = run_local_search_kplus(g, 2, GENERAL)
        assert rep.iterations == len(rep.trace)
        cov = 0
        for ev in rep.trace:
            assert ev.before == cov
            assert ev.after > ev.before
            cov = ev.after
        assert cov == p.coverage

    def test_bad_parameters(self):
        with pytest.raises(ValueError):
            run_local_search_kplus(P5, 1, GENERAL)
        with pytest.raises(ValueError):
            run_local_search_kplus(P5, 3, TWO_PLUS_EXTRA)
        with pytest.raises(ValueError):
            run_local_search_kplus(P5, 2, "bogus")

    def test_iteration_cap(self):
        with pytest.raises(IterationLimitError):
            run_local_search_kplus(P5, 2, GENERAL, max_iters=0)

    def test_results_validate_and_bound_holds(self):
        for i in range(15):
            g = gnp(8, 0.35, seed=121200 + i)
            for k in (2, 3):
                p, rep = run_local_search_kplus(g, k, GENERAL)
                assert validate(g, p, Constraint(KPLUS, k)) == []
                opt = oracle_max_packing(g, Constraint(KPLUS, k)).opt
                num = (k + 1) * (k + 1)
                den = 2 * k + 1
                assert opt * den <= num * p.coverage
                assert rep.iterations <= g.n

    def test_no_pending_operation_at_exit(self):
        for i in range(12):
            g = gnp(8, 0.4, seed=131300 + i)
            p, _ = run_local_search_kplus(g, 2, TWO_PLUS_EXTRA)
            assert locally_optimal_violation(g, p, 2, TWO_PLUS_EXTRA) is None


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(5, 9), st.sampled_from([2, 3]))
def test_shadow_state_matches_rebuild(seed, n, k):
    g = gnp(n, 0.4, seed)
    p, _ = run_local_search_kplus(g, k, GENERAL, shadow_check=True)
    assert validate(g, p, Constraint(KPLUS, k)) == []
