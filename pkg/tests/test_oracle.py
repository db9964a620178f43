"""Exact brute-force optima, cross-checks, and the packing normalizer."""

from fractions import Fraction

import pytest

from starpack.errors import NormalizationError, OracleSizeError
from starpack.generate import enumerate_connected_small, gnp
from starpack.graph import Graph
from starpack.model import KMT, KPLUS, SEQ, UNBOUNDED, Constraint, Packing, Star, validate
from starpack.oracle import (
    normalize_against,
    oracle_max_coverage_unmemoized,
    oracle_max_packing,
    ratio_of,
)

P5 = Graph(5, [(1, 2), (2, 3), (3, 4), (4, 5)])
C4 = Graph(4, [(1, 2), (2, 3), (3, 4), (4, 1)])
K13 = Graph(4, [(1, 2), (1, 3), (1, 4)])
K14 = Graph(5, [(1, 2), (1, 3), (1, 4), (1, 5)])

MODES = (Constraint(KPLUS, 2), Constraint(SEQ, 3), Constraint(KMT, 3, 2))


class TestOracle:
    def test_p5_two_plus(self):
        res = oracle_max_packing(P5, Constraint(KPLUS, 2))
        assert res.opt == 3

    def test_c4_two_plus(self):
        assert oracle_max_packing(C4, Constraint(KPLUS, 2)).opt == 3

    def test_k13_forbidden_three(self):
        assert oracle_max_packing(K13, Constraint(KMT, 4, 3)).opt == 3

    def test_witness_is_valid_and_tight(self):
        for c in MODES:
            res = oracle_max_packing(P5, c)
            assert validate(P5, res.witness, c) == []
            assert res.witness.coverage == res.opt

    def test_size_cap(self):
        big = Graph(20, [(i, i + 1) for i in range(1, 20)])
        with pytest.raises(OracleSizeError):
            oracle_max_packing(big, Constraint(KPLUS, 2))
        # explicit override lifts the cap
        assert oracle_max_packing(big, Constraint(KPLUS, 2), max_n=20).opt > 0

    def test_unbounded_modes(self):
        assert oracle_max_packing(K14, Constraint(SEQ, UNBOUNDED)).opt == 5
        assert oracle_max_packing(K14, Constraint(KMT, UNBOUNDED, 2)).opt == 5
        # forbidding exactly the 4-star costs one vertex on K_{1,4}
        assert oracle_max_packing(K14, Constraint(KMT, UNBOUNDED, 4)).opt == 4


class TestSelfCheck:
    def test_memoized_equals_unmemoized_exhaustive(self):
        for n in range(1, 5):
            for g in enumerate_connected_small(n):
                for c in MODES:
                    assert oracle_max_packing(g, c).opt == oracle_max_coverage_unmemoized(g, c)

    def test_memoized_equals_unmemoized_sampled(self):
        for i in range(12):
            g = gnp(7, 0.35, seed=424200 + i)
            for c in MODES:
                assert oracle_max_packing(g, c).opt == oracle_max_coverage_unmemoized(g, c)

    def test_edge_monotonicity(self):
        for i in range(25):
            g = gnp(7, 0.3, seed=515100 + i)
            non_edges = [
                (u, v)
                for u in range(1, 8)
                for v in range(u + 1, 8)
                if not g.has_edge(u, v)
            ]
            if not non_edges:
                continue
            g2 = Graph(g.n, list(g.edges) + [non_edges[i % len(non_edges)]])
            for c in MODES:
                assert oracle_max_packing(g2, c).opt >= oracle_max_packing(g, c).opt

    def test_kmt_opt_never_exceeds_seq_opt(self):
        for i in range(20):
            g = gnp(8, 0.3, seed=616100 + i)
            kmt = oracle_max_packing(g, Constraint(KMT, 3, 2)).opt
            seq = oracle_max_packing(g, Constraint(SEQ, 3)).opt
            assert kmt <= seq


class TestRatioOf:
    def test_values(self):
        assert ratio_of(3, 3) == Fraction(1)
        assert ratio_of(16, 7) == Fraction(16, 7)
        assert ratio_of(13, 10) == Fraction(13, 10)

    def test_zero_apx_with_positive_opt(self):
        with pytest.raises(ValueError):
            ratio_of(3, 0)

    def test_zero_over_zero_is_one(self):
        assert ratio_of(0, 0) == Fraction(1)


class TestNormalize:
    def test_identity_when_already_nested(self):
        base = Packing([Star(1, (2, 3, 4))])
        reference = Packing([Star(1, (2, 3, 4))])
        out = normalize_against(K14, base, reference, 3)
        assert [s for s in out] == [s for s in base]

    def test_single_swap(self):
        base = Packing([Star(1, (3, 4, 5))])        # leaf 2 left out
        reference = Packing([Star(1, (2, 3, 4))])   # leaf 5 left out
        out = normalize_against(K14, base, reference, 3)
        assert [s for s in out] == [Star(1, (2, 3, 4))]
        assert out.coverage == base.coverage

    def test_componentwise(self):
        g = Graph(10, [(1, 2), (1, 3), (1, 4), (1, 5), (6, 7), (6, 8), (6, 9), (6, 10)])
        base = Packing([Star(1, (3, 4, 5)), Star(6, (8, 9, 10))])
        reference = Packing([Star(1, (2, 3, 4)), Star(6, (7, 8, 9))])
        out = normalize_against(g, base, reference, 3)
        assert sorted(s.center for s in out) == [1, 6]
        assert out.coverage == 8
        uncovered = g.full_mask & ~out.covered_mask()
        ref_uncovered = g.full_mask & ~reference.covered_mask()
        assert uncovered & ~ref_uncovered == 0

    def test_uncovered_set_nests_after_normalization(self):
        # random spot checks: base from the exact subroutine, reference from the oracle
        from starpack.seq import solve_sequential_exact

        for i in range(15):
            g = gnp(8, 0.35, seed=717100 + i)
            base = solve_sequential_exact(g, 3)
            reference = oracle_max_packing(g, Constraint(KMT, 3, 2)).witness
            out = normalize_against(g, base, reference, 3)
            assert out.coverage == base.coverage
            assert validate(g, out) == []
            miss = g.full_mask & ~out.covered_mask()
            miss_ref = g.full_mask & ~reference.covered_mask()
            assert miss & ~miss_ref == 0

    def test_bad_first_stage_packing_detected(self):
        bad = Packing([Star(1, (2, 3))])           # not maximum: misses two leaves
        reference = Packing([Star(1, (2, 3, 4))])
        with pytest.raises(NormalizationError):
            normalize_against(K14, bad, reference, 3)
