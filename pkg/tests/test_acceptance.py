"""Full-scale certification of every proven guarantee over the reference
corpora: exact ratio thresholds, exit and progress invariants, the exact
subroutine, gadget activation and the oracle self-check.

Each criterion prints one verdict line even when it passes.  The canonical
corpora (every labeled connected graph on up to 7 vertices plus the seeded
random batches) take most of an hour on one core; set STARPACK_ACCEPT_FAST=1
for a reduced, NON-CANONICAL corpus while iterating.
"""

import os
from fractions import Fraction

import pytest

from starpack.audit import (
    ratio_kmt,
    ratio_kplus,
    sweep_gadgets,
    sweep_kmt,
    sweep_kplus,
    sweep_oracle_selfcheck,
    sweep_seq,
)
from starpack.kplus import GENERAL, TWO_PLUS_EXTRA
from starpack.model import UNBOUNDED

pytestmark = pytest.mark.acceptance

FAST = bool(os.environ.get("STARPACK_ACCEPT_FAST"))
MAX_N = 6 if FAST else 7
GNP_COUNT = 150 if FAST else 2000
SEQ_COUNT = 150 if FAST else 1000
ORACLE_SCALE = (
    dict(max_n=5, sample_count=40, mono_count=100) if FAST
    else dict(max_n=6, sample_count=200, mono_count=500)
)

# 1 + 1 + 4 + 38 + 728 + 26704 + 1866256 labeled connected graphs on 1..7
# vertices, plus the 2000-instance seeded batch.
FULL_CORPUS = 1893732 + 2000


@pytest.fixture(scope="module")
def kplus():
    return sweep_kplus(max_n=MAX_N, gnp_count=GNP_COUNT, progress_every=200000)


@pytest.fixture(scope="module")
def kmt():
    return sweep_kmt(max_n=MAX_N, gnp_count=GNP_COUNT, progress_every=200000)


@pytest.fixture(scope="module")
def seq():
    return sweep_seq(count=SEQ_COUNT)


@pytest.fixture(scope="module")
def gadgets():
    return sweep_gadgets()


@pytest.fixture(scope="module")
def oracle():
    return sweep_oracle_selfcheck(**ORACLE_SCALE)


def frtext(fr: Fraction) -> str:
    return str(fr)


def ktext(k) -> str:
    return "inf" if k is UNBOUNDED else str(k)


def emit(capsys, num: int, label: str, ok: bool, detail: str) -> None:
    mode = " [FAST corpus, non-canonical]" if FAST else ""
    with capsys.disabled():
        print(f"[acceptance {num}] {label}: {'PASS' if ok else 'FAIL'} -- {detail}{mode}",
              flush=True)


def corpus_note(tally) -> str:
    return f"{tally.instances} instances, {tally.wall_seconds / 60:.1f} min"


class TestCoverageSearch:
    def test_criterion_1_ratio_bounds(self, kplus, capsys):
        pairs = [(k, kplus.max_ratio.get((k, GENERAL), Fraction(0)), ratio_kplus(k, GENERAL))
                 for k in (2, 3, 4)]
        ok = (kplus.violations("ratio/general", "validate") == 0
              and all(worst <= bound for _, worst, bound in pairs)
              and (FAST or kplus.instances == FULL_CORPUS))
        detail = ", ".join(f"k={k} worst {frtext(w)} of {frtext(b)}" for k, w, b in pairs)
        emit(capsys, 1, "coverage-search ratio bounds (9/5, 16/7, 25/9)", ok,
             f"{detail}; {corpus_note(kplus)}")
        assert ok, (pairs, kplus.samples)

    def test_criterion_2_ratio_bound_triple_pull_variant(self, kplus, capsys):
        worst = kplus.max_ratio.get((2, TWO_PLUS_EXTRA), Fraction(0))
        ok = (kplus.violations("ratio/two_plus_extra") == 0
              and worst <= Fraction(3, 2)
              and (FAST or kplus.instances == FULL_CORPUS))
        emit(capsys, 2, "k=2 variant ratio bound (3/2)", ok,
             f"worst {frtext(worst)} of 3/2; {corpus_note(kplus)}")
        assert ok, (worst, kplus.samples)

    def test_criterion_4_exit_invariants(self, kplus, capsys):
        bad = kplus.violations("exit", "local_opt")
        emit(capsys, 4, "coverage-search exit invariants", bad == 0,
             f"{bad} violations over {kplus.runs} runs; {corpus_note(kplus)}")
        assert bad == 0, kplus.samples


class TestAvoidingSearch:
    def test_criterion_3_ratio_bounds(self, kmt, capsys):
        pairs = [(config, kmt.max_ratio.get(config, Fraction(0)), ratio_kmt(*config))
                 for config in ((3, 2), (4, 2), (4, 3), (5, 3), (UNBOUNDED, 2), (UNBOUNDED, 3))]
        ok = (kmt.violations("ratio", "validate") == 0
              and all(worst <= bound for _, worst, bound in pairs)
              and (FAST or kmt.instances == FULL_CORPUS))
        detail = ", ".join(f"k={ktext(k)},t={t} worst {frtext(w)} of {frtext(b)}"
                           for (k, t), w, b in pairs)
        emit(capsys, 3, "size-t-avoiding ratio bounds (13/10, 17/13, 21/17, 26/21, 5/4, 6/5)",
             ok, f"{detail}; {corpus_note(kmt)}")
        assert ok, (pairs, kmt.samples)

    def test_criterion_5_anchor_and_exit_invariants(self, kmt, capsys):
        bad = kmt.violations("anchor", "exit", "trace", "local_opt")
        emit(capsys, 5, "size-t-avoiding anchor/exit invariants", bad == 0,
             f"{bad} violations over {kmt.runs} runs; {corpus_note(kmt)}")
        assert bad == 0, kmt.samples


class TestExactSubroutine:
    def test_criterion_6_exact_equality(self, seq, capsys):
        ok = seq.violations() == 0 and (FAST or seq.instances == 1000)
        emit(capsys, 6, "exact subroutine equals reference optimum", ok,
             f"{seq.violations()} mismatches over {seq.runs} runs; {corpus_note(seq)}")
        assert ok, seq.samples


class TestProgress:
    def test_criterion_7_dominance_and_progress(self, kplus, kmt, capsys):
        bad = kplus.violations("progress") + kmt.violations("dominance")
        emit(capsys, 7, "strict progress and dominance over the plain trim", bad == 0,
             f"{kplus.violations('progress')} progress / "
             f"{kmt.violations('dominance')} dominance violations over "
             f"{kplus.runs + kmt.runs} runs")
        assert bad == 0, (kplus.samples, kmt.samples)


class TestGadgets:
    def test_criterion_8_gadget_activation(self, gadgets, capsys):
        ok = gadgets.violations() == 0 and gadgets.instances == 11
        emit(capsys, 8, "every pull/revise operation fires on its gadget at the optimum",
             ok, f"{gadgets.violations()} violations over {gadgets.instances} gadgets")
        assert ok, gadgets.samples


class TestOracleSelfCheck:
    def test_criterion_9_oracle_self_check(self, oracle, capsys):
        ok = oracle.violations() == 0
        emit(capsys, 9, "oracle twin-route agreement and edge monotonicity", ok,
             f"{oracle.violations()} violations over {oracle.runs} runs; {corpus_note(oracle)}")
        assert ok, oracle.samples
