"""Tests pour la strategie de choix des partitions."""

import random

import pytest

from equations_mots.errors import NoHalvingPartitionFound
from equations_mots.models import CoverageState, Origin, Partition, SolverConfig, SymbolKind
from equations_mots.parser import parse_equation
from equations_mots.services.depfactors import DepContext
from equations_mots.services.derivation import DerivationLog
from equations_mots.services.metrics import MetricsRecorder
from equations_mots.services.recompression import run_phase
from equations_mots.services.shadow import ShadowGuide, ShadowSolution
from equations_mots.services.strategy import (
    TARGETS,
    BlockState,
    StrategyPartitionSource,
    StrategySums,
    TargetCycle,
    _candidates,
    choose_partition,
    classify,
    compute_sums,
    greedy_coverage_partition,
    is_new,
)


def _sigma(eq, **images):
    table = eq.table
    return {
        table.lookup(name): tuple(table.intern(ch, SymbolKind.LETTER) for ch in word)
        for name, word in images.items()
    }


def _make_source(text: str, config: SolverConfig | None = None, **images):
    eq = parse_equation(text)
    shadow = ShadowSolution.for_equation(eq, _sigma(eq, **images))
    log = DerivationLog(eq.table)
    source = StrategyPartitionSource(shadow, log, DepContext.from_equation(eq), config or SolverConfig())
    return eq, shadow, log, source


class TestBlockState:
    def test_merge_is_sticky(self):
        now = BlockState(var_left={1: False}, var_right={1: False})
        before = BlockState(var_left={1: True}, var_right={1: False})
        merged = now.merge(before)
        assert merged.var_left[1] is True
        assert merged.var_right[1] is False
        assert merged.unblocked_sides(1) == 1

    def test_missing_key_is_blocked(self):
        merged = BlockState().merge(BlockState(var_left={1: False}))
        assert merged.var_left[1] is True
        assert BlockState().unblocked_sides(7) == 0

    def test_merge_without_previous(self):
        state = BlockState(var_left={1: False})
        assert state.merge(None) is state


class TestIsNew:
    def test_outside_gamma(self):
        eq = parse_equation("ab = ab")
        a = eq.table.lookup("a")
        c = eq.table.fresh(Origin.BLOCK, 1, "a_2")
        assert not is_new(a, eq.alphabet, eq, 1)
        assert is_new(c, eq.alphabet, eq, 1)

    def test_pair_only(self):
        eq = parse_equation("ab = ab")
        block = eq.table.fresh(Origin.BLOCK, 1, "a_2")
        pair = eq.table.fresh(Origin.PAIR, 1)
        old_pair = eq.table.fresh(Origin.PAIR, 0)
        assert not is_new(block, eq.alphabet, eq, 1, "pair_only")
        assert is_new(pair, eq.alphabet, eq, 1, "pair_only")
        assert not is_new(old_pair, eq.alphabet, eq, 1, "pair_only")


class TestClassify:
    def test_long_image_unblocked(self):
        eq = parse_equation("aXb = aXb")
        shadow = ShadowSolution.for_equation(eq, _sigma(eq, X="ab"))
        ctx = DepContext.from_equation(eq)
        x = eq.table.lookup("X")
        state = classify(eq, shadow, ctx, eq.alphabet, 1)
        assert state.unblocked_sides(x) == 2
        sums = compute_sums(state, eq, ctx)
        assert sums.s_c == 4
        assert sums.s_a == 4 * ctx.symbol_weight(x)

    def test_short_image_blocked(self):
        eq = parse_equation("aXb = aXb")
        shadow = ShadowSolution.for_equation(eq, _sigma(eq, X="a"))
        ctx = DepContext.from_equation(eq)
        state = classify(eq, shadow, ctx, eq.alphabet, 1)
        assert state.unblocked_sides(eq.table.lookup("X")) == 0

    def test_endmarker_blocked_on_the_left(self):
        eq = parse_equation("aXb = aXb")
        shadow = ShadowSolution.for_equation(eq, _sigma(eq, X="ab"))
        state = classify(eq, shadow, DepContext.from_equation(eq), eq.alphabet, 1)
        first = DepContext.from_equation(eq).positions()[0]
        assert state.dep_left[first] is True

    def test_previous_state_merged(self):
        eq = parse_equation("aXb = aXb")
        shadow = ShadowSolution.for_equation(eq, _sigma(eq, X="ab"))
        x = eq.table.lookup("X")
        previous = BlockState(var_left={x: True}, var_right={x: False})
        state = classify(eq, shadow, DepContext.from_equation(eq), eq.alphabet, 1, previous=previous)
        assert state.unblocked_sides(x) == 1


class TestSums:
    def test_get_and_zero(self):
        sums = StrategySums(1, 0, 3, 0)
        assert sums.get("a") == 1
        assert sums.get("c") == 3
        assert not sums.all_zero()
        assert StrategySums().all_zero()

    def test_cycle(self):
        cycle = TargetCycle()
        seen = [cycle.current] + [cycle.advance() for _ in range(4)]
        assert seen == ["a", "b", "c", "d", "a"]
        assert TARGETS == ("a", "b", "c", "d")


class TestGreedyCoverage:
    def test_first_partition(self):
        cov = CoverageState(frozenset({1, 2}))
        assert greedy_coverage_partition(cov.gamma, cov) == Partition(frozenset({1}), frozenset({2}))

    def test_falls_back_to_uncovered_pair(self):
        cov = CoverageState(frozenset({1, 2}))
        cov.update(Partition(frozenset({1}), frozenset({2})))
        assert greedy_coverage_partition(cov.gamma, cov) == Partition(frozenset({2}), frozenset({1}))

    def test_always_covers_something(self):
        rng = random.Random(4)
        for _ in range(50):
            gamma = frozenset(range(1, rng.randint(2, 8)))
            cov = CoverageState(gamma)
            while not cov.is_complete():
                assert cov.update(greedy_coverage_partition(gamma, cov)) > 0


class TestCandidates:
    def test_first_then_unique(self):
        gamma = frozenset({1, 2, 3})
        first = greedy_coverage_partition(gamma, CoverageState(gamma))
        candidates = list(_candidates(gamma, random.Random(0), 4, 16, first))
        assert candidates[0] == first
        assert len(candidates) == len(set(candidates))
        assert len(candidates) == 2 ** 3

    def test_samples_only_above_exhaustive_limit(self):
        gamma = frozenset(range(1, 21))
        first = greedy_coverage_partition(gamma, CoverageState(gamma))
        candidates = list(_candidates(gamma, random.Random(1), 2, 16, first))
        assert 1 < len(candidates) <= 1 + 2 * 20

    def test_lazy(self):
        gamma = frozenset(range(1, 31))
        first = greedy_coverage_partition(gamma, CoverageState(gamma))
        stream = _candidates(gamma, random.Random(2), 64, 30, first)
        assert next(stream) == first
        assert next(stream) != first


class TestChoosePartition:
    def _source(self, monkeypatch, posts, config=None):
        eq, _, _, source = _make_source("Xab = abX", config, X="ab")
        source.start_phase(eq, eq.alphabet, 1)
        first = greedy_coverage_partition(eq.alphabet, CoverageState(eq.alphabet))
        monkeypatch.setattr(source, "sums_of", lambda current: StrategySums(s_a=1))
        monkeypatch.setattr(source, "simulate",
                            lambda current, partition: StrategySums(s_a=posts(partition == first)))
        return eq, source, first

    def test_sum_of_one_must_reach_zero(self, monkeypatch):
        eq, source, first = self._source(monkeypatch, lambda is_first: 1 if is_first else 0)
        choice = choose_partition(source, eq, CoverageState(eq.alphabet))
        assert choice.reason == "halving"
        assert choice.partition != first
        assert (choice.pre, choice.post) == (1, 0)
        assert choice.candidates >= 2

    def test_strict_raises(self, monkeypatch):
        eq, source, _ = self._source(monkeypatch, lambda is_first: 1)
        with pytest.raises(NoHalvingPartitionFound):
            choose_partition(source, eq, CoverageState(eq.alphabet))

    def test_lenient_falls_back_to_coverage(self, monkeypatch):
        eq, source, first = self._source(monkeypatch, lambda is_first: 1, SolverConfig(strict_halving=False))
        choice = choose_partition(source, eq, CoverageState(eq.alphabet))
        assert choice.reason == "coverage"
        assert choice.partition == first
        assert choice.post == 1


class TestStrategyRun:
    def _run_phase(self, text: str, config: SolverConfig | None = None, **images):
        eq, shadow, log, source = _make_source(text, config, **images)
        guide = ShadowGuide(shadow, log)
        recorder = MetricsRecorder(eq)
        recorder.sums_of = source.sums_of
        out = run_phase(eq, guide, source, log, recorder, phase=1)
        return out, recorder.run, source

    def test_two_letter_phase(self):
        out, run, source = self._run_phase("Xab = abX", X="ab")
        assert out.same_sides()
        compress = [s for s in run.steps if s.label == "pair_compress"]
        assert compress
        assert all(s.target in TARGETS for s in compress)
        assert all(s.s_a is not None for s in run.steps)
        assert source.max_blocked_pops <= 1

    def test_target_cycles(self):
        out, run, source = self._run_phase("Xab = abX", X="ab")
        assert source.cycle.index == sum(1 for s in run.steps if s.label == "pair_compress") % 4

    def test_sums_never_increase(self):
        out, run, _ = self._run_phase("XabY = YabX", X="ab", Y="abab")
        for before, after in zip(run.steps, run.steps[1:]):
            for target in TARGETS:
                assert getattr(after, f"s_{target}") <= getattr(before, f"s_{target}")

    def test_committed_targets_halve(self):
        out, run, _ = self._run_phase("XabY = YabX", X="ab", Y="abab")
        committed = [s for s in run.steps if s.label == "pair_compress" and s.target_pre]
        for step in committed:
            assert 2 * step.target_post <= step.target_pre
