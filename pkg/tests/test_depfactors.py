"""Tests pour les facteurs de dependance (extension, invariants, potentiels)."""

import math
import random

import pytest

from equations_mots.data_structures import IntervalSet
from equations_mots.errors import IncomparableDepfactors, InvariantViolation
from equations_mots.models import Depfactor, Equation, Occurrence, Partition, Side
from equations_mots.parser import parse_equation
from equations_mots.services.depfactors import (
    DepContext,
    DepState,
    PhaseCounters,
    assign_d_numbers,
    assign_pop_depfactor,
    comparable,
    compute_potentials,
    extend_for_block,
    extend_for_pair,
    init_depfactors,
    precedes,
    sum_all,
    sum_depfactors,
    verify_invariants,
)
from equations_mots.services.derivation import DerivationLog
from equations_mots.services.generator import generate_instance
from equations_mots.services.recompression import CanonicalPartitionSource, NoPopGuide, run_phase
from equations_mots.services.shadow import ShadowGuide, ShadowSolution


def _dep(side: Side, *positions: int) -> Depfactor:
    return Depfactor(side, IntervalSet.from_values(positions))


class _StateCollector:
    """Garde chaque equation intermediaire d'un run."""

    def __init__(self) -> None:
        self.states: list[Equation] = []

    def start_phase(self, eq: Equation, phase: int) -> PhaseCounters:
        return PhaseCounters.start(eq)

    def record(self, label, eq, size, coverage, choice=None) -> None:
        if eq.alphabet and not eq.is_trivial():
            self.states.append(eq)

    def end_phase(self, eq: Equation) -> None:
        pass


def _mid_run_states(count: int, rng: random.Random) -> list[Equation]:
    """Etats pris dans des runs guides canoniques sur des instances generees."""
    collector = _StateCollector()
    seed = 0
    while len(collector.states) < 4 * count:
        eq, sigma = generate_instance(seed, 2, 3, 8, 6)
        log = DerivationLog(eq.table)
        guide = ShadowGuide(ShadowSolution.for_equation(eq, sigma), log)
        phase = 0
        while not eq.is_trivial():
            phase += 1
            eq = run_phase(eq, guide, CanonicalPartitionSource(), log, collector, phase=phase)
        seed += 1
    return rng.sample(collector.states, count)


class TestDepContext:
    def test_weights(self):
        ctx = DepContext.from_equation(parse_equation("aX = Xa"))
        # @ -> 1 bit, a et X -> 2 bits
        assert ctx.weights[Side.LHS] == (1, 2, 2, 1)
        assert ctx.input_bits == 12
        assert ctx.input_bits_without_markers == 8

    def test_positions(self):
        ctx = DepContext.from_equation(parse_equation("a = b"))
        assert ctx.positions() == [(Side.LHS, 0), (Side.LHS, 1), (Side.LHS, 2),
                                   (Side.RHS, 0), (Side.RHS, 1), (Side.RHS, 2)]

    def test_similarity_key(self):
        eq = parse_equation("ab = ab")
        ctx = DepContext.from_equation(eq)
        assert ctx.similarity_key(_dep(Side.LHS, 1, 2)) == ctx.similarity_key(_dep(Side.RHS, 1, 2))


class TestOrder:
    def test_precedes_same_side(self):
        assert precedes(_dep(Side.LHS, 1), _dep(Side.LHS, 2))
        assert not precedes(_dep(Side.LHS, 2), _dep(Side.LHS, 1))

    def test_left_side_first(self):
        assert precedes(_dep(Side.LHS, 9), _dep(Side.RHS, 0))

    def test_nested_is_incomparable(self):
        assert not comparable(_dep(Side.LHS, 1, 2, 3), _dep(Side.LHS, 2))

    def test_sum(self):
        assert sum_depfactors(_dep(Side.LHS, 1), _dep(Side.LHS, 2)) == _dep(Side.LHS, 1, 2)
        assert sum_all([_dep(Side.LHS, 1), _dep(Side.LHS, 2), _dep(Side.LHS, 3)]) == _dep(Side.LHS, 1, 2, 3)

    def test_sum_idempotent(self):
        d = _dep(Side.RHS, 4)
        assert sum_depfactors(d, d) == d

    def test_sum_across_sides(self):
        with pytest.raises(IncomparableDepfactors):
            sum_depfactors(_dep(Side.LHS, 1), _dep(Side.RHS, 1))

    def test_sum_incomparable(self):
        with pytest.raises(IncomparableDepfactors):
            sum_depfactors(_dep(Side.LHS, 1, 2, 3), _dep(Side.LHS, 2))


class TestInit:
    def test_fresh(self):
        eq = parse_equation("aXb = bXa")
        state = init_depfactors(eq)
        assert isinstance(state, DepState)
        assert state.sup_size((Side.LHS, 2)) == 1
        assert state.sup_range((Side.RHS, 3)) == (3, 3)

    def test_rewritten_rejected(self):
        eq = parse_equation("ab = ab")
        rewritten = extend_for_pair(eq, Partition(frozenset({eq.table.lookup("a")}), frozenset({eq.table.lookup("b")})))
        with pytest.raises(InvariantViolation):
            init_depfactors(rewritten)


class TestExtension:
    def test_pair_extension(self):
        eq = parse_equation("ab = ab")
        a, b = eq.table.lookup("a"), eq.table.lookup("b")
        counters = PhaseCounters.start(eq)
        out = extend_for_pair(eq, Partition(frozenset({a}), frozenset({b})), counters)
        assert out.lhs[1].dep == _dep(Side.LHS, 1, 2)
        assert out.lhs[2].dep == _dep(Side.LHS, 1, 2)
        assert out.lhs[0].dep == _dep(Side.LHS, 0)
        assert counters.e[(Side.LHS, 2)] == 1
        assert counters.e[(Side.LHS, 1)] == 1

    def test_pass_order_irrelevant(self):
        rng = random.Random(2)
        states = _mid_run_states(200, rng)
        assert len(states) == 200
        for eq in states:
            letters = sorted(eq.alphabet)
            left = frozenset(x for x in letters if rng.random() < 0.5)
            part = Partition(left, frozenset(letters) - left)
            a = extend_for_pair(eq, part)
            b = extend_for_pair(eq, part, right_first=True)
            assert [o.dep for o in a.lhs] == [o.dep for o in b.lhs]
            assert [o.dep for o in a.rhs] == [o.dep for o in b.rhs]

    def test_block_extension_includes_neighbours(self):
        eq = parse_equation("baab = baab")
        a = eq.table.lookup("a")
        out = extend_for_block(eq, frozenset({a}))
        assert out.lhs[2].dep == _dep(Side.LHS, 1, 2, 3, 4)
        assert out.lhs[3].dep == out.lhs[2].dep
        assert out.lhs[1].dep == _dep(Side.LHS, 1)

    def test_pop_units(self):
        eq = parse_equation("aX = Xa")
        x_occ = eq.lhs[2]
        counters = PhaseCounters()
        popped = assign_pop_depfactor(x_occ, [1, 1, 1], counters, units=1)
        assert len(popped) == 3
        assert all(o.dep == x_occ.dep for o in popped)
        assert counters.p[(Side.LHS, 2)] == 1
        assign_pop_depfactor(x_occ, [1, 1], counters)
        assert counters.p[(Side.LHS, 2)] == 3
        assert counters.sum_h_p == pytest.approx(3 * math.log2(4))


class TestInvariants:
    def test_fresh_equation(self):
        eq = parse_equation("aXbY = YbXa")
        assert verify_invariants(eq, DepContext.from_equation(eq)) == []

    def test_after_ground_phase(self):
        rng = random.Random(9)
        for _ in range(20):
            text = "".join(rng.choice("abc") for _ in range(rng.randint(1, 20)))
            eq = parse_equation(f"{text} = {text}")
            ctx = DepContext.from_equation(eq)
            out = run_phase(eq, NoPopGuide(), CanonicalPartitionSource(), DerivationLog(eq.table), phase=1)
            assert verify_invariants(out, ctx) == []

    def test_incomparable_neighbours(self):
        eq = parse_equation("ab = ab")
        a, b = eq.table.lookup("a"), eq.table.lookup("b")
        lhs = [eq.lhs[0], Occurrence(a, _dep(Side.LHS, 1, 2, 3)), Occurrence(b, _dep(Side.LHS, 2)), eq.lhs[3]]
        bad = eq.with_sides(lhs, eq.rhs)
        rules = {v.rule for v in verify_invariants(bad, DepContext.from_equation(eq))}
        assert "comparabilite" in rules

    def test_factor_on_wrong_side(self):
        eq = parse_equation("a = a")
        lhs = [eq.lhs[0], Occurrence(eq.lhs[1].symbol, _dep(Side.RHS, 1)), eq.lhs[2]]
        bad = eq.with_sides(lhs, eq.rhs)
        assert any(v.rule == "contiguite" for v in verify_invariants(bad, DepContext.from_equation(eq)))

    def test_similar_classes_differ(self):
        eq = parse_equation("ab = ab")
        # RHS{1} porte b au lieu de a
        rhs = [eq.rhs[0], Occurrence(eq.table.lookup("b"), _dep(Side.RHS, 1)), eq.rhs[2], eq.rhs[3]]
        bad = eq.with_sides(eq.lhs, rhs)
        assert any(v.rule == "similarite" for v in verify_invariants(bad, DepContext.from_equation(eq)))

    def test_similar_classes_differ_pointwise(self):
        eq = parse_equation("ab = ab")
        a, b = eq.table.lookup("a"), eq.table.lookup("b")
        lhs = [eq.lhs[0], Occurrence(a, _dep(Side.LHS, 1, 2)), Occurrence(b, _dep(Side.LHS, 1, 2)), eq.lhs[3]]
        rhs = [eq.rhs[0], Occurrence(b, _dep(Side.RHS, 1, 2)), Occurrence(a, _dep(Side.RHS, 1, 2)), eq.rhs[3]]
        problems = [str(v) for v in verify_invariants(eq.with_sides(lhs, rhs), DepContext.from_equation(eq))]
        assert any(p.startswith("similarite: code D#1") for p in problems)
        assert any(p.startswith("similarite: code D#2") for p in problems)

    def test_similar_classes_differ_in_length(self):
        eq = parse_equation("ab = ab")
        a = eq.table.lookup("a")
        rhs = [eq.rhs[0], Occurrence(a, _dep(Side.RHS, 1)), Occurrence(a, _dep(Side.RHS, 1)), eq.rhs[2], eq.rhs[3]]
        problems = [str(v) for v in verify_invariants(eq.with_sides(eq.lhs, rhs), DepContext.from_equation(eq))]
        assert any("longueurs differentes" in p for p in problems)
        assert not any("D#1" in p for p in problems)


class TestPotentials:
    def test_fresh(self):
        eq = parse_equation("aX = Xa")
        ctx = DepContext.from_equation(eq)
        pot = compute_potentials(eq, ctx)
        assert pot.h_d == ctx.input_bits
        assert pot.h_n == pytest.approx(2 * len(ctx.positions()))
        assert pot.dep_encoding_bits == ctx.input_bits + len(ctx.positions())
        assert pot.total == pytest.approx(pot.h_d + pot.h_n)

    def test_d_numbers(self):
        eq = parse_equation("aa = aa")
        ctx = DepContext.from_equation(eq)
        out = extend_for_block(eq, eq.alphabet)
        numbers = assign_d_numbers(out, ctx)
        assert numbers[(Side.LHS, 1)][1] == 1
        assert numbers[(Side.LHS, 2)][1] == 2
        assert numbers[(Side.LHS, 1)][0] == numbers[(Side.RHS, 1)][0]
