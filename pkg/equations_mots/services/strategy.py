"""
Service Layer Pattern: Strategie de choix des partitions (runs guides).

Les cotes des variables et des facteurs de base sont classes bloques ou
non d'apres sigma(U), sigma(V); chaque partition est choisie pour diviser
au moins par deux l'une des quatre sommes S_a..S_d, cibles a tour de role.
"""

from __future__ import annotations

import itertools
import logging
import random
from collections import Counter
from collections.abc import Iterator
from dataclasses import dataclass, field

from equations_mots.errors import NoHalvingPartitionFound
from equations_mots.models import (
    CoverageState,
    Equation,
    Origin,
    PairCompressStep,
    PairPopStep,
    Partition,
    Side,
    SolverConfig,
)
from equations_mots.services.depfactors import DepContext, Position, sup_index
from equations_mots.services.derivation import DerivationLog
from equations_mots.services.recompression import canonical_partitions, pair_compress_equation, pop_letters
from equations_mots.services.shadow import ShadowSolution, advance_solution, derive_guesses_from_solution

logger = logging.getLogger(__name__)

TARGETS = ("a", "b", "c", "d")


# ============================================================
# CLASSEMENT
# ============================================================


@dataclass
class BlockState:
    """
    Cotes bloques des variables et des facteurs de base.

    Attributes:
        var_left: Variable -> cote gauche bloque.
        var_right: Variable -> cote droit bloque.
        dep_left: Position de base -> cote gauche bloque.
        dep_right: Position de base -> cote droit bloque.
    """
    var_left: dict[int, bool] = field(default_factory=dict)
    var_right: dict[int, bool] = field(default_factory=dict)
    dep_left: dict[Position, bool] = field(default_factory=dict)
    dep_right: dict[Position, bool] = field(default_factory=dict)

    def merge(self, previous: BlockState | None) -> BlockState:
        """Un cote bloque le reste pendant toute la phase."""
        if previous is None:
            return self

        def union(now: dict, before: dict) -> dict:
            keys = now.keys() | before.keys()
            return {k: now.get(k, True) or before.get(k, False) for k in keys}

        return BlockState(
            union(self.var_left, previous.var_left),
            union(self.var_right, previous.var_right),
            union(self.dep_left, previous.dep_left),
            union(self.dep_right, previous.dep_right),
        )

    def unblocked_sides(self, var: int) -> int:
        return (not self.var_left.get(var, True)) + (not self.var_right.get(var, True))

    def unblocked_dep_sides(self, position: Position) -> int:
        return (not self.dep_left.get(position, True)) + (not self.dep_right.get(position, True))


def is_new(sid: int, gamma: frozenset[int], eq: Equation, phase: int, mode: str = "outside_gamma") -> bool:
    """
    Lettre nouvelle de la phase.

    En mode "outside_gamma", toute lettre hors de l'alphabet de debut de
    phase; en mode "pair_only", les seules lettres de paires de la phase.
    """
    if mode == "pair_only":
        symbol = eq.table.get(sid)
        return symbol.origin is Origin.PAIR and symbol.phase == phase
    return sid not in gamma


def _materialize(eq: Equation, side: Side, shadow: ShadowSolution) -> tuple[list[int], list[tuple[int, int]]]:
    """sigma(cote) et l'intervalle [debut, fin) couvert par chaque occurrence."""
    word: list[int] = []
    spans: list[tuple[int, int]] = []
    table = eq.table
    for occ in eq.side(side):
        start = len(word)
        if table.is_variable(occ.symbol):
            word.extend(shadow.image(occ.symbol))
        elif table.is_letter(occ.symbol):
            word.append(occ.symbol)
        spans.append((start, len(word)))
    return word, spans


def classify(eq: Equation, shadow: ShadowSolution, ctx: DepContext, gamma: frozenset[int], phase: int,
             mode: str = "outside_gamma", previous: BlockState | None = None) -> BlockState:
    """
    Classe les cotes des variables et des facteurs de base.

    Une variable est bloquee a gauche si sigma(X) a au plus une lettre ou
    si sa premiere ou deuxieme lettre est nouvelle (symetrique a droite).
    Un facteur D est bloque a gauche s'il y a au plus une lettre a gauche
    de sup D ou si la lettre a distance un ou deux est nouvelle. Un sup vide
    est bloque des deux cotes, tout comme une variable supprimee.

    Args:
        eq: Equation courante.
        shadow: Solution courante.
        ctx: Contexte d'origine (positions de base).
        gamma: Alphabet de debut de phase.
        phase: Phase courante.
        mode: Definition des lettres nouvelles.
        previous: Etat precedent de la phase (fusion monotone).

    Returns:
        BlockState fusionne avec previous.
    """
    def new(sid: int) -> bool:
        return is_new(sid, gamma, eq, phase, mode)

    state = BlockState()
    for var in eq.n_x:
        image = shadow.image(var) if var in eq.variables else ()
        if var not in eq.variables or len(image) <= 1:
            state.var_left[var] = state.var_right[var] = True
            continue
        state.var_left[var] = new(image[0]) or new(image[1])
        state.var_right[var] = new(image[-1]) or new(image[-2])

    materialized = {side: _materialize(eq, side, shadow) for side in Side}
    sup = sup_index(eq)
    for position in ctx.positions():
        idx = sup.get(position)
        if not idx:
            state.dep_left[position] = state.dep_right[position] = True
            continue
        word, spans = materialized[position[0]]
        start, end = spans[idx[0]][0], spans[idx[-1]][1]
        state.dep_left[position] = start <= 1 or new(word[start - 1]) or new(word[start - 2])
        state.dep_right[position] = len(word) - end <= 1 or new(word[end]) or new(word[end + 1])
    return state.merge(previous)


@dataclass(frozen=True)
class StrategySums:
    s_a: int = 0
    s_b: int = 0
    s_c: int = 0
    s_d: int = 0

    def get(self, target: str) -> int:
        return getattr(self, f"s_{target}")

    def all_zero(self) -> bool:
        return not (self.s_a or self.s_b or self.s_c or self.s_d)


def compute_sums(state: BlockState, eq: Equation, ctx: DepContext) -> StrategySums:
    """Evalue S_a..S_d; Abs(X) et Abs(D) sont les longueurs du code d'entree."""
    s_a = s_c = 0
    for var, n in eq.n_x.items():
        sides = state.unblocked_sides(var)
        s_a += n * ctx.symbol_weight(var) * sides
        s_c += n * sides
    s_b = s_d = 0
    for position in ctx.positions():
        sides = state.unblocked_dep_sides(position)
        s_b += ctx.weight(position) * sides
        s_d += sides
    return StrategySums(s_a, s_b, s_c, s_d)


class TargetCycle:
    """Cible courante, a -> b -> c -> d -> a."""

    def __init__(self) -> None:
        self.index = 0

    @property
    def current(self) -> str:
        return TARGETS[self.index]

    def advance(self) -> str:
        self.index = (self.index + 1) % len(TARGETS)
        return self.current


# ============================================================
# CHOIX DE LA PARTITION
# ============================================================


@dataclass(frozen=True)
class PartitionChoice:
    """
    Partition retenue et mesures de la somme ciblee.

    Attributes:
        partition: Partition appliquee.
        target: Somme ciblee ("a".."d").
        pre: Valeur avant la partition.
        post: Valeur simulee apres la partition.
        reason: "halving", "coverage" ou "canonical".
        candidates: Nombre de candidats simules.
    """
    partition: Partition
    target: str
    pre: int
    post: int
    reason: str
    candidates: int = 0


def greedy_coverage_partition(gamma: frozenset[int], coverage: CoverageState) -> Partition:
    """
    Place chaque lettre (ordre des identifiants) du cote qui couvre le plus
    de paires nouvelles; egalite a gauche. Sans gain, ({a}, {b}) pour la
    premiere paire non couverte.
    """
    left: set[int] = set()
    right: set[int] = set()
    gain = 0
    for a in sorted(gamma):
        as_left = sum(1 for b in right if (a, b) not in coverage.covered)
        as_right = sum(1 for b in left if (b, a) not in coverage.covered)
        if as_left >= as_right:
            left.add(a)
            gain += as_left
        else:
            right.add(a)
            gain += as_right
    if gain == 0:
        uncovered = sorted(coverage.uncovered())
        if uncovered:
            a, b = uncovered[0]
            return Partition(frozenset({a}), frozenset({b}))
    return Partition(frozenset(left), frozenset(right))


def _candidates(gamma: frozenset[int], rng: random.Random, samples_per_letter: int,
                exhaustive_max_letters: int, first: Partition) -> Iterator[Partition]:
    """Partition de couverture, puis tirages uniformes, puis enumeration exhaustive si |Gamma| est petit."""
    letters = sorted(gamma)
    seen = {first}
    yield first
    for _ in range(samples_per_letter * len(letters)):
        left = frozenset(a for a in letters if rng.random() < 0.5)
        partition = Partition(left, frozenset(letters) - left)
        if partition not in seen:
            seen.add(partition)
            yield partition
    if len(letters) <= exhaustive_max_letters:
        for bits in itertools.product((False, True), repeat=len(letters)):
            left = frozenset(a for a, bit in zip(letters, bits) if bit)
            partition = Partition(left, frozenset(letters) - left)
            if partition not in seen:
                seen.add(partition)
                yield partition


class StrategyPartitionSource:
    """
    Source de partitions d'un run guide.

    Tient l'etat de blocage de la phase, la cible courante et le nombre de
    depilements faits par un cote de variable deja bloque.
    """

    def __init__(self, shadow: ShadowSolution, log: DerivationLog, ctx: DepContext,
                 config: SolverConfig) -> None:
        self.shadow = shadow
        self.log = log
        self.ctx = ctx
        self.config = config
        self.rng = random.Random(config.rng_seed)
        self.cycle = TargetCycle()
        self.last_choice: PartitionChoice | None = None
        self.state: BlockState | None = None
        self.blocked_pops: Counter[tuple[int, str]] = Counter()
        self.max_blocked_pops = 0
        self.gamma: frozenset[int] = frozenset()
        self.phase = 0

    def start_phase(self, eq: Equation, gamma: frozenset[int], phase: int) -> None:
        self.gamma = gamma
        self.phase = phase
        self.state = None
        self.last_choice = None
        self.blocked_pops.clear()

    def _classify(self, eq: Equation, shadow: ShadowSolution, previous: BlockState | None) -> BlockState:
        return classify(eq, shadow, self.ctx, self.gamma, self.phase, self.config.new_letter_mode, previous)

    def sums_of(self, eq: Equation) -> StrategySums:
        """Reclasse l'equation courante (fusion monotone) et retourne les sommes."""
        self.state = self._classify(eq, self.shadow, self.state)
        return compute_sums(self.state, eq, self.ctx)

    def simulate(self, eq: Equation, partition: Partition) -> StrategySums:
        """Applique la partition sur des copies et reclasse."""
        log = self.log.fork()
        scratch = eq.rebind(log.table)
        guess = derive_guesses_from_solution(scratch, self.shadow.sigma, partition, check=False)
        scratch = pop_letters(scratch, partition, guess, log, self.phase)  # type: ignore[arg-type]
        sigma = advance_solution(self.shadow.sigma, PairPopStep(partition, guess, self.phase), log)  # type: ignore[arg-type]
        scratch = pair_compress_equation(scratch, partition, log, None, self.phase)
        sigma = advance_solution(sigma, PairCompressStep(partition, self.phase), log)
        state = self._classify(scratch, ShadowSolution(sigma), self.state)
        return compute_sums(state, scratch, self.ctx)

    def _count_blocked_pops(self, eq: Equation, partition: Partition) -> None:
        if self.state is None:
            return
        guess = derive_guesses_from_solution(eq, self.shadow.sigma, partition, check=False)
        for var, g in guess.items():
            if g.left is not None and self.state.var_left.get(var, True):  # type: ignore[union-attr]
                self.blocked_pops[(var, "left")] += 1
            if g.right is not None and self.state.var_right.get(var, True):  # type: ignore[union-attr]
                self.blocked_pops[(var, "right")] += 1
        if self.blocked_pops:
            self.max_blocked_pops = max(self.max_blocked_pops, max(self.blocked_pops.values()))

    def next_partition(self, eq: Equation, coverage: CoverageState) -> Partition | None:
        choice = choose_partition(self, eq, coverage)
        self.last_choice = choice
        self._count_blocked_pops(eq, choice.partition)
        self.cycle.advance()
        return choice.partition


def choose_partition(source: StrategyPartitionSource, eq: Equation, coverage: CoverageState) -> PartitionChoice:
    """
    Choisit la partition suivante d'un run guide.

    Cible nulle: partition greedy de couverture (calendrier canonique si
    les quatre sommes sont nulles). Sinon, premier candidat dont la somme
    ciblee simulee est au plus la moitie de sa valeur courante.

    Raises:
        NoHalvingPartitionFound: Aucun candidat ne convient (strict_halving).
    """
    target = source.cycle.current
    sums = source.sums_of(eq)
    pre = sums.get(target)
    gamma = source.gamma

    if sums.all_zero():
        for partition in canonical_partitions(gamma):
            if coverage.new_pairs(partition):
                return PartitionChoice(partition, target, 0, 0, "canonical")
    greedy = greedy_coverage_partition(gamma, coverage)
    if pre == 0:
        return PartitionChoice(greedy, target, 0, 0, "coverage")

    config = source.config
    tried = 0
    for partition in _candidates(gamma, source.rng, config.samples_per_letter,
                                 config.exhaustive_max_letters, greedy):
        tried += 1
        post = source.simulate(eq, partition).get(target)
        logger.debug("cible %s: %s | %s -> %d (avant %d)", target,
                     sorted(partition.left), sorted(partition.right), post, pre)
        # les sommes ne croissent pas: une cible non nulle tombe a 0 en au plus log2(pre) + 1 visites
        if 2 * post <= pre:
            return PartitionChoice(partition, target, pre, post, "halving", tried)

    message = f"phase {source.phase}: aucune partition ne divise S_{target} = {pre} par deux"
    if config.strict_halving:
        raise NoHalvingPartitionFound(message)
    logger.warning(message)
    return PartitionChoice(greedy, target, pre, source.simulate(eq, greedy).get(target), "coverage", tried)
