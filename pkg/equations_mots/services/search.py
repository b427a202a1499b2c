"""
Service Layer Pattern: Recherche non deterministe.

Deux facons de realiser les choix de l'algorithme: un run guide, ou
tous les choix sont lus sur une solution connue, et une recherche aveugle
en profondeur, bornee par les caps de SolverConfig. Les temoins sont
reconstruits a partir du journal de derivation.
"""

from __future__ import annotations

import logging
import math
import time
from collections import Counter
from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from enum import Enum

from equations_mots.equation import apply_side, check_solution, trivial_solution
from equations_mots.errors import Desync, InvariantViolation, PhaseCapExceeded
from equations_mots.models import (
    BlockPop,
    Equation,
    PairPop,
    Partition,
    SearchStats,
    Side,
    SolverConfig,
    Status,
    Substitution,
    Verdict,
)
from equations_mots.services.derivation import DerivationLog
from equations_mots.services.encoding import measure
from equations_mots.services.metrics import MetricsRecorder, MetricsRun
from equations_mots.services.recompression import (
    CanonicalPartitionSource,
    block_compress_equation,
    canonical_partitions,
    pair_compress_equation,
    pop_blocks,
    pop_letters,
    run_phase,
)
from equations_mots.services.shadow import ShadowGuide, ShadowSolution
from equations_mots.services.strategy import StrategyPartitionSource
from equations_mots.utils import phase_bound

logger = logging.getLogger(__name__)

# ============================================================
# TEMOINS
# ============================================================


def reconstruct_witness(log: DerivationLog, final: Substitution, variables: Iterable[int]) -> Substitution:
    """
    Reconstruit sigma(X) sur l'alphabet d'entree.

    sigma(X) = depilements gauches (chronologiques) + image finale
    + depilements droits (ordre inverse), chaque lettre etant developpee
    par les regles du journal.

    Raises:
        DanglingRule: Lettre fraiche sans regle.
    """
    witness: Substitution = {}
    for var in variables:
        left, right = log.pops(var)
        word: list[int] = []
        for letters in left:
            word.extend(log.expand_word(letters))
        word.extend(log.expand_word(final.get(var, ())))
        for letters in reversed(right):
            word.extend(log.expand_word(letters))
        witness[var] = tuple(word)
    return witness


def _verified(original: Equation, witness: Substitution) -> Substitution:
    if not check_solution(original, witness):
        raise Desync("le temoin reconstruit ne resout pas l'equation d'entree")
    return witness


def _caps(config: SolverConfig) -> dict[str, int]:
    return {
        "max_phases": config.max_phases,
        "max_block_exponent": config.max_block_exponent,
        "space_cap_bits": config.space_cap_bits,
    }


# ============================================================
# MODE GUIDE
# ============================================================


def solve_guided(eq: Equation, sigma: Substitution, config: SolverConfig) -> tuple[Verdict, MetricsRun]:
    """
    Run guide par une solution connue.

    Les depilements sont lus sur sigma, les partitions viennent de la
    strategie (ou du calendrier canonique selon config.partition_mode);
    sigma est renormalise en debut de phase et verifie apres chaque etape.

    Args:
        eq: Equation fraichement analysee.
        sigma: Solution de eq.
        config: Bornes et reglages.

    Returns:
        Verdict SAT avec le temoin reconstruit, et les mesures du run.

    Raises:
        NotASolution: Si sigma ne resout pas eq.
        Desync: Si sigma cesse de resoudre l'equation courante.
        SpaceCapExceeded: Taille codee au-dela de space_cap_bits.
        PhaseCapExceeded: Plus de max_phases phases.
        InvariantViolation: Plus de ceil(log_{3/2} N) + 2 phases, N = |sigma(U)|.
    """
    original = eq
    shadow = ShadowSolution.for_equation(eq, sigma)
    log = DerivationLog(eq.table)
    guide = ShadowGuide(shadow, log)
    recorder = MetricsRecorder(eq, check_invariants=config.check_invariants)
    strategy: StrategyPartitionSource | None = None
    if config.partition_mode == "strategy":
        strategy = StrategyPartitionSource(shadow, log, recorder.ctx, config)
        recorder.sums_of = strategy.sums_of
        partitions = strategy
    else:
        partitions = CanonicalPartitionSource()

    stats = SearchStats(max_bits=measure(eq).total_bits)
    n = len(apply_side(original, Side.LHS, sigma))
    bound = phase_bound(n)
    phase = 0
    while not eq.is_trivial():
        if phase >= config.max_phases:
            raise PhaseCapExceeded(f"{phase} phases sans atteindre une equation triviale")
        if phase >= bound:
            raise InvariantViolation(f"run guide: plus de {bound} phases pour |sigma(U)| = {n}")
        phase += 1
        eq = run_phase(eq, guide, partitions, log, recorder, phase=phase,
                       space_cap_bits=config.space_cap_bits)
        stats.max_bits = max([stats.max_bits, *(s.total_bits for s in recorder.run.phases[-1].steps)])

    stats.phases = phase
    if strategy is not None:
        recorder.run.max_blocked_pops = strategy.max_blocked_pops
    final = {x: shadow.image(x) for x in eq.variables}
    if not check_solution(eq, final):
        raise Desync("la solution finale ne resout pas l'equation triviale")
    witness = _verified(original, reconstruct_witness(log, final, original.variables))
    logger.info("run guide: SAT en %d phases (borne %d)", phase, bound)
    return Verdict(Status.SAT, witness, _caps(config), None, stats), recorder.run


# ============================================================
# MODE AVEUGLE
# ============================================================


class Stage(Enum):
    PHASE_START = "phase_start"
    BLOCK_POP = "block_pop"
    BLOCK_COMPRESS = "block_compress"
    NEXT_PARTITION = "next_partition"
    PAIR_POP = "pair_pop"
    PAIR_COMPRESS = "pair_compress"


@dataclass
class SearchNode:
    """
    Point de choix de la recherche aveugle.

    Attributes:
        eq: Equation de la branche.
        log: Journal propre a la branche.
        stage: Etape suivante a executer.
        phase: Phase courante (0 avant la premiere).
        depth: Profondeur dans l'arbre.
        gamma: Alphabet de debut de phase.
        pending: Variables restant a depiler dans l'etape.
        schedule: Partitions canoniques restantes.
        covered: Paires couvertes de la phase.
        partition: Partition de l'etape en cours.
    """
    eq: Equation
    log: DerivationLog
    stage: Stage
    phase: int = 0
    depth: int = 0
    gamma: frozenset[int] = frozenset()
    pending: tuple[int, ...] = ()
    schedule: tuple[Partition, ...] = ()
    covered: frozenset[tuple[int, int]] = frozenset()
    partition: Partition | None = None

    def child(self, eq: Equation, log: DerivationLog, stage: Stage, **changes: object) -> SearchNode:
        values = {
            "phase": self.phase, "gamma": self.gamma, "pending": self.pending,
            "schedule": self.schedule, "covered": self.covered, "partition": self.partition,
        }
        values.update(changes)
        return SearchNode(eq, log, stage, depth=self.depth + 1, **values)  # type: ignore[arg-type]


def block_options(gamma: frozenset[int], max_exponent: int) -> list[BlockPop]:
    """
    Choix de blocs d'une variable: image vide d'abord, puis par (l + r, l, r, a, b),
    les variantes sans reste apres les autres.
    """
    letters = sorted(gamma)
    options: list[tuple[tuple[int, ...], BlockPop]] = []
    for a in letters:
        for ell in range(1, max_exponent + 1):
            options.append(((ell, ell, 0, a, -1, 0), BlockPop(a, ell, None, 0, False)))
            options.append(((ell, ell, 0, a, -1, 1), BlockPop(a, ell, None, 0, True)))
            for r in range(1, max_exponent + 1):
                for b in letters:
                    key = (ell + r, ell, r, a, b)
                    options.append((key + (0,), BlockPop(a, ell, b, r, False)))
                    if b != a:
                        options.append((key + (1,), BlockPop(a, ell, b, r, True)))
    options.sort(key=lambda item: item[0])
    return [BlockPop.vanish()] + [g for _, g in options]


def pair_options(partition: Partition) -> list[PairPop]:
    """Choix de paires d'une variable: sans depilement, un seul, les deux, puis les images videes."""
    lefts = sorted(partition.right)
    rights = sorted(partition.left)
    options = [PairPop()]
    options += [PairPop(b, None) for b in lefts]
    options += [PairPop(None, a) for a in rights]
    options += [PairPop(b, a) for b in lefts for a in rights]
    options += [PairPop(b, None, True) for b in lefts]
    options += [PairPop(None, a, True) for a in rights]
    options += [PairPop(b, a, True) for b in lefts for a in rights]
    return options


def _ground_ends(eq: Equation, side: Side) -> tuple[list[int], list[int], bool]:
    """Lettres avant la premiere variable, apres la derniere, et presence d'une variable."""
    symbols = [o.symbol for o in eq.inner(side)]
    is_var = [eq.table.is_variable(s) for s in symbols]
    if not any(is_var):
        return symbols, symbols, False
    first = is_var.index(True)
    last = len(symbols) - 1 - is_var[::-1].index(True)
    return symbols[:first], symbols[last + 1:], True


def _nonnegative_solvable(coeffs: Iterable[int], target: int) -> bool:
    """Condition necessaire pour que sum(c * k) = target ait une solution entiere k >= 0."""
    coeffs = [c for c in coeffs if c]
    if not coeffs:
        return target == 0
    if target % math.gcd(*coeffs):
        return False
    if all(c > 0 for c in coeffs):
        return target >= 0
    if all(c < 0 for c in coeffs):
        return target <= 0
    return True


def counts_feasible(eq: Equation) -> bool:
    """
    Filtre de Parikh: pour chaque lettre a, sum_X (n_X^U - n_X^V) |sigma(X)|_a
    doit pouvoir valoir |V|_a - |U|_a avec des |sigma(X)|_a entiers positifs ou nuls.

    Les lettres fraiches comptent pour une lettre de l'equation courante.
    """
    coeffs: Counter[int] = Counter()
    ground: Counter[int] = Counter()
    for side, sign in ((Side.LHS, 1), (Side.RHS, -1)):
        for occ in eq.inner(side):
            if eq.table.is_variable(occ.symbol):
                coeffs[occ.symbol] += sign
            else:
                ground[occ.symbol] -= sign
    return all(_nonnegative_solvable(coeffs.values(), ground[a]) for a in ground)


def is_consistent(eq: Equation) -> bool:
    """Filtre: prefixes et suffixes sans variable compatibles, puis comptes de lettres."""
    pre_u, suf_u, var_u = _ground_ends(eq, Side.LHS)
    pre_v, suf_v, var_v = _ground_ends(eq, Side.RHS)
    if not var_u and not var_v:
        return pre_u == pre_v
    n = min(len(pre_u), len(pre_v))
    if pre_u[:n] != pre_v[:n]:
        return False
    n = min(len(suf_u), len(suf_v))
    if n and suf_u[-n:] != suf_v[-n:]:
        return False
    return counts_feasible(eq)


def canonical_key(eq: Equation) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """
    Cotes de l'equation, lettres renommees par leur rang (ordre des identifiants conserve).

    Deux equations de meme cle ont des sous-arbres de recherche isomorphes:
    les choix et les calendriers ne dependent que de l'ordre des lettres.
    """
    rank = {a: i for i, a in enumerate(sorted(eq.alphabet))}
    return tuple(
        tuple(rank.get(s, -1 - s) for s in eq.symbols(side))
        for side in Side
    )  # type: ignore[return-value]


class BlindSearch:
    """
    Recherche en profondeur sur les choix de depilement, avec une pile
    explicite d'iterateurs de fils.

    Attributes:
        original: Equation d'entree.
        config: Bornes de la recherche.
        stats: Compteurs du run.
    """

    def __init__(self, eq: Equation, config: SolverConfig) -> None:
        self.original = eq
        self.config = config
        self.stats = SearchStats()
        self._deadline = 0.0
        # cle canonique -> plus petite phase a laquelle elle a ete developpee
        self._expanded: dict[tuple[tuple[int, ...], tuple[int, ...]], int] = {}

    # -- fils ----------------------------------------------------------

    def _admit(self, node: SearchNode) -> bool:
        if not is_consistent(node.eq):
            self.stats.pruned_mismatch += 1
            return False
        bits = measure(node.eq).total_bits
        self.stats.max_bits = max(self.stats.max_bits, bits)
        if bits > self.config.space_cap_bits:
            self.stats.pruned_space += 1
            return False
        return True

    def _branch_pops(self, node: SearchNode, options: list, apply) -> Iterator[SearchNode]:
        var = node.pending[0]
        for option in options:
            log = node.log.fork()
            eq = apply(node.eq.rebind(log.table), {var: option}, log)
            yield node.child(eq, log, node.stage, pending=node.pending[1:])

    def children(self, node: SearchNode) -> Iterator[SearchNode]:
        """Fils d'un noeud, dans l'ordre d'enumeration."""
        eq, phase = node.eq, node.phase
        if node.stage is Stage.PHASE_START:
            if phase >= self.config.max_phases:
                self.stats.pruned_phases += 1
                return
            gamma = eq.alphabet
            logger.debug("noeud %d: phase %d, |U| + |V| = %d", self.stats.nodes, phase + 1, eq.occurrence_count())
            yield node.child(eq, node.log, Stage.BLOCK_POP, phase=phase + 1, gamma=gamma,
                             pending=tuple(sorted(eq.variables)), covered=frozenset(),
                             schedule=tuple(canonical_partitions(gamma)))
        elif node.stage is Stage.BLOCK_POP:
            if not node.pending:
                yield node.child(eq, node.log, Stage.BLOCK_COMPRESS)
                return
            yield from self._branch_pops(
                node, block_options(node.gamma, self.config.max_block_exponent),
                lambda e, g, log: pop_blocks(e, g, log, phase))
        elif node.stage is Stage.BLOCK_COMPRESS:
            eq = block_compress_equation(eq, node.gamma, node.log, phase)
            yield node.child(eq, node.log, Stage.NEXT_PARTITION)
        elif node.stage is Stage.NEXT_PARTITION:
            schedule = list(node.schedule)
            while schedule:
                partition = schedule.pop(0)
                if any(p not in node.covered for p in partition.pairs()):
                    yield node.child(eq, node.log, Stage.PAIR_POP, partition=partition,
                                     schedule=tuple(schedule), pending=tuple(sorted(eq.variables)))
                    return
            yield node.child(eq, node.log, Stage.PHASE_START)
        elif node.stage is Stage.PAIR_POP:
            partition = node.partition
            assert partition is not None
            if not node.pending:
                yield node.child(eq, node.log, Stage.PAIR_COMPRESS)
                return
            yield from self._branch_pops(
                node, pair_options(partition),
                lambda e, g, log: pop_letters(e, partition, g, log, phase))
        else:
            partition = node.partition
            assert partition is not None
            eq = pair_compress_equation(eq, partition, node.log, None, phase)
            yield node.child(eq, node.log, Stage.NEXT_PARTITION, covered=node.covered | partition.pairs())

    # -- boucle --------------------------------------------------------

    def _solved(self, node: SearchNode) -> Substitution | None:
        """Temoin si le noeud est une feuille satisfaite (cotes identiques ou equation triviale)."""
        if node.stage is not Stage.PHASE_START:
            return None
        eq = node.eq
        final = {x: () for x in eq.variables} if eq.same_sides() else None
        if final is None and eq.is_trivial():
            final = trivial_solution(eq)
        if final is None:
            return None
        witness = reconstruct_witness(node.log, final, self.original.variables)
        return _verified(self.original, witness)

    def _already_expanded(self, node: SearchNode) -> bool:
        """
        Vrai si la meme equation (a renommage pres) a deja ete developpee a une phase <= node.phase.

        Un tel sous-arbre a echoue ou contient node: le refaire avec moins
        de phases restantes ne peut rien trouver de plus.
        """
        key = canonical_key(node.eq)
        seen = self._expanded.get(key)
        if seen is not None and seen <= node.phase:
            self.stats.pruned_visited += 1
            return True
        self._expanded[key] = node.phase
        return False

    def _budget_exhausted(self) -> str | None:
        if self.stats.nodes >= self.config.node_budget:
            return f"budget de noeuds ({self.config.node_budget}) epuise"
        if time.monotonic() > self._deadline:
            return f"budget de temps ({self.config.time_budget_sec}s) epuise"
        return None

    def run(self) -> Verdict:
        caps = _caps(self.config)
        self._deadline = time.monotonic() + self.config.time_budget_sec
        log = DerivationLog(self.original.table.copy())
        root = SearchNode(self.original.rebind(log.table), log, Stage.PHASE_START)
        if not self._admit(root):
            return Verdict(Status.UNSAT, None, caps, None, self.stats)
        stack: list[tuple[SearchNode, Iterator[SearchNode]]] = []
        pending: SearchNode | None = root
        while pending is not None or stack:
            if pending is not None:
                node, pending = pending, None
                self.stats.nodes += 1
                self.stats.phases = max(self.stats.phases, node.phase)
                witness = self._solved(node)
                if witness is not None:
                    logger.info("SAT apres %d noeuds", self.stats.nodes)
                    return Verdict(Status.SAT, witness, caps, None, self.stats)
                if node.stage is Stage.PHASE_START and (node.eq.is_trivial() or self._already_expanded(node)):
                    continue
                stack.append((node, self.children(node)))
            reason = self._budget_exhausted()
            if reason is not None:
                logger.info("UNKNOWN: %s", reason)
                return Verdict(Status.UNKNOWN, None, caps, reason, self.stats)
            _, iterator = stack[-1]
            for child in iterator:
                if self._admit(child):
                    pending = child
                    break
            else:
                stack.pop()
        logger.info("UNSAT dans les bornes apres %d noeuds", self.stats.nodes)
        return Verdict(Status.UNSAT, None, caps, None, self.stats)


def solve_blind(eq: Equation, config: SolverConfig) -> Verdict:
    """
    Recherche aveugle bornee.

    Args:
        eq: Equation d'entree.
        config: Caps (phases, exposants, espace) et budgets.

    Returns:
        SAT avec un temoin verifie, UNSAT dans les bornes, ou UNKNOWN
        si le budget de noeuds ou de temps est epuise.
    """
    return BlindSearch(eq, config).run()
