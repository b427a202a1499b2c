"""
Service Layer Pattern: Noyau de recompression.

Compression de blocs et de paires sur des mots et sur des equations,
depilement des lettres autour des variables et pilote d'une phase.
Les lettres fraiches sont allouees dans le DerivationLog du run.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable, Iterator, Sequence
from typing import Protocol

from equations_mots.errors import (
    IllegalPop,
    InconsistentGuess,
    PartitionNotDisjoint,
    SpaceCapExceeded,
)
from equations_mots.models import (
    BlockCompressStep,
    BlockPop,
    BlockPopStep,
    CoverageState,
    Equation,
    Occurrence,
    PairCompressStep,
    PairPop,
    PairPopStep,
    Partition,
    PopSide,
    Side,
    Step,
)
from equations_mots.services.depfactors import (
    PhaseCounters,
    assign_pop_depfactor,
    extend_for_block,
    extend_for_pair,
    sum_all,
)
from equations_mots.services.derivation import DerivationLog
from equations_mots.services.encoding import EncodedSize, measure
from equations_mots.utils import ceil_log2

logger = logging.getLogger(__name__)

# ============================================================
# MOTS
# ============================================================


def block_compress_string(w: Sequence[int], gamma: Iterable[int], log: DerivationLog,
                          phase: int = 0) -> list[int]:
    """
    Remplace chaque bloc maximal a^l (a dans gamma, l >= 2) par une lettre fraiche.

    Args:
        w: Mot de lettres.
        gamma: Lettres dont les blocs sont compresses.
        log: Journal ou sont allouees les lettres a_l.
        phase: Phase courante (cle de memoisation).

    Returns:
        Mot compresse.
    """
    letters = frozenset(gamma)
    out: list[int] = []
    i = 0
    while i < len(w):
        j = i
        while j < len(w) and w[j] == w[i]:
            j += 1
        length = j - i
        if w[i] in letters and length >= 2:
            out.append(log.block_letter(w[i], length, phase))
        else:
            out.extend(w[i:j])
        i = j
    return out


def pair_compress_string(w: Sequence[int], partition: Partition, log: DerivationLog,
                         phase: int = 0) -> list[int]:
    """
    Remplace, de gauche a droite, chaque ab (a dans Gamma_l, b dans Gamma_r) par c_ab.

    Raises:
        PartitionNotDisjoint: Si Gamma_l et Gamma_r se recouvrent.
    """
    if not partition.is_disjoint():
        raise PartitionNotDisjoint(f"{sorted(partition.left & partition.right)}")
    out: list[int] = []
    i = 0
    while i < len(w):
        if i + 1 < len(w) and w[i] in partition.left and w[i + 1] in partition.right:
            out.append(log.pair_letter(w[i], w[i + 1], phase))
            i += 2
        else:
            out.append(w[i])
            i += 1
    return out


def canonical_partitions(gamma: Iterable[int]) -> list[Partition]:
    """
    Calendrier canonique: pour chaque bit i < ceil(log2 m) de l'indice des
    lettres triees, bit 0 a gauche et bit 1 a droite, puis la partition inverse.
    """
    letters = sorted(gamma)
    partitions: list[Partition] = []
    for bit in range(ceil_log2(len(letters))):
        left = frozenset(a for j, a in enumerate(letters) if not (j >> bit) & 1)
        right = frozenset(letters) - left
        partitions.append(Partition(left, right))
        partitions.append(Partition(right, left))
    return partitions


def compress_phase_string(w: Sequence[int], log: DerivationLog, phase: int = 1) -> list[int]:
    """Une phase complete sur un mot: blocs puis calendrier canonique des paires."""
    gamma = frozenset(w)
    out = block_compress_string(w, gamma, log, phase)
    for partition in canonical_partitions(gamma):
        out = pair_compress_string(out, partition, log, phase)
    return out


# ============================================================
# EQUATIONS
# ============================================================


def _check_block_pop(eq: Equation, var: int, guess: BlockPop) -> None:
    name = eq.table.display(var)
    if guess.is_vanish:
        if guess.ell or guess.r or guess.last is not None:
            raise InconsistentGuess(f"{name}: image vide avec des lettres depilees")
        return
    if guess.ell < 1:
        raise InconsistentGuess(f"{name}: l = {guess.ell} < 1")
    if guess.r < 0:
        raise InconsistentGuess(f"{name}: r = {guess.r} < 0")
    if guess.first not in eq.alphabet:
        raise InconsistentGuess(f"{name}: lettre {guess.first} hors de l'alphabet")
    if guess.r > 0:
        if guess.last is None or guess.last not in eq.alphabet:
            raise InconsistentGuess(f"{name}: suffixe sans lettre valide")
        if guess.empty and guess.last == guess.first:
            raise InconsistentGuess(f"{name}: le a-prefixe n'est pas maximal")
    elif guess.last is not None:
        raise InconsistentGuess(f"{name}: lettre de suffixe avec r = 0")


def pop_blocks(eq: Equation, guess: dict[int, BlockPop], log: DerivationLog, phase: int,
               counters: PhaseCounters | None = None) -> Equation:
    """
    Remplace chaque X par a^l X b^r (ou a^l b^r si l'image devient vide).

    Les variables absentes du choix sont laissees telles quelles, ce qui
    permet au mode aveugle de depiler variable par variable.

    Args:
        eq: Equation en debut de phase.
        guess: Choix par variable (un seul choix pour toutes ses occurrences).
        log: Journal des depilements.
        phase: Phase courante.
        counters: Compteurs p_D (un par cote depile).

    Returns:
        Nouvelle equation.

    Raises:
        InconsistentGuess: l < 1, suffixe incoherent ou lettre inconnue.
    """
    for var, g in guess.items():
        _check_block_pop(eq, var, g)
    sides = []
    for side in Side:
        out: list[Occurrence] = []
        for occ in eq.side(side):
            g = guess.get(occ.symbol)
            if g is None:
                out.append(occ)
                continue
            if not g.is_vanish:
                out.extend(assign_pop_depfactor(occ, [g.first] * g.ell, counters, units=1))  # type: ignore[list-item]
            if not g.empty:
                out.append(occ)
            if g.r:
                out.extend(assign_pop_depfactor(occ, [g.last] * g.r, counters, units=1))  # type: ignore[list-item]
        sides.append(out)
    for var, g in sorted(guess.items()):
        if not g.is_vanish:
            log.record_pop(var, PopSide.LEFT, (g.first,) * g.ell, phase)  # type: ignore[arg-type]
            log.record_pop(var, PopSide.RIGHT, (g.last,) * g.r, phase)  # type: ignore[arg-type]
        if g.empty:
            log.record_removed(var, phase)
    return eq.with_sides(*sides)


def _compress_blocks(occs: tuple[Occurrence, ...], gamma: frozenset[int], log: DerivationLog,
                     phase: int) -> list[Occurrence]:
    out: list[Occurrence] = []
    i = 0
    while i < len(occs):
        sym = occs[i].symbol
        j = i + 1
        while j < len(occs) and occs[j].symbol == sym:
            j += 1
        if sym in gamma and j - i >= 2:
            dep = sum_all(o.dep for o in occs[i:j])
            out.append(Occurrence(log.block_letter(sym, j - i, phase), dep))
        else:
            out.extend(occs[i:j])
        i = j
    return out


def block_compress_equation(eq: Equation, gamma: frozenset[int], log: DerivationLog, phase: int,
                            counters: PhaseCounters | None = None) -> Equation:
    """
    Compression des blocs des deux cotes, apres extension des facteurs.

    Les variables et les marqueurs separent les blocs.
    """
    extended = extend_for_block(eq, gamma, counters)
    return extended.with_sides(*(_compress_blocks(s, gamma, log, phase) for s in extended.sides))


def pop_letters(eq: Equation, partition: Partition, guess: dict[int, PairPop], log: DerivationLog,
                phase: int, counters: PhaseCounters | None = None) -> Equation:
    """
    Remplace X par bX si b (dans Gamma_r) commence sigma(X), et X par Xa
    si a (dans Gamma_l) le termine.

    Raises:
        IllegalPop: Lettre depilee hors de la garde de la partition.
        InconsistentGuess: Image declaree vide sans depilement.
    """
    for var, g in guess.items():
        name = eq.table.display(var)
        if g.left is not None and g.left not in partition.right:
            raise IllegalPop(f"{name}: depilement gauche hors de Gamma_r")
        if g.right is not None and g.right not in partition.left:
            raise IllegalPop(f"{name}: depilement droit hors de Gamma_l")
        if g.empty and not g.popped:
            raise InconsistentGuess(f"{name}: image vide sans depilement")
    sides = []
    for side in Side:
        out: list[Occurrence] = []
        for occ in eq.side(side):
            g = guess.get(occ.symbol)
            if g is None:
                out.append(occ)
                continue
            if g.left is not None:
                out.extend(assign_pop_depfactor(occ, [g.left], counters))
            if not g.empty:
                out.append(occ)
            if g.right is not None:
                out.extend(assign_pop_depfactor(occ, [g.right], counters))
        sides.append(out)
    for var, g in sorted(guess.items()):
        if g.left is not None:
            log.record_pop(var, PopSide.LEFT, (g.left,), phase)
        if g.right is not None:
            log.record_pop(var, PopSide.RIGHT, (g.right,), phase)
        if g.empty:
            log.record_removed(var, phase)
    return eq.with_sides(*sides)


def _compress_pairs(occs: tuple[Occurrence, ...], partition: Partition, log: DerivationLog,
                    phase: int) -> list[Occurrence]:
    out: list[Occurrence] = []
    i = 0
    while i < len(occs):
        a = occs[i]
        if i + 1 < len(occs) and a.symbol in partition.left and occs[i + 1].symbol in partition.right:
            b = occs[i + 1]
            out.append(Occurrence(log.pair_letter(a.symbol, b.symbol, phase), sum_all((a.dep, b.dep))))
            i += 2
        else:
            out.append(a)
            i += 1
    return out


def pair_compress_equation(eq: Equation, partition: Partition, log: DerivationLog,
                           coverage: CoverageState | None, phase: int,
                           counters: PhaseCounters | None = None) -> Equation:
    """
    Compression des paires explicites ab de Gamma_l Gamma_r, apres extension.

    Args:
        eq: Equation apres pop_letters.
        partition: Partition appliquee.
        log: Journal des regles.
        coverage: Paires couvertes de la phase (mise a jour meme sans occurrence).
        phase: Phase courante.
        counters: Compteurs e_D.

    Raises:
        PartitionNotDisjoint: Si Gamma_l et Gamma_r se recouvrent.
    """
    if not partition.is_disjoint():
        raise PartitionNotDisjoint(f"{sorted(partition.left & partition.right)}")
    extended = extend_for_pair(eq, partition, counters)
    out = extended.with_sides(*(_compress_pairs(s, partition, log, phase) for s in extended.sides))
    if coverage is not None:
        coverage.update(partition)
    return out


# ============================================================
# SOURCES DE CHOIX
# ============================================================


class GuessSource(Protocol):
    """Fournit les depilements d'une phase (guide par sigma ou vide)."""

    def start_phase(self, eq: Equation, gamma: frozenset[int], phase: int) -> None: ...

    def block_guess(self, eq: Equation, gamma: frozenset[int]) -> dict[int, BlockPop]: ...

    def pair_guess(self, eq: Equation, partition: Partition) -> dict[int, PairPop]: ...

    def observe(self, step: Step, eq: Equation) -> None: ...


class PartitionSource(Protocol):
    """Fournit les partitions d'une phase jusqu'a couverture complete."""

    last_choice: object | None

    def start_phase(self, eq: Equation, gamma: frozenset[int], phase: int) -> None: ...

    def next_partition(self, eq: Equation, coverage: CoverageState) -> Partition | None: ...


class NoPopGuide:
    """Aucun depilement: equations sans variable ou compression d'un mot."""

    def start_phase(self, eq: Equation, gamma: frozenset[int], phase: int) -> None:
        pass

    def block_guess(self, eq: Equation, gamma: frozenset[int]) -> dict[int, BlockPop]:
        return {}

    def pair_guess(self, eq: Equation, partition: Partition) -> dict[int, PairPop]:
        return {}

    def observe(self, step: Step, eq: Equation) -> None:
        pass


class CanonicalPartitionSource:
    """Calendrier canonique, en sautant les partitions qui ne couvrent rien de nouveau."""

    def __init__(self) -> None:
        self.last_choice: object | None = None
        self._pending: Iterator[Partition] = iter(())

    def start_phase(self, eq: Equation, gamma: frozenset[int], phase: int) -> None:
        self._pending = iter(canonical_partitions(gamma))

    def next_partition(self, eq: Equation, coverage: CoverageState) -> Partition | None:
        for partition in self._pending:
            if coverage.new_pairs(partition):
                return partition
        return None


class StepRecorder(Protocol):
    def start_phase(self, eq: Equation, phase: int) -> PhaseCounters: ...

    def record(self, label: str, eq: Equation, size: EncodedSize, coverage: CoverageState,
               choice: object | None = None) -> None: ...

    def end_phase(self, eq: Equation) -> None: ...


# ============================================================
# PHASE
# ============================================================


def _check_space(size: EncodedSize, cap: int | None, phase: int) -> None:
    if cap is not None and size.total_bits > cap:
        raise SpaceCapExceeded(f"phase {phase}: {size.total_bits} bits > {cap}")


def run_phase(eq: Equation, guide: GuessSource, partitions: PartitionSource, log: DerivationLog,
              recorder: StepRecorder | None = None, *, phase: int,
              space_cap_bits: int | None = None) -> Equation:
    """
    Execute une phase: depilement et compression des blocs, puis paires
    jusqu'a ce que toutes les paires ordonnees distinctes de Gamma soient couvertes.

    Args:
        eq: Equation en debut de phase.
        guide: Source des depilements.
        partitions: Source des partitions.
        log: Journal de derivation du run.
        recorder: Enregistreur de mesures (optionnel).
        phase: Numero de phase (a partir de 1).
        space_cap_bits: Taille codee maximale apres chaque etape.

    Returns:
        Equation en fin de phase.

    Raises:
        SpaceCapExceeded: Si une etape depasse space_cap_bits.
    """
    gamma = eq.alphabet
    coverage = CoverageState(gamma)
    guide.start_phase(eq, gamma, phase)
    partitions.start_phase(eq, gamma, phase)
    counters = recorder.start_phase(eq, phase) if recorder is not None else None
    logger.info("phase %d: |Gamma| = %d, |U| + |V| = %d", phase, len(gamma), eq.occurrence_count())

    def after(step: Step, label: str, current: Equation, choice: object | None = None) -> None:
        guide.observe(step, current)
        size = measure(current)
        _check_space(size, space_cap_bits, phase)
        if recorder is not None:
            recorder.record(label, current, size, coverage, choice)

    block_guess = guide.block_guess(eq, gamma)
    eq = pop_blocks(eq, block_guess, log, phase, counters)
    after(BlockPopStep(block_guess, phase), "block_pop", eq)
    eq = block_compress_equation(eq, gamma, log, phase, counters)
    after(BlockCompressStep(gamma, phase), "block_compress", eq)

    while not coverage.is_complete():
        partition = partitions.next_partition(eq, coverage)
        if partition is None:
            logger.warning("phase %d: plus de partition, %d paires non couvertes",
                           phase, coverage.uncovered_count())
            break
        logger.debug("phase %d: partition %s | %s", phase, sorted(partition.left), sorted(partition.right))
        choice = partitions.last_choice
        pair_guess = guide.pair_guess(eq, partition)
        eq = pop_letters(eq, partition, pair_guess, log, phase, counters)
        after(PairPopStep(partition, pair_guess, phase), "pair_pop", eq, choice)
        eq = pair_compress_equation(eq, partition, log, coverage, phase, counters)
        after(PairCompressStep(partition, phase), "pair_compress", eq, choice)

    if recorder is not None:
        recorder.end_phase(eq)
    return eq
