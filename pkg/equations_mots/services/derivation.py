"""
Journal de derivation: regles des lettres fraiches et depilements.

Le journal alloue les lettres fraiches (une par paire ou par bloc et par
phase) et permet de reconstruire un temoin sur l'alphabet d'entree.
"""

from __future__ import annotations

from dataclasses import dataclass

from equations_mots.errors import DanglingRule
from equations_mots.models import Origin, PopSide
from equations_mots.repository import SymbolTable


@dataclass(frozen=True)
class PairRule:
    letter: int
    left: int
    right: int
    phase: int


@dataclass(frozen=True)
class BlockRule:
    letter: int
    base: int
    length: int
    phase: int


@dataclass(frozen=True)
class Pop:
    variable: int
    side: PopSide
    letters: tuple[int, ...]
    phase: int


@dataclass(frozen=True)
class Removed:
    variable: int
    phase: int


Record = PairRule | BlockRule | Pop | Removed


class DerivationLog:
    """
    Journal en ajout seul d'un run (ou d'une branche de recherche).

    Attributes:
        table: Table des symboles ou sont creees les lettres fraiches.
        records: Enregistrements dans l'ordre d'ajout.
    """

    def __init__(self, table: SymbolTable) -> None:
        self.table = table
        self.records: list[Record] = []
        self._rules: dict[int, PairRule | BlockRule] = {}
        self._pair_index: dict[tuple[int, int, int], int] = {}
        self._block_index: dict[tuple[int, int, int], int] = {}

    # -- allocation ----------------------------------------------------

    def pair_letter(self, left: int, right: int, phase: int) -> int:
        """
        Lettre fraiche c_ab de la paire (a, b) pour la phase (memoisee).

        Args:
            left: Lettre a.
            right: Lettre b.
            phase: Phase courante.

        Returns:
            Identifiant de c_ab.
        """
        key = (phase, left, right)
        letter = self._pair_index.get(key)
        if letter is None:
            letter = self.table.fresh(Origin.PAIR, phase)
            rule = PairRule(letter, left, right, phase)
            self._pair_index[key] = letter
            self._rules[letter] = rule
            self.records.append(rule)
        return letter

    def block_letter(self, base: int, length: int, phase: int) -> int:
        """Lettre fraiche a_l du bloc a^l pour la phase (memoisee)."""
        key = (phase, base, length)
        letter = self._block_index.get(key)
        if letter is None:
            display = f"{self.table.display(base)}_{length}"
            letter = self.table.fresh(Origin.BLOCK, phase, display)
            rule = BlockRule(letter, base, length, phase)
            self._block_index[key] = letter
            self._rules[letter] = rule
            self.records.append(rule)
        return letter

    # -- depilements ---------------------------------------------------

    def record_pop(self, variable: int, side: PopSide, letters: tuple[int, ...], phase: int) -> None:
        if letters:
            self.records.append(Pop(variable, side, tuple(letters), phase))

    def record_removed(self, variable: int, phase: int) -> None:
        self.records.append(Removed(variable, phase))

    # -- lecture -------------------------------------------------------

    def rule(self, letter: int) -> PairRule | BlockRule | None:
        return self._rules.get(letter)

    def rules(self) -> list[PairRule | BlockRule]:
        return [r for r in self.records if isinstance(r, (PairRule, BlockRule))]

    def pops(self, variable: int) -> tuple[list[tuple[int, ...]], list[tuple[int, ...]]]:
        """Depilements gauches et droits d'une variable, dans l'ordre chronologique."""
        left: list[tuple[int, ...]] = []
        right: list[tuple[int, ...]] = []
        for rec in self.records:
            if isinstance(rec, Pop) and rec.variable == variable:
                (left if rec.side is PopSide.LEFT else right).append(rec.letters)
        return left, right

    def expand(self, letter: int) -> tuple[int, ...]:
        """
        Expansion d'une lettre sur l'alphabet d'entree (iteratif).

        Raises:
            DanglingRule: Lettre non d'entree sans regle.
        """
        out: list[int] = []
        stack = [letter]
        while stack:
            sid = stack.pop()
            if self.table.is_input(sid):
                out.append(sid)
                continue
            rule = self._rules.get(sid)
            if rule is None:
                raise DanglingRule(f"lettre {self.table.display(sid)} sans regle")
            if isinstance(rule, PairRule):
                stack.append(rule.right)
                stack.append(rule.left)
            else:
                stack.extend([rule.base] * rule.length)
        return tuple(out)

    def expand_word(self, word: tuple[int, ...] | list[int]) -> tuple[int, ...]:
        out: list[int] = []
        for sid in word:
            out.extend(self.expand(sid))
        return tuple(out)

    def fork(self) -> DerivationLog:
        """Copie independante (table comprise) pour une branche de recherche."""
        clone = DerivationLog(self.table.copy())
        clone.records = list(self.records)
        clone._rules = dict(self._rules)
        clone._pair_index = dict(self._pair_index)
        clone._block_index = dict(self._block_index)
        return clone

    def __len__(self) -> int:
        return len(self.records)
