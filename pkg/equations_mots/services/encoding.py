"""
Service Layer Pattern: Codage de Huffman de l'equation et mesure de sa taille.

La taille codee Abs(.) d'une equation est la somme des longueurs de code
de ses occurrences (marqueurs exclus).
"""

from __future__ import annotations

import heapq
import logging
from collections import Counter
from collections.abc import Mapping
from dataclasses import dataclass, field
from fractions import Fraction

from equations_mots.errors import EmptyInput, MissingCode
from equations_mots.models import ENDMARKER_ID, Equation

logger = logging.getLogger(__name__)


@dataclass
class HuffmanNode:
    """Noeud de l'arbre de Huffman; l'ordre du tas est (frequence, cle)."""
    freq: int
    key: int
    symbol: int | None = None
    left: HuffmanNode | None = None
    right: HuffmanNode | None = None

    def __lt__(self, other: HuffmanNode) -> bool:
        return (self.freq, self.key) < (other.freq, other.key)


@dataclass(frozen=True)
class CodeTable:
    """
    Table de codes prefixes.

    Attributes:
        codes: Mot binaire ("0101") par identifiant de symbole.
    """
    codes: dict[int, str] = field(default_factory=dict)

    def code(self, sid: int) -> str:
        try:
            return self.codes[sid]
        except KeyError:
            raise MissingCode(f"aucun code pour le symbole {sid}") from None

    def length(self, sid: int) -> int:
        return len(self.code(sid))

    def kraft_sum(self) -> Fraction:
        return sum((Fraction(1, 2 ** len(c)) for c in self.codes.values()), Fraction(0))

    def is_prefix_free(self) -> bool:
        """Aucun code n'est prefixe d'un autre (verification apres tri)."""
        ordered = sorted(self.codes.values())
        return all(not b.startswith(a) for a, b in zip(ordered, ordered[1:]))

    def total_bits(self, frequencies: Mapping[int, int]) -> int:
        return sum(count * self.length(sid) for sid, count in frequencies.items() if count > 0)


def build_huffman(frequencies: Mapping[int, int]) -> CodeTable:
    """
    Construit un code de Huffman.

    Les egalites sont departagees par (frequence, identifiant) croissants;
    les noeuds internes recoivent des cles posterieures a toutes les feuilles.
    Un symbole seul recoit le code "0".

    Args:
        frequencies: Nombre d'occurrences par symbole.

    Returns:
        CodeTable prefixe.

    Raises:
        EmptyInput: Si aucune frequence n'est strictement positive.
    """
    items = sorted((sid, n) for sid, n in frequencies.items() if n > 0)
    if not items:
        raise EmptyInput("aucun symbole de frequence positive")
    if len(items) == 1:
        return CodeTable({items[0][0]: "0"})

    heap = [HuffmanNode(n, sid, symbol=sid) for sid, n in items]
    heapq.heapify(heap)
    next_key = max(sid for sid, _ in items) + 1
    while len(heap) > 1:
        left = heapq.heappop(heap)
        right = heapq.heappop(heap)
        heapq.heappush(heap, HuffmanNode(left.freq + right.freq, next_key, None, left, right))
        next_key += 1

    codes: dict[int, str] = {}
    stack: list[tuple[HuffmanNode, str]] = [(heap[0], "")]
    while stack:
        node, prefix = stack.pop()
        if node.symbol is not None:
            codes[node.symbol] = prefix
            continue
        assert node.left is not None and node.right is not None
        stack.append((node.right, prefix + "1"))
        stack.append((node.left, prefix + "0"))
    return CodeTable(codes)


def symbol_frequencies(eq: Equation, letters: bool = True, variables: bool = True) -> Counter[int]:
    """Frequences des occurrences de l'equation (marqueurs exclus)."""
    table = eq.table
    counts: Counter[int] = Counter()
    for side in eq.sides:
        for occ in side:
            sid = occ.symbol
            if sid == ENDMARKER_ID:
                continue
            if (letters and table.is_letter(sid)) or (variables and table.is_variable(sid)):
                counts[sid] += 1
    return counts


def encoded_size(eq: Equation, table: CodeTable) -> int:
    """
    Taille codee de l'equation: somme des longueurs de code des occurrences.

    Raises:
        MissingCode: Si un symbole de l'equation n'a pas de code.
    """
    return table.total_bits(symbol_frequencies(eq))


def rebuild_after_step(eq: Equation) -> CodeTable:
    """Reconstruit la table de Huffman (lettres et variables) de l'equation courante."""
    freqs = symbol_frequencies(eq)
    if not freqs:
        return CodeTable()
    return build_huffman(freqs)


@dataclass(frozen=True)
class EncodedSize:
    """
    Mesures de taille d'une equation.

    Attributes:
        letter_bits: Bits des lettres sous le code conjoint lettres+variables.
        variable_bits: Bits des variables sous le code conjoint.
        letters_only_bits: Bits des lettres sous un code de Huffman des seules lettres.
        occurrences: Nombre d'occurrences (marqueurs exclus).
    """
    letter_bits: int = 0
    variable_bits: int = 0
    letters_only_bits: int = 0
    occurrences: int = 0

    @property
    def total_bits(self) -> int:
        return self.letter_bits + self.variable_bits

    @property
    def padded_bits(self) -> int:
        """Taille avec un bit de terminaison par occurrence."""
        return self.total_bits + self.occurrences


def measure(eq: Equation) -> EncodedSize:
    """Mesure complete de la taille codee, sous la table reconstruite par rebuild_after_step."""
    joint = rebuild_after_step(eq)
    if not joint.codes:
        return EncodedSize()
    letter_freqs = symbol_frequencies(eq, variables=False)
    letters_only = build_huffman(letter_freqs).total_bits(letter_freqs) if letter_freqs else 0
    letter_bits = joint.total_bits(letter_freqs)
    total = encoded_size(eq, joint)
    return EncodedSize(
        letter_bits=letter_bits,
        variable_bits=total - letter_bits,
        letters_only_bits=letters_only,
        occurrences=sum(symbol_frequencies(eq).values()),
    )
