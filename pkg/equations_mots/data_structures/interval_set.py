"""
Structure de donnees: ensemble d'entiers stocke en intervalles maximaux.

Utilisee pour les facteurs de dependance: un ensemble de positions de
base est presque toujours un seul intervalle, parfois troue lorsqu'une
variable d'image vide disparait.
"""

from __future__ import annotations

from bisect import bisect_right
from collections.abc import Iterable, Iterator
from dataclasses import dataclass


@dataclass(frozen=True)
class IntervalSet:
    """
    Structure de donnees: ensemble immuable d'entiers en intervalles.

    Les intervalles sont fermes, tries, disjoints et non adjacents
    (forme canonique), ce qui rend l'egalite structurelle exacte.

    Complexite:
        - contains: O(log k) - recherche dichotomique sur les bornes
        - union: O(k + k') - fusion de deux listes triees
        - len: O(k)
        (k = nombre d'intervalles)

    Attributes:
        intervals: Tuple de couples (debut, fin) inclus.
    """
    intervals: tuple[tuple[int, int], ...] = ()

    @classmethod
    def singleton(cls, value: int) -> IntervalSet:
        """Ensemble reduit a une valeur."""
        return cls(((value, value),))

    @classmethod
    def from_values(cls, values: Iterable[int]) -> IntervalSet:
        """
        Construit la forme canonique a partir de valeurs quelconques.

        Args:
            values: Entiers (doublons et desordre acceptes).

        Returns:
            IntervalSet canonique.
        """
        merged: list[tuple[int, int]] = []
        for v in sorted(set(values)):
            if merged and merged[-1][1] + 1 == v:
                merged[-1] = (merged[-1][0], v)
            else:
                merged.append((v, v))
        return cls(tuple(merged))

    @property
    def lo(self) -> int:
        """Plus petite valeur (ValueError si vide)."""
        if not self.intervals:
            raise ValueError("IntervalSet vide")
        return self.intervals[0][0]

    @property
    def hi(self) -> int:
        """Plus grande valeur (ValueError si vide)."""
        if not self.intervals:
            raise ValueError("IntervalSet vide")
        return self.intervals[-1][1]

    def is_empty(self) -> bool:
        return not self.intervals

    def is_contiguous(self) -> bool:
        """Vrai si l'ensemble est un seul intervalle."""
        return len(self.intervals) == 1

    def union(self, other: IntervalSet) -> IntervalSet:
        """
        Union de deux ensembles, en forme canonique.

        Args:
            other: Second ensemble.

        Returns:
            Nouvel IntervalSet.
        """
        if not other.intervals or self == other:
            return self
        if not self.intervals:
            return other
        items = sorted(self.intervals + other.intervals)
        merged: list[tuple[int, int]] = [items[0]]
        for lo, hi in items[1:]:
            last_lo, last_hi = merged[-1]
            if lo <= last_hi + 1:
                merged[-1] = (last_lo, max(last_hi, hi))
            else:
                merged.append((lo, hi))
        return IntervalSet(tuple(merged))

    def difference(self, other: IntervalSet) -> list[int]:
        """Valeurs de self absentes de other, en ordre croissant."""
        return [v for v in self if v not in other]

    def __contains__(self, value: object) -> bool:
        if not isinstance(value, int) or not self.intervals:
            return False
        idx = bisect_right(self.intervals, (value, float("inf"))) - 1
        return idx >= 0 and self.intervals[idx][0] <= value <= self.intervals[idx][1]

    def __iter__(self) -> Iterator[int]:
        for lo, hi in self.intervals:
            yield from range(lo, hi + 1)

    def __len__(self) -> int:
        return sum(hi - lo + 1 for lo, hi in self.intervals)

    def __str__(self) -> str:
        parts = [f"{lo}" if lo == hi else f"{lo}..{hi}" for lo, hi in self.intervals]
        return "{" + ",".join(parts) + "}"
