"""
Utilitaires: fonctions numeriques du calcul d'espace et nettoyage de texte.
"""

from __future__ import annotations

import math


def h(x: float) -> float:
    """
    Potentiel h(x) = x * log2(x + 1).

    Args:
        x: Valeur positive ou nulle.

    Returns:
        h(x), nul pour x = 0.
    """
    if x <= 0:
        return 0.0
    return x * math.log2(x + 1)


def ceil_log2(n: int) -> int:
    """Plus petit k tel que 2**k >= n (0 pour n <= 1)."""
    if n <= 1:
        return 0
    return (n - 1).bit_length()


def phase_bound(n: int) -> int:
    """Nombre maximal de phases guidees: ceil(log_{3/2} max(n, 1)) + 2."""
    n = max(n, 1)
    if n == 1:
        return 2
    return math.ceil(math.log(n) / math.log(1.5) - 1e-12) + 2


def strip_comment(line: str) -> str:
    """
    Retire un commentaire '#' et les blancs de bord.

    Args:
        line: Ligne brute.

    Returns:
        Contenu utile de la ligne (eventuellement vide).
    """
    idx = line.find("#")
    if idx >= 0:
        line = line[:idx]
    return line.strip()


def content_lines(text: str) -> list[str]:
    """Lignes non vides d'un texte, commentaires retires."""
    return [s for s in (strip_comment(line) for line in text.splitlines()) if s]
