"""
Oracle par force brute: enumeration de toutes les substitutions bornees.

Sert de reference independante pour les tests differentiels du mode
aveugle.
"""

from __future__ import annotations

import itertools
import logging
from collections import Counter
from collections.abc import Iterator

from equations_mots.config import ORACLE_BUDGET
from equations_mots.equation import check_solution
from equations_mots.errors import ResourceExceeded
from equations_mots.models import Equation, SearchStats, Side, Status, Substitution, Verdict

logger = logging.getLogger(__name__)


def enumeration_size(n_vars: int, n_letters: int, max_len: int) -> int:
    """Nombre de substitutions avec |sigma(X)| <= max_len pour chaque variable."""
    per_var = sum(n_letters ** k for k in range(max_len + 1))
    return per_var ** n_vars


def _length_vectors(n_vars: int, max_len: int) -> Iterator[tuple[int, ...]]:
    """Vecteurs de longueurs tries par somme puis lexicographiquement."""
    vectors = itertools.product(range(max_len + 1), repeat=n_vars)
    yield from sorted(vectors, key=lambda v: (sum(v), v))


def brute_force_solve(eq: Equation, max_len: int, budget: int = ORACLE_BUDGET) -> Verdict:
    """
    Cherche une solution avec |sigma(X)| <= max_len, images sur l'alphabet de eq.

    L'ordre longueur-lexicographique rend le temoin retourne minimal en longueur.

    Args:
        eq: Equation.
        max_len: Longueur maximale de chaque image.
        budget: Nombre maximal de substitutions candidates.

    Returns:
        SAT avec le premier temoin trouve, sinon UNSAT dans la borne.

    Raises:
        ResourceExceeded: Si l'espace a enumerer depasse le budget.
    """
    variables = sorted(eq.variables, key=eq.table.display)
    letters = sorted(eq.alphabet)
    size = enumeration_size(len(variables), len(letters), max_len)
    if size > budget:
        raise ResourceExceeded(f"{size} substitutions candidates > budget {budget}")

    counts = {side: Counter(o.symbol for o in eq.inner(side)) for side in Side}
    ground = {side: sum(n for s, n in counts[side].items() if eq.table.is_letter(s)) for side in Side}
    stats = SearchStats()
    caps = {"max_len": max_len}
    for lengths in _length_vectors(len(variables), max_len):
        if letters == [] and any(lengths):
            continue
        totals = {
            side: ground[side] + sum(counts[side][x] * n for x, n in zip(variables, lengths)) for side in Side
        }
        if totals[Side.LHS] != totals[Side.RHS]:
            continue
        pools = [itertools.product(letters, repeat=n) for n in lengths]
        for images in itertools.product(*pools):
            stats.nodes += 1
            sigma: Substitution = dict(zip(variables, images))
            if check_solution(eq, sigma):
                logger.debug("oracle: solution apres %d candidats", stats.nodes)
                return Verdict(Status.SAT, sigma, caps, None, stats)
    return Verdict(Status.UNSAT, None, caps, None, stats)
