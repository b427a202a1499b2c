"""
Factory Pattern: Generation d'instances satisfiables a solution plantee.

On tire sigma et un motif gauche, puis on refactorise sigma(U) en un
motif droit fait de lettres et de variables dont l'image s'y lit.
"""

from __future__ import annotations

import logging
import random
import string

from equations_mots.config import GENERATOR_MAX_RETRIES
from equations_mots.equation import check_solution, restrict
from equations_mots.errors import ConfigError, GenerationFailed
from equations_mots.models import Equation, Substitution, SymbolKind
from equations_mots.parser import parse_equation

logger = logging.getLogger(__name__)

VARIABLE_NAMES = "XYZWVUTSRQPONMLKJIHGFEDCBA"


def _random_word(rng: random.Random, letters: str, length: int) -> str:
    return "".join(rng.choice(letters) for _ in range(length))


def _factor(rng: random.Random, target: str, images: dict[str, str]) -> list[str] | None:
    """Decoupe target en lettres et en variables dont l'image est lue a la position courante."""
    tokens: list[str] = []
    empties = [x for x, w in images.items() if not w]
    i = 0
    while i < len(target):
        if empties and rng.random() < 0.1:
            tokens.append(rng.choice(empties))
        candidates = [x for x, w in images.items() if w and target.startswith(w, i)]
        if candidates and rng.random() < 0.6:
            x = rng.choice(candidates)
            tokens.append(x)
            i += len(images[x])
        else:
            tokens.append(target[i])
            i += 1
    if not tokens and empties:
        tokens.append(rng.choice(empties))
    return tokens or None


def generate_instance(rng_seed: int, n_vars: int, n_letters: int, side_len: int, sol_len: int,
                      max_retries: int = GENERATOR_MAX_RETRIES) -> tuple[Equation, Substitution]:
    """
    Genere une equation satisfiable et sa solution plantee.

    Args:
        rng_seed: Graine (meme graine, meme instance).
        n_vars: Nombre de variables (0: identite w = w).
        n_letters: Taille de l'alphabet (1 a 26).
        side_len: Longueur du motif gauche.
        sol_len: Longueur maximale de chaque image.
        max_retries: Nombre d'essais.

    Returns:
        (equation, sigma) avec check_solution(equation, sigma) vrai.

    Raises:
        ConfigError: Parametres hors bornes.
        GenerationFailed: Aucun essai n'a abouti.
    """
    if not 1 <= n_letters <= 26:
        raise ConfigError(f"n_letters doit etre entre 1 et 26 (recu {n_letters})")
    if not 0 <= n_vars <= len(VARIABLE_NAMES):
        raise ConfigError(f"n_vars doit etre entre 0 et {len(VARIABLE_NAMES)} (recu {n_vars})")
    if side_len < 0 or sol_len < 0:
        raise ConfigError("side_len et sol_len doivent etre >= 0")

    rng = random.Random(rng_seed)
    letters = string.ascii_lowercase[:n_letters]
    names = VARIABLE_NAMES[:n_vars]
    length = max(side_len, 1)

    if not names:
        word = _random_word(rng, letters, length)
        eq = parse_equation(f"{word} = {word}")
        return eq, {}

    for attempt in range(max_retries):
        images = {x: _random_word(rng, letters, rng.randint(0, sol_len)) for x in names}
        lhs = [rng.choice(names) if rng.random() < 0.5 else rng.choice(letters) for _ in range(length)]
        if not any(t in images for t in lhs):
            lhs[rng.randrange(length)] = rng.choice(names)
        target = "".join(images.get(t, t) for t in lhs)
        rhs = _factor(rng, target, images)
        if rhs is None:
            continue
        eq = parse_equation(f"{''.join(lhs)} = {''.join(rhs)}")
        sigma = {eq.table.lookup(x): tuple(eq.table.intern(ch, SymbolKind.LETTER) for ch in w)
                 for x, w in images.items() if eq.table.lookup(x) is not None}
        sigma = restrict(sigma, eq)  # type: ignore[arg-type]
        if check_solution(eq, sigma):
            logger.debug("instance generee au bout de %d essais", attempt + 1)
            return eq, sigma
    raise GenerationFailed(f"aucune instance apres {max_retries} essais (graine {rng_seed})")
