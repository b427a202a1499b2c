"""
Solution fantome des runs guides.

Une solution connue sigma dicte tous les choix non deterministes; elle est
avancee apres chaque reecriture pour rester une solution de l'equation
courante.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from equations_mots.equation import apply_side, check_solution, restrict
from equations_mots.errors import Desync, NotASolution
from equations_mots.models import (
    BlockCompressStep,
    BlockPop,
    BlockPopStep,
    Equation,
    PairCompressStep,
    PairPop,
    PairPopStep,
    Partition,
    Side,
    Step,
    Substitution,
)
from equations_mots.repository import SymbolTable
from equations_mots.services.derivation import DerivationLog
from equations_mots.services.recompression import block_compress_string, pair_compress_string

logger = logging.getLogger(__name__)


def block_guess_of(image: tuple[int, ...]) -> BlockPop:
    """Lit a, l (a-prefixe maximal), b, r (b-suffixe maximal du reste) sur une image."""
    if not image:
        return BlockPop.vanish()
    first = image[0]
    ell = 1
    while ell < len(image) and image[ell] == first:
        ell += 1
    rest = image[ell:]
    if not rest:
        return BlockPop(first, ell, None, 0, True)
    last = rest[-1]
    r = 1
    while r < len(rest) and rest[-1 - r] == last:
        r += 1
    return BlockPop(first, ell, last, r, r == len(rest))


def pair_guess_of(image: tuple[int, ...], partition: Partition) -> PairPop:
    """Depile la premiere lettre si elle est dans Gamma_r, la derniere si elle est dans Gamma_l."""
    left = image[0] if image and image[0] in partition.right else None
    rest = image[1:] if left is not None else image
    right = rest[-1] if rest and rest[-1] in partition.left else None
    remainder = rest[:-1] if right is not None else rest
    return PairPop(left, right, not remainder and (left is not None or right is not None))


def derive_guesses_from_solution(eq: Equation, sigma: Substitution, partition: Partition | None = None,
                                 check: bool = True) -> dict[int, BlockPop] | dict[int, PairPop]:
    """
    Choix de depilement dictes par une solution.

    Args:
        eq: Equation courante.
        sigma: Solution de eq.
        partition: None pour les blocs, la partition courante pour les paires.
        check: Verifie d'abord que sigma resout eq.

    Returns:
        Choix par variable presente dans eq.

    Raises:
        NotASolution: Si sigma ne resout pas eq.
    """
    if check and not check_solution(eq, sigma):
        raise NotASolution("sigma ne resout pas l'equation courante")
    if partition is None:
        return {x: block_guess_of(tuple(sigma[x])) for x in sorted(eq.variables)}
    return {x: pair_guess_of(tuple(sigma[x]), partition) for x in sorted(eq.variables)}


def _strip(image: tuple[int, ...], prefix: int, suffix: int) -> tuple[int, ...]:
    return image[prefix:len(image) - suffix]


def advance_solution(sigma: Substitution, step: Step, log: DerivationLog,
                     eq_after: Equation | None = None) -> Substitution:
    """
    Avance sigma d'une etape: retrait des lettres depilees puis meme
    compression a l'interieur de chaque image; les variables supprimees
    disparaissent.

    Args:
        sigma: Solution avant l'etape.
        step: Etape appliquee a l'equation.
        log: Journal du run (memes lettres fraiches que l'equation).
        eq_after: Equation reecrite, pour la verification.

    Returns:
        Nouvelle solution.

    Raises:
        Desync: Si la nouvelle solution ne resout pas eq_after.
    """
    out: Substitution = {}
    if isinstance(step, BlockPopStep):
        for x, image in sigma.items():
            g = step.guess.get(x)
            if g is None:
                out[x] = image
            elif not g.empty:
                out[x] = _strip(image, g.ell, g.r)
    elif isinstance(step, PairPopStep):
        for x, image in sigma.items():
            g = step.guess.get(x)
            if g is None:
                out[x] = image
            elif not g.empty:
                out[x] = _strip(image, int(g.left is not None), int(g.right is not None))
    elif isinstance(step, BlockCompressStep):
        for x, image in sigma.items():
            out[x] = tuple(block_compress_string(image, step.gamma, log, step.phase))
    elif isinstance(step, PairCompressStep):
        for x, image in sigma.items():
            out[x] = tuple(pair_compress_string(image, step.partition, log, step.phase))
    else:
        raise TypeError(f"etape inconnue: {step!r}")

    if eq_after is not None:
        missing = eq_after.variables - out.keys()
        if missing or not check_solution(eq_after, out):
            raise Desync(f"{type(step).__name__} phase {step.phase}: sigma ne resout plus l'equation")
    return out


def has_equal_adjacent(word: tuple[int, ...], gamma: frozenset[int]) -> bool:
    """Vrai si deux lettres egales de gamma sont voisines dans word."""
    return any(a == b and a in gamma for a, b in zip(word, word[1:]))


@dataclass
class ShadowSolution:
    """
    Solution suivie pendant un run guide.

    Attributes:
        sigma: Images courantes.
        start_lengths: Longueurs des images en debut de phase.
    """
    sigma: Substitution
    start_lengths: dict[int, int] = field(default_factory=dict)

    @classmethod
    def for_equation(cls, eq: Equation, sigma: Substitution) -> ShadowSolution:
        """
        Raises:
            NotASolution: Si sigma ne resout pas eq.
        """
        if not check_solution(eq, sigma):
            raise NotASolution("le temoin ne resout pas l'equation")
        return cls(restrict(sigma, eq))

    def image(self, var: int) -> tuple[int, ...]:
        return tuple(self.sigma.get(var, ()))

    def normalize(self, gamma: frozenset[int], table: SymbolTable) -> None:
        """Remplace les lettres hors de gamma par la plus petite lettre de gamma (ordre d'affichage)."""
        if not gamma:
            self.sigma = {x: () for x in self.sigma}
        else:
            least = min(gamma, key=lambda sid: (table.display(sid), sid))
            self.sigma = {
                x: tuple(a if a in gamma else least for a in image) for x, image in self.sigma.items()
            }
        self.start_lengths = {x: len(image) for x, image in self.sigma.items()}

    def materialize(self, eq: Equation, side: Side) -> tuple[int, ...]:
        return apply_side(eq, side, self.sigma)


class ShadowGuide:
    """
    Source de choix d'un run guide: les depilements sont lus sur sigma et
    sigma est avance (et verifie) apres chaque etape.
    """

    def __init__(self, shadow: ShadowSolution, log: DerivationLog) -> None:
        self.shadow = shadow
        self.log = log
        self._gamma: frozenset[int] = frozenset()

    def start_phase(self, eq: Equation, gamma: frozenset[int], phase: int) -> None:
        self._gamma = gamma
        self.shadow.normalize(gamma, eq.table)

    def block_guess(self, eq: Equation, gamma: frozenset[int]) -> dict[int, BlockPop]:
        return derive_guesses_from_solution(eq, self.shadow.sigma)  # type: ignore[return-value]

    def pair_guess(self, eq: Equation, partition: Partition) -> dict[int, PairPop]:
        return derive_guesses_from_solution(eq, self.shadow.sigma, partition, check=False)  # type: ignore[return-value]

    def observe(self, step: Step, eq: Equation) -> None:
        self.shadow.sigma = advance_solution(self.shadow.sigma, step, self.log, eq)
        if isinstance(step, BlockCompressStep):
            word = self.shadow.materialize(eq, Side.LHS)
            if has_equal_adjacent(word, self._gamma):
                raise Desync(f"phase {step.phase}: lettres egales voisines apres compression des blocs")
