"""
Modeles de domaine: symboles, occurrences, equations, partitions,
choix de depilement, etapes de reecriture et verdicts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum, IntEnum
from functools import cached_property
from typing import TYPE_CHECKING

from equations_mots.config import (
    DEFAULT_MAX_EXPONENT,
    DEFAULT_MAX_PHASES,
    DEFAULT_ORACLE_MAX_LEN,
    DEFAULT_SEED,
    DEFAULT_SPACE_CAP_BITS,
    ORACLE_BUDGET,
    SEARCH_NODE_BUDGET,
    SEARCH_TIME_BUDGET_SEC,
    STRATEGY_EXHAUSTIVE_MAX_LETTERS,
    STRATEGY_SAMPLES_PER_LETTER,
)
from equations_mots.data_structures import IntervalSet
from equations_mots.errors import ConfigError

if TYPE_CHECKING:
    from equations_mots.repository import SymbolTable

# Identifiant reserve du marqueur de bord '@'
ENDMARKER_ID = 0

# ============================================================
# SYMBOLES
# ============================================================


class SymbolKind(Enum):
    LETTER = "letter"
    VARIABLE = "variable"
    ENDMARKER = "endmarker"


class Origin(Enum):
    INPUT = "input"
    PAIR = "pair"
    BLOCK = "block"


class Side(IntEnum):
    LHS = 0
    RHS = 1


class PopSide(Enum):
    LEFT = "left"
    RIGHT = "right"


@dataclass(frozen=True)
class Symbol:
    """
    Symbole interne (lettre, variable ou marqueur).

    Attributes:
        id: Identifiant unique attribue par la SymbolTable.
        kind: Nature du symbole, immuable.
        origin: INPUT pour les symboles du texte, PAIR/BLOCK pour les lettres fraiches.
        phase: Phase de creation d'une lettre fraiche (None pour l'entree).
        display: Texte affiche.
    """
    id: int
    kind: SymbolKind
    origin: Origin = Origin.INPUT
    phase: int | None = None
    display: str = ""


# ============================================================
# FACTEURS DE DEPENDANCE ET OCCURRENCES
# ============================================================


@dataclass(frozen=True)
class Depfactor:
    """
    Facteur de dependance: ensemble de positions de base d'un cote
    de l'equation d'origine (marqueurs compris).

    Attributes:
        side: Cote de l'equation d'origine.
        positions: Positions de base, stockees en intervalles maximaux.
    """
    side: Side
    positions: IntervalSet

    @classmethod
    def basic(cls, side: Side, position: int) -> Depfactor:
        """Facteur de base d'une position de l'equation d'origine."""
        return cls(side, IntervalSet.singleton(position))

    @property
    def lo(self) -> int:
        return self.positions.lo

    @property
    def hi(self) -> int:
        return self.positions.hi

    def __contains__(self, position: object) -> bool:
        return position in self.positions

    def __iter__(self):
        return iter(self.positions)

    def __len__(self) -> int:
        return len(self.positions)

    def __str__(self) -> str:
        return f"{self.side.name}{self.positions}"


@dataclass(frozen=True)
class Occurrence:
    """Occurrence d'un symbole dans l'equation, avec son facteur de dependance."""
    symbol: int
    dep: Depfactor


Substitution = dict[int, tuple[int, ...]]


@dataclass(eq=False)
class Equation:
    """
    Equation U = V: deux suites d'occurrences encadrees par des marqueurs.

    Une Equation n'est jamais modifiee apres construction: les reecritures
    produisent de nouvelles instances via with_sides().

    Attributes:
        lhs: Occurrences du cote gauche (marqueurs compris).
        rhs: Occurrences du cote droit (marqueurs compris).
        table: Table des symboles partagee par le run.
        n_x: Nombre d'occurrences par variable (0 une fois la variable supprimee).
    """
    lhs: tuple[Occurrence, ...]
    rhs: tuple[Occurrence, ...]
    table: SymbolTable
    n_x: dict[int, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        counts = self.recount()
        merged = {x: 0 for x in self.n_x}
        merged.update(counts)
        self.n_x = merged

    # -- construction --------------------------------------------------

    def with_sides(self, lhs: list[Occurrence] | tuple[Occurrence, ...],
                   rhs: list[Occurrence] | tuple[Occurrence, ...]) -> Equation:
        """Nouvelle equation sur la meme table; les variables disparues gardent n_X = 0."""
        return Equation(tuple(lhs), tuple(rhs), self.table, dict.fromkeys(self.n_x, 0))

    def rebind(self, table: SymbolTable) -> Equation:
        """Meme equation rattachee a une autre table (copie de branche)."""
        return Equation(self.lhs, self.rhs, table, dict(self.n_x))

    # -- lecture -------------------------------------------------------

    def side(self, side: Side) -> tuple[Occurrence, ...]:
        return self.lhs if side is Side.LHS else self.rhs

    @property
    def sides(self) -> tuple[tuple[Occurrence, ...], tuple[Occurrence, ...]]:
        return (self.lhs, self.rhs)

    def symbols(self, side: Side) -> tuple[int, ...]:
        """Identifiants du cote donne, marqueurs compris."""
        return tuple(o.symbol for o in self.side(side))

    def inner(self, side: Side) -> tuple[Occurrence, ...]:
        """Occurrences du cote donne, sans les marqueurs."""
        return tuple(o for o in self.side(side) if o.symbol != ENDMARKER_ID)

    def length(self, side: Side) -> int:
        return len(self.inner(side))

    @cached_property
    def alphabet(self) -> frozenset[int]:
        """Lettres presentes (hors marqueurs)."""
        return frozenset(
            o.symbol for s in self.sides for o in s if self.table.is_letter(o.symbol)
        )

    @cached_property
    def variables(self) -> frozenset[int]:
        """Variables presentes."""
        return frozenset(
            o.symbol for s in self.sides for o in s if self.table.is_variable(o.symbol)
        )

    def recount(self) -> dict[int, int]:
        """Recompte les occurrences de chaque variable presente."""
        counts: dict[int, int] = {}
        for s in self.sides:
            for o in s:
                if self.table.is_variable(o.symbol):
                    counts[o.symbol] = counts.get(o.symbol, 0) + 1
        return counts

    def counts_consistent(self) -> bool:
        """Vrai si n_X stocke correspond au recomptage (0 pour les variables supprimees)."""
        counts = self.recount()
        return all(self.n_x.get(x, 0) == counts.get(x, 0) for x in set(self.n_x) | set(counts))

    def same_sides(self) -> bool:
        """Vrai si les deux cotes sont syntaxiquement identiques."""
        return self.symbols(Side.LHS) == self.symbols(Side.RHS)

    def is_trivial(self) -> bool:
        """Garde de la boucle principale: |U| <= 1 et |V| <= 1."""
        return self.length(Side.LHS) <= 1 and self.length(Side.RHS) <= 1

    def occurrence_count(self) -> int:
        return self.length(Side.LHS) + self.length(Side.RHS)


# ============================================================
# PARTITIONS ET CHOIX
# ============================================================


@dataclass(frozen=True)
class Partition:
    """
    Partition (Gamma_l, Gamma_r) d'une partie de l'alphabet de debut de phase.

    Attributes:
        left: Lettres pouvant commencer une paire compressee.
        right: Lettres pouvant terminer une paire compressee.
    """
    left: frozenset[int]
    right: frozenset[int]

    def is_disjoint(self) -> bool:
        return not (self.left & self.right)

    def pairs(self) -> set[tuple[int, int]]:
        """Paires ordonnees (a, b) avec a a gauche, b a droite, a != b."""
        return {(a, b) for a in self.left for b in self.right if a != b}

    def flipped(self) -> Partition:
        return Partition(self.right, self.left)


@dataclass(frozen=True)
class BlockPop:
    """
    Choix de depilement de blocs pour une variable: sigma(X) = a^l w b^r.

    La forme sans lettre (first=None) signifie que l'image est vide et que
    la variable disparait sans depiler.

    Attributes:
        first: Lettre a du prefixe, None pour une image vide.
        ell: Longueur du a-prefixe maximal.
        last: Lettre b du suffixe, None si r = 0.
        r: Longueur du b-suffixe maximal (mesure apres retrait du a-prefixe).
        empty: Vrai si rien ne reste apres depilement.
    """
    first: int | None
    ell: int
    last: int | None = None
    r: int = 0
    empty: bool = False

    @classmethod
    def vanish(cls) -> BlockPop:
        return cls(None, 0, None, 0, True)

    @property
    def is_vanish(self) -> bool:
        return self.first is None


@dataclass(frozen=True)
class PairPop:
    """
    Choix de depilement de lettres pour une variable sous une partition.

    Attributes:
        left: Premiere lettre depilee a gauche (dans Gamma_r) ou None.
        right: Derniere lettre depilee a droite (dans Gamma_l) ou None.
        empty: Vrai si l'image devient vide.
    """
    left: int | None = None
    right: int | None = None
    empty: bool = False

    @property
    def popped(self) -> int:
        return (self.left is not None) + (self.right is not None)


PopGuess = dict[int, "BlockPop | PairPop"]


@dataclass
class CoverageState:
    """
    Paires ordonnees deja couvertes pendant la phase.

    Attributes:
        gamma: Alphabet de debut de phase.
        covered: Paires (a, b), a != b, deja couvertes.
    """
    gamma: frozenset[int]
    covered: set[tuple[int, int]] = field(default_factory=set)

    def new_pairs(self, partition: Partition) -> set[tuple[int, int]]:
        """Paires que la partition couvrirait pour la premiere fois."""
        return {
            (a, b) for (a, b) in partition.pairs()
            if a in self.gamma and b in self.gamma and (a, b) not in self.covered
        }

    def update(self, partition: Partition) -> int:
        """Enregistre la partition; retourne le nombre de paires nouvellement couvertes."""
        fresh = self.new_pairs(partition)
        self.covered |= fresh
        return len(fresh)

    def uncovered(self) -> set[tuple[int, int]]:
        return {(a, b) for a in self.gamma for b in self.gamma if a != b} - self.covered

    def uncovered_count(self) -> int:
        m = len(self.gamma)
        return m * (m - 1) - len(self.covered)

    def is_complete(self) -> bool:
        return self.uncovered_count() == 0


# ============================================================
# ETAPES DE REECRITURE
# ============================================================


@dataclass(frozen=True)
class BlockPopStep:
    guess: dict[int, BlockPop]
    phase: int


@dataclass(frozen=True)
class BlockCompressStep:
    gamma: frozenset[int]
    phase: int


@dataclass(frozen=True)
class PairPopStep:
    partition: Partition
    guess: dict[int, PairPop]
    phase: int


@dataclass(frozen=True)
class PairCompressStep:
    partition: Partition
    phase: int


Step = BlockPopStep | BlockCompressStep | PairPopStep | PairCompressStep


# ============================================================
# CONFIGURATION ET VERDICTS
# ============================================================


@dataclass
class SolverConfig:
    """
    Bornes et reglages d'un run.

    Attributes:
        max_phases: Nombre maximal de phases.
        max_block_exponent: Borne sur les exposants l, r devines en mode aveugle.
        max_oracle_len: Borne sur |sigma(X)| pour l'oracle.
        space_cap_bits: Taille codee maximale d'une equation.
        rng_seed: Graine des choix aleatoires de la strategie.
        partition_mode: "canonical" ou "strategy".
        node_budget: Budget de noeuds du mode aveugle (UNKNOWN au-dela).
        time_budget_sec: Budget de temps du mode aveugle.
        oracle_budget: Nombre maximal de candidats enumeres par l'oracle.
        new_letter_mode: "outside_gamma" ou "pair_only".
        check_invariants: Verifie les invariants des facteurs apres chaque etape guidee.
        strict_halving: Leve NoHalvingPartitionFound si aucune partition ne convient.
        samples_per_letter: Tirages aleatoires de partitions par lettre de Gamma.
        exhaustive_max_letters: Enumeration exhaustive des partitions jusqu'a cette taille de Gamma.
    """
    max_phases: int = DEFAULT_MAX_PHASES
    max_block_exponent: int = DEFAULT_MAX_EXPONENT
    max_oracle_len: int = DEFAULT_ORACLE_MAX_LEN
    space_cap_bits: int = DEFAULT_SPACE_CAP_BITS
    rng_seed: int = DEFAULT_SEED
    partition_mode: str = "canonical"
    node_budget: int = SEARCH_NODE_BUDGET
    time_budget_sec: float = SEARCH_TIME_BUDGET_SEC
    oracle_budget: int = ORACLE_BUDGET
    new_letter_mode: str = "outside_gamma"
    check_invariants: bool = True
    strict_halving: bool = True
    samples_per_letter: int = STRATEGY_SAMPLES_PER_LETTER
    exhaustive_max_letters: int = STRATEGY_EXHAUSTIVE_MAX_LETTERS

    PARTITION_MODES = ("canonical", "strategy")
    NEW_LETTER_MODES = ("outside_gamma", "pair_only")

    def __post_init__(self) -> None:
        for name in ("max_phases", "max_block_exponent", "space_cap_bits", "node_budget", "oracle_budget"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} doit etre >= 1 (recu {getattr(self, name)})")
        for name in ("samples_per_letter", "exhaustive_max_letters"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} doit etre >= 0 (recu {getattr(self, name)})")
        if self.max_oracle_len < 0:
            raise ConfigError(f"max_oracle_len doit etre >= 0 (recu {self.max_oracle_len})")
        if self.time_budget_sec <= 0:
            raise ConfigError(f"time_budget_sec doit etre > 0 (recu {self.time_budget_sec})")
        if self.partition_mode not in self.PARTITION_MODES:
            raise ConfigError(f"partition_mode inconnu: {self.partition_mode}")
        if self.new_letter_mode not in self.NEW_LETTER_MODES:
            raise ConfigError(f"new_letter_mode inconnu: {self.new_letter_mode}")

    @classmethod
    def from_app_config(cls, app_config: dict[str, object] | None = None, **overrides: object) -> SolverConfig:
        """
        Construit une configuration a partir d'APP_CONFIG puis des surcharges.

        Args:
            app_config: Dictionnaire au format APP_CONFIG (defaut: le global).
            **overrides: Champs a surcharger (les valeurs None sont ignorees).

        Returns:
            SolverConfig valide.
        """
        if app_config is None:
            from equations_mots.config import APP_CONFIG
            app_config = APP_CONFIG
        solver = dict(app_config.get("solver", {}))  # type: ignore[arg-type]
        oracle = dict(app_config.get("oracle", {}))  # type: ignore[arg-type]
        search = dict(app_config.get("search", {}))  # type: ignore[arg-type]
        strategy = dict(app_config.get("strategy", {}))  # type: ignore[arg-type]
        values: dict[str, object] = {
            "max_phases": solver.get("max_phases", DEFAULT_MAX_PHASES),
            "max_block_exponent": solver.get("max_block_exponent", DEFAULT_MAX_EXPONENT),
            "space_cap_bits": solver.get("space_cap_bits", DEFAULT_SPACE_CAP_BITS),
            "rng_seed": solver.get("rng_seed", DEFAULT_SEED),
            "partition_mode": solver.get("partition_mode", "canonical"),
            "max_oracle_len": oracle.get("max_len", DEFAULT_ORACLE_MAX_LEN),
            "oracle_budget": oracle.get("budget", ORACLE_BUDGET),
            "node_budget": search.get("node_budget", SEARCH_NODE_BUDGET),
            "time_budget_sec": search.get("time_budget_sec", SEARCH_TIME_BUDGET_SEC),
            "new_letter_mode": strategy.get("new_letter_mode", "outside_gamma"),
            "samples_per_letter": strategy.get("samples_per_letter", STRATEGY_SAMPLES_PER_LETTER),
            "exhaustive_max_letters": strategy.get("exhaustive_max_letters", STRATEGY_EXHAUSTIVE_MAX_LETTERS),
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)  # type: ignore[arg-type]


class Status(Enum):
    SAT = "SAT"
    UNSAT = "UNSAT"
    UNKNOWN = "UNKNOWN"


@dataclass
class SearchStats:
    """Compteurs d'un run (noeuds, phases, taille maximale, elagages)."""
    nodes: int = 0
    phases: int = 0
    max_bits: int = 0
    pruned_space: int = 0
    pruned_phases: int = 0
    pruned_mismatch: int = 0
    pruned_visited: int = 0


@dataclass
class Verdict:
    """
    Resultat d'une resolution.

    Attributes:
        status: SAT, UNSAT (dans les bornes) ou UNKNOWN.
        witness: Solution reconstruite (SAT uniquement).
        caps: Bornes utilisees, rappelees pour UNSAT.
        reason: Ressource epuisee pour UNKNOWN.
        stats: Statistiques du run.
    """
    status: Status
    witness: Substitution | None = None
    caps: dict[str, int] = field(default_factory=dict)
    reason: str | None = None
    stats: SearchStats = field(default_factory=SearchStats)

    @property
    def is_sat(self) -> bool:
        return self.status is Status.SAT
