"""
Service Layer Pattern: Facteurs de dependance (depfactors).

Chaque occurrence porte l'ensemble des positions de l'equation d'origine
dont elle depend. Ce module applique les regles d'extension avant les
compressions, verifie les invariants de contiguite, de comparabilite et de
similarite, et calcule les potentiels H_d et H_n qui bornent la taille de l'equation.
"""

from __future__ import annotations

import logging
import math
from collections import Counter, defaultdict
from collections.abc import Iterable
from dataclasses import dataclass, field
from functools import reduce

from equations_mots.errors import IncomparableDepfactors, InvariantViolation
from equations_mots.models import Depfactor, Equation, Occurrence, Partition, Side
from equations_mots.services.encoding import CodeTable, build_huffman
from equations_mots.utils import ceil_log2, h

logger = logging.getLogger(__name__)

Position = tuple[Side, int]

# ============================================================
# CONTEXTE D'ORIGINE
# ============================================================


@dataclass(frozen=True)
class DepContext:
    """
    Donnees figees de l'equation d'origine.

    Attributes:
        symbols: Symboles de chaque cote, marqueurs compris.
        weights: Abs de chaque position de base (longueur du code d'entree).
        input_code: Code de Huffman de l'equation d'entree (marqueurs compris).
    """
    symbols: tuple[tuple[int, ...], tuple[int, ...]]
    weights: tuple[tuple[int, ...], tuple[int, ...]]
    input_code: CodeTable

    @classmethod
    def from_equation(cls, eq: Equation) -> DepContext:
        """Fige le code d'entree et les poids des positions de base."""
        freqs = Counter(o.symbol for side in eq.sides for o in side)
        code = build_huffman(freqs)
        symbols = (eq.symbols(Side.LHS), eq.symbols(Side.RHS))
        weights = tuple(tuple(code.length(s) for s in side) for side in symbols)
        return cls(symbols, weights, code)  # type: ignore[arg-type]

    def positions(self) -> list[Position]:
        return [(side, i) for side in Side for i in range(len(self.symbols[side]))]

    def weight(self, position: Position) -> int:
        side, i = position
        return self.weights[side][i]

    def symbol_weight(self, sid: int) -> int:
        """Abs d'un symbole d'entree (variable ou lettre)."""
        return self.input_code.length(sid)

    def dep_weight(self, dep: Depfactor) -> int:
        return sum(self.weights[dep.side][p] for p in dep)

    def similarity_key(self, dep: Depfactor) -> tuple[int, ...]:
        """Mot d'origine du facteur: deux facteurs similaires ont la meme cle."""
        return tuple(self.symbols[dep.side][p] for p in dep)

    @property
    def input_bits(self) -> int:
        """Abs(U0, V0), marqueurs compris."""
        return sum(sum(w) for w in self.weights)

    @property
    def input_bits_without_markers(self) -> int:
        return sum(
            w for side in Side for s, w in zip(self.symbols[side], self.weights[side]) if s != 0
        )


# ============================================================
# ORDRE ET SOMME
# ============================================================


def precedes(d1: Depfactor, d2: Depfactor) -> bool:
    """D1 <= D2: tout facteur gauche precede tout facteur droit."""
    if d1.side != d2.side:
        return d1.side < d2.side
    return d1.lo <= d2.lo and d1.hi <= d2.hi


def comparable(d1: Depfactor, d2: Depfactor) -> bool:
    return precedes(d1, d2) or precedes(d2, d1)


def sum_depfactors(d1: Depfactor, d2: Depfactor) -> Depfactor:
    """
    Somme de deux facteurs comparables du meme cote (union des positions).

    Raises:
        IncomparableDepfactors: Cotes differents ou facteurs incomparables.
    """
    if d1.side != d2.side or not comparable(d1, d2):
        raise IncomparableDepfactors(f"{d1} + {d2}")
    if d1 == d2:
        return d1
    return Depfactor(d1.side, d1.positions.union(d2.positions))


def sum_all(deps: Iterable[Depfactor]) -> Depfactor:
    return reduce(sum_depfactors, deps)


# ============================================================
# ETAT ET COMPTEURS
# ============================================================


def sup_index(eq: Equation) -> dict[Position, list[int]]:
    """Pour chaque position de base, indices des occurrences dont le facteur la contient."""
    sup: dict[Position, list[int]] = defaultdict(list)
    for side in Side:
        for idx, occ in enumerate(eq.side(side)):
            for p in occ.dep:
                sup[(occ.dep.side, p)].append(idx)
    return sup


@dataclass
class DepState:
    """
    Vue des facteurs de dependance d'une equation.

    Attributes:
        eq: Equation observee.
        ctx: Contexte d'origine.
        sup: Indices des sup-D occurrences par position de base.
    """
    eq: Equation
    ctx: DepContext
    sup: dict[Position, list[int]] = field(default_factory=dict)

    @classmethod
    def build(cls, eq: Equation, ctx: DepContext) -> DepState:
        return cls(eq, ctx, dict(sup_index(eq)))

    def sup_size(self, position: Position) -> int:
        return len(self.sup.get(position, ()))

    def sup_range(self, position: Position) -> tuple[int, int] | None:
        """Premier et dernier indice des sup-D occurrences (None si vide)."""
        idx = self.sup.get(position)
        if not idx:
            return None
        return idx[0], idx[-1]


def init_depfactors(eq: Equation) -> DepState:
    """
    Etat initial: chaque occurrence porte le facteur de base de sa position.

    Args:
        eq: Equation fraichement analysee.

    Returns:
        DepState avec son contexte d'origine.

    Raises:
        InvariantViolation: Si l'equation a deja ete reecrite.
    """
    for side in Side:
        for i, occ in enumerate(eq.side(side)):
            if occ.dep != Depfactor.basic(side, i):
                raise InvariantViolation("init_depfactors attend une equation fraichement analysee")
    return DepState.build(eq, DepContext.from_equation(eq))


@dataclass
class PhaseCounters:
    """
    Compteurs par facteur de base pour une phase.

    Attributes:
        k: Nombre de sup-D symboles en debut de phase.
        p: Lettres depilees avec le facteur D.
        e: Lettres auxquelles D s'est etendu.
    """
    k: Counter[Position] = field(default_factory=Counter)
    p: Counter[Position] = field(default_factory=Counter)
    e: Counter[Position] = field(default_factory=Counter)

    @classmethod
    def start(cls, eq: Equation) -> PhaseCounters:
        return cls(k=Counter({pos: len(idx) for pos, idx in sup_index(eq).items()}))

    def record_pop(self, dep: Depfactor, units: int) -> None:
        for p in dep:
            self.p[(dep.side, p)] += units

    def record_extension(self, old: Depfactor, new: Depfactor) -> None:
        for p in new.positions.difference(old.positions):
            self.e[(new.side, p)] += 1

    @property
    def sum_h_p(self) -> float:
        return sum(h(v) for v in self.p.values())

    @property
    def sum_h_e(self) -> float:
        return sum(h(v) for v in self.e.values())


# ============================================================
# REGLES D'EXTENSION
# ============================================================


def _replace_deps(occs: tuple[Occurrence, ...], deps: list[Depfactor],
                  counters: PhaseCounters | None) -> tuple[Occurrence, ...]:
    out = []
    for occ, dep in zip(occs, deps):
        if dep != occ.dep:
            if counters is not None:
                counters.record_extension(occ.dep, dep)
            occ = Occurrence(occ.symbol, dep)
        out.append(occ)
    return tuple(out)


def _absorb_right(syms: list[int], deps: list[Depfactor], letters: frozenset[int]) -> list[Depfactor]:
    """Passe Gamma_l: chaque lettre absorbe le facteur de son voisin droit (en parallele)."""
    out = list(deps)
    for i in range(len(deps) - 1):
        if syms[i] in letters:
            out[i] = sum_depfactors(deps[i], deps[i + 1])
    return out


def _absorb_left(syms: list[int], deps: list[Depfactor], letters: frozenset[int]) -> list[Depfactor]:
    """Passe Gamma_r: chaque lettre absorbe le facteur de son voisin gauche (en parallele)."""
    out = list(deps)
    for i in range(1, len(deps)):
        if syms[i] in letters:
            out[i] = sum_depfactors(deps[i - 1], deps[i])
    return out


def extend_for_pair(eq: Equation, partition: Partition, counters: PhaseCounters | None = None,
                    right_first: bool = False) -> Equation:
    """
    Extension des facteurs avant une compression de paires.

    Deux passes successives: les lettres de Gamma_l absorbent le facteur
    de leur voisin droit, puis celles de Gamma_r celui de leur voisin
    gauche (ordre inverse si right_first, le resultat est identique).

    Args:
        eq: Equation apres depilement.
        partition: Partition courante.
        counters: Compteurs e_D de la phase (optionnel).
        right_first: Applique la passe Gamma_r en premier.

    Returns:
        Equation aux facteurs etendus.
    """
    sides = []
    for side in Side:
        occs = eq.side(side)
        syms = [o.symbol for o in occs]
        deps = [o.dep for o in occs]
        if right_first:
            deps = _absorb_right(syms, _absorb_left(syms, deps, partition.right), partition.left)
        else:
            deps = _absorb_left(syms, _absorb_right(syms, deps, partition.left), partition.right)
        sides.append(_replace_deps(occs, deps, counters))
    return eq.with_sides(*sides)


def extend_for_block(eq: Equation, gamma: frozenset[int], counters: PhaseCounters | None = None) -> Equation:
    """
    Extension des facteurs avant la compression de blocs.

    Chaque bloc maximal d'une lettre de gamma (longueur 1 comprise) recoit
    la somme des facteurs de ses lettres et de ses deux voisins.
    """
    sides = []
    for side in Side:
        occs = eq.side(side)
        deps = [o.dep for o in occs]
        new = list(deps)
        i = 0
        while i < len(occs):
            sym = occs[i].symbol
            if sym not in gamma:
                i += 1
                continue
            j = i
            while j < len(occs) and occs[j].symbol == sym:
                j += 1
            merged = sum_all(deps[max(i - 1, 0):min(j + 1, len(deps))])
            for k in range(i, j):
                new[k] = merged
            i = j
        sides.append(_replace_deps(occs, new, counters))
    return eq.with_sides(*sides)


def assign_pop_depfactor(occurrence: Occurrence, letters: Iterable[int],
                         counters: PhaseCounters | None = None, units: int | None = None) -> list[Occurrence]:
    """
    Occurrences des lettres depilees par une occurrence de variable.

    Args:
        occurrence: Occurrence de la variable (facteur de base).
        letters: Lettres depilees.
        counters: Compteurs p_D de la phase.
        units: Nombre compte dans p_D (defaut: nombre de lettres).

    Returns:
        Occurrences portant le facteur de base de la variable.
    """
    popped = [Occurrence(sid, occurrence.dep) for sid in letters]
    if counters is not None and popped:
        counters.record_pop(occurrence.dep, len(popped) if units is None else units)
    return popped


# ============================================================
# INVARIANTS
# ============================================================


@dataclass(frozen=True)
class Violation:
    rule: str
    detail: str

    def __str__(self) -> str:
        return f"{self.rule}: {self.detail}"


def _contiguous(indices: list[int]) -> bool:
    return not indices or indices[-1] - indices[0] + 1 == len(indices)


def _classes(eq: Equation) -> dict[tuple[Side, Depfactor], list[int]]:
    """Indices des occurrences par (cote, facteur exact), dans l'ordre."""
    classes: dict[tuple[Side, Depfactor], list[int]] = defaultdict(list)
    for side in Side:
        for idx, occ in enumerate(eq.side(side)):
            classes[(side, occ.dep)].append(idx)
    return classes


def verify_invariants(eq: Equation, ctx: DepContext) -> list[Violation]:
    """
    Verifie la contiguite (sup-ensembles et classes), la comparabilite des voisins
    et la similarite (classes similaires de meme longueur, un meme code D#i
    designant partout le meme symbole).

    Returns:
        Liste des violations (vide si tout va bien).
    """
    violations: list[Violation] = []
    for side in Side:
        for idx, occ in enumerate(eq.side(side)):
            if occ.dep.side is not side or occ.dep.positions.is_empty():
                violations.append(Violation("contiguite", f"{side.name}[{idx}] porte {occ.dep}"))

    for (side, p), idx in sup_index(eq).items():
        if not _contiguous(idx):
            violations.append(Violation("contiguite", f"sup({side.name},{p}) non contigu: {idx}"))

    classes = _classes(eq)
    for (side, dep), idx in classes.items():
        if not _contiguous(idx):
            violations.append(Violation("contiguite", f"classe {dep} non contigue: {idx}"))

    for side in Side:
        occs = eq.side(side)
        for i in range(len(occs) - 1):
            if not comparable(occs[i].dep, occs[i + 1].dep):
                violations.append(Violation("comparabilite", f"{occs[i].dep} et {occs[i + 1].dep} incomparables"))

    violations.extend(_similarity_violations(eq, ctx, classes))
    return violations


def _similarity_violations(eq: Equation, ctx: DepContext,
                           classes: dict[tuple[Side, Depfactor], list[int]]) -> list[Violation]:
    """Classes similaires: meme nombre d'occurrences, et un meme code D#i designe le meme symbole."""
    violations: list[Violation] = []
    sizes: dict[tuple[int, ...], tuple[Depfactor, int]] = {}
    for (side, dep), idx in classes.items():
        first, size = sizes.setdefault(ctx.similarity_key(dep), (dep, len(idx)))
        if size != len(idx):
            violations.append(Violation("similarite", f"facteurs similaires {first}, {dep} de longueurs differentes"))
    try:
        numbers = assign_d_numbers(eq, ctx)
    except InvariantViolation:
        # classe non contigue, deja signalee
        return violations
    symbol_at: dict[tuple[tuple[int, ...], int], tuple[tuple[Side, int], int]] = {}
    for (side, i), code in sorted(numbers.items()):
        symbol = eq.side(side)[i].symbol
        where, expected = symbol_at.setdefault(code, ((side, i), symbol))
        if expected != symbol:
            violations.append(Violation("similarite", f"code D#{code[1]} porte {expected} en {where[0].name}[{where[1]}] "
                                                      f"et {symbol} en {side.name}[{i}]"))
    return violations


@dataclass(frozen=True)
class DepMetrics:
    """
    Potentiels d'un etat.

    Attributes:
        h_d: Somme des Abs(p) * |sup p|.
        h_n: Somme des 2 |sup p| log2(|sup p| + 1).
        dep_encoding_bits: Taille du codage D#i de toutes les occurrences.
    """
    h_d: float
    h_n: float
    dep_encoding_bits: int

    @property
    def total(self) -> float:
        return self.h_d + self.h_n


def compute_potentials(eq: Equation, ctx: DepContext) -> DepMetrics:
    """
    Calcule H_d, H_n et la taille du codage par facteurs de dependance.

    Args:
        eq: Equation courante.
        ctx: Contexte d'origine (poids figes des positions).

    Returns:
        DepMetrics recalcule integralement.
    """
    state = DepState.build(eq, ctx)
    h_d = 0.0
    h_n = 0.0
    for pos in ctx.positions():
        size = state.sup_size(pos)
        h_d += ctx.weight(pos) * size
        h_n += 2 * size * math.log2(size + 1)

    encoding = 0
    for (side, dep), idx in _classes(eq).items():
        per_occurrence = ctx.dep_weight(dep) + ceil_log2(len(idx) + 1)
        encoding += per_occurrence * len(idx)
    return DepMetrics(h_d, h_n, encoding)


def assign_d_numbers(eq: Equation, ctx: DepContext) -> dict[tuple[Side, int], tuple[tuple[int, ...], int]]:
    """
    Numerote les occurrences de chaque classe de gauche a droite.

    Le code d'une classe est son mot d'origine: deux classes similaires
    partagent donc leurs codes D#i.

    Returns:
        (cote, indice) -> (code de la classe, numero 1..k).

    Raises:
        InvariantViolation: Si une classe n'est pas contigue.
    """
    numbers: dict[tuple[Side, int], tuple[tuple[int, ...], int]] = {}
    for (side, dep), idx in _classes(eq).items():
        if not _contiguous(idx):
            raise InvariantViolation(f"classe {dep} non contigue")
        key = ctx.similarity_key(dep)
        for n, i in enumerate(idx, start=1):
            numbers[(side, i)] = (key, n)
    return numbers
