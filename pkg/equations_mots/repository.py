"""
Repository Pattern: Table des symboles (internement des lettres et variables).

Chaque symbole recoit un identifiant entier unique; les lettres fraiches
creees par la recompression sont ajoutees a la meme table.
"""

from __future__ import annotations

from equations_mots.errors import ParseError
from equations_mots.models import ENDMARKER_ID, Origin, Symbol, SymbolKind


class SymbolTable:
    """
    Repository Pattern: Stockage en memoire des symboles d'un run.

    Les identifiants sont attribues dans l'ordre de creation; l'identifiant
    0 est reserve au marqueur de bord '@'. La table ne fait que croitre.

    Attributes:
        _symbols: Symboles indexes par identifiant.
        _by_display: Identifiant des symboles d'entree par texte.
    """

    ENDMARKER_DISPLAY = "@"

    def __init__(self) -> None:
        """Initialise la table avec le seul marqueur de bord."""
        self._symbols: list[Symbol] = [
            Symbol(ENDMARKER_ID, SymbolKind.ENDMARKER, display=self.ENDMARKER_DISPLAY)
        ]
        self._by_display: dict[str, int] = {}

    def intern(self, display: str, kind: SymbolKind) -> int:
        """
        Interne un symbole d'entree (idempotent).

        Args:
            display: Texte du symbole ("a", "X"...).
            kind: LETTER ou VARIABLE.

        Returns:
            Identifiant du symbole.

        Raises:
            ParseError: Si le meme texte est deja interne avec une autre nature.
        """
        sid = self._by_display.get(display)
        if sid is not None:
            if self._symbols[sid].kind is not kind:
                raise ParseError(f"symbole '{display}' deja connu comme {self._symbols[sid].kind.value}")
            return sid
        sid = len(self._symbols)
        self._symbols.append(Symbol(sid, kind, Origin.INPUT, None, display))
        self._by_display[display] = sid
        return sid

    def fresh(self, origin: Origin, phase: int, display: str | None = None) -> int:
        """
        Cree une lettre fraiche.

        Args:
            origin: PAIR ou BLOCK.
            phase: Phase de creation.
            display: Texte affiche (defaut: c<id>).

        Returns:
            Identifiant de la nouvelle lettre.
        """
        sid = len(self._symbols)
        self._symbols.append(Symbol(sid, SymbolKind.LETTER, origin, phase, display or f"c{sid}"))
        return sid

    def get(self, sid: int) -> Symbol:
        """Recupere un symbole (KeyError si inconnu)."""
        if not 0 <= sid < len(self._symbols):
            raise KeyError(sid)
        return self._symbols[sid]

    def lookup(self, display: str) -> int | None:
        """Identifiant d'un symbole d'entree par son texte."""
        return self._by_display.get(display)

    def display(self, sid: int) -> str:
        return self._symbols[sid].display

    def is_letter(self, sid: int) -> bool:
        return self._symbols[sid].kind is SymbolKind.LETTER

    def is_variable(self, sid: int) -> bool:
        return self._symbols[sid].kind is SymbolKind.VARIABLE

    def is_input(self, sid: int) -> bool:
        return self._symbols[sid].origin is Origin.INPUT

    def input_symbols(self, kind: SymbolKind) -> list[int]:
        """Symboles d'entree d'une nature donnee, tries par texte."""
        ids = [s.id for s in self._symbols if s.origin is Origin.INPUT and s.kind is kind]
        return sorted(ids, key=self.display)

    def copy(self) -> SymbolTable:
        """Copie independante (les symboles eux-memes sont immuables)."""
        clone = SymbolTable.__new__(SymbolTable)
        clone._symbols = list(self._symbols)
        clone._by_display = dict(self._by_display)
        return clone

    def __len__(self) -> int:
        return len(self._symbols)

    def __contains__(self, sid: object) -> bool:
        return isinstance(sid, int) and 0 <= sid < len(self._symbols)
