"""
Factory Pattern: Transforme le texte en objets Equation et Substitution.

Format d'equation: une ligne `LHS = RHS`, lettres minuscules, variables
majuscules, commentaires '#'. Format de temoin: une ligne par variable,
`X = abba` ou `X = <eps>`.
"""

from __future__ import annotations

from equations_mots.config import EMPTY_WORD_TOKEN
from equations_mots.errors import ParseError
from equations_mots.models import (
    ENDMARKER_ID,
    Depfactor,
    Equation,
    Occurrence,
    Side,
    Substitution,
    SymbolKind,
)
from equations_mots.repository import SymbolTable
from equations_mots.utils import content_lines


class EquationFactory:
    """
    Factory Pattern: Construit des equations a partir du format texte.

    Les marqueurs de bord sont inseres ici et chaque position (marqueurs
    compris) recoit son facteur de dependance de base.
    """

    def _kind_of(self, ch: str) -> SymbolKind:
        """Nature d'un caractere du format texte."""
        if "a" <= ch <= "z":
            return SymbolKind.LETTER
        if "A" <= ch <= "Z":
            return SymbolKind.VARIABLE
        raise ParseError(f"caractere illegal: {ch!r}")

    def _side(self, text: str, side: Side, table: SymbolTable) -> tuple[Occurrence, ...]:
        """Tokenise un cote et l'encadre de marqueurs."""
        tokens = [ch for ch in text if not ch.isspace()]
        if not tokens:
            raise ParseError(f"cote {side.name} vide")
        ids = [ENDMARKER_ID]
        ids += [table.intern(ch, self._kind_of(ch)) for ch in tokens]
        ids.append(ENDMARKER_ID)
        return tuple(Occurrence(sid, Depfactor.basic(side, pos)) for pos, sid in enumerate(ids))

    def build(self, text: str, table: SymbolTable | None = None) -> Equation:
        """
        Construit une equation depuis son texte.

        Args:
            text: Texte contenant exactement une equation.
            table: Table de symboles a enrichir (nouvelle table si None).

        Returns:
            Equation fraiche, facteurs de dependance de base.

        Raises:
            ParseError: Texte vide, '=' absent ou multiple, cote vide, caractere illegal.
        """
        lines = content_lines(text)
        if not lines:
            raise ParseError("aucune equation")
        if len(lines) > 1:
            raise ParseError(f"une seule equation attendue, {len(lines)} lignes trouvees")
        line = lines[0]
        if line.count("=") != 1:
            raise ParseError("'=' absent ou multiple")
        left, right = line.split("=")
        table = table if table is not None else SymbolTable()
        lhs = self._side(left, Side.LHS, table)
        rhs = self._side(right, Side.RHS, table)
        return Equation(lhs, rhs, table)


_FACTORY = EquationFactory()


def parse_equation(text: str, table: SymbolTable | None = None) -> Equation:
    """Analyse une equation au format texte (voir EquationFactory.build)."""
    return _FACTORY.build(text, table)


def render_symbol(table: SymbolTable, sid: int) -> str:
    """Texte d'un symbole; les lettres fraiches sont entre crochets."""
    if sid == ENDMARKER_ID:
        return "@"
    text = table.display(sid)
    return text if table.is_input(sid) else f"[{text}]"


def render_word(table: SymbolTable, word: tuple[int, ...] | list[int]) -> str:
    """Concatenation des textes d'un mot."""
    return "".join(render_symbol(table, sid) for sid in word)


def render_equation(eq: Equation) -> str:
    """
    Rendu `LHS = RHS`, marqueurs omis.

    Args:
        eq: Equation a afficher.

    Returns:
        Texte re-analysable tant que l'equation ne contient que des symboles d'entree.
    """
    lhs = render_word(eq.table, [o.symbol for o in eq.inner(Side.LHS)])
    rhs = render_word(eq.table, [o.symbol for o in eq.inner(Side.RHS)])
    return f"{lhs} = {rhs}"


# ============================================================
# TEMOINS
# ============================================================


def parse_witness(text: str, table: SymbolTable) -> Substitution:
    """
    Analyse un fichier temoin.

    Args:
        text: Lignes `X = mot` ou `X = <eps>`.
        table: Table de l'equation (les variables doivent y figurer).

    Returns:
        Substitution sur les identifiants de la table.

    Raises:
        ParseError: Ligne mal formee, variable inconnue ou definie deux fois.
    """
    sigma: Substitution = {}
    for line in content_lines(text):
        if line.count("=") != 1:
            raise ParseError(f"ligne de temoin invalide: {line!r}")
        name, word = (part.strip() for part in line.split("="))
        var = table.lookup(name)
        if var is None or not table.is_variable(var):
            raise ParseError(f"variable inconnue dans le temoin: {name!r}")
        if var in sigma:
            raise ParseError(f"variable definie deux fois: {name!r}")
        if word == EMPTY_WORD_TOKEN or word == "":
            sigma[var] = ()
            continue
        letters = []
        for ch in word:
            if not "a" <= ch <= "z":
                raise ParseError(f"lettre illegale dans le temoin: {ch!r}")
            letters.append(table.intern(ch, SymbolKind.LETTER))
        sigma[var] = tuple(letters)
    return sigma


def render_witness(table: SymbolTable, sigma: Substitution) -> str:
    """Rendu d'un temoin, une ligne par variable, tri par nom."""
    lines = []
    for var in sorted(sigma, key=table.display):
        word = render_word(table, sigma[var]) or EMPTY_WORD_TOKEN
        lines.append(f"{table.display(var)} = {word}")
    return "\n".join(lines) + ("\n" if lines else "")


def parse_letter_string(text: str, table: SymbolTable) -> list[int]:
    """
    Analyse un fichier contenant un mot de lettres (commande compress).

    Raises:
        ParseError: Fichier vide, plusieurs lignes ou caractere non lettre.
    """
    lines = content_lines(text)
    if len(lines) != 1:
        raise ParseError("une ligne de lettres attendue")
    word = [ch for ch in lines[0] if not ch.isspace()]
    for ch in word:
        if not "a" <= ch <= "z":
            raise ParseError(f"caractere illegal: {ch!r}")
    return [table.intern(ch, SymbolKind.LETTER) for ch in word]
