"""
Operations de base sur les equations: application d'une substitution,
verification d'une solution, resolution des equations terminales.
"""

from __future__ import annotations

from equations_mots.errors import MissingVariable
from equations_mots.models import ENDMARKER_ID, Equation, Side, Substitution


def apply_side(eq: Equation, side: Side, sigma: Substitution) -> tuple[int, ...]:
    """
    Image d'un cote par sigma, marqueurs retires.

    Raises:
        MissingVariable: Si sigma n'est pas defini sur une variable du cote.
    """
    out: list[int] = []
    table = eq.table
    for occ in eq.side(side):
        sid = occ.symbol
        if sid == ENDMARKER_ID:
            continue
        if table.is_variable(sid):
            if sid not in sigma:
                raise MissingVariable(f"sigma non defini sur {table.display(sid)}")
            out.extend(sigma[sid])
        else:
            out.append(sid)
    return tuple(out)


def apply_substitution(eq: Equation, sigma: Substitution) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """
    Calcule (sigma(U), sigma(V)).

    Args:
        eq: Equation.
        sigma: Substitution definie sur toutes les variables de eq.

    Returns:
        Les deux mots de lettres (identifiants), marqueurs retires.
    """
    return apply_side(eq, Side.LHS, sigma), apply_side(eq, Side.RHS, sigma)


def check_solution(eq: Equation, sigma: Substitution) -> bool:
    """Vrai si sigma(U) = sigma(V) lettre a lettre."""
    left, right = apply_substitution(eq, sigma)
    return left == right


def restrict(sigma: Substitution, eq: Equation) -> Substitution:
    """Restriction de sigma aux variables presentes dans eq."""
    return {x: tuple(sigma[x]) for x in eq.variables if x in sigma}


def trivial_solution(eq: Equation) -> Substitution | None:
    """
    Resout une equation terminale (|U| <= 1 et |V| <= 1) ou a cotes identiques.

    Args:
        eq: Equation terminale.

    Returns:
        Substitution sur les variables restantes, ou None si insatisfiable.
    """
    if eq.same_sides():
        return {x: () for x in eq.variables}
    left = [o.symbol for o in eq.inner(Side.LHS)]
    right = [o.symbol for o in eq.inner(Side.RHS)]
    if len(left) > 1 or len(right) > 1:
        return None
    table = eq.table
    sigma: Substitution = {x: () for x in eq.variables}
    a = left[0] if left else None
    b = right[0] if right else None
    if a is not None and table.is_variable(a) and b is not None and table.is_letter(b):
        sigma[a] = (b,)
    elif b is not None and table.is_variable(b) and a is not None and table.is_letter(a):
        sigma[b] = (a,)
    return sigma if check_solution(eq, sigma) else None
