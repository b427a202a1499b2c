"""
Hierarchie des exceptions du solveur.

Le code de bibliotheque leve ces exceptions; seule la couche ui/commands
les traduit en codes de sortie.
"""

from __future__ import annotations


class EquationError(Exception):
    """Classe de base de toutes les erreurs du paquet."""


class ConfigError(EquationError, ValueError):
    """Parametre de configuration hors bornes."""


# ============================================================
# NOYAU (equations, substitutions, generation)
# ============================================================


class ParseError(EquationError):
    """Texte d'equation ou de temoin mal forme."""


class MissingVariable(EquationError):
    """Substitution non definie sur une variable de l'equation."""


class GenerationFailed(EquationError):
    """Aucune instance plantee obtenue apres le nombre d'essais autorise."""


class ResourceExceeded(EquationError):
    """Une borne de ressources (budget, espace, phases) est depassee."""


class SpaceCapExceeded(ResourceExceeded):
    """La taille codee de l'equation depasse space_cap_bits."""


class PhaseCapExceeded(ResourceExceeded):
    """Le nombre de phases depasse max_phases."""


# ============================================================
# RECOMPRESSION ET RECHERCHE
# ============================================================


class PartitionNotDisjoint(EquationError):
    """Les ensembles gauche et droit d'une partition se recouvrent."""


class InconsistentGuess(EquationError):
    """Choix de depilement incoherent (exposant nul, lettre hors alphabet...)."""


class IllegalPop(EquationError):
    """Lettre depilee qui viole la garde de la partition."""


class NotASolution(EquationError):
    """La substitution fournie ne resout pas l'equation."""


class Desync(EquationError):
    """La solution fantome ne resout plus l'equation reecrite."""


class DanglingRule(EquationError):
    """Lettre fraiche sans regle dans le journal de derivation."""


# ============================================================
# CODAGE, FACTEURS DE DEPENDANCE, STRATEGIE
# ============================================================


class MissingCode(EquationError):
    """Symbole sans code dans la table de Huffman."""


class EmptyInput(EquationError):
    """Aucune frequence strictement positive pour construire un code."""


class IncomparableDepfactors(EquationError):
    """Somme de deux facteurs de dependance incomparables."""


class NoHalvingPartitionFound(EquationError):
    """Aucune partition ne divise par deux la somme ciblee."""


class InvariantViolation(EquationError):
    """Un invariant verifie en cours d'execution guidee est viole."""
