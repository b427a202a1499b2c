"""Structures de donnees personnalisees: IntervalSet."""

from equations_mots.data_structures.interval_set import IntervalSet

__all__ = ["IntervalSet"]
