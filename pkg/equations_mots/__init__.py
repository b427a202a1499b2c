"""
Equations sur les mots - resolution par recompression.

Package principal regroupant le noyau des equations, les services de
recompression, de recherche et de mesure, et la ligne de commande.
"""

__version__ = "1.0.0"
