"""Interface utilisateur: rendu console et commandes."""

from equations_mots.ui.renderer import SimpleRenderer
from equations_mots.ui import commands

__all__ = ["SimpleRenderer", "commands"]
