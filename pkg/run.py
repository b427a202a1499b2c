"""Point d'entree de la ligne de commande equations_mots."""

import sys

from equations_mots.app import main

if __name__ == "__main__":
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        print("\n\nInterrompu par l'utilisateur.")
        sys.exit(0)
