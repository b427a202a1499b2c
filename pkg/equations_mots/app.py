"""
Point d'entree principal de la ligne de commande equations_mots.

Sous-commandes: solve, oracle, profile, gen, compress.
"""

from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Sequence

from equations_mots import __version__
from equations_mots.config import (
    APP_CONFIG,
    DEFAULT_MAX_EXPONENT,
    DEFAULT_MAX_PHASES,
    DEFAULT_ORACLE_MAX_LEN,
    DEFAULT_SEED,
    DEFAULT_SPACE_CAP_BITS,
)
from equations_mots.ui import commands

PACKAGE_LOGGER = "equations_mots"


def configure_logging(level: str | None = None) -> logging.Logger:
    """
    Installe un unique StreamHandler sur stderr pour le logger du package.

    Niveau et format par defaut: section "logging" d'APP_CONFIG.

    Args:
        level: Nom du niveau (DEBUG, INFO, WARNING...).

    Returns:
        Logger du package.
    """
    settings = dict(APP_CONFIG["logging"])  # type: ignore[call-overload]
    logger = logging.getLogger(PACKAGE_LOGGER)
    logger.setLevel((level or settings["level"]).upper())
    if not any(getattr(h, "_equations_mots", False) for h in logger.handlers):
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter(settings["format"]))
        handler._equations_mots = True  # type: ignore[attr-defined]
        logger.addHandler(handler)
    return logger


def _add_caps(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--max-phases", type=int, default=DEFAULT_MAX_PHASES)
    parser.add_argument("--space-cap-bits", type=int, default=DEFAULT_SPACE_CAP_BITS)
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)


def build_parser() -> argparse.ArgumentParser:
    """Construit l'analyseur des arguments (options longues uniquement)."""
    parser = argparse.ArgumentParser(prog="equations_mots",
                                     description="Equations sur les mots par recompression")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default=None,
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"], type=str.upper)
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="resolution aveugle")
    solve.add_argument("file")
    _add_caps(solve)
    solve.add_argument("--max-exponent", type=int, default=DEFAULT_MAX_EXPONENT)
    solve.add_argument("--witness", help="fichier ou ecrire le temoin si SAT")
    solve.set_defaults(handler=commands.cmd_solve)

    oracle = sub.add_parser("oracle", help="force brute bornee")
    oracle.add_argument("file")
    oracle.add_argument("--max-len", type=int, default=DEFAULT_ORACLE_MAX_LEN)
    oracle.set_defaults(handler=commands.cmd_oracle)

    profile = sub.add_parser("profile", help="run guide par un temoin, avec mesures")
    profile.add_argument("file")
    profile.add_argument("--witness", required=True)
    profile.add_argument("--partition-mode", choices=["strategy", "canonical"], default="strategy")
    profile.add_argument("--metrics", help="fichier de mesures (.csv ou .json)")
    profile.add_argument("--metrics-format", choices=["csv", "json"])
    _add_caps(profile)
    profile.set_defaults(handler=commands.cmd_profile)

    gen = sub.add_parser("gen", help="generation d'instances a solution plantee")
    gen.add_argument("--vars", type=int, default=2)
    gen.add_argument("--letters", type=int, default=2)
    gen.add_argument("--side-len", type=int, default=6)
    gen.add_argument("--sol-len", type=int, default=4)
    gen.add_argument("--seed", type=int, default=DEFAULT_SEED)
    gen.add_argument("--count", type=int, default=1)
    gen.add_argument("--out", default=".")
    gen.set_defaults(handler=commands.cmd_gen)

    compress = sub.add_parser("compress", help="une phase de compression sur un mot")
    compress.add_argument("file")
    compress.set_defaults(handler=commands.cmd_compress)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    """
    Point d'entree: analyse les arguments et execute la sous-commande.

    Returns:
        Code de sortie de la commande (0 a 6).
    """
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    return args.handler(args)


if __name__ == "__main__":
    sys.exit(main())
