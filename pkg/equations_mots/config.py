"""
Configuration et constantes du solveur.

Centralise tous les parametres configurables: bornes de recherche,
budgets, reglages de la strategie, journalisation, et la configuration
globale APP_CONFIG lue par SolverConfig.from_app_config, la commande gen
et configure_logging. Le format des metriques est fixe (version de schema).
"""

from __future__ import annotations

import os

# ============================================================
# CONSTANTES
# ============================================================


def _env_int(name: str, default: int) -> int:
    """Lit un entier depuis l'environnement (valeur par defaut si absent)."""
    raw = os.environ.get(name)
    if raw is None or not raw.strip():
        return default
    return int(raw.replace("_", ""))


def _env_float(name: str, default: float) -> float:
    """Lit un flottant depuis l'environnement (valeur par defaut si absent)."""
    raw = os.environ.get(name)
    if raw is None or not raw.strip():
        return default
    return float(raw)


DEFAULT_MAX_PHASES = _env_int("EQMOTS_MAX_PHASES", 64)
DEFAULT_MAX_EXPONENT = _env_int("EQMOTS_MAX_EXPONENT", 8)
DEFAULT_SPACE_CAP_BITS = _env_int("EQMOTS_SPACE_CAP_BITS", 1_000_000)
DEFAULT_SEED = _env_int("EQMOTS_SEED", 0)
DEFAULT_ORACLE_MAX_LEN = _env_int("EQMOTS_ORACLE_MAX_LEN", 8)

ORACLE_BUDGET = _env_int("EQMOTS_ORACLE_BUDGET", 5_000_000)
SEARCH_NODE_BUDGET = _env_int("EQMOTS_NODE_BUDGET", 200_000)
SEARCH_TIME_BUDGET_SEC = _env_float("EQMOTS_TIME_BUDGET_SEC", 60.0)

STRATEGY_EXHAUSTIVE_MAX_LETTERS = 16
STRATEGY_SAMPLES_PER_LETTER = 64
GENERATOR_MAX_RETRIES = 200

METRICS_SCHEMA_VERSION = 1
FLOAT_DIGITS = 6
PRINT_WIDTH = 78

LOG_LEVEL = os.environ.get("EQMOTS_LOG_LEVEL", "WARNING")
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

# Jeton d'affichage d'une image vide dans les fichiers temoins
EMPTY_WORD_TOKEN = "<eps>"

APP_CONFIG: dict[str, object] = {
    "solver": {
        "max_phases": DEFAULT_MAX_PHASES,
        "max_block_exponent": DEFAULT_MAX_EXPONENT,
        "space_cap_bits": DEFAULT_SPACE_CAP_BITS,
        "rng_seed": DEFAULT_SEED,
        "partition_mode": "strategy",
    },
    "oracle": {
        "max_len": DEFAULT_ORACLE_MAX_LEN,
        "budget": ORACLE_BUDGET,
    },
    "search": {
        "node_budget": SEARCH_NODE_BUDGET,
        "time_budget_sec": SEARCH_TIME_BUDGET_SEC,
    },
    "strategy": {
        "exhaustive_max_letters": STRATEGY_EXHAUSTIVE_MAX_LETTERS,
        "samples_per_letter": STRATEGY_SAMPLES_PER_LETTER,
        "new_letter_mode": "outside_gamma",
    },
    "generator": {
        "max_retries": GENERATOR_MAX_RETRIES,
    },
    "logging": {
        "level": LOG_LEVEL,
        "format": LOG_FORMAT,
    },
}
