"""
Service Layer: Commandes de la ligne de commande.

Chaque commande recoit les arguments analyses par argparse, appelle les
services et traduit leurs exceptions en code de sortie:

    0 SAT / succes, 1 UNSAT, 2 UNKNOWN ou budget,
    3 entree invalide ou temoin non ecrit, 4 invariant viole,
    5 generation impossible, 6 borne de compression.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from equations_mots.config import APP_CONFIG, GENERATOR_MAX_RETRIES
from equations_mots.equation import check_solution
from equations_mots.errors import (
    ConfigError,
    Desync,
    GenerationFailed,
    InvariantViolation,
    MissingVariable,
    NoHalvingPartitionFound,
    NotASolution,
    ParseError,
    ResourceExceeded,
)
from equations_mots.models import Equation, SolverConfig, Status, Verdict
from equations_mots.parser import parse_equation, parse_letter_string, parse_witness, render_equation, render_witness
from equations_mots.repository import SymbolTable
from equations_mots.services.derivation import DerivationLog
from equations_mots.services.generator import generate_instance
from equations_mots.services.metrics import export, verify_bounds
from equations_mots.services.oracle import brute_force_solve
from equations_mots.services.recompression import compress_phase_string
from equations_mots.services.search import solve_blind, solve_guided
from equations_mots.ui.renderer import SimpleRenderer

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_UNSAT = 1
EXIT_UNKNOWN = 2
EXIT_INPUT = 3
EXIT_INVARIANT = 4
EXIT_GENERATION = 5
EXIT_COMPRESS_BOUND = 6

STATUS_EXIT = {Status.SAT: EXIT_OK, Status.UNSAT: EXIT_UNSAT, Status.UNKNOWN: EXIT_UNKNOWN}


def _error(message: str) -> None:
    print(message, file=sys.stderr)


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _load_equation(path: str) -> Equation:
    """Lit et analyse un fichier .eq (OSError, ParseError)."""
    return parse_equation(_read(path))


def cmd_solve(args: argparse.Namespace) -> int:
    """Resolution aveugle d'une equation."""
    try:
        config = SolverConfig.from_app_config(
            max_phases=args.max_phases,
            max_block_exponent=args.max_exponent,
            space_cap_bits=args.space_cap_bits,
            rng_seed=args.seed,
        )
        eq = _load_equation(args.file)
    except ConfigError as e:
        _error(f"Erreur de configuration: {e}")
        return EXIT_INPUT
    except OSError as e:
        _error(f"Erreur de lecture: {e}")
        return EXIT_INPUT
    except ParseError as e:
        _error(f"Erreur d'analyse: {e}")
        return EXIT_INPUT

    logger.info("resolution de %s", render_equation(eq))
    try:
        verdict = solve_blind(eq, config)
    except ResourceExceeded as e:
        verdict = Verdict(Status.UNKNOWN, reason=str(e))
    SimpleRenderer.print_verdict(verdict, eq.table)

    if verdict.witness is not None and args.witness:
        try:
            Path(args.witness).write_text(render_witness(eq.table, verdict.witness), encoding="utf-8")
        except OSError as e:
            _error(f"Erreur d'ecriture du temoin: {e}")
            return EXIT_INPUT
    return STATUS_EXIT[verdict.status]


def cmd_oracle(args: argparse.Namespace) -> int:
    """Reference par force brute."""
    try:
        config = SolverConfig.from_app_config(max_oracle_len=args.max_len)
        eq = _load_equation(args.file)
    except ConfigError as e:
        _error(f"Erreur de configuration: {e}")
        return EXIT_INPUT
    except OSError as e:
        _error(f"Erreur de lecture: {e}")
        return EXIT_INPUT
    except ParseError as e:
        _error(f"Erreur d'analyse: {e}")
        return EXIT_INPUT

    try:
        verdict = brute_force_solve(eq, config.max_oracle_len, config.oracle_budget)
    except ResourceExceeded as e:
        verdict = Verdict(Status.UNKNOWN, caps={"max_len": config.max_oracle_len}, reason=str(e))
    SimpleRenderer.print_verdict(verdict, eq.table)
    return STATUS_EXIT[verdict.status]


def _metrics_format(path: str, explicit: str | None) -> str:
    if explicit:
        return explicit
    return "json" if Path(path).suffix.lower() == ".json" else "csv"


def cmd_profile(args: argparse.Namespace) -> int:
    """Run guide par un temoin, avec mesures et verification des bornes."""
    try:
        config = SolverConfig.from_app_config(
            max_phases=args.max_phases,
            space_cap_bits=args.space_cap_bits,
            rng_seed=args.seed,
            partition_mode=args.partition_mode,
        )
        eq = _load_equation(args.file)
        sigma = parse_witness(_read(args.witness), eq.table)
        if not check_solution(eq, sigma):
            _error("Le temoin ne resout pas l'equation")
            return EXIT_INPUT
    except ConfigError as e:
        _error(f"Erreur de configuration: {e}")
        return EXIT_INPUT
    except OSError as e:
        _error(f"Erreur de lecture: {e}")
        return EXIT_INPUT
    except (ParseError, MissingVariable) as e:
        _error(f"Erreur d'analyse: {e}")
        return EXIT_INPUT

    try:
        verdict, run = solve_guided(eq, sigma, config)
    except ResourceExceeded as e:
        print(f"UNKNOWN ({e})")
        return EXIT_UNKNOWN
    except (NotASolution, Desync, InvariantViolation, NoHalvingPartitionFound) as e:
        _error(f"Invariant viole: {e}")
        return EXIT_INVARIANT

    problems = [*run.violations, *verify_bounds(run)]
    if run.max_blocked_pops is not None and run.max_blocked_pops > 1:
        problems.append(f"{run.max_blocked_pops} depilements d'un cote deja bloque (> 1)")
    SimpleRenderer.print_profile(verdict, run, problems)

    if args.metrics:
        try:
            Path(args.metrics).write_bytes(export(run, _metrics_format(args.metrics, args.metrics_format)))
        except OSError as e:
            _error(f"Erreur d'ecriture des mesures: {e}")
            return EXIT_INVARIANT
    return EXIT_INVARIANT if problems else EXIT_OK


def cmd_gen(args: argparse.Namespace) -> int:
    """Ecrit des paires inst_NNNN.eq / inst_NNNN.wit."""
    out = Path(args.out)
    retries = dict(APP_CONFIG["generator"]).get("max_retries", GENERATOR_MAX_RETRIES)  # type: ignore[call-overload]
    try:
        out.mkdir(parents=True, exist_ok=True)
        for i in range(args.count):
            eq, sigma = generate_instance(args.seed + i, args.vars, args.letters, args.side_len, args.sol_len,
                                          max_retries=retries)
            stem = out / f"inst_{i + 1:04d}"
            stem.with_suffix(".eq").write_text(render_equation(eq) + "\n", encoding="utf-8")
            stem.with_suffix(".wit").write_text(render_witness(eq.table, sigma), encoding="utf-8")
    except ConfigError as e:
        _error(f"Erreur de configuration: {e}")
        return EXIT_INPUT
    except GenerationFailed as e:
        _error(f"Generation impossible: {e}")
        return EXIT_GENERATION
    except OSError as e:
        _error(f"Erreur d'ecriture: {e}")
        return EXIT_GENERATION
    SimpleRenderer.print_generated(args.count, str(out))
    return EXIT_OK


def cmd_compress(args: argparse.Namespace) -> int:
    """Une phase de compression sur un mot de lettres."""
    table = SymbolTable()
    try:
        word = parse_letter_string(_read(args.file), table)
    except OSError as e:
        _error(f"Erreur de lecture: {e}")
        return EXIT_INPUT
    except ParseError as e:
        _error(f"Erreur d'analyse: {e}")
        return EXIT_INPUT

    log = DerivationLog(table)
    compressed = compress_phase_string(word, log, phase=1)
    SimpleRenderer.print_compress_report(log, word, compressed)
    if 3 * len(compressed) > 2 * len(word) + 1:
        _error(f"Borne violee: |w'| = {len(compressed)} > (2*{len(word)}+1)/3")
        return EXIT_COMPRESS_BOUND
    return EXIT_OK
