"""Services metier: recompression, recherche, codage, facteurs, strategie, mesures."""

from equations_mots.services.derivation import DerivationLog
from equations_mots.services.generator import generate_instance
from equations_mots.services.metrics import MetricsRecorder, MetricsRun, export, load_metrics, verify_bounds
from equations_mots.services.oracle import brute_force_solve
from equations_mots.services.recompression import compress_phase_string, run_phase
from equations_mots.services.search import reconstruct_witness, solve_blind, solve_guided

__all__ = [
    "DerivationLog",
    "generate_instance",
    "MetricsRecorder",
    "MetricsRun",
    "export",
    "load_metrics",
    "verify_bounds",
    "brute_force_solve",
    "compress_phase_string",
    "run_phase",
    "reconstruct_witness",
    "solve_blind",
    "solve_guided",
]
