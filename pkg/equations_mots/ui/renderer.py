"""
Strategy Pattern: Rendu console des verdicts, profils et rapports.

La premiere ligne de chaque verdict commence par SAT, UNSAT ou UNKNOWN
pour rester exploitable par un script.
"""

from __future__ import annotations

from collections.abc import Sequence

from equations_mots.config import PRINT_WIDTH
from equations_mots.models import Status, Verdict
from equations_mots.parser import render_witness, render_word
from equations_mots.repository import SymbolTable
from equations_mots.services.derivation import BlockRule, DerivationLog, PairRule
from equations_mots.services.metrics import MetricsRun


class SimpleRenderer:
    """Strategy Pattern: Rendu console simple."""

    @staticmethod
    def verdict_line(verdict: Verdict) -> str:
        """Premiere ligne d'un verdict."""
        if verdict.status is Status.SAT:
            return "SAT"
        if verdict.status is Status.UNSAT:
            caps = " ".join(f"{k}={v}" for k, v in verdict.caps.items())
            return f"UNSAT within bounds ({caps})"
        return f"UNKNOWN ({verdict.reason or 'ressource epuisee'})"

    @staticmethod
    def print_verdict(verdict: Verdict, table: SymbolTable) -> None:
        """Affiche le verdict, le temoin eventuel et les statistiques."""
        print(SimpleRenderer.verdict_line(verdict))
        if verdict.witness is not None:
            print(render_witness(table, verdict.witness), end="")
        stats = verdict.stats
        print(f"# noeuds={stats.nodes} phases={stats.phases} max_bits={stats.max_bits} "
              f"elagages(espace={stats.pruned_space}, phases={stats.pruned_phases}, "
              f"incoherence={stats.pruned_mismatch}, deja_vus={stats.pruned_visited})")

    @staticmethod
    def print_profile(verdict: Verdict, run: MetricsRun, problems: Sequence[str]) -> None:
        """Resume d'un run guide: phases, ratio maximal et violations."""
        print(f"{SimpleRenderer.verdict_line(verdict)} phases={len(run.phases)} "
              f"abs0={run.input_bits} max_ratio={run.max_ratio():.6f}")
        print("-" * PRINT_WIDTH)
        print(f"{'phase':>5} {'etapes':>7} {'partitions':>10} {'H_d':>12} {'H_n':>12} {'bits':>8}")
        for pm in run.phases:
            end = pm.end
            if end is None:
                continue
            print(f"{pm.phase:>5} {len(pm.steps):>7} {pm.partitions:>10} "
                  f"{end.h_d:>12.1f} {end.h_n:>12.1f} {end.total_bits:>8}")
        print("-" * PRINT_WIDTH)
        if run.max_blocked_pops is not None:
            print(f"depilements apres blocage (max): {run.max_blocked_pops}")
        if problems:
            print(f"{len(problems)} violation(s):")
            for problem in problems:
                print(f"  - {problem}")

    @staticmethod
    def rule_line(log: DerivationLog, rule: PairRule | BlockRule) -> str:
        """`c5 -> a b` pour une paire, `a_3 -> a^3` pour un bloc."""
        table = log.table
        if isinstance(rule, PairRule):
            return f"{table.display(rule.letter)} -> {table.display(rule.left)} {table.display(rule.right)}"
        return f"{table.display(rule.letter)} -> {table.display(rule.base)}^{rule.length}"

    @staticmethod
    def print_compress_report(log: DerivationLog, before: Sequence[int], after: Sequence[int]) -> None:
        """Longueurs avant/apres une phase, ratio et regles de derivation."""
        ratio = len(after) / len(before) if before else 0.0
        print(f"|w|  = {len(before)}")
        print(f"|w'| = {len(after)}")
        print(f"ratio = {ratio:.6f}  borne (2|w|+1)/3 = {(2 * len(before) + 1) / 3:.6f}")
        print(f"w' = {render_word(log.table, list(after))}")
        for rule in log.rules():
            print(SimpleRenderer.rule_line(log, rule))

    @staticmethod
    def print_generated(count: int, out_dir: str) -> None:
        print(f"{count} instance(s) ecrite(s) dans {out_dir}")
