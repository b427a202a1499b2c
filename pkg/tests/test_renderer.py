"""Tests pour le SimpleRenderer (capture stdout)."""

from equations_mots.models import SearchStats, Status, Verdict
from equations_mots.parser import parse_equation
from equations_mots.repository import SymbolTable
from equations_mots.services.derivation import DerivationLog
from equations_mots.services.metrics import MetricsRun, PhaseMetrics, StepRecord
from equations_mots.ui.renderer import SimpleRenderer


def _make_step(step: int, h_d: float) -> StepRecord:
    return StepRecord(phase=1, step=step, label="phase_start", len_u=3, len_v=3, letter_bits=6,
                      total_bits=9, padded_bits=15, letters_only_bits=6, dep_encoding_bits=20,
                      h_d=h_d, h_n=4.0)


class TestVerdictLine:
    def test_sat(self):
        assert SimpleRenderer.verdict_line(Verdict(Status.SAT, {})) == "SAT"

    def test_unsat_lists_caps(self):
        verdict = Verdict(Status.UNSAT, caps={"max_phases": 4, "space_cap_bits": 64})
        assert SimpleRenderer.verdict_line(verdict) == "UNSAT within bounds (max_phases=4 space_cap_bits=64)"

    def test_unknown_reason(self):
        line = SimpleRenderer.verdict_line(Verdict(Status.UNKNOWN, reason="budget de noeuds"))
        assert line == "UNKNOWN (budget de noeuds)"


class TestPrintVerdict:
    def test_witness_and_stats(self, capsys):
        eq = parse_equation("aX = Xa")
        x = eq.table.lookup("X")
        a = eq.table.lookup("a")
        verdict = Verdict(Status.SAT, {x: (a, a)}, stats=SearchStats(nodes=12, phases=2, max_bits=30, pruned_visited=4))
        SimpleRenderer.print_verdict(verdict, eq.table)
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "SAT"
        assert lines[1] == "X = aa"
        assert lines[2].startswith("# noeuds=12 phases=2 max_bits=30")
        assert lines[2].endswith("deja_vus=4)")

    def test_empty_image(self, capsys):
        eq = parse_equation("aX = Xa")
        SimpleRenderer.print_verdict(Verdict(Status.SAT, {eq.table.lookup("X"): ()}), eq.table)
        assert "X = <eps>" in capsys.readouterr().out

    def test_unsat_has_no_witness(self, capsys):
        SimpleRenderer.print_verdict(Verdict(Status.UNSAT), SymbolTable())
        lines = capsys.readouterr().out.splitlines()
        assert lines[0].startswith("UNSAT")
        assert len(lines) == 2


class TestPrintProfile:
    def test_summary_and_table(self, capsys):
        run = MetricsRun(input_bits=10, phases=[PhaseMetrics(1, [_make_step(0, 10.0), _make_step(1, 16.0)], 2)],
                         max_blocked_pops=1)
        SimpleRenderer.print_profile(Verdict(Status.SAT, {}), run, [])
        output = capsys.readouterr().out
        assert output.splitlines()[0] == "SAT phases=1 abs0=10 max_ratio=2.000000"
        assert "16.0" in output
        assert "(max): 1" in output
        assert "violation" not in output

    def test_problems_listed(self, capsys):
        SimpleRenderer.print_profile(Verdict(Status.SAT, {}), MetricsRun(), ["H_d trop grand"])
        output = capsys.readouterr().out
        assert "1 violation(s):" in output
        assert "  - H_d trop grand" in output


class TestCompressReport:
    def test_rules(self, capsys):
        table = SymbolTable()
        eq = parse_equation("ab = ab", table)
        a, b = eq.table.lookup("a"), eq.table.lookup("b")
        log = DerivationLog(table)
        pair = log.pair_letter(a, b, 1)
        block = log.block_letter(a, 3, 1)
        assert SimpleRenderer.rule_line(log, log.rule(pair)) == f"{table.display(pair)} -> a b"
        assert SimpleRenderer.rule_line(log, log.rule(block)) == f"{table.display(block)} -> a^3"

        SimpleRenderer.print_compress_report(log, [a, b, a, b], [pair, pair])
        output = capsys.readouterr().out.splitlines()
        assert output[0] == "|w|  = 4"
        assert output[1] == "|w'| = 2"
        assert output[2].startswith("ratio = 0.500000")
        assert len(output) == 4 + 2

    def test_generated(self, capsys):
        SimpleRenderer.print_generated(3, "out")
        assert capsys.readouterr().out.strip() == "3 instance(s) ecrite(s) dans out"
