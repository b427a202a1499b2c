"""Tests de bout en bout de la ligne de commande (main avec argv)."""

import json
import logging

import pytest

from equations_mots.app import PACKAGE_LOGGER, build_parser, configure_logging, main
from equations_mots.config import APP_CONFIG
from equations_mots.equation import check_solution
from equations_mots.parser import parse_equation, parse_witness


@pytest.fixture(autouse=True)
def _reset_logging():
    yield
    logger = logging.getLogger(PACKAGE_LOGGER)
    for handler in list(logger.handlers):
        if getattr(handler, "_equations_mots", False):
            logger.removeHandler(handler)


def _write(tmp_path, name: str, text: str) -> str:
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


class TestParser:
    def test_subcommand_required(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args([])

    def test_version(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--version"])
        assert exc.value.code == 0
        assert "equations_mots" in capsys.readouterr().out

    def test_defaults(self):
        args = build_parser().parse_args(["profile", "x.eq", "--witness", "x.wit"])
        assert args.partition_mode == "strategy"
        assert args.metrics is None

    def test_logging_idempotent(self):
        logger = configure_logging("debug")
        configure_logging("INFO")
        assert sum(getattr(h, "_equations_mots", False) for h in logger.handlers) == 1
        assert logger.level == logging.INFO

    def test_logging_level_from_app_config(self, monkeypatch):
        monkeypatch.setitem(APP_CONFIG["logging"], "level", "error")
        assert configure_logging().level == logging.ERROR
        assert build_parser().parse_args(["compress", "w.txt"]).log_level is None


class TestSolve:
    def test_sat_writes_witness(self, tmp_path, capsys):
        eq_file = _write(tmp_path, "a.eq", "aX = Xa\n")
        wit_file = tmp_path / "a.wit"
        assert main(["solve", eq_file, "--witness", str(wit_file)]) == 0
        assert capsys.readouterr().out.splitlines()[0] == "SAT"
        assert wit_file.read_text(encoding="utf-8") == "X = <eps>\n"

    def test_unsat(self, tmp_path, capsys):
        eq_file = _write(tmp_path, "b.eq", "aX = Xb\n")
        assert main(["solve", eq_file, "--max-exponent", "2"]) == 1
        assert capsys.readouterr().out.startswith("UNSAT within bounds (")

    def test_missing_file(self, tmp_path, capsys):
        assert main(["solve", str(tmp_path / "absent.eq")]) == 3
        assert "lecture" in capsys.readouterr().err

    def test_parse_error(self, tmp_path):
        assert main(["solve", _write(tmp_path, "c.eq", "aX = \n")]) == 3

    def test_bad_cap(self, tmp_path):
        assert main(["solve", _write(tmp_path, "d.eq", "aX = Xa\n"), "--max-phases", "0"]) == 3

    def test_witness_not_written(self, tmp_path, capsys):
        eq_file = _write(tmp_path, "a.eq", "aX = Xa\n")
        assert main(["solve", eq_file, "--witness", str(tmp_path / "absent" / "a.wit")]) == 3
        assert "temoin" in capsys.readouterr().err


class TestOracle:
    def test_sat(self, tmp_path, capsys):
        assert main(["oracle", _write(tmp_path, "e.eq", "Xb = ab\n")]) == 0
        assert capsys.readouterr().out.splitlines()[:2] == ["SAT", "X = a"]

    def test_unsat(self, tmp_path):
        assert main(["oracle", _write(tmp_path, "f.eq", "aX = Xb\n"), "--max-len", "2"]) == 1

    def test_budget(self, tmp_path, capsys):
        assert main(["oracle", _write(tmp_path, "g.eq", "XYZ = ZYXab\n"), "--max-len", "20"]) == 2
        assert capsys.readouterr().out.startswith("UNKNOWN")


class TestProfile:
    def _files(self, tmp_path, witness: str = "X = ab\n"):
        return _write(tmp_path, "h.eq", "Xab = abX\n"), _write(tmp_path, "h.wit", witness)

    def test_json_metrics(self, tmp_path, capsys):
        eq_file, wit_file = self._files(tmp_path)
        metrics = tmp_path / "run.json"
        assert main(["profile", eq_file, "--witness", wit_file, "--metrics", str(metrics)]) == 0
        assert capsys.readouterr().out.startswith("SAT phases=")
        payload = json.loads(metrics.read_text(encoding="utf-8"))
        assert payload["schema_version"] == 1
        assert payload["violations"] == []

    def test_csv_metrics(self, tmp_path):
        eq_file, wit_file = self._files(tmp_path)
        metrics = tmp_path / "run.csv"
        code = main(["profile", eq_file, "--witness", wit_file, "--partition-mode", "canonical",
                     "--metrics", str(metrics)])
        assert code == 0
        assert metrics.read_text(encoding="utf-8").startswith("# schema_version=1\nphase,step,label")

    def test_forced_format(self, tmp_path):
        eq_file, wit_file = self._files(tmp_path)
        metrics = tmp_path / "run.out"
        main(["profile", eq_file, "--witness", wit_file, "--metrics", str(metrics), "--metrics-format", "json"])
        assert json.loads(metrics.read_text(encoding="utf-8"))["schema_version"] == 1

    def test_wrong_witness(self, tmp_path, capsys):
        eq_file, wit_file = self._files(tmp_path, "X = ba\n")
        assert main(["profile", eq_file, "--witness", wit_file]) == 3
        assert "ne resout pas" in capsys.readouterr().err

    def test_unknown_variable(self, tmp_path):
        eq_file, wit_file = self._files(tmp_path, "Y = a\n")
        assert main(["profile", eq_file, "--witness", wit_file]) == 3

    def test_phase_cap(self, tmp_path, capsys):
        eq_file, wit_file = self._files(tmp_path)
        assert main(["profile", eq_file, "--witness", wit_file, "--max-phases", "1"]) == 2
        assert capsys.readouterr().out.startswith("UNKNOWN")


class TestGen:
    def test_writes_pairs(self, tmp_path, capsys):
        out = tmp_path / "corpus"
        assert main(["gen", "--count", "3", "--seed", "5", "--out", str(out)]) == 0
        assert "3 instance(s)" in capsys.readouterr().out
        for i in range(1, 4):
            eq = parse_equation((out / f"inst_{i:04d}.eq").read_text(encoding="utf-8"))
            sigma = parse_witness((out / f"inst_{i:04d}.wit").read_text(encoding="utf-8"), eq.table)
            assert check_solution(eq, sigma)

    def test_generated_instance_profiles(self, tmp_path):
        main(["gen", "--seed", "2", "--out", str(tmp_path)])
        code = main(["profile", str(tmp_path / "inst_0001.eq"), "--witness", str(tmp_path / "inst_0001.wit"),
                     "--partition-mode", "canonical"])
        assert code == 0

    def test_bad_parameters(self, tmp_path):
        assert main(["gen", "--letters", "0", "--out", str(tmp_path)]) == 3

    def test_retries_from_app_config(self, tmp_path, monkeypatch):
        monkeypatch.setitem(APP_CONFIG["generator"], "max_retries", 0)
        assert main(["gen", "--out", str(tmp_path)]) == 5


class TestCompress:
    def test_report(self, tmp_path, capsys):
        assert main(["compress", _write(tmp_path, "w.txt", "ababab\n")]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "|w|  = 6"
        assert lines[1] == "|w'| = 3"

    def test_illegal_character(self, tmp_path):
        assert main(["compress", _write(tmp_path, "x.txt", "ab1\n")]) == 3
