"""Tests pour le module utils."""

import math

import pytest

from equations_mots.utils import ceil_log2, content_lines, h, phase_bound, strip_comment


class TestH:
    def test_zero(self):
        assert h(0) == 0.0

    def test_one(self):
        assert h(1) == 1.0

    def test_three(self):
        assert h(3) == pytest.approx(6.0)

    def test_monotone(self):
        assert all(h(x) < h(x + 1) for x in range(50))

    def test_superadditive(self):
        # h(x) + h(y) <= h(x + y)
        for x in range(1, 20):
            for y in range(1, 20):
                assert h(x) + h(y) <= h(x + y) + 1e-9


class TestCeilLog2:
    def test_small(self):
        assert ceil_log2(0) == 0
        assert ceil_log2(1) == 0
        assert ceil_log2(2) == 1
        assert ceil_log2(3) == 2
        assert ceil_log2(4) == 2
        assert ceil_log2(5) == 3

    def test_powers(self):
        for k in range(1, 20):
            assert ceil_log2(2 ** k) == k
            assert ceil_log2(2 ** k + 1) == k + 1


class TestPhaseBound:
    def test_one(self):
        assert phase_bound(1) == 2

    def test_growth(self):
        assert phase_bound(100) == math.ceil(math.log(100, 1.5)) + 2

    def test_monotone(self):
        assert phase_bound(1) <= phase_bound(2) <= phase_bound(1000)


class TestComments:
    def test_strip_comment(self):
        assert strip_comment("aX = Xa  # commentaire") == "aX = Xa"

    def test_only_comment(self):
        assert strip_comment("# rien") == ""

    def test_content_lines(self):
        text = "# en-tete\n\n  aX = Xa \n# fin\n"
        assert content_lines(text) == ["aX = Xa"]
