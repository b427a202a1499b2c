"""Tests pour le codage de Huffman et la mesure de taille."""

import random
from fractions import Fraction

import pytest

from equations_mots.errors import EmptyInput, MissingCode
from equations_mots.parser import parse_equation
from equations_mots.services.encoding import (
    CodeTable,
    build_huffman,
    encoded_size,
    measure,
    rebuild_after_step,
    symbol_frequencies,
)
from equations_mots.utils import ceil_log2


def _random_equation(rng: random.Random) -> str:
    alphabet = "abcXY"
    lhs = "".join(rng.choice(alphabet) for _ in range(rng.randint(1, 8)))
    rhs = "".join(rng.choice(alphabet) for _ in range(rng.randint(1, 8)))
    return f"{lhs} = {rhs}"


class TestBuildHuffman:
    def test_no_longer_than_fixed_or_unary(self):
        rng = random.Random(5)
        for _ in range(300):
            m = rng.randint(1, 40)
            freqs = {sid: rng.randint(1, 50) for sid in range(1, m + 1)}
            total = build_huffman(freqs).total_bits(freqs)
            occurrences = sum(freqs.values())
            ordered = sorted(freqs.values(), reverse=True)
            unary = sum(f * max(1, min(rank + 1, m - 1)) for rank, f in enumerate(ordered))
            assert total <= max(1, ceil_log2(m)) * occurrences
            assert total <= unary

    def test_three_symbols(self):
        code = build_huffman({1: 5, 2: 2, 3: 1})
        assert code.length(1) == 1
        assert code.length(2) == 2
        assert code.length(3) == 2
        assert code.total_bits({1: 5, 2: 2, 3: 1}) == 11

    def test_single_symbol(self):
        code = build_huffman({7: 4})
        assert code.code(7) == "0"
        assert code.total_bits({7: 4}) == 4

    def test_zero_frequencies_ignored(self):
        code = build_huffman({1: 3, 2: 0})
        assert 2 not in code.codes

    def test_empty(self):
        with pytest.raises(EmptyInput):
            build_huffman({})
        with pytest.raises(EmptyInput):
            build_huffman({1: 0})

    def test_deterministic(self):
        freqs = {i: (i * 7) % 5 + 1 for i in range(1, 12)}
        assert build_huffman(freqs).codes == build_huffman(dict(reversed(freqs.items()))).codes

    def test_prefix_free_and_complete(self):
        rng = random.Random(3)
        for _ in range(50):
            freqs = {i: rng.randint(1, 40) for i in range(1, rng.randint(3, 15))}
            code = build_huffman(freqs)
            assert code.is_prefix_free()
            assert code.kraft_sum() == Fraction(1)


class TestCodeTable:
    def test_missing_code(self):
        with pytest.raises(MissingCode):
            CodeTable({1: "0"}).code(2)

    def test_not_prefix_free(self):
        assert not CodeTable({1: "0", 2: "01"}).is_prefix_free()


class TestMeasure:
    def test_commutation(self):
        eq = parse_equation("aX = Xa")
        size = measure(eq)
        assert size.letter_bits == 2
        assert size.variable_bits == 2
        assert size.total_bits == 4
        assert size.letters_only_bits == 2
        assert size.occurrences == 4
        assert size.padded_bits == 8

    def test_markers_excluded(self):
        eq = parse_equation("ab = ba")
        assert sum(symbol_frequencies(eq).values()) == 4

    def test_encoded_size_matches_measure(self):
        eq = parse_equation("aXbY = YbXa")
        assert encoded_size(eq, rebuild_after_step(eq)) == measure(eq).total_bits

    def test_letters_only_never_larger(self):
        rng = random.Random(11)
        for _ in range(100):
            size = measure(parse_equation(_random_equation(rng)))
            assert size.letters_only_bits <= size.letter_bits

    def test_uses_rebuilt_table(self, monkeypatch):
        eq = parse_equation("aXbY = YbXa")
        flat = CodeTable({sid: "000" for sid in symbol_frequencies(eq)})
        monkeypatch.setattr("equations_mots.services.encoding.rebuild_after_step", lambda current: flat)
        size = measure(eq)
        assert size.total_bits == 3 * size.occurrences
        assert size.letter_bits == 3 * 4
