"""Tests pour la table des symboles SymbolTable."""

import pytest

from equations_mots.models import ENDMARKER_ID, Origin, SymbolKind
from equations_mots.repository import SymbolTable


class TestIntern:
    def test_endmarker_reserved(self):
        table = SymbolTable()
        assert len(table) == 1
        assert table.display(ENDMARKER_ID) == "@"

    def test_intern_idempotent(self):
        table = SymbolTable()
        a1 = table.intern("a", SymbolKind.LETTER)
        a2 = table.intern("a", SymbolKind.LETTER)
        assert a1 == a2
        assert len(table) == 2

    def test_kinds(self):
        table = SymbolTable()
        a = table.intern("a", SymbolKind.LETTER)
        x = table.intern("X", SymbolKind.VARIABLE)
        assert table.is_letter(a)
        assert table.is_variable(x)
        assert table.is_input(a)


class TestFresh:
    def test_fresh_default_display(self):
        table = SymbolTable()
        table.intern("a", SymbolKind.LETTER)
        c = table.fresh(Origin.PAIR, 1)
        assert table.display(c) == f"c{c}"
        assert table.is_letter(c)
        assert not table.is_input(c)
        assert table.get(c).phase == 1

    def test_fresh_not_found_by_lookup(self):
        table = SymbolTable()
        table.fresh(Origin.BLOCK, 1, "a_3")
        assert table.lookup("a_3") is None


class TestLookup:
    def test_lookup_missing(self):
        assert SymbolTable().lookup("a") is None

    def test_get_unknown(self):
        with pytest.raises(KeyError):
            SymbolTable().get(42)

    def test_input_symbols_sorted(self):
        table = SymbolTable()
        b = table.intern("b", SymbolKind.LETTER)
        a = table.intern("a", SymbolKind.LETTER)
        table.intern("X", SymbolKind.VARIABLE)
        assert table.input_symbols(SymbolKind.LETTER) == [a, b]


class TestCopy:
    def test_copy_is_independent(self):
        table = SymbolTable()
        table.intern("a", SymbolKind.LETTER)
        clone = table.copy()
        clone.fresh(Origin.PAIR, 1)
        assert len(clone) == len(table) + 1
        assert 2 in clone
        assert 2 not in table
