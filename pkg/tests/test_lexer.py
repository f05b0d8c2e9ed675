"""Tokenizer: unicode operators, maximal munch, locations."""

import pytest

from elfe.errors import InvalidCharacter
from elfe.lexer import tokenize


def texts(tokens):
    return [t.text for t in tokens]


def test_equidistant_notation_tokens():
    assert texts(tokenize("a-b ≡ c-d")) == ["a", "-", "b", "≡", "c", "-", "d"]


def test_empty_input():
    assert tokenize("") == []


def test_maximal_munch_parstr():
    assert texts(tokenize("a-b|-|c-d")) == ["a", "-", "b", "|-|", "c", "-", "d"]


def test_maximal_munch_parallel():
    assert texts(tokenize("a-b||c-d")) == ["a", "-", "b", "||", "c", "-", "d"]


def test_primed_identifiers_are_single_tokens():
    assert texts(tokenize("a'-b'-m")) == ["a'", "-", "b'", "-", "m"]


def test_subset_unicode_operator():
    toks = tokenize("A ⊆ B")
    assert texts(toks) == ["A", "⊆", "B"]
    assert toks[1].kind == "unicode-op"


def test_invalid_character_reports_position():
    with pytest.raises(InvalidCharacter) as exc:
        tokenize("a-b\n  §c")
    assert exc.value.loc.line == 2
    assert exc.value.loc.column == 3


def test_positions_monotone_in_stream_order():
    src = "Axiom A: for all a,b. a-b ≡ b-a.\nLemma: p(a).\n"
    toks = tokenize(src)
    pairs = [(t.line, t.column) for t in toks]
    assert pairs == sorted(pairs)


def test_kinds():
    toks = tokenize("Note a-m-d: qed.")
    kinds = [t.kind for t in toks]
    assert kinds == ["word", "word", "symbol", "word", "symbol", "word", "colon", "word", "period"]
