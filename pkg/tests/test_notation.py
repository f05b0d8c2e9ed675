"""Notation matching: patterns, fallbacks, ambiguity, scope registration."""

import pytest

from elfe.errors import AmbiguousMatch, ConflictingNotation, UnmatchedAtom
from elfe.fol import FALSUM, Equal, Not, Pred, Var
from elfe.lexer import tokenize
from elfe.notation import Literal, NotationPattern, Scope, Slot, match_atom, register

BETWEEN = NotationPattern("between", (Slot(), Literal("-"), Slot(), Literal("-"), Slot()))
EQUIDISTANT = NotationPattern(
    "equidistant", (Slot(), Literal("-"), Slot(), Literal("≡"), Slot(), Literal("-"), Slot())
)
PARSTR = NotationPattern(
    "parstr", (Slot(), Literal("-"), Slot(), Literal("|-|"), Slot(), Literal("-"), Slot())
)
SUBSET = NotationPattern("subset", (Slot(), Literal("⊆"), Slot()))


def scope_with(*patterns) -> Scope:
    scope = Scope()
    for p in patterns:
        scope = register(p, scope)
    return scope


def atom(src: str, scope: Scope):
    return match_atom(tuple(tokenize(src)), scope)


def test_equidistant_with_primes():
    got = atom("m-a' ≡ m-b'", scope_with(BETWEEN, EQUIDISTANT))
    assert got == Pred("equidistant", (Var("m"), Var("a'"), Var("m"), Var("b'")))


def test_prefix_predicate_fallback():
    got = atom("midpoint(m,b,c)", scope_with(BETWEEN, EQUIDISTANT))
    assert got == Pred("midpoint", (Var("m"), Var("b"), Var("c")))


def test_element_count_filter():
    scope = scope_with(BETWEEN, EQUIDISTANT)
    assert atom("a-b-c", scope).name == "between"
    assert atom("a-b ≡ c-d", scope).name == "equidistant"


def test_parstr_literal():
    got = atom("a-b|-|c-d", scope_with(BETWEEN, EQUIDISTANT, PARSTR))
    assert got == Pred("parstr", (Var("a"), Var("b"), Var("c"), Var("d")))


def test_subset_unicode():
    got = atom("A ⊆ B", scope_with(SUBSET))
    assert got == Pred("subset", (Var("A"), Var("B")))


def test_equality_fallbacks():
    scope = scope_with(BETWEEN)
    assert atom("a = b", scope) == Equal(Var("a"), Var("b"))
    assert atom("b ≠ c", scope) == Not(Equal(Var("b"), Var("c")))


def test_contradiction_keyword():
    assert atom("contradiction", Scope()) is FALSUM


def test_unmatched_atom():
    with pytest.raises(UnmatchedAtom):
        atom("a-b", scope_with(BETWEEN))


def test_ambiguous_equal_size_patterns():
    other = NotationPattern("sep", (Slot(), Literal("-"), Slot(), Literal("-"), Slot()))
    # Distinct patterns with identical shape match the same span.
    with pytest.raises(AmbiguousMatch):
        atom("a-b-c", scope_with(BETWEEN, other))


def test_register_idempotent():
    scope = scope_with(BETWEEN)
    again = register(
        NotationPattern("between", (Slot(), Literal("-"), Slot(), Literal("-"), Slot())), scope
    )
    assert again is scope


def test_register_conflict():
    scope = scope_with(BETWEEN)
    clash = NotationPattern("between", (Slot(), Literal("≡"), Slot()))
    with pytest.raises(ConflictingNotation):
        register(clash, scope)


def test_render_then_rematch_is_identity():
    scope = scope_with(BETWEEN, EQUIDISTANT, PARSTR, SUBSET)
    for pattern in scope.patterns:
        args = tuple(Var(f"t{i}") for i in range(pattern.arity))
        tokens = tuple(pattern.render(args))
        got = match_atom(tokens, scope)
        assert isinstance(got, Pred)
        assert got.name == pattern.name
        assert got.args == args


def test_match_is_pure_function_of_inputs():
    scope = scope_with(BETWEEN, EQUIDISTANT)
    toks = tuple(tokenize("a-b-c"))
    assert match_atom(toks, scope) == match_atom(toks, scope)
