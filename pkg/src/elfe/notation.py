"""Notation patterns and atom matching (first desugaring step).

A notation declaration like `Notation between: a-b-c.` compiles to a pattern
of slots and literal symbols; the label is the predicate name. Matching an
atom span tries patterns sorted by descending element count, then declaration
order; ties where two distinct patterns of equal element count both match are
reported as ambiguous rather than silently resolved. Spans that match no
pattern fall back to prefix predicate syntax `p(t1,...,tn)`, equality,
inequality, or the literal keyword `contradiction`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import AmbiguousMatch, ConflictingNotation, Loc, UnmatchedAtom
from .fol import FALSUM, App, Equal, Formula, Not, Pred, Term, Var, is_identifier
from .lexer import COMMA, SYMBOL, UNICODE_OP, WORD, Token


@dataclass(frozen=True)
class Slot:
    """Anonymous argument position; the declaration's letter is discarded."""


@dataclass(frozen=True)
class Literal:
    text: str


@dataclass(frozen=True)
class NotationPattern:
    name: str
    elements: tuple[Slot | Literal, ...]

    @property
    def arity(self) -> int:
        return sum(1 for e in self.elements if isinstance(e, Slot))

    def surface(self) -> str:
        """Canonical surface form with fresh slot letters (for printing)."""
        letters = iter("abcdefghijklmnopqrstuvwxyz")
        parts: list[str] = []
        for e in self.elements:
            parts.append(next(letters) if isinstance(e, Slot) else e.text)
        return "".join(parts)

    def render(self, args: tuple[Term, ...]) -> list[Token]:
        """Surface tokens for an application of this pattern (test support)."""
        out: list[Token] = []
        it = iter(args)
        for e in self.elements:
            if isinstance(e, Slot):
                t = next(it)
                out.extend(_term_tokens(t))
            else:
                kind = SYMBOL if e.text.isascii() else UNICODE_OP
                out.append(Token(kind, e.text))
        return out


def _term_tokens(t: Term) -> list[Token]:
    if isinstance(t, (Var,)):
        return [Token(WORD, t.name)]
    if isinstance(t, App):
        toks = [Token(WORD, t.name), Token(SYMBOL, "(")]
        for i, a in enumerate(t.args):
            if i:
                toks.append(Token(COMMA, ","))
            toks.extend(_term_tokens(a))
        toks.append(Token(SYMBOL, ")"))
        return toks
    return [Token(WORD, getattr(t, "name", str(t)))]


@dataclass(frozen=True)
class Scope:
    """Immutable snapshot of the notations visible at a point in a document."""

    patterns: tuple[NotationPattern, ...] = ()

    def lookup(self, name: str) -> NotationPattern | None:
        for p in self.patterns:
            if p.name == name:
                return p
        return None

    def predicate_names(self) -> set[str]:
        return {p.name for p in self.patterns}


def register(pattern: NotationPattern, scope: Scope, loc: Loc | None = None) -> Scope:
    """Add a pattern; re-registering an identical pattern is idempotent."""
    existing = scope.lookup(pattern.name)
    if existing is not None:
        if existing == pattern:
            return scope
        raise ConflictingNotation(
            f"notation {pattern.name!r} is already bound to a different pattern", loc
        )
    return Scope(scope.patterns + (pattern,))


# ---------------------------------------------------------------------------
# Term parsing inside atom spans


def _parse_term(tokens: tuple[Token, ...], i: int) -> tuple[Term, int] | None:
    if i >= len(tokens):
        return None
    t = tokens[i]
    if t.kind == WORD and is_identifier(t.text):
        if i + 1 < len(tokens) and tokens[i + 1].kind == SYMBOL and tokens[i + 1].text == "(":
            j = i + 2
            args: list[Term] = []
            while True:
                got = _parse_term(tokens, j)
                if got is None:
                    return None
                arg, j = got
                args.append(arg)
                if j < len(tokens) and tokens[j].kind == COMMA:
                    j += 1
                    continue
                break
            if j < len(tokens) and tokens[j].kind == SYMBOL and tokens[j].text == ")":
                return App(t.text, tuple(args)), j + 1
            return None
        return Var(t.text), i + 1
    if t.kind == SYMBOL and t.text == "(":
        got = _parse_term(tokens, i + 1)
        if got is None:
            return None
        inner, j = got
        if j < len(tokens) and tokens[j].kind == SYMBOL and tokens[j].text == ")":
            return inner, j + 1
        return None
    return None


def _try_pattern(pattern: NotationPattern, tokens: tuple[Token, ...]) -> tuple[Term, ...] | None:
    i = 0
    args: list[Term] = []
    for el in pattern.elements:
        if isinstance(el, Literal):
            if i < len(tokens) and tokens[i].kind != WORD and tokens[i].text == el.text:
                i += 1
            else:
                return None
        else:
            got = _parse_term(tokens, i)
            if got is None:
                return None
            term, i = got
            args.append(term)
    if i != len(tokens):
        return None
    return tuple(args)


def _split_equality(tokens: tuple[Token, ...]) -> tuple[str, Term, Term] | None:
    depth = 0
    for i, t in enumerate(tokens):
        if t.kind == SYMBOL and t.text == "(":
            depth += 1
        elif t.kind == SYMBOL and t.text == ")":
            depth -= 1
        elif depth == 0 and t.text in ("=", "≠") and t.kind in (SYMBOL, UNICODE_OP):
            left = _parse_term(tokens[:i], 0)
            right = _parse_term(tokens[i + 1:], 0)
            if left and right and left[1] == i and right[1] == len(tokens) - i - 1:
                return t.text, left[0], right[0]
            return None
    return None


def match_atom(tokens: tuple[Token, ...], scope: Scope, loc: Loc | None = None) -> Formula:
    """Resolve one atom span against the registered notation patterns.

    Identifiers become Var placeholders; the desugarer later rebinds them to
    constants or quantified variables as the enclosing context dictates.
    """
    if loc is None and tokens:
        loc = tokens[0].loc
    if len(tokens) == 1 and tokens[0].kind == WORD and tokens[0].text == "contradiction":
        return FALSUM

    by_count: dict[int, list[NotationPattern]] = {}
    for p in scope.patterns:
        by_count.setdefault(len(p.elements), []).append(p)
    for n in sorted(by_count, reverse=True):
        hits = [(p, args) for p in by_count[n] if (args := _try_pattern(p, tokens)) is not None]
        if len(hits) > 1:
            names = ", ".join(p.name for p, _ in hits)
            raise AmbiguousMatch(
                f"atom matches several notations of equal size: {names}", loc
            )
        if hits:
            p, args = hits[0]
            return Pred(p.name, args)

    # Prefix predicate p(t1,...,tn)
    if (
        len(tokens) >= 4
        and tokens[0].kind == WORD
        and is_identifier(tokens[0].text)
        and tokens[1].kind == SYMBOL
        and tokens[1].text == "("
    ):
        got = _parse_term(tokens, 0)
        if got is not None and got[1] == len(tokens) and isinstance(got[0], App):
            app = got[0]
            return Pred(app.name, app.args)

    eq = _split_equality(tokens)
    if eq is not None:
        op, lhs, rhs = eq
        return Equal(lhs, rhs) if op == "=" else Not(Equal(lhs, rhs))

    text = " ".join(t.text for t in tokens)
    raise UnmatchedAtom(f"cannot interpret atom {text!r}", loc)
