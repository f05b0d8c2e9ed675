"""Surface parser: token stream to raw document with unresolved atom spans.

Sentences parse into a small connective tree whose leaves are token spans;
notation matching happens later, so the parser never needs to know which
symbol sequences mean which predicates. Precedence, weakest to strongest:
iff, implies, or, and, not. `implies` and `iff` associate right, `and`/`or`
left. A quantifier prefix scopes over the entire remaining sentence (up to
the end of the enclosing parenthesis group).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import DuplicateSlot, Loc, ParseError, UnclosedBlock
from .fol import is_identifier
from .lexer import COLON, COMMA, PERIOD, SYMBOL, UNICODE_OP, WORD, Token, tokenize
from .notation import Literal, NotationPattern, Slot

KEYWORDS = frozenset(
    """Include Notation Definition Axiom Lemma Proof Assume Then Hence Note Case Take
    qed since by such that for all exists implies iff and or not contradiction""".split()
)

# Words that terminate an atom span or an operand position.
_BOUNDARY_WORDS = frozenset("and or implies iff not since by qed such for exists".split())


# ---------------------------------------------------------------------------
# Sentence nodes


@dataclass(frozen=True)
class SNode:
    pass


@dataclass(frozen=True)
class SAtom(SNode):
    tokens: tuple[Token, ...]
    loc: Loc = field(compare=False, default=Loc(1, 1))


@dataclass(frozen=True)
class SNot(SNode):
    body: SNode


@dataclass(frozen=True)
class SBin(SNode):
    op: str  # and | or | implies | iff
    left: SNode
    right: SNode


@dataclass(frozen=True)
class SQuant(SNode):
    kind: str  # forall | exists
    vars: tuple[str, ...]
    body: SNode
    loc: Loc = field(compare=False, default=Loc(1, 1))


# ---------------------------------------------------------------------------
# Raw items and proof steps


@dataclass(frozen=True)
class RawStep:
    pass


@dataclass(frozen=True)
class RawAssume(RawStep):
    sentence: SNode
    loc: Loc = field(compare=False, default=Loc(1, 1))


@dataclass(frozen=True)
class RawDerive(RawStep):
    """A `Then` or `Hence` step; `since` and `by` may co-occur."""

    kind: str  # then | hence
    sentence: SNode
    since: SNode | None = None
    by: tuple[str, ...] | None = None
    loc: Loc = field(compare=False, default=Loc(1, 1))


@dataclass(frozen=True)
class RawNote(RawStep):
    goal: SNode
    steps: tuple[RawStep, ...]
    loc: Loc = field(compare=False, default=Loc(1, 1))


@dataclass(frozen=True)
class RawCase(RawStep):
    hypothesis: SNode
    steps: tuple[RawStep, ...]
    loc: Loc = field(compare=False, default=Loc(1, 1))


@dataclass(frozen=True)
class RawTake(RawStep):
    vars: tuple[str, ...]
    sentence: SNode
    by: tuple[str, ...] | None = None
    loc: Loc = field(compare=False, default=Loc(1, 1))


@dataclass(frozen=True)
class RawItem:
    pass


@dataclass(frozen=True)
class RawInclude(RawItem):
    name: str
    loc: Loc = field(compare=False, default=Loc(1, 1))


@dataclass(frozen=True)
class RawNotation(RawItem):
    pattern: NotationPattern
    loc: Loc = field(compare=False, default=Loc(1, 1))


@dataclass(frozen=True)
class RawDecl(RawItem):
    kind: str  # definition | axiom | lemma
    label: str
    sentence: SNode
    proof: tuple[RawStep, ...] | None = None
    auto_label: bool = False
    loc: Loc = field(compare=False, default=Loc(1, 1))


@dataclass(frozen=True)
class RawDocument:
    items: tuple[RawItem, ...]


# ---------------------------------------------------------------------------
# Parser


class _Cursor:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0

    def peek(self, off: int = 0) -> Token | None:
        j = self.i + off
        return self.tokens[j] if j < len(self.tokens) else None

    def at_word(self, *texts: str) -> bool:
        t = self.peek()
        return t is not None and t.kind == WORD and t.text in texts

    def at_kind(self, kind: str) -> bool:
        t = self.peek()
        return t is not None and t.kind == kind

    def next(self) -> Token:
        t = self.peek()
        if t is None:
            raise ParseError("unexpected end of input", self.last_loc())
        self.i += 1
        return t

    def last_loc(self) -> Loc:
        if self.tokens:
            t = self.tokens[min(self.i, len(self.tokens) - 1)]
            return t.loc
        return Loc(1, 1)

    def expect_word(self, text: str) -> Token:
        t = self.peek()
        if t is None or t.kind != WORD or t.text != text:
            raise ParseError(
                f"found {t.text if t else 'end of input'!r}", self.last_loc(), (text,)
            )
        return self.next()

    def expect_kind(self, kind: str, what: str) -> Token:
        t = self.peek()
        if t is None or t.kind != kind:
            raise ParseError(
                f"found {t.text if t else 'end of input'!r}", self.last_loc(), (what,)
            )
        return self.next()

    def expect_identifier(self) -> Token:
        t = self.peek()
        if t is None or t.kind != WORD or t.text in KEYWORDS or not is_identifier(t.text):
            raise ParseError(
                f"found {t.text if t else 'end of input'!r}", self.last_loc(), ("identifier",)
            )
        return self.next()


def _at_quantifier(c: _Cursor) -> bool:
    if c.at_word("exists"):
        return True
    if c.at_word("for"):
        nxt = c.peek(1)
        return nxt is not None and nxt.kind == WORD and nxt.text == "all"
    return False


def _parse_quantifier(c: _Cursor) -> SQuant:
    tok = c.next()
    if tok.text == "for":
        c.expect_word("all")
        kind = "forall"
    else:
        kind = "exists"
    names = [c.expect_identifier().text]
    while c.at_kind(COMMA):
        c.next()
        names.append(c.expect_identifier().text)
    c.expect_kind(PERIOD, "'.' closing the quantifier prefix")
    body = _parse_sentence(c)
    return SQuant(kind, tuple(names), body, tok.loc)


def _parse_sentence(c: _Cursor) -> SNode:
    if _at_quantifier(c):
        return _parse_quantifier(c)
    return _parse_iff(c)


def _parse_iff(c: _Cursor) -> SNode:
    left = _parse_implies(c)
    if c.at_word("iff"):
        c.next()
        return SBin("iff", left, _parse_iff(c))
    return left


def _parse_implies(c: _Cursor) -> SNode:
    left = _parse_or(c)
    if c.at_word("implies"):
        c.next()
        return SBin("implies", left, _parse_implies(c))
    return left


def _parse_or(c: _Cursor) -> SNode:
    left = _parse_and(c)
    while c.at_word("or"):
        c.next()
        left = SBin("or", left, _parse_and(c))
    return left


def _parse_and(c: _Cursor) -> SNode:
    left = _parse_unary(c)
    while c.at_word("and"):
        c.next()
        left = SBin("and", left, _parse_unary(c))
    return left


def _parse_unary(c: _Cursor) -> SNode:
    if c.at_word("not"):
        c.next()
        return SNot(_parse_unary(c))
    if _at_quantifier(c):
        return _parse_quantifier(c)
    t = c.peek()
    if t is not None and t.kind == SYMBOL and t.text == "(":
        c.next()
        inner = _parse_sentence(c)
        close = c.peek()
        if close is None or close.kind != SYMBOL or close.text != ")":
            raise ParseError("unbalanced parenthesis", t.loc, (")",))
        c.next()
        return inner
    return _parse_atom(c)


def _parse_atom(c: _Cursor) -> SAtom:
    start = c.peek()
    if start is None:
        raise ParseError("expected an atomic proposition", c.last_loc())
    span: list[Token] = []
    depth = 0
    while True:
        t = c.peek()
        if t is None:
            break
        if depth == 0:
            if t.kind in (PERIOD, COLON):
                break
            if t.kind == COMMA:
                break
            if t.kind == WORD and t.text in _BOUNDARY_WORDS:
                break
            if t.kind == SYMBOL and t.text == ")":
                break
        if t.kind == SYMBOL and t.text == "(":
            depth += 1
        elif t.kind == SYMBOL and t.text == ")":
            depth -= 1
        span.append(c.next())
    if not span:
        raise ParseError(f"expected an atomic proposition, found {start.text!r}", start.loc)
    return SAtom(tuple(span), span[0].loc)


def _parse_by(c: _Cursor) -> tuple[str, ...]:
    labels = [c.expect_identifier().text]
    while c.at_kind(COMMA):
        c.next()
        labels.append(c.expect_identifier().text)
    return tuple(labels)


def _parse_steps(c: _Cursor, opener: Loc) -> tuple[RawStep, ...]:
    """Parse proof steps until the matching `qed.` (consumed)."""
    steps: list[RawStep] = []
    while True:
        t = c.peek()
        if t is None:
            raise UnclosedBlock("block opened here was never closed with 'qed.'", opener)
        if c.at_word("qed"):
            c.next()
            c.expect_kind(PERIOD, "'.'")
            return tuple(steps)
        steps.append(_parse_step(c))


def _parse_step(c: _Cursor) -> RawStep:
    t = c.peek()
    assert t is not None
    if c.at_word("Assume"):
        c.next()
        sentence = _parse_sentence(c)
        c.expect_kind(PERIOD, "'.'")
        return RawAssume(sentence, t.loc)
    if c.at_word("Then", "Hence"):
        kind = "then" if c.next().text == "Then" else "hence"
        sentence = _parse_sentence(c)
        since = None
        by = None
        if c.at_word("since"):
            c.next()
            since = _parse_sentence(c)
        if c.at_word("by"):
            c.next()
            by = _parse_by(c)
        c.expect_kind(PERIOD, "'.'")
        return RawDerive(kind, sentence, since, by, t.loc)
    if c.at_word("Note"):
        c.next()
        goal = _parse_sentence(c)
        c.expect_kind(COLON, "':'")
        steps = _parse_steps(c, t.loc)
        return RawNote(goal, steps, t.loc)
    if c.at_word("Case"):
        c.next()
        hyp = _parse_sentence(c)
        c.expect_kind(COLON, "':'")
        steps = _parse_steps(c, t.loc)
        return RawCase(hyp, steps, t.loc)
    if c.at_word("Take"):
        c.next()
        names = [c.expect_identifier().text]
        while c.at_kind(COMMA):
            c.next()
            names.append(c.expect_identifier().text)
        c.expect_word("such")
        c.expect_word("that")
        sentence = _parse_sentence(c)
        by = None
        if c.at_word("by"):
            c.next()
            by = _parse_by(c)
        c.expect_kind(PERIOD, "'.'")
        return RawTake(tuple(names), sentence, by, t.loc)
    raise ParseError(
        f"found {t.text!r}",
        t.loc,
        ("Assume", "Then", "Hence", "Note", "Case", "Take", "qed"),
    )


def parse_notation(label: str, tokens: list[Token], loc: Loc) -> NotationPattern:
    """Compile a notation declaration body into a pattern.

    Single-identifier tokens are argument slots (in order of first
    appearance); everything else is a literal. The notation label is the
    predicate name; arity is the slot count.
    """
    elements: list[Slot | Literal] = []
    slot_names: list[str] = []
    for t in tokens:
        if t.kind == WORD:
            if t.text in KEYWORDS or not is_identifier(t.text):
                raise ParseError(f"bad slot name {t.text!r} in notation", t.loc)
            if t.text in slot_names:
                raise DuplicateSlot(
                    f"slot {t.text!r} appears twice in notation {label!r}", t.loc
                )
            slot_names.append(t.text)
            elements.append(Slot())
        else:
            elements.append(Literal(t.text))
    if not any(isinstance(e, Literal) for e in elements):
        raise ParseError(f"notation {label!r} has no literal symbol", loc)
    if not slot_names:
        raise ParseError(f"notation {label!r} has no argument slot", loc)
    return NotationPattern(label, tuple(elements))


def parse_document(tokens: list[Token]) -> RawDocument:
    """Parse a token stream into a RawDocument; locations are preserved."""
    c = _Cursor(tokens)
    items: list[RawItem] = []
    labels: set[str] = set()
    lemma_counter = 0

    def check_label(label: str, loc: Loc) -> None:
        if label in labels:
            raise ParseError(f"label {label!r} is declared twice", loc)
        labels.add(label)

    while c.peek() is not None:
        t = c.peek()
        assert t is not None
        if c.at_word("Include"):
            c.next()
            name = c.expect_identifier().text
            c.expect_kind(PERIOD, "'.'")
            items.append(RawInclude(name, t.loc))
        elif c.at_word("Notation"):
            c.next()
            label = c.expect_identifier().text
            c.expect_kind(COLON, "':'")
            body: list[Token] = []
            while not c.at_kind(PERIOD):
                if c.peek() is None:
                    raise ParseError("notation never ends with '.'", t.loc)
                body.append(c.next())
            c.next()
            check_label(label, t.loc)
            items.append(RawNotation(parse_notation(label, body, t.loc), t.loc))
        elif c.at_word("Definition", "Axiom"):
            kind = "definition" if c.next().text == "Definition" else "axiom"
            label = c.expect_identifier().text
            c.expect_kind(COLON, "':'")
            sentence = _parse_sentence(c)
            c.expect_kind(PERIOD, "'.'")
            check_label(label, t.loc)
            items.append(RawDecl(kind, label, sentence, None, False, t.loc))
        elif c.at_word("Lemma"):
            c.next()
            auto = False
            if c.at_kind(COLON):
                lemma_counter += 1
                label = f"__lemma{lemma_counter}"
                auto = True
            else:
                label = c.expect_identifier().text
            c.expect_kind(COLON, "':'")
            sentence = _parse_sentence(c)
            c.expect_kind(PERIOD, "'.'")
            proof: tuple[RawStep, ...] | None = None
            if c.at_word("Proof"):
                opener = c.next().loc
                c.expect_kind(COLON, "':'")
                proof = _parse_steps(c, opener)
            check_label(label, t.loc)
            items.append(RawDecl("lemma", label, sentence, proof, auto, t.loc))
        else:
            raise ParseError(
                f"found {t.text!r}",
                t.loc,
                ("Include", "Notation", "Definition", "Axiom", "Lemma"),
            )
    return RawDocument(tuple(items))


def parse_source(source: str) -> RawDocument:
    return parse_document(tokenize(source))


# ---------------------------------------------------------------------------
# Rendering (round-trip support, debugging)

_PREC = {"iff": 1, "implies": 2, "or": 3, "and": 4}


def render_sentence(node: SNode) -> str:
    def tokens_text(tokens: tuple[Token, ...]) -> str:
        parts: list[str] = []
        for i, t in enumerate(tokens):
            if i and t.kind not in (COMMA,) and not (
                tokens[i - 1].kind == SYMBOL and tokens[i - 1].text == "("
            ) and t.text != ")":
                parts.append(" ")
            parts.append(t.text)
        return "".join(parts)

    def render(n: SNode, parent_prec: int) -> str:
        if isinstance(n, SAtom):
            return tokens_text(n.tokens)
        if isinstance(n, SNot):
            body = render(n.body, 9)
            if isinstance(n.body, SBin):
                body = f"({body})"
            return f"not {body}"
        if isinstance(n, SQuant):
            kw = "for all" if n.kind == "forall" else "exists"
            return f"{kw} {','.join(n.vars)}. {render(n.body, 0)}"
        assert isinstance(n, SBin)
        prec = _PREC[n.op]
        if n.op in ("implies", "iff"):
            left = render(n.left, prec + 1)
            right = render(n.right, prec)
        else:
            left = render(n.left, prec)
            right = render(n.right, prec + 1)
        if isinstance(n.left, SQuant) or (n.op not in ("implies", "iff") and isinstance(n.left, SBin) and _PREC[n.left.op] < prec):
            left = f"({left})"
        elif n.op in ("implies", "iff") and isinstance(n.left, SBin) and _PREC[n.left.op] <= prec:
            left = f"({left})"
        if isinstance(n.right, SBin) and _PREC[n.right.op] < prec:
            right = f"({right})"
        elif n.op in ("and", "or") and isinstance(n.right, SBin) and _PREC[n.right.op] == prec:
            right = f"({right})"
        text = f"{left} {n.op} {right}"
        return text

    return render(node, 0)


def render_document(doc: RawDocument) -> str:
    """Pretty-print a raw document so that reparsing gives an equal structure."""
    out: list[str] = []

    def render_steps(steps: tuple[RawStep, ...], indent: str) -> None:
        for s in steps:
            if isinstance(s, RawAssume):
                out.append(f"{indent}Assume {render_sentence(s.sentence)}.")
            elif isinstance(s, RawDerive):
                kw = "Then" if s.kind == "then" else "Hence"
                line = f"{indent}{kw} {render_sentence(s.sentence)}"
                if s.since is not None:
                    line += f" since {render_sentence(s.since)}"
                if s.by is not None:
                    line += f" by {', '.join(s.by)}"
                out.append(line + ".")
            elif isinstance(s, RawNote):
                out.append(f"{indent}Note {render_sentence(s.goal)}:")
                render_steps(s.steps, indent + "  ")
                out.append(f"{indent}qed.")
            elif isinstance(s, RawCase):
                out.append(f"{indent}Case {render_sentence(s.hypothesis)}:")
                render_steps(s.steps, indent + "  ")
                out.append(f"{indent}qed.")
            elif isinstance(s, RawTake):
                line = f"{indent}Take {', '.join(s.vars)} such that {render_sentence(s.sentence)}"
                if s.by is not None:
                    line += f" by {', '.join(s.by)}"
                out.append(line + ".")

    for item in doc.items:
        if isinstance(item, RawInclude):
            out.append(f"Include {item.name}.")
        elif isinstance(item, RawNotation):
            out.append(f"Notation {item.pattern.name}: {item.pattern.surface()}.")
        elif isinstance(item, RawDecl):
            kw = {"definition": "Definition", "axiom": "Axiom", "lemma": "Lemma"}[item.kind]
            label = "" if item.auto_label else f" {item.label}"
            out.append(f"{kw}{label}: {render_sentence(item.sentence)}.")
            if item.proof is not None:
                out.append("Proof:")
                render_steps(item.proof, "  ")
                out.append("qed.")
    return "\n".join(out) + "\n"
