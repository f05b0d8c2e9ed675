"""Desugaring: raw surface trees to fully first-order documents.

Declaration sentences are implicitly universally quantified over their free
names in first-occurrence order. Proof sentences are never quantified: their
free names must refer to the constants fixed by the enclosing lemma or
introduced by Take, and resolve to Const terms. Desugaring is a 1:1
translation of raw steps; it never adds or removes proof structure.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Protocol

from .errors import (
    DocumentErrors,
    ElfeError,
    Loc,
    StructureError,
    UnknownLabel,
    UnknownName,
)
from .fol import (
    App,
    Const,
    Exists,
    Forall,
    Formula,
    Iff,
    Implies,
    Not,
    And,
    Or,
    Pred,
    Equal,
    Term,
    Var,
    free_vars,
    free_vars_ordered,
)
from .notation import NotationPattern, Scope, match_atom, register
from .parser import (
    RawAssume,
    RawCase,
    RawDecl,
    RawDerive,
    RawDocument,
    RawInclude,
    RawNotation,
    RawNote,
    RawStep,
    RawTake,
    SAtom,
    SBin,
    SNode,
    SNot,
    SQuant,
)


# ---------------------------------------------------------------------------
# Typed proof steps


@dataclass(frozen=True)
class Step:
    pass


@dataclass(frozen=True)
class Assume(Step):
    formula: Formula
    loc: Loc = field(compare=False, default=Loc(1, 1))


@dataclass(frozen=True)
class Derive(Step):
    goal: Formula
    since: Formula | None = None
    by: tuple[str, ...] | None = None
    kind: str = "then"  # then | hence
    loc: Loc = field(compare=False, default=Loc(1, 1))


@dataclass(frozen=True)
class Note(Step):
    goal: Formula
    sub: "ProofTree" = None  # type: ignore[assignment]
    loc: Loc = field(compare=False, default=Loc(1, 1))


@dataclass(frozen=True)
class Cases(Step):
    cases: tuple[tuple[Formula, "ProofTree"], ...] = ()
    loc: Loc = field(compare=False, default=Loc(1, 1))


@dataclass(frozen=True)
class Take(Step):
    vars: tuple[str, ...]
    body: Formula
    by: tuple[str, ...] | None = None
    loc: Loc = field(compare=False, default=Loc(1, 1))


@dataclass(frozen=True)
class ProofTree:
    steps: tuple[Step, ...]


@dataclass(frozen=True)
class Decl:
    label: str
    kind: str  # axiom | definition | lemma
    formula: Formula
    proof: ProofTree | None = None
    loc: Loc = field(compare=False, default=Loc(1, 1))


@dataclass(frozen=True)
class Document:
    includes: tuple[str, ...]
    decls: tuple[Decl, ...]
    scope: Scope = field(compare=False, default_factory=Scope)
    ambient: tuple[tuple[str, str, Formula], ...] = ()  # from includes: (label, kind, formula)


class LibraryLike(Protocol):
    name: str
    notations: tuple[NotationPattern, ...]
    premises: tuple[tuple[str, str, Formula], ...]


Resolver = Callable[[str, Loc], LibraryLike]


# ---------------------------------------------------------------------------
# Quantification


def implicit_quantify(f: Formula, bound_in_scope: set[str]) -> Formula:
    """Universally close a declaration over its free variables.

    Variables already fixed in scope stay free; quantifier order is first
    occurrence. Idempotent on closed formulas.
    """
    outstanding = [v for v in free_vars_ordered(f) if v not in bound_in_scope]
    if not outstanding:
        return f
    return Forall(tuple(outstanding), f)


# ---------------------------------------------------------------------------
# Sentence conversion


def _rebind_term(t: Term, bound: set[str], constants: set[str] | None, loc: Loc) -> Term:
    if isinstance(t, Var):
        if t.name in bound:
            return t
        if constants is None:  # declaration mode: free names stay variables
            return t
        if t.name in constants:
            return Const(t.name)
        raise UnknownName(
            f"{t.name!r} is not a fixed constant, a Take constant, or a bound variable", loc
        )
    if isinstance(t, App):
        return App(t.name, tuple(_rebind_term(a, bound, constants, loc) for a in t.args))
    return t


def sentence_formula(
    node: SNode,
    scope: Scope,
    constants: set[str] | None,
    bound: frozenset[str] = frozenset(),
) -> Formula:
    """Resolve notations and names in one sentence.

    `constants=None` selects declaration mode (free identifiers stay
    variables, to be implicitly quantified); otherwise proof mode, where free
    identifiers must name known constants.
    """
    if isinstance(node, SAtom):
        atom = match_atom(node.tokens, scope, node.loc)
        return _rebind_atom(atom, set(bound), constants, node.loc)
    if isinstance(node, SNot):
        return Not(sentence_formula(node.body, scope, constants, bound))
    if isinstance(node, SBin):
        ctor = {"and": And, "or": Or, "implies": Implies, "iff": Iff}[node.op]
        return ctor(
            sentence_formula(node.left, scope, constants, bound),
            sentence_formula(node.right, scope, constants, bound),
        )
    if isinstance(node, SQuant):
        ctor = Forall if node.kind == "forall" else Exists
        return ctor(node.vars, sentence_formula(node.body, scope, constants, bound | set(node.vars)))
    raise AssertionError(f"unknown sentence node {node!r}")


def _rebind_atom(atom: Formula, bound: set[str], constants: set[str] | None, loc: Loc) -> Formula:
    if isinstance(atom, Pred):
        return Pred(atom.name, tuple(_rebind_term(a, bound, constants, loc) for a in atom.args))
    if isinstance(atom, Equal):
        return Equal(
            _rebind_term(atom.lhs, bound, constants, loc),
            _rebind_term(atom.rhs, bound, constants, loc),
        )
    if isinstance(atom, Not):  # inequality
        return Not(_rebind_atom(atom.body, bound, constants, loc))
    return atom  # Falsum


# ---------------------------------------------------------------------------
# Document desugaring


class _ArityTable:
    """Enforces fixed arity per predicate and function name in one document."""

    def __init__(self) -> None:
        self.preds: dict[str, int] = {}
        self.funcs: dict[str, int] = {}

    def observe(self, f: Formula, loc: Loc) -> None:
        def walk_term(t: Term) -> None:
            if isinstance(t, App):
                old = self.funcs.setdefault(t.name, len(t.args))
                if old != len(t.args):
                    raise StructureError(
                        f"function {t.name!r} used with arity {len(t.args)} and {old}", loc
                    )
                for a in t.args:
                    walk_term(a)

        def walk(g: Formula) -> None:
            if isinstance(g, Pred):
                old = self.preds.setdefault(g.name, len(g.args))
                if old != len(g.args):
                    raise StructureError(
                        f"predicate {g.name!r} used with arity {len(g.args)} and {old}", loc
                    )
                for a in g.args:
                    walk_term(a)
            elif isinstance(g, Equal):
                walk_term(g.lhs)
                walk_term(g.rhs)
            elif isinstance(g, Not):
                walk(g.body)
            elif isinstance(g, (And, Or, Implies, Iff)):
                walk(g.left)
                walk(g.right)
            elif isinstance(g, (Forall, Exists)):
                walk(g.body)

        walk(f)


def desugar(raw: RawDocument, resolver: Resolver | None = None) -> Document:
    """Resolve notations, labels and quantification for a whole document.

    Independent sentence-level errors are aggregated into DocumentErrors so a
    single run reports every bad atom and unknown label with its location.
    """
    scope = Scope()
    ambient: list[tuple[str, str, Formula]] = []
    ambient_labels: set[str] = set()
    includes: list[str] = []
    decls: list[Decl] = []
    errors: list[ElfeError] = []
    arities = _ArityTable()

    def known_labels() -> set[str]:
        return ambient_labels | {d.label for d in decls}

    def check_by(by: tuple[str, ...] | None, loc: Loc) -> None:
        if not by:
            return
        known = known_labels()
        for label in by:
            if label not in known:
                raise UnknownLabel(f"unknown premise label {label!r} in 'by'", loc)

    def convert_steps(steps: tuple[RawStep, ...], constants: set[str]) -> ProofTree:
        out: list[Step] = []
        local = set(constants)
        pending_cases: list[tuple[Formula, ProofTree]] = []
        pending_loc: Loc | None = None

        def flush_cases() -> None:
            nonlocal pending_cases, pending_loc
            if pending_cases:
                out.append(Cases(tuple(pending_cases), pending_loc or Loc(1, 1)))
                pending_cases = []
                pending_loc = None

        for s in steps:
            if isinstance(s, RawCase):
                hyp = sentence_formula(s.hypothesis, scope, local)
                sub = convert_steps(s.steps, local)
                if not pending_cases:
                    pending_loc = s.loc
                pending_cases.append((hyp, sub))
                continue
            flush_cases()
            if isinstance(s, RawAssume):
                out.append(Assume(sentence_formula(s.sentence, scope, local), s.loc))
            elif isinstance(s, RawDerive):
                check_by(s.by, s.loc)
                goal = sentence_formula(s.sentence, scope, local)
                since = (
                    sentence_formula(s.since, scope, local) if s.since is not None else None
                )
                out.append(Derive(goal, since, s.by, s.kind, s.loc))
            elif isinstance(s, RawNote):
                goal = sentence_formula(s.goal, scope, local)
                sub = convert_steps(s.steps, local)
                out.append(Note(goal, sub, s.loc))
            elif isinstance(s, RawTake):
                check_by(s.by, s.loc)
                for v in s.vars:
                    if v in local:
                        raise StructureError(
                            f"Take reuses the live constant name {v!r}", s.loc
                        )
                body = sentence_formula(
                    s.sentence, scope, local, bound=frozenset(s.vars)
                )
                out.append(Take(s.vars, body, s.by, s.loc))
                local |= set(s.vars)
            else:
                raise AssertionError(f"unknown raw step {s!r}")
        flush_cases()
        return ProofTree(tuple(out))

    for item in raw.items:
        try:
            if isinstance(item, RawInclude):
                if resolver is None:
                    raise UnknownLabel(f"no libraries available for Include {item.name!r}", item.loc)
                lib = resolver(item.name, item.loc)
                includes.append(item.name)
                for pat in lib.notations:
                    scope = register(pat, scope, item.loc)
                for label, kind, f in lib.premises:
                    if label not in ambient_labels:
                        ambient.append((label, kind, f))
                        ambient_labels.add(label)
                        arities.observe(f, item.loc)
            elif isinstance(item, RawNotation):
                scope = register(item.pattern, scope, item.loc)
            elif isinstance(item, RawDecl):
                f = sentence_formula(item.sentence, scope, None)
                f = implicit_quantify(f, set())
                arities.observe(f, item.loc)
                if free_vars(f):
                    raise StructureError(
                        f"declaration {item.label!r} is not closed after quantification",
                        item.loc,
                    )
                proof: ProofTree | None = None
                if item.kind == "lemma" and item.proof is not None:
                    fixed = set(f.vars) if isinstance(f, Forall) else set()
                    proof = convert_steps(item.proof, fixed)
                decls.append(Decl(item.label, item.kind, f, proof, item.loc))
        except DocumentErrors as exc:
            errors.extend(exc.errors)
        except ElfeError as exc:
            errors.append(exc)
    if errors:
        raise DocumentErrors(errors)
    return Document(tuple(includes), tuple(decls), scope, tuple(ambient))
