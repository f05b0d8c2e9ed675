"""First-order logic core: terms, formulas, substitution and clausification.

All values are immutable; they are shared freely across concurrent
obligation checks. Identifiers are strings over letters, digits, apostrophe
and underscore, starting with a letter (so primed point names like `a'`
are ordinary identifiers). Skolem symbols live in the reserved `__sk`
namespace and are rejected in user input by the parser.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import count
from typing import Iterator, Mapping

IDENT_RE = re.compile(r"[A-Za-z][A-Za-z0-9_']*")

SKOLEM_PREFIX = "__sk"


def is_identifier(name: str) -> bool:
    return bool(IDENT_RE.fullmatch(name))


# ---------------------------------------------------------------------------
# Terms


@dataclass(frozen=True)
class Term:
    pass


@dataclass(frozen=True)
class Var(Term):
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Const(Term):
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class App(Term):
    """Function application. Arity is fixed per function name in a document."""

    name: str
    args: tuple[Term, ...]

    def __str__(self) -> str:
        return f"{self.name}({','.join(str(a) for a in self.args)})"


# ---------------------------------------------------------------------------
# Formulas


@dataclass(frozen=True)
class Formula:
    pass


@dataclass(frozen=True)
class Pred(Formula):
    name: str
    args: tuple[Term, ...]

    def __str__(self) -> str:
        if not self.args:
            return self.name
        return f"{self.name}({','.join(str(a) for a in self.args)})"


@dataclass(frozen=True)
class Equal(Formula):
    lhs: Term
    rhs: Term

    def __str__(self) -> str:
        return f"{self.lhs} = {self.rhs}"


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Forall(Formula):
    vars: tuple[str, ...]
    body: Formula


@dataclass(frozen=True)
class Exists(Formula):
    vars: tuple[str, ...]
    body: Formula


@dataclass(frozen=True)
class Falsum(Formula):
    """Internal image of the keyword `contradiction`."""


FALSUM = Falsum()

Atom = Pred | Equal  # the only formulas allowed inside clause literals


def and_all(parts: list[Formula]) -> Formula:
    """Left-associated conjunction; empty input is not meaningful here."""
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def or_all(parts: list[Formula]) -> Formula:
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


def conjuncts(f: Formula) -> list[Formula]:
    """Flatten a left/right nested And chain."""
    if isinstance(f, And):
        return conjuncts(f.left) + conjuncts(f.right)
    return [f]


# ---------------------------------------------------------------------------
# Free variables and substitution


def term_vars(t: Term) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, App):
        out: set[str] = set()
        for a in t.args:
            out |= term_vars(a)
        return out
    return set()


def free_vars(f: Formula) -> set[str]:
    """Variables not bound by any enclosing quantifier."""
    return set(free_vars_ordered(f))


def free_vars_ordered(f: Formula) -> list[str]:
    """Free variables in first-occurrence order (used for implicit quantification)."""
    seen: list[str] = []

    def walk_term(t: Term, bound: frozenset[str]) -> None:
        if isinstance(t, Var):
            if t.name not in bound and t.name not in seen:
                seen.append(t.name)
        elif isinstance(t, App):
            for a in t.args:
                walk_term(a, bound)

    def walk(g: Formula, bound: frozenset[str]) -> None:
        if isinstance(g, Pred):
            for a in g.args:
                walk_term(a, bound)
        elif isinstance(g, Equal):
            walk_term(g.lhs, bound)
            walk_term(g.rhs, bound)
        elif isinstance(g, Not):
            walk(g.body, bound)
        elif isinstance(g, (And, Or, Implies, Iff)):
            walk(g.left, bound)
            walk(g.right, bound)
        elif isinstance(g, (Forall, Exists)):
            walk(g.body, bound | frozenset(g.vars))
        # Falsum: nothing

    walk(f, frozenset())
    return seen


def fresh_name(base: str, taken: set[str]) -> str:
    """Deterministic fresh name: smallest unused numeric suffix."""
    if base not in taken:
        return base
    for i in count():
        cand = f"{base}{i}"
        if cand not in taken:
            return cand
    raise AssertionError("unreachable")


def substitute_term(t: Term, mapping: Mapping[str, Term]) -> Term:
    if isinstance(t, Var):
        return mapping.get(t.name, t)
    if isinstance(t, App):
        return App(t.name, tuple(substitute_term(a, mapping) for a in t.args))
    return t


def substitute(f: Formula, mapping: Mapping[str, Term]) -> Formula:
    """Capture-avoiding substitution of free variables.

    Bound variables are renamed (numeric suffix, smallest unused) whenever a
    replacement term would otherwise be captured.
    """
    if not mapping:
        return f
    if isinstance(f, Pred):
        return Pred(f.name, tuple(substitute_term(a, mapping) for a in f.args))
    if isinstance(f, Equal):
        return Equal(substitute_term(f.lhs, mapping), substitute_term(f.rhs, mapping))
    if isinstance(f, Not):
        return Not(substitute(f.body, mapping))
    if isinstance(f, (And, Or, Implies, Iff)):
        return type(f)(substitute(f.left, mapping), substitute(f.right, mapping))
    if isinstance(f, (Forall, Exists)):
        live = {v: t for v, t in mapping.items() if v not in f.vars}
        # Drop entries that cannot touch the body.
        body_free = free_vars(f.body)
        live = {v: t for v, t in live.items() if v in body_free}
        if not live:
            return f
        range_vars: set[str] = set()
        for t in live.values():
            range_vars |= term_vars(t)
        renaming: dict[str, Term] = {}
        new_vars: list[str] = []
        taken = body_free | range_vars | set(f.vars)
        for v in f.vars:
            if v in range_vars:
                nv = fresh_name(v, taken)
                taken.add(nv)
                renaming[v] = Var(nv)
                new_vars.append(nv)
            else:
                new_vars.append(v)
        body = substitute(f.body, renaming) if renaming else f.body
        return type(f)(tuple(new_vars), substitute(body, live))
    return f  # Falsum


def fix_constants(f: Formula, taken: set[str] | None = None) -> tuple[Formula, list[Const]]:
    """Open the outermost universal block, fixing each variable to a constant.

    Nested leading Forall blocks are flattened. Constants keep the variable's
    name, suffixed with a numeral on collision with `taken` or an earlier
    fixed constant. Non-universal input is returned unchanged with no
    constants.
    """
    taken = set(taken) if taken else set()
    consts: list[Const] = []
    while isinstance(f, Forall):
        mapping: dict[str, Term] = {}
        for v in f.vars:
            name = fresh_name(v, taken)
            taken.add(name)
            c = Const(name)
            consts.append(c)
            mapping[v] = c
        f = substitute(f.body, mapping)
    return f, consts


# ---------------------------------------------------------------------------
# Clauses and clausification


@dataclass(frozen=True)
class Clause:
    """Disjunction of literals; each literal is (polarity, Pred-or-Equal atom)."""

    literals: tuple[tuple[bool, Atom], ...]
    derivation_id: int = field(default=0, compare=False)

    def is_empty(self) -> bool:
        return not self.literals

    def __str__(self) -> str:
        if not self.literals:
            return "{}"
        lits = ", ".join(("" if pol else "¬") + str(a) for pol, a in self.literals)
        return "{" + lits + "}"


class _SkolemGen:
    def __init__(self) -> None:
        self.n = 0

    def fresh(self) -> str:
        self.n += 1
        return f"{SKOLEM_PREFIX}{self.n}"


def _expand_iff(f: Formula) -> Formula:
    if isinstance(f, Iff):
        l, r = _expand_iff(f.left), _expand_iff(f.right)
        return And(Implies(l, r), Implies(r, l))
    if isinstance(f, Not):
        return Not(_expand_iff(f.body))
    if isinstance(f, (And, Or, Implies)):
        return type(f)(_expand_iff(f.left), _expand_iff(f.right))
    if isinstance(f, (Forall, Exists)):
        return type(f)(f.vars, _expand_iff(f.body))
    return f


def _nnf(f: Formula, positive: bool) -> Formula:
    """Negation normal form; `Not` survives only directly on atoms.

    Negated Falsum is encoded as the valid formula Falsum -> Falsum so no
    separate truth constant is needed; clause normalization removes it.
    """
    if isinstance(f, Not):
        return _nnf(f.body, not positive)
    if isinstance(f, And):
        l, r = _nnf(f.left, positive), _nnf(f.right, positive)
        return And(l, r) if positive else Or(l, r)
    if isinstance(f, Or):
        l, r = _nnf(f.left, positive), _nnf(f.right, positive)
        return Or(l, r) if positive else And(l, r)
    if isinstance(f, Implies):
        l, r = _nnf(f.left, not positive), _nnf(f.right, positive)
        return Or(l, r) if positive else And(l, r)
    if isinstance(f, Forall):
        body = _nnf(f.body, positive)
        return Forall(f.vars, body) if positive else Exists(f.vars, body)
    if isinstance(f, Exists):
        body = _nnf(f.body, positive)
        return Exists(f.vars, body) if positive else Forall(f.vars, body)
    if isinstance(f, Falsum):
        return f if positive else Not(f)
    # Atom
    return f if positive else Not(f)


def _skolemize(
    f: Formula,
    env: dict[str, Term],
    universals: tuple[Var, ...],
    gen: _SkolemGen,
    used: set[str],
) -> Formula:
    """Skolemize an NNF formula, renaming bound variables apart as it goes."""
    if isinstance(f, Forall):
        new_env = dict(env)
        univ = list(universals)
        for v in f.vars:
            name = fresh_name(v, used)
            used.add(name)
            nv = Var(name)
            new_env[v] = nv
            univ.append(nv)
        return Forall(
            tuple(v.name for v in univ[len(universals):]),
            _skolemize(f.body, new_env, tuple(univ), gen, used),
        )
    if isinstance(f, Exists):
        new_env = dict(env)
        for v in f.vars:
            sk = gen.fresh()
            if universals:
                new_env[v] = App(sk, tuple(universals))
            else:
                new_env[v] = Const(sk)
        return _skolemize(f.body, new_env, universals, gen, used)
    if isinstance(f, (And, Or)):
        return type(f)(
            _skolemize(f.left, env, universals, gen, used),
            _skolemize(f.right, env, universals, gen, used),
        )
    if isinstance(f, Not):
        return Not(_skolemize(f.body, env, universals, gen, used))
    if isinstance(f, (Pred, Equal)):
        return substitute(f, env)
    return f  # Falsum


def _distribute(f: Formula) -> list[list[tuple[bool, Atom]]]:
    """Produce CNF literal lists from a skolemized, quantifier-stripped NNF body."""
    if isinstance(f, Forall):
        return _distribute(f.body)
    if isinstance(f, And):
        return _distribute(f.left) + _distribute(f.right)
    if isinstance(f, Or):
        left, right = _distribute(f.left), _distribute(f.right)
        return [l + r for l in left for r in right]
    if isinstance(f, Falsum):
        return [[]]  # falsum contributes an empty clause
    if isinstance(f, Not):
        if isinstance(f.body, Falsum):
            return []  # ¬⊥ is valid: no constraint
        return [[(False, f.body)]]
    return [[(True, f)]]


def _normalize_clauses(raw: list[list[tuple[bool, Atom]]], start_id: int) -> list[Clause]:
    out: list[Clause] = []
    seen: set[tuple] = set()
    i = start_id
    for lits in raw:
        uniq = list(dict.fromkeys(lits))
        atoms = {a for _, a in uniq}
        if any((True, a) in uniq and (False, a) in uniq for a in atoms):
            continue  # tautology
        key = tuple(sorted(uniq, key=repr))
        if key in seen:
            continue
        seen.add(key)
        out.append(Clause(tuple(uniq), derivation_id=i))
        i += 1
    return out


def formula_signature(f: Formula) -> tuple[dict[str, int], dict[str, int], set[str]]:
    """(predicates, functions, constants) with arities, over one formula."""
    preds: dict[str, int] = {}
    funcs: dict[str, int] = {}
    consts: set[str] = set()

    def walk_term(t: Term) -> None:
        if isinstance(t, Const):
            consts.add(t.name)
        elif isinstance(t, App):
            funcs[t.name] = len(t.args)
            for a in t.args:
                walk_term(a)

    def walk(g: Formula) -> None:
        if isinstance(g, Pred):
            preds[g.name] = len(g.args)
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
    return preds, funcs, consts


def _has_equality(f: Formula) -> bool:
    if isinstance(f, Equal):
        return True
    if isinstance(f, Not):
        return _has_equality(f.body)
    if isinstance(f, (And, Or, Implies, Iff)):
        return _has_equality(f.left) or _has_equality(f.right)
    if isinstance(f, (Forall, Exists)):
        return _has_equality(f.body)
    return False


def equality_axiom_clauses(
    preds: dict[str, int], funcs: dict[str, int], start_id: int = 0
) -> list[Clause]:
    """Reflexivity, symmetry, transitivity, plus congruence per symbol."""
    x, y, z = Var("X"), Var("Y"), Var("Z")
    raw: list[list[tuple[bool, Atom]]] = [
        [(True, Equal(x, x))],
        [(False, Equal(x, y)), (True, Equal(y, x))],
        [(False, Equal(x, y)), (False, Equal(y, z)), (True, Equal(x, z))],
    ]
    for name in sorted(preds):
        n = preds[name]
        if n == 0:
            continue
        xs = tuple(Var(f"X{i}") for i in range(n))
        ys = tuple(Var(f"Y{i}") for i in range(n))
        lits: list[tuple[bool, Atom]] = [(False, Equal(a, b)) for a, b in zip(xs, ys)]
        lits.append((False, Pred(name, xs)))
        lits.append((True, Pred(name, ys)))
        raw.append(lits)
    for name in sorted(funcs):
        n = funcs[name]
        xs = tuple(Var(f"X{i}") for i in range(n))
        ys = tuple(Var(f"Y{i}") for i in range(n))
        lits = [(False, Equal(a, b)) for a, b in zip(xs, ys)]
        lits.append((True, Equal(App(name, xs), App(name, ys))))
        raw.append(lits)
    return _normalize_clauses(raw, start_id)


def clausify(f: Formula) -> list[Clause]:
    """Standard pipeline: iff expansion, NNF, Skolemization, CNF distribution.

    When equality occurs in `f`, the equality theory (reflexivity, symmetry,
    transitivity, congruence for every predicate and function symbol of the
    clausified formula) is appended, so the built-in prover needs no
    paramodulation.
    """
    return clausify_many([f])


def clausify_groups(fs: list[Formula]) -> tuple[list[list[Clause]], list[Clause]]:
    """Clausify several formulas with a shared Skolem generator.

    Returns one clause group per input formula plus the equality axiom
    clauses (empty when no input mentions equality), so callers can tell
    goal-descended clauses apart from premise clauses.
    """
    gen = _SkolemGen()
    groups: list[list[Clause]] = []
    any_eq = False
    next_id = 0
    for f in fs:
        any_eq = any_eq or _has_equality(f)
        nnf = _nnf(_expand_iff(f), True)
        sk = _skolemize(nnf, {}, (), gen, set())
        group = _normalize_clauses(_distribute(sk), next_id)
        next_id += len(group)
        groups.append(group)
    eq_axioms: list[Clause] = []
    if any_eq:
        preds: dict[str, int] = {}
        funcs: dict[str, int] = {}
        for group in groups:
            for cl in group:
                for _, atom in cl.literals:
                    if isinstance(atom, Pred):
                        preds[atom.name] = len(atom.args)
                        terms: list[Term] = list(atom.args)
                    else:
                        terms = [atom.lhs, atom.rhs]
                    while terms:
                        t = terms.pop()
                        if isinstance(t, App):
                            funcs[t.name] = len(t.args)
                            terms.extend(t.args)
        eq_axioms = equality_axiom_clauses(preds, funcs, next_id)
    return groups, eq_axioms


def clausify_many(fs: list[Formula]) -> list[Clause]:
    """Clausify several formulas into one flat clause list."""
    groups, eq_axioms = clausify_groups(fs)
    return [cl for group in groups for cl in group] + eq_axioms


# ---------------------------------------------------------------------------
# Rendering

_UNICODE_OPS = {And: "∧", Or: "∨", Implies: "→", Iff: "↔"}
_PRECEDENCE = {Iff: 1, Implies: 2, Or: 3, And: 4}


def fol_text(f: Formula) -> str:
    """Human-readable rendering used in reports and the web inspector."""

    def render(g: Formula, parent_prec: int) -> str:
        if isinstance(g, Pred):
            return str(g)
        if isinstance(g, Equal):
            return str(g)
        if isinstance(g, Falsum):
            return "⊥"
        if isinstance(g, Not):
            if isinstance(g.body, Equal):
                return f"{g.body.lhs} ≠ {g.body.rhs}"
            return "¬" + render(g.body, 9)
        if isinstance(g, (Forall, Exists)):
            sym = "∀" if isinstance(g, Forall) else "∃"
            inner = f"{sym}{','.join(g.vars)}. {render(g.body, 0)}"
            return f"({inner})" if parent_prec > 0 else inner
        prec = _PRECEDENCE[type(g)]
        if isinstance(g, (Implies, Iff)):  # right-associative
            text = f"{render(g.left, prec + 1)} {_UNICODE_OPS[type(g)]} {render(g.right, prec)}"
        else:  # left-associative chains render flat
            text = f"{render(g.left, prec)} {_UNICODE_OPS[type(g)]} {render(g.right, prec + 1)}"
        return f"({text})" if parent_prec > prec else text

    return render(f, 0)


def iter_subformulas(f: Formula) -> Iterator[Formula]:
    yield f
    if isinstance(f, Not):
        yield from iter_subformulas(f.body)
    elif isinstance(f, (And, Or, Implies, Iff)):
        yield from iter_subformulas(f.left)
        yield from iter_subformulas(f.right)
    elif isinstance(f, (Forall, Exists)):
        yield from iter_subformulas(f.body)
