"""Built-in saturation prover: given-clause binary resolution with factoring.

Equality is handled by axiom instrumentation during clausification (see
fol.clausify_many), not by paramodulation. Clause selection is by
symbol-count weight with FIFO tie-break, which keeps runs deterministic.

Internally clauses are compiled to a light tuple form for speed:
variables are ints, constants are strings, applications are tuples
(name, arg, ...). Literals are (sign, atom) where an atom is
(predicate-name, arg, ...) and equality uses the reserved name "=".
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass
from threading import Event

from .fol import App, Clause, Const, Equal, Formula, Not, Pred, Term, Var, clausify_groups

EQ = "="

CTerm = object  # int | str | tuple
CAtom = tuple
CLit = tuple  # (bool, CAtom)


@dataclass(frozen=True)
class ProverLimits:
    max_clauses: int = 100_000
    max_seconds: float = 5.0
    max_clause_weight: int = 60


@dataclass(frozen=True)
class ProofResult:
    status: str  # refuted | saturated | resource-out
    derivation_length: int = 0
    limit: str = ""
    generated: int = 0

    @property
    def refuted(self) -> bool:
        return self.status == "refuted"


# ---------------------------------------------------------------------------
# Compilation between fol.Clause and the tuple form


def _compile_term(t: Term, vmap: dict[str, int]) -> CTerm:
    if isinstance(t, Var):
        if t.name not in vmap:
            vmap[t.name] = len(vmap)
        return vmap[t.name]
    if isinstance(t, Const):
        return t.name
    assert isinstance(t, App)
    return (t.name,) + tuple(_compile_term(a, vmap) for a in t.args)


def compile_clause(cl: Clause) -> tuple[CLit, ...]:
    vmap: dict[str, int] = {}
    lits: list[CLit] = []
    for pol, atom in cl.literals:
        if isinstance(atom, Pred):
            catom = (atom.name,) + tuple(_compile_term(a, vmap) for a in atom.args)
        else:
            catom = (EQ, _compile_term(atom.lhs, vmap), _compile_term(atom.rhs, vmap))
        lits.append((pol, catom))
    return tuple(lits)


def _decompile_term(t: CTerm) -> Term:
    if isinstance(t, int):
        return Var(f"X{t}")
    if isinstance(t, str):
        return Const(t)
    assert isinstance(t, tuple)
    return App(t[0], tuple(_decompile_term(a) for a in t[1:]))


def decompile_clause(lits: tuple[CLit, ...], derivation_id: int = 0) -> Clause:
    out = []
    for pol, atom in lits:
        if atom[0] == EQ and len(atom) == 3:
            out.append((pol, Equal(_decompile_term(atom[1]), _decompile_term(atom[2]))))
        else:
            out.append((pol, Pred(atom[0], tuple(_decompile_term(a) for a in atom[1:]))))
    return Clause(tuple(out), derivation_id)


# ---------------------------------------------------------------------------
# Terms, substitutions, unification


def walk(t: CTerm, subst: dict[int, CTerm]) -> CTerm:
    while isinstance(t, int) and t in subst:
        t = subst[t]
    return t


def apply_subst(t: CTerm, subst: dict[int, CTerm]) -> CTerm:
    t = walk(t, subst)
    if isinstance(t, tuple):
        return (t[0],) + tuple(apply_subst(a, subst) for a in t[1:])
    return t


def occurs(v: int, t: CTerm, subst: dict[int, CTerm]) -> bool:
    t = walk(t, subst)
    if t == v:
        return True
    if isinstance(t, tuple):
        return any(occurs(v, a, subst) for a in t[1:])
    return False


def unify(t1: CTerm, t2: CTerm, subst: dict[int, CTerm] | None) -> dict[int, CTerm] | None:
    """Most general unifier with occurs-check; returns an extended subst or None."""
    if subst is None:
        return None
    t1, t2 = walk(t1, subst), walk(t2, subst)
    if t1 == t2:
        return subst
    if isinstance(t1, int):
        if occurs(t1, t2, subst):
            return None
        out = dict(subst)
        out[t1] = t2
        return out
    if isinstance(t2, int):
        if occurs(t2, t1, subst):
            return None
        out = dict(subst)
        out[t2] = t1
        return out
    if isinstance(t1, tuple) and isinstance(t2, tuple) and t1[0] == t2[0] and len(t1) == len(t2):
        for a, b in zip(t1[1:], t2[1:]):
            subst = unify(a, b, subst)
            if subst is None:
                return None
        return subst
    return None


def unify_atoms(a1: CAtom, a2: CAtom, subst: dict[int, CTerm] | None = None) -> dict[int, CTerm] | None:
    if a1[0] != a2[0] or len(a1) != len(a2):
        return None
    s: dict[int, CTerm] | None = {} if subst is None else subst
    for t1, t2 in zip(a1[1:], a2[1:]):
        s = unify(t1, t2, s)
        if s is None:
            return None
    return s


def term_weight(t: CTerm) -> int:
    if isinstance(t, tuple):
        return 1 + sum(term_weight(a) for a in t[1:])
    return 1


def clause_weight(lits: tuple[CLit, ...]) -> int:
    return sum(1 + sum(term_weight(a) for a in atom[1:]) for _, atom in lits)


def _rename_term(t: CTerm, offset: int) -> CTerm:
    if isinstance(t, int):
        return t + offset
    if isinstance(t, tuple):
        return (t[0],) + tuple(_rename_term(a, offset) for a in t[1:])
    return t


def rename_lits(lits: tuple[CLit, ...], offset: int) -> tuple[CLit, ...]:
    if offset == 0:
        return lits
    return tuple((pol, (a[0],) + tuple(_rename_term(x, offset) for x in a[1:])) for pol, a in lits)


def max_var(lits: tuple[CLit, ...]) -> int:
    best = -1

    def scan(t: CTerm) -> None:
        nonlocal best
        if isinstance(t, int):
            best = max(best, t)
        elif isinstance(t, tuple):
            for a in t[1:]:
                scan(a)

    for _, atom in lits:
        for a in atom[1:]:
            scan(a)
    return best


def _var_blind_key(t: CTerm):
    if isinstance(t, int):
        return ("?",)
    if isinstance(t, tuple):
        return ("f", t[0]) + tuple(_var_blind_key(a) for a in t[1:])
    return ("c", t)


def canonicalize(lits: tuple[CLit, ...]) -> tuple[CLit, ...]:
    """Sort literals by a variable-blind key, then number variables by first
    occurrence, so alpha-equivalent clauses usually share one form."""
    ordered = sorted(lits, key=lambda l: (not l[0], l[1][0], _var_blind_key(l[1])))
    mapping: dict[int, int] = {}

    def ren(t: CTerm) -> CTerm:
        if isinstance(t, int):
            if t not in mapping:
                mapping[t] = len(mapping)
            return mapping[t]
        if isinstance(t, tuple):
            return (t[0],) + tuple(ren(a) for a in t[1:])
        return t

    return tuple((pol, (a[0],) + tuple(ren(x) for x in a[1:])) for pol, a in ordered)


def _normalize(lits: list[CLit]) -> tuple[CLit, ...] | None:
    """Remove duplicate literals; None for tautologies."""
    uniq = list(dict.fromkeys(lits))
    atoms_pos = {a for pol, a in uniq if pol}
    if any(not pol and a in atoms_pos for pol, a in uniq):
        return None
    return tuple(uniq)


# ---------------------------------------------------------------------------
# Inference rules


def resolvents(c1: tuple[CLit, ...], c2: tuple[CLit, ...]) -> list[tuple[CLit, ...]]:
    """All binary resolvents of two variable-disjoint clauses."""
    out: list[tuple[CLit, ...]] = []
    for i, (s1, a1) in enumerate(c1):
        for j, (s2, a2) in enumerate(c2):
            if s1 == s2:
                continue
            subst = unify_atoms(a1, a2)
            if subst is None:
                continue
            rest = [
                (pol, (a[0],) + tuple(apply_subst(x, subst) for x in a[1:]))
                for k, (pol, a) in enumerate(c1)
                if k != i
            ] + [
                (pol, (a[0],) + tuple(apply_subst(x, subst) for x in a[1:]))
                for k, (pol, a) in enumerate(c2)
                if k != j
            ]
            norm = _normalize(rest)
            if norm is not None:
                out.append(norm)
    return out


def factors(c: tuple[CLit, ...]) -> list[tuple[CLit, ...]]:
    out: list[tuple[CLit, ...]] = []
    for i in range(len(c)):
        for j in range(i + 1, len(c)):
            if c[i][0] != c[j][0]:
                continue
            subst = unify_atoms(c[i][1], c[j][1])
            if subst is None:
                continue
            lits = [
                (pol, (a[0],) + tuple(apply_subst(x, subst) for x in a[1:]))
                for k, (pol, a) in enumerate(c)
                if k != j
            ]
            norm = _normalize(lits)
            if norm is not None:
                out.append(norm)
    return out


def resolve(c1: Clause, c2: Clause) -> list[Clause]:
    """Binary resolvents of two fol-level clauses.

    Precondition: the clauses are variable-disjoint (rename apart first);
    shared names are treated as the same variable, which is how the
    occurs-check example {+p(f(x))} vs {~p(x)} fails without renaming.
    """
    vmap: dict[str, int] = {}
    l1 = _compile_shared(c1, vmap)
    l2 = _compile_shared(c2, vmap)
    return [decompile_clause(r) for r in resolvents(l1, l2)]


def rename_apart(c1: Clause, c2: Clause) -> tuple[Clause, Clause]:
    """Rename c2's variables away from c1's."""
    l1 = compile_clause(c1)
    l2 = compile_clause(c2)
    l2 = rename_lits(l2, max_var(l1) + 1)
    return decompile_clause(l1, c1.derivation_id), decompile_clause(l2, c2.derivation_id)


def _compile_shared(cl: Clause, vmap: dict[str, int]) -> tuple[CLit, ...]:
    lits: list[CLit] = []
    for pol, atom in cl.literals:
        if isinstance(atom, Pred):
            catom = (atom.name,) + tuple(_compile_term(a, vmap) for a in atom.args)
        else:
            catom = (EQ, _compile_term(atom.lhs, vmap), _compile_term(atom.rhs, vmap))
        lits.append((pol, catom))
    return tuple(lits)


# ---------------------------------------------------------------------------
# Subsumption


def subsumes(c: tuple[CLit, ...], d: tuple[CLit, ...]) -> bool:
    """True if c theta-subsumes d (some instance of c is a subset of d)."""
    if len(c) > len(d) or clause_weight(c) > clause_weight(d):
        return False
    # Pattern variables become negative ints so they never collide with d's.
    cneg = rename_lits(c, -(max_var(c) + 1) * 2 - 2) if max_var(c) >= 0 else c

    def match_term(p: CTerm, t: CTerm, subst: dict[int, CTerm]) -> dict[int, CTerm] | None:
        if isinstance(p, int) and p < 0:
            bound = subst.get(p)
            if bound is None:
                out = dict(subst)
                out[p] = t
                return out
            return subst if bound == t else None
        if p == t:
            return subst
        if isinstance(p, tuple) and isinstance(t, tuple) and p[0] == t[0] and len(p) == len(t):
            for a, b in zip(p[1:], t[1:]):
                got = match_term(a, b, subst)
                if got is None:
                    return None
                subst = got
            return subst
        return None

    def match_atom(p: CAtom, t: CAtom, subst: dict[int, CTerm]) -> dict[int, CTerm] | None:
        if p[0] != t[0] or len(p) != len(t):
            return None
        for a, b in zip(p[1:], t[1:]):
            got = match_term(a, b, subst)
            if got is None:
                return None
            subst = got
        return subst

    def backtrack(i: int, subst: dict[int, CTerm]) -> bool:
        if i == len(cneg):
            return True
        pol, patom = cneg[i]
        for dpol, datom in d:
            if dpol != pol:
                continue
            got = match_atom(patom, datom, subst)
            if got is not None and backtrack(i + 1, got):
                return True
        return False

    return backtrack(0, {})


def _rename_negative(t: CTerm, base: int) -> CTerm:
    if isinstance(t, int):
        return -(t + 1)
    if isinstance(t, tuple):
        return (t[0],) + tuple(_rename_negative(a, base) for a in t[1:])
    return t


# ---------------------------------------------------------------------------
# Given-clause loop


def _saturate(
    sos_init: list[tuple[CLit, ...]],
    usable_init: list[tuple[CLit, ...]],
    limits: ProverLimits,
    deadline: float,
    cancel: Event | None,
    generated_so_far: int,
) -> ProofResult:
    """One given-clause saturation run over compiled clauses.

    Given clauses come from the set of support (lightest first, FIFO
    tie-break); usable clauses only ever act as partners, which is the
    Otter set-of-support restriction.
    """
    seq = 0
    passive: list[tuple[int, int, tuple[CLit, ...]]] = []
    seen: set[tuple[CLit, ...]] = set()
    parents: dict[tuple[CLit, ...], tuple] = {}
    generated = generated_so_far
    discarded_by_weight = False

    def push(lits: tuple[CLit, ...], parent_keys: tuple = ()) -> tuple[CLit, ...] | None:
        nonlocal seq, generated, discarded_by_weight
        canon = canonicalize(lits)
        if canon in seen:
            return None
        seen.add(canon)
        generated += 1
        if parent_keys:
            parents[canon] = parent_keys
        if not canon:
            return canon  # empty clause
        if clause_weight(canon) > limits.max_clause_weight:
            discarded_by_weight = True
            return None
        heapq.heappush(passive, (clause_weight(canon), seq, canon))
        seq += 1
        return None

    def derivation_length(empty_key: tuple[CLit, ...]) -> int:
        seen_keys: set = set()
        stack = [empty_key]
        steps = 0
        while stack:
            k = stack.pop()
            if k in seen_keys:
                continue
            seen_keys.add(k)
            if k in parents:
                steps += 1
                stack.extend(parents[k])
        return steps

    active: list[tuple[CLit, ...]] = []
    alive: list[bool] = []
    index: dict[tuple[bool, str, int], list[int]] = {}

    def add_active(lits: tuple[CLit, ...]) -> None:
        pos = len(active)
        active.append(lits)
        alive.append(True)
        for pol, atom in lits:
            index.setdefault((pol, atom[0], len(atom)), []).append(pos)

    usable_seen: set[tuple[CLit, ...]] = set()
    for lits in usable_init:
        if not lits:
            return ProofResult("refuted", 0, generated=generated)
        if lits in usable_seen:
            continue
        usable_seen.add(lits)
        add_active(lits)

    for lits in sos_init:
        empty = push(lits)
        if empty is not None:
            return ProofResult("refuted", derivation_length(empty), generated=generated)

    check_tick = 0
    while passive:
        check_tick += 1
        if check_tick % 32 == 1:
            if cancel is not None and cancel.is_set():
                return ProofResult("resource-out", limit="cancelled", generated=generated)
            if time.monotonic() > deadline:
                return ProofResult("resource-out", limit="time", generated=generated)
        if generated > limits.max_clauses:
            return ProofResult("resource-out", limit="clauses", generated=generated)

        _, _, given = heapq.heappop(passive)
        if any(alive[i] and subsumes(active[i], given) for i in range(len(active))):
            continue
        for i in range(len(active)):
            if alive[i] and subsumes(given, active[i]):
                alive[i] = False

        given_mv = max_var(given)
        new: list[tuple[tuple[CLit, ...], tuple]] = []
        for f in factors(given):
            new.append((f, (given,)))
        # Self-resolution needs a renamed copy.
        self_copy = rename_lits(given, given_mv + 1)
        for r in resolvents(given, self_copy):
            new.append((r, (given,)))
        partner_positions: set[int] = set()
        for pol, atom in given:
            partner_positions.update(index.get((not pol, atom[0], len(atom)), []))
        for pos in sorted(partner_positions):
            if not alive[pos]:
                continue
            partner = active[pos]
            renamed = rename_lits(partner, given_mv + 1)
            for r in resolvents(given, renamed):
                new.append((r, (given, partner)))

        for lits, par in new:
            empty = push(lits, par)
            if empty is not None:
                return ProofResult("refuted", derivation_length(empty), generated=generated)
        add_active(given)

    if discarded_by_weight:
        return ProofResult("resource-out", limit="weight", generated=generated)
    return ProofResult("saturated", generated=generated)


def prove(
    premises: list[Formula],
    goal: Formula,
    limits: ProverLimits = ProverLimits(),
    cancel: Event | None = None,
) -> ProofResult:
    """Refute premises + not(goal) by saturation.

    Two phases. First an Otter-style set-of-support run: given clauses are
    drawn (lightest first, FIFO tie-break) from the clauses descended from
    the negated goal and resolve against premise clauses and earlier given
    clauses. That restriction is complete only when the premises alone are
    satisfiable, which proofs by contradiction routinely violate, so if the
    first phase saturates (and whenever the negated goal contributes no
    clauses, as with a `contradiction` goal) an unrestricted run with every
    clause in the set of support decides the obligation.

    Returns Refuted when the empty clause is derived, Saturated when the
    unrestricted run exhausts the passive set without weight-capped
    discards, and ResourceOut otherwise (clause count, wall clock, weight
    discards, cancellation).
    """
    groups, eq_axioms = clausify_groups(list(premises) + [Not(goal)])
    goal_group = groups[-1]
    premise_group = [cl for g in groups[:-1] for cl in g] + eq_axioms

    def compile_group(group: list[Clause]) -> list[tuple[CLit, ...]]:
        out = []
        for cl in group:
            norm = _normalize(list(compile_clause(cl)))
            if norm is not None:
                out.append(canonicalize(norm))
        return out

    goal_clauses = compile_group(goal_group)
    premise_clauses = compile_group(premise_group)
    deadline = time.monotonic() + limits.max_seconds

    generated = 0
    if goal_clauses:
        result = _saturate(goal_clauses, premise_clauses, limits, deadline, cancel, 0)
        if result.status != "saturated":
            return result
        generated = result.generated
    return _saturate(
        goal_clauses + premise_clauses, [], limits, deadline, cancel, generated
    )
