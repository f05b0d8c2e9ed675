"""Randomized soundness suite and desk-scale completeness checks.

The soundness gate: over 500 seeded random small obligations, whenever the
built-in prover refutes, the finder must find no countermodel at n <= 3, and
whenever the finder disproves, the returned model must falsify the
obligation under the evaluator. The two engines are independent paths, so
agreement is strong evidence both are sound.
"""

from __future__ import annotations

import itertools
import random
import time

import pytest

from elfe.errors import Loc
from elfe.fol import (
    And,
    App,
    Clause,
    Const,
    Equal,
    Exists,
    Forall,
    Formula,
    Implies,
    Not,
    Or,
    Pred,
    Var,
    clausify,
    free_vars,
    or_all,
)
from elfe.models import Model, evaluate, falsifies, find_countermodel
from elfe.obligations import Obligation
from elfe.prover import ProverLimits, prove

VARS = ("x", "y")
CONSTS = ("a", "b", "c")


def _random_term(rng: random.Random, bound: list[str]):
    pool = list(bound) + list(CONSTS)
    name = rng.choice(pool)
    return Var(name) if name in VARS else Const(name)


def _random_formula(rng: random.Random, depth: int, bound: list[str]) -> Formula:
    if depth == 0 or rng.random() < 0.3:
        kind = rng.randrange(3)
        if kind == 0:
            return Pred("p", (_random_term(rng, bound),))
        if kind == 1:
            return Pred("q", (_random_term(rng, bound), _random_term(rng, bound)))
        return Equal(_random_term(rng, bound), _random_term(rng, bound))
    kind = rng.randrange(6)
    if kind == 0:
        return Not(_random_formula(rng, depth - 1, bound))
    if kind in (1, 2):
        ctor = (And, Or, Implies)[rng.randrange(3)]
        return ctor(
            _random_formula(rng, depth - 1, bound),
            _random_formula(rng, depth - 1, bound),
        )
    unused = [v for v in VARS if v not in bound]
    if not unused:
        return _random_formula(rng, depth - 1, bound)
    v = unused[0]
    ctor = Forall if kind in (3, 4) else Exists
    return ctor((v,), _random_formula(rng, depth - 1, bound + [v]))


def _close(f: Formula) -> Formula:
    fv = sorted(free_vars(f))
    return Forall(tuple(fv), f) if fv else f


def _random_obligation(rng: random.Random, idx: int) -> Obligation:
    premises = tuple(
        (f"H{i}", _close(_random_formula(rng, 2, [])))
        for i in range(rng.randrange(3))
    )
    goal = _close(_random_formula(rng, 2, []))
    return Obligation(id=f"R/{idx}/1", premises=premises, goal=goal, origin=Loc(1, 1))


def test_soundness_500_random_obligations():
    rng = random.Random(74123)
    started = time.monotonic()
    refuted = disproved = 0
    for i in range(500):
        ob = _random_obligation(rng, i)
        result = prove(
            [f for _, f in ob.premises],
            ob.goal,
            ProverLimits(max_clauses=1200, max_seconds=0.12),
        )
        if result.refuted:
            refuted += 1
            model = find_countermodel(ob, max_n=3, budget_ms=250)
            assert model is None, (
                f"case {i}: prover refuted but a countermodel exists:\n{model.text()}"
            )
        model = find_countermodel(ob, max_n=2, budget_ms=120)
        if model is not None:
            disproved += 1
            assert falsifies(model, ob), f"case {i}: finder returned a bogus model"
    elapsed = time.monotonic() - started
    # The suite is only meaningful if both outcomes actually occur.
    assert refuted >= 50, f"only {refuted} refutations in the sample"
    assert disproved >= 50, f"only {disproved} disproofs in the sample"
    assert elapsed < 60, f"soundness suite took {elapsed:.1f}s"


# ---------------------------------------------------------------------------
# Clausification preserves satisfiability (brute-force oracle)


def _all_models(n: int, funcs: dict[str, int]):
    """Every interpretation of {p/1, q/2} plus the given function symbols."""
    elements = range(n)
    p_tables = [
        frozenset((e,) for e in combo)
        for r in range(n + 1)
        for combo in itertools.combinations(elements, r)
    ]
    q_cells = list(itertools.product(elements, repeat=2))
    q_tables = [
        frozenset(cell for cell, keep in zip(q_cells, mask) if keep)
        for mask in itertools.product((False, True), repeat=len(q_cells))
    ]
    func_choices = []
    for name in sorted(funcs):
        arity = funcs[name]
        keys = list(itertools.product(elements, repeat=arity))
        tables = [
            dict(zip(keys, values))
            for values in itertools.product(elements, repeat=len(keys))
        ]
        func_choices.append([(name, t) for t in tables])
    for p_t in p_tables:
        for q_t in q_tables:
            for combo in itertools.product(*func_choices) if func_choices else [()]:
                yield Model(
                    size=n,
                    constants={c: 0 for c in CONSTS},
                    predicates={"p": p_t, "q": q_t},
                    pred_arities={"p": 1, "q": 2},
                    functions={name: table for name, table in combo},
                )


def _clause_formula(cl: Clause) -> Formula:
    if not cl.literals:
        return Not(Equal(Var("x"), Var("x")))  # unsatisfiable stand-in
    lits = [atom if pol else Not(atom) for pol, atom in cl.literals]
    f = or_all(lits)
    return _close(f)


def _sat_formula(f: Formula, n: int) -> bool:
    return any(evaluate(f, m) for m in _all_models(n, {}))


def _sat_clauses(clauses: list[Clause], n: int) -> bool:
    funcs: dict[str, int] = {}
    sk_consts: set[str] = set()
    for cl in clauses:
        for _, atom in cl.literals:
            terms = list(atom.args) if isinstance(atom, Pred) else [atom.lhs, atom.rhs]
            while terms:
                t = terms.pop()
                if isinstance(t, App):
                    funcs[t.name] = len(t.args)
                    terms.extend(t.args)
                elif isinstance(t, Const) and t.name not in CONSTS:
                    sk_consts.add(t.name)
    formulas = [_clause_formula(cl) for cl in clauses]
    names = sorted(sk_consts)
    for values in itertools.product(range(n), repeat=len(names)):
        extra = dict(zip(names, values))
        for m in _all_models(n, funcs):
            m.constants.update(extra)
            if all(evaluate(g, m) for g in formulas):
                return True
    return False


def test_clausify_preserves_satisfiability_small_domains():
    """Seeded random closed formulas over p/1, q/2 with <= 2 variables.

    Skolem-free clause sets are compared at n = 1..3; clause sets with
    Skolem functions at n = 1..2 (the brute-force function-table sweep at
    n = 3 is out of test budget). Constants are pinned to element 0, which
    is harmless: the generated formulas are closed.
    """
    rng = random.Random(99331)
    checked = 0
    for i in range(25):
        f = _close(_random_formula(rng, 2, []))
        clauses = clausify(f)
        has_funcs = any(
            isinstance(t, App)
            for cl in clauses
            for _, atom in cl.literals
            for t in (atom.args if isinstance(atom, Pred) else (atom.lhs, atom.rhs))
        )
        max_n = 2 if has_funcs else 3
        for n in range(1, max_n + 1):
            left = _sat_formula(f, n)
            right = _sat_clauses(clauses, n)
            assert left == right, f"case {i} at n={n}: formula sat={left}, clauses sat={right}"
            checked += 1
    assert checked >= 50


# ---------------------------------------------------------------------------
# Desk-scale completeness: ground-provable valid obligations


def _ground_atoms(formulas):
    atoms = set()

    def walk(g):
        if isinstance(g, Pred):
            atoms.add(g)
        elif isinstance(g, Equal):
            atoms.add(g)
        elif isinstance(g, Not):
            walk(g.body)
        elif isinstance(g, (And, Or, Implies)):
            walk(g.left)
            walk(g.right)

    for f in formulas:
        walk(f)
    return sorted(atoms, key=str)


def _ground_instances(f: Formula, consts):
    """Instantiate outer universals over the constants (enumeration oracle)."""
    if isinstance(f, Forall):
        out = []
        for combo in itertools.product(consts, repeat=len(f.vars)):
            from elfe.fol import substitute

            out.extend(
                _ground_instances(
                    substitute(f.body, dict(zip(f.vars, [Const(c) for c in combo]))), consts
                )
            )
        return out
    return [f]


def _ground_valid(premises, goal) -> bool:
    """Truth-table check on the ground instantiation over a, b, c."""
    ground = []
    for f in premises:
        ground.extend(_ground_instances(f, CONSTS))
    goals = _ground_instances(goal, CONSTS)
    if len(goals) != 1:
        ground_goal = goals
    atoms = _ground_atoms(ground + goals)
    eq_atoms = [a for a in atoms if isinstance(a, Equal)]

    def eval_bool(g, env):
        if isinstance(g, (Pred, Equal)):
            return env[g]
        if isinstance(g, Not):
            return not eval_bool(g.body, env)
        if isinstance(g, And):
            return eval_bool(g.left, env) and eval_bool(g.right, env)
        if isinstance(g, Or):
            return eval_bool(g.left, env) or eval_bool(g.right, env)
        if isinstance(g, Implies):
            return (not eval_bool(g.left, env)) or eval_bool(g.right, env)
        raise AssertionError(g)

    for mask in itertools.product((False, True), repeat=len(atoms)):
        env = dict(zip(atoms, mask))
        # Respect equality semantics: identical-sides atoms are true.
        if any(isinstance(a, Equal) and a.lhs == a.rhs and not env[a] for a in eq_atoms):
            continue
        if all(eval_bool(g, env) for g in ground) and not all(
            eval_bool(g, env) for g in goals
        ):
            return False
    return True


CURATED = [
    # (premises, goal) all valid and ground-provable over a, b, c
    (
        [Forall(("x",), Implies(Pred("p", (Var("x"),)), Pred("q", (Var("x"), Var("x")))))],
        Implies(Pred("p", (Const("a"),)), Pred("q", (Const("a"), Const("a")))),
    ),
    (
        [
            Forall(("x",), Implies(Pred("p", (Var("x"),)), Pred("q", (Var("x"), Var("b"))))),
            Pred("p", (Const("a"),)),
        ],
        Pred("q", (Const("a"), Const("b"))),
    ),
    (
        [Or(Pred("p", (Const("a"),)), Pred("p", (Const("b"),)))],
        Or(Pred("p", (Const("b"),)), Pred("p", (Const("a"),))),
    ),
    (
        [
            Forall(("x", "y"), Implies(And(Pred("q", (Var("x"), Var("y"))), Pred("p", (Var("x"),))), Pred("p", (Var("y"),)))),
            Pred("q", (Const("a"), Const("b"))),
            Pred("p", (Const("a"),)),
        ],
        Pred("p", (Const("b"),)),
    ),
    (
        [Equal(Const("a"), Const("b")), Pred("p", (Const("a"),))],
        Pred("p", (Const("b"),)),
    ),
    (
        [],
        Or(Pred("p", (Const("a"),)), Not(Pred("p", (Const("a"),)))),
    ),
    (
        [And(Pred("p", (Const("a"),)), Pred("p", (Const("b"),)))],
        Pred("p", (Const("b"),)),
    ),
]


@pytest.mark.parametrize("idx", range(len(CURATED)))
def test_completeness_on_curated_ground_provable_suite(idx):
    premises, goal = CURATED[idx]
    eq_free = not any(
        isinstance(a, Equal) for a in _ground_atoms(
            [g for f in premises for g in _ground_instances(f, CONSTS)]
            + _ground_instances(goal, CONSTS)
        )
    )
    if eq_free:
        assert _ground_valid(premises, goal), "curated case must be ground-valid"
    result = prove(premises, goal, ProverLimits(max_clauses=20_000, max_seconds=10))
    assert result.refuted, f"curated case {idx} not proved"
