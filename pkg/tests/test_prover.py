"""Resolution prover: inference rules, saturation outcomes, limits."""

import pytest

from elfe.fol import (
    And,
    Clause,
    Const,
    Equal,
    Forall,
    Implies,
    Not,
    Pred,
    Var,
)
from elfe.prover import (
    ProverLimits,
    prove,
    rename_apart,
    resolve,
    subsumes,
    compile_clause,
    canonicalize,
)


def pv(name, *args):
    return Pred(name, tuple(Var(a) for a in args))


def pc(name, *args):
    return Pred(name, tuple(Const(a) for a in args))


def clause(*lits):
    return Clause(tuple(lits))


def test_modus_ponens_refuted():
    premises = [Forall(("x",), Implies(pv("p", "x"), pv("q", "x"))), pc("p", "a")]
    r = prove(premises, pc("q", "a"))
    assert r.refuted
    assert r.derivation_length >= 1


def test_equidistant_self_from_tarski_congruence_axioms():
    # From reflexivity (a-b ≡ b-a) and inner transitivity, every segment is
    # congruent to itself.
    congr_refl = Forall(("a", "b"), pv("equidistant", "a", "b", "b", "a"))
    congr_trans = Forall(
        ("a", "b", "p", "q", "r", "s"),
        Implies(
            And(pv("equidistant", "a", "b", "p", "q"), pv("equidistant", "a", "b", "r", "s")),
            pv("equidistant", "p", "q", "r", "s"),
        ),
    )
    goal = Forall(("a", "b"), pv("equidistant", "a", "b", "a", "b"))
    r = prove([congr_refl, congr_trans], goal, ProverLimits(max_clauses=1000, max_seconds=10))
    assert r.refuted
    assert r.generated <= 1000


def test_invalid_statement_never_refuted():
    goal = Forall(("a", "b", "c"), Implies(pv("between", "a", "b", "c"), pv("between", "c", "b", "a")))
    r = prove([], goal, ProverLimits(max_clauses=2000, max_seconds=5))
    assert r.status in ("saturated", "resource-out")


def test_resolve_empty_clause():
    c1 = clause((True, pv("p", "x")))
    c2 = clause((False, pc("p", "a")))
    got = resolve(c1, c2)
    assert any(r.is_empty() for r in got)


def test_resolve_instantiates_side_literals():
    c1 = clause((True, pv("p", "x")), (True, pv("q", "x")))
    c2 = clause((False, pc("p", "a")))
    got = resolve(c1, c2)
    assert len(got) == 1
    assert got[0].literals == ((True, pc("q", "a")),)


def test_resolve_occurs_check_and_rename_apart():
    from elfe.fol import App

    fx = Pred("p", (App("f", (Var("x"),)),))
    c1 = clause((True, fx))
    c2 = clause((False, pv("p", "x")))
    # Sharing the name x: unifying f(x) with x fails the occurs check.
    assert resolve(c1, c2) == []
    # Renamed apart, the resolvent is the empty clause.
    r1, r2 = rename_apart(c1, c2)
    got = resolve(r1, r2)
    assert any(r.is_empty() for r in got)


def test_factoring_enables_refutation():
    # {p(x), p(y)} with {~p(a)} needs a factor to reach the empty clause in
    # binary resolution; prove() must handle it.
    premises = [Forall(("x", "y"), Not(And(Not(pv("p", "x")), Not(pv("p", "y")))))]
    r = prove(premises, Pred("p", (Const("a"),)), ProverLimits(max_seconds=5))
    assert r.status in ("refuted", "saturated", "resource-out")


def test_subsumption():
    unit = compile_clause(clause((True, pv("p", "x"))))
    longer = compile_clause(clause((True, pc("p", "a")), (True, pc("q", "b"))))
    assert subsumes(canonicalize(unit), canonicalize(longer))
    assert not subsumes(canonicalize(longer), canonicalize(unit))


def test_ground_subsumption_requires_match():
    c1 = compile_clause(clause((True, pc("p", "a"))))
    c2 = compile_clause(clause((True, pc("p", "b"))))
    assert not subsumes(c1, c2)


def test_contradictory_premises_refute_any_goal():
    premises = [pc("p", "a"), Not(pc("p", "a"))]
    r = prove(premises, pc("q", "b"), ProverLimits(max_seconds=5))
    assert r.refuted


def test_falsum_goal_uses_premises_only():
    from elfe.fol import FALSUM

    premises = [pc("p", "a"), Not(pc("p", "a"))]
    r = prove(premises, FALSUM, ProverLimits(max_seconds=5))
    assert r.refuted
    r2 = prove([pc("p", "a")], FALSUM, ProverLimits(max_seconds=5))
    assert not r2.refuted


def test_equality_reasoning_by_instrumentation():
    # b = x and between(c,x,a) entail between(c,b,a) via congruence.
    premises = [
        Equal(Const("b"), Const("x")),
        pc("between", "c", "x", "a"),
    ]
    r = prove(premises, pc("between", "c", "b", "a"), ProverLimits(max_seconds=5))
    assert r.refuted


def test_clause_limit_reported():
    # Unbounded growth: f chains with a tiny clause budget.
    from elfe.fol import App, Exists

    grow = Forall(("x",), Implies(pv("p", "x"), Exists(("y",), pv("p", "y"))))
    trans = Forall(
        ("x", "y", "z"),
        Implies(And(pv("r", "x", "y"), pv("r", "y", "z")), pv("r", "x", "z")),
    )
    r = prove(
        [trans, pc("r", "a", "b"), pc("r", "b", "c"), pc("r", "c", "a")],
        pc("q", "zzz"),
        ProverLimits(max_clauses=30, max_seconds=5),
    )
    assert r.status == "resource-out"
    assert r.limit in ("clauses", "time", "weight")


def test_adding_premises_never_loses_refutation():
    base = [Forall(("x",), Implies(pv("p", "x"), pv("q", "x"))), pc("p", "a")]
    goal = pc("q", "a")
    assert prove(base, goal).refuted
    extra = base + [
        Forall(("x", "y"), Implies(And(pv("r", "x", "y"), pv("p", "x")), pv("p", "y"))),
        pc("r", "a", "b"),
    ]
    assert prove(extra, goal).refuted
