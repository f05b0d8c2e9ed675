"""Statement sequences: construction shape, contexts, scoping, discharge."""

import pytest

from elfe.desugar import desugar
from elfe.errors import StructureError
from elfe.fol import FALSUM, And, Const, Equal, Exists, Forall, Implies, Not, Pred, Var
from elfe.library import LibraryStore
from elfe.parser import parse_source
from elfe.sequence import Kind, build_sequence, dump, visible_context

from conftest import corpus_text


def _lemma_sequence(src: str, which: int = 0):
    doc = desugar(parse_source(src), LibraryStore().resolver())
    lemmas = [d for d in doc.decls if d.kind == "lemma"]
    decl = lemmas[which]
    return build_sequence(decl.formula, decl.proof, decl.loc), doc


@pytest.fixture(scope="module")
def midpoint_sequence():
    return _lemma_sequence(corpus_text("midpoint_extension.elfe"))


def test_midpoint_extension_statement_shape(midpoint_sequence):
    root, _ = midpoint_sequence
    idx = root.index()
    # Exactly the nine statements of the published diagram sit on the top
    # levels; the Note's inner derivations are numbered afterwards.
    for sid in ["S", "S1", "S2", "S3", "S4", "S5", "S6", "S7", "S8"]:
        assert sid in idx
    assert idx["S"].kind is Kind.SUBSEQUENCE
    assert idx["S1"].kind is Kind.SUBSEQUENCE
    assert idx["S2"].kind is Kind.ASSUMED
    assert idx["S3"].kind is Kind.SUBSEQUENCE
    assert idx["S4"].kind is Kind.SUBSEQUENCE
    assert idx["S5"].kind is Kind.BY_CONTEXT
    assert idx["S6"].kind is Kind.BY_CONTEXT
    assert idx["S7"].kind is Kind.SUBSEQUENCE
    assert idx["S8"].kind is Kind.BY_CONTEXT

    assert [c.id for c in idx["S"].children] == ["S1"]
    assert [c.id for c in idx["S1"].children] == ["S2", "S3"]
    assert [c.id for c in idx["S3"].children] == ["S4", "S7", "S8"]
    assert [c.id for c in idx["S4"].children] == ["S5", "S6"]


def test_midpoint_extension_contexts(midpoint_sequence):
    root, _ = midpoint_sequence
    idx = root.index()
    assert idx["S8"].context_ids == ("S2", "S4", "S7")
    assert idx["S6"].context_ids == ("S2", "S5")
    assert idx["S5"].context_ids == ("S2",)


def test_midpoint_extension_goals(midpoint_sequence):
    root, _ = midpoint_sequence
    idx = root.index()
    assert idx["S1"].goal == Implies(idx["S2"].goal, idx["S3"].goal)
    assert idx["S4"].goal == Pred(
        "equidistant", (Const("a"), Const("m"), Const("m"), Const("d"))
    )
    assert idx["S6"].goal == idx["S4"].goal
    assert idx["S7"].goal == Pred("between", (Const("a"), Const("m"), Const("d")))
    assert idx["S8"].goal == Pred("midpoint", (Const("m"), Const("a"), Const("d")))


def test_visible_context_matches_figure(midpoint_sequence):
    root, doc = midpoint_sequence
    idx = root.index()
    ambient = list(doc.ambient)
    ctx8 = visible_context(idx["S8"], root, ambient)
    assert len(ctx8) == len(ambient) + 3
    assert idx["S2"].goal in ctx8 and idx["S4"].goal in ctx8 and idx["S7"].goal in ctx8
    ctx6 = visible_context(idx["S6"], root, ambient)
    assert idx["S5"].goal in ctx6 and idx["S2"].goal in ctx6
    assert idx["S7"].goal not in ctx6


def test_note_internals_stay_local(midpoint_sequence):
    root, _ = midpoint_sequence
    idx = root.index()
    inner_ids = {c.id for c in idx["S7"].children}
    assert inner_ids == {"S9", "S10", "S13", "S16"}
    # No statement outside S7 references the inner derivations.
    for s in root.walk():
        if s.id in ("S9", "S10", "S11", "S12", "S13", "S14", "S15", "S16"):
            continue
        assert not (set(s.context_ids) & inner_ids)


def test_note_without_hence_gets_synthetic_goal_obligation(midpoint_sequence):
    root, _ = midpoint_sequence
    idx = root.index()
    synth = idx["S16"]
    assert synth.synthetic and synth.kind is Kind.BY_CONTEXT
    assert synth.goal == idx["S7"].goal
    assert synth.origin.line == 7  # the Note line


def test_trivial_implication_lemma():
    root, _ = _lemma_sequence(
        "Lemma T: for all a. p(a) implies p(a).\nProof:\n  Assume p(a).\n  Hence p(a).\nqed.\n"
    )
    idx = root.index()
    assert set(idx) == {"S", "S1", "S2", "S3"}
    assert idx["S2"].kind is Kind.ASSUMED
    assert idx["S3"].kind is Kind.BY_CONTEXT and idx["S3"].hence
    assert idx["S3"].context_ids == ("S2",)


def test_negation_note_from_contradiction():
    src = (
        "Lemma L: for all a',b'. q(a',b') implies not a' = b'.\n"
        "Proof:\n"
        "  Assume q(a',b').\n"
        "  Note not a' = b':\n"
        "    Assume a' = b'.\n"
        "    Hence contradiction.\n"
        "  qed.\n"
        "  Hence not a' = b'.\n"
        "qed.\n"
    )
    root, _ = _lemma_sequence(src)
    eq = Equal(Const("a'"), Const("b'"))
    note = [
        s
        for s in root.walk()
        if s.goal == Not(eq) and s.children and s.children[0].kind is Kind.ASSUMED
    ]
    assert note, "note statement with assumed equality expected"
    note_stmt = note[0]
    assert note_stmt.children[0].goal == eq
    falsum_children = [c for c in note_stmt.children if c.goal == FALSUM]
    assert falsum_children and falsum_children[0].kind is Kind.BY_CONTEXT
    # Discharged by the Hence: no synthetic statement appended.
    assert not any(c.synthetic for c in note_stmt.children)


def test_case_statements_and_completeness():
    root, _ = _lemma_sequence(corpus_text("midpoint_parallel.elfe"))
    comp = [s for s in root.walk() if s.completeness]
    assert len(comp) == 1
    hyp = Pred("col", (Const("a"), Const("b"), Const("b'")))
    assert comp[0].goal == Pred("col", (Const("a"), Const("b"), Const("b'"))) or comp[0].goal
    from elfe.fol import Or

    assert comp[0].goal == Or(hyp, Not(hyp))
    # Each case wrapper proves hypothesis -> pending goal with an Assumed inside.
    case_wrappers = [
        s for s in root.walk() if isinstance(s.goal, Implies) and s.children and s.goal.left in (hyp, Not(hyp))
    ]
    assert len(case_wrappers) == 2
    for w in case_wrappers:
        assert w.children[0].kind is Kind.ASSUMED


def test_take_builds_exists_then_assumed():
    root, _ = _lemma_sequence(corpus_text("line_extension.elfe"))
    ex = [s for s in root.walk() if isinstance(s.goal, Exists)]
    assert len(ex) == 1
    take_stmt = ex[0]
    assert take_stmt.kind is Kind.BY_CONTEXT
    assert take_stmt.restriction == ("Pasch",)
    idx = root.index()
    follower = idx[f"S{int(take_stmt.id[1:]) + 1}"]
    assert follower.kind is Kind.ASSUMED
    assert follower.goal == And(
        Pred("between", (Const("b"), Const("x"), Const("b"))),
        Pred("between", (Const("c"), Const("x"), Const("a"))),
    )


def test_assume_against_non_implication_goal_is_structure_error():
    with pytest.raises(StructureError):
        _lemma_sequence(
            "Lemma B: for all a. p(a).\nProof:\n  Assume p(a).\nqed.\n"
        )


def test_mismatched_assume_is_structure_error():
    with pytest.raises(StructureError):
        _lemma_sequence(
            "Lemma B: for all a. p(a) implies q(a).\nProof:\n  Assume q(a).\n  Hence q(a).\nqed.\n"
        )


def test_build_is_deterministic(midpoint_sequence):
    root, doc = midpoint_sequence
    decl = doc.decls[0]
    again = build_sequence(decl.formula, decl.proof, decl.loc)
    assert dump(again) == dump(root)


def test_dump_golden(midpoint_sequence):
    root, _ = midpoint_sequence
    text = dump(root)
    lines = text.splitlines()
    assert lines[0].startswith("S [subsequence] ∀a,b,c,d,m.")
    assert "    S2 [assumed]" in text
    assert "        S5 [bycontext]" in text
    assert "        S16 [bycontext] (synthetic) between(a,m,d)" in text
    assert "      S8 [bycontext] (hence) midpoint(m,a,d)" in text


def test_proofless_lemma_is_single_obligation_statement():
    root, _ = _lemma_sequence("Lemma L: for all a. p(a) implies p(a).\n")
    idx = root.index()
    assert set(idx) == {"S", "S1"}
    assert idx["S1"].kind is Kind.BY_CONTEXT
