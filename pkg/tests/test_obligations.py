"""Obligation derivation and report assembly."""

from collections import Counter

import pytest

from elfe.desugar import desugar
from elfe.fol import Exists, Not, Or, Pred, Const
from elfe.library import LibraryStore
from elfe.obligations import (
    Obligation,
    Verdict,
    assemble_report,
    derive_obligations,
    strongest_unknown,
)
from elfe.parser import parse_source
from elfe.pipeline import prepare
from elfe.sequence import build_sequence

from conftest import corpus_text


def _obligations(src: str, which: int = 0, completeness: bool = True):
    doc = desugar(parse_source(src), LibraryStore().resolver())
    lemmas = [d for d in doc.decls if d.kind == "lemma"]
    decl = lemmas[which]
    seq = build_sequence(decl.formula, decl.proof, decl.loc)
    ambient = list(doc.ambient) + [
        (d.label, d.kind, d.formula) for d in doc.decls if d.label != decl.label
    ]
    return derive_obligations(seq, doc.ambient, decl.label, completeness)


def test_midpoint_extension_per_line_counts(midpoint_prepared):
    obs = midpoint_prepared.obligations
    per_line = Counter(ob.line for ob in obs)
    assert per_line[5] == 2
    assert per_line[8] == 1
    assert per_line[9] == 2
    assert per_line[10] == 2
    assert per_line[12] == 1
    # The Note block never states its goal, so its discharge is a synthetic
    # obligation on the Note line.
    assert per_line[7] == 1
    assert sum(per_line.values()) == 9


def test_line8_restriction(midpoint_prepared):
    (ob,) = [o for o in midpoint_prepared.obligations if o.line == 8]
    assert ob.restricted
    labels = ob.premise_labels()
    assert labels[0] == "DefMidpoint"
    # Local facts ride along with the named premise: the lemma assumption
    # and the previously derived equidistance.
    assert "S2" in labels and "S4" in labels
    assert len(labels) == 3
    assert ob.goal == Pred("between", (Const("b"), Const("m"), Const("c")))


def test_since_pair_order_and_ids(midpoint_prepared):
    from elfe.fol import And

    line5 = [o for o in midpoint_prepared.obligations if o.line == 5]
    assert [o.id for o in line5] == ["MidpointExtension/5/1", "MidpointExtension/5/2"]
    # The since conjunction is checked first and feeds the main statement.
    assert isinstance(line5[0].goal, And)
    assert line5[1].goal == Pred(
        "equidistant", (Const("a"), Const("m"), Const("m"), Const("d"))
    )
    assert "S5" in line5[1].premise_labels()


def test_unrestricted_premises_are_whole_context(midpoint_prepared):
    (ob,) = [o for o in midpoint_prepared.obligations if o.line == 12]
    labels = ob.premise_labels()
    for ambient_label in ("CongrRefl", "Pasch", "DefMidpoint", "DefParallel"):
        assert ambient_label in labels
    assert labels[-3:] == ("S2", "S4", "S7")


def test_case_completeness_obligation(midpoint_parallel_prepared):
    obs = midpoint_parallel_prepared.obligations
    comp = [o for o in obs if o.completeness]
    assert len(comp) == 1
    hyp = Pred("col", (Const("a"), Const("b"), Const("b'")))
    assert comp[0].goal == Or(hyp, Not(hyp))
    assert comp[0].line == 6


def test_case_completeness_can_be_disabled():
    obs = _obligations(corpus_text("midpoint_parallel.elfe"), completeness=False)
    assert not any(o.completeness for o in obs)


def test_take_obligation_goal_and_restriction(line_extension_prepared):
    obs = line_extension_prepared.obligations
    takes = [o for o in obs if isinstance(o.goal, Exists)]
    assert len(takes) == 1
    t = takes[0]
    assert t.restricted
    assert t.premise_labels()[0] == "Pasch"
    assert t.id == "LineExtension/6/1"


def test_removing_since_decreases_line_count_by_one():
    base = corpus_text("midpoint_extension.elfe")
    without = base.replace(
        "Then a-b-m since a-b-c and b-m-c.", "Then a-b-m."
    )
    obs_base = Counter(o.line for o in prepare(base).obligations)
    obs_without = Counter(o.line for o in prepare(without).obligations)
    assert obs_base[9] - obs_without[9] == 1


def test_premises_subset_of_visible_context(midpoint_prepared):
    from elfe.sequence import visible_context

    unit = midpoint_prepared.units[0]
    ambient = list(midpoint_prepared.document.ambient)
    idx = unit.sequence.index()
    by_goal_line = {(o.line, o.goal): o for o in unit.obligations}
    for stmt in unit.sequence.walk():
        if stmt.kind.value != "bycontext":
            continue
        ob = by_goal_line[(stmt.origin.line, stmt.goal)]
        visible = visible_context(stmt, unit.sequence, ambient)
        for _, f in ob.premises:
            assert f in visible


# ---------------------------------------------------------------------------
# Report assembly


def _ob(id_: str, line: int) -> Obligation:
    from elfe.errors import Loc

    return Obligation(id=id_, premises=(), goal=Pred("p", ()), origin=Loc(line, 1))


def test_report_all_proved():
    results = [(_ob("L/1/1", 1), Verdict.proved("builtin-resolution", 5))]
    report = assemble_report(results, total_lines=2)
    assert report.status == "verified"
    assert report.lines == [(1, "verified"), (2, "verified")]
    assert report.backend_counts == {"builtin-resolution": 1}


def test_report_failed_line_carries_countermodel():
    from elfe.models import Model

    m = Model(size=2)
    results = [
        (_ob("L/1/1", 1), Verdict.proved("builtin-resolution", 5)),
        (_ob("L/2/1", 2), Verdict.disproved(m, "builtin-modelfinder")),
    ]
    report = assemble_report(results, total_lines=2)
    assert report.status == "failed"
    assert report.lines[1] == (2, "failed")
    failed = [r for r in report.results if r.verdict.status == "disproved"]
    assert failed[0].verdict.model is m


def test_report_unknown_is_distinct_from_failed():
    results = [(_ob("L/1/1", 1), Verdict.unknown("timeout"))]
    report = assemble_report(results, total_lines=1)
    assert report.status == "unknown"
    assert report.lines == [(1, "unknown")]


def test_strongest_unknown_ranking():
    vs = [Verdict.unknown("error"), Verdict.unknown("timeout"), Verdict.unknown("saturated")]
    assert strongest_unknown(vs).reason == "saturated"
    assert strongest_unknown(vs[:2]).reason == "timeout"
