"""Statement sequences: the intermediate proof structure behind obligations.

A lemma compiles to a tree of statements, each with a goal, a proof kind and
context edges to the earlier statements whose goals it may use:

  * the root S holds the quantified lemma; its child S1 holds the same goal
    opened over fixed constants (sound by universal generalization);
  * when S1's goal is an implication and the proof starts with the matching
    Assume, the antecedent becomes an Assumed statement feeding a consequent
    statement that carries the remaining steps;
  * `Then G since F` becomes a wrapper statement over a ByContext pair: the
    `since` statement is checked first and only it appears in the context of
    the goal statement; only the wrapper's goal flows outward;
  * Note blocks keep their inner derivations local: only the Note goal is
    visible afterwards;
  * Case blocks contribute one implication statement per case (hypothesis
    Assumed inside) plus a case-completeness statement;
  * `Take vars such that B` contributes an existential ByContext statement
    followed by an Assumed instantiation over fresh constants.

A proof block discharges its pending goal G structurally when (a) G is an
implication, the first step assumed the antecedent, and a Hence step proved
the consequent; (b) G is a negation, the first step assumed the operand, and
a Hence step proved the contradiction; or (c) a Hence step proved G
verbatim. Otherwise a synthetic final ByContext statement (context |- G) is
appended, which keeps nonconforming proofs sound.

Statement ids are S, S1, S2, ... in construction order; subproof bodies
(Note/Case) are constructed after the enclosing spine, so the top levels of
a proof keep stable, readable ids.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .desugar import Assume, Cases, Derive, Note, ProofTree, Step, Take
from .errors import Loc, StructureError
from .fol import (
    FALSUM,
    Const,
    Exists,
    Formula,
    Implies,
    Not,
    Var,
    fix_constants,
    fol_text,
    or_all,
    substitute,
)


class Kind(Enum):
    ASSUMED = "assumed"
    BY_CONTEXT = "bycontext"
    SUBSEQUENCE = "subsequence"


@dataclass
class Statement:
    id: str
    goal: Formula
    kind: Kind
    origin: Loc
    children: tuple["Statement", ...] = ()
    context_ids: tuple[str, ...] = ()
    restriction: tuple[str, ...] | None = None
    hence: bool = False
    synthetic: bool = False
    completeness: bool = False

    def walk(self):
        yield self
        for c in self.children:
            yield from c.walk()

    def index(self) -> dict[str, "Statement"]:
        return {s.id: s for s in self.walk()}


class _Builder:
    def __init__(self) -> None:
        self.count = 0

    def alloc(
        self,
        goal: Formula,
        kind: Kind,
        origin: Loc,
        ctx: list[Statement],
        *,
        restriction: tuple[str, ...] | None = None,
        hence: bool = False,
        synthetic: bool = False,
        completeness: bool = False,
    ) -> Statement:
        sid = "S" if self.count == 0 else f"S{self.count}"
        self.count += 1
        return Statement(
            id=sid,
            goal=goal,
            kind=kind,
            origin=origin,
            context_ids=tuple(s.id for s in ctx),
            restriction=restriction,
            hence=hence,
            synthetic=synthetic,
            completeness=completeness,
        )


def build_sequence(
    lemma: Formula,
    proof: ProofTree | None,
    origin: Loc = Loc(1, 1),
) -> Statement:
    """Build the statement sequence for one lemma."""
    b = _Builder()
    root = b.alloc(lemma, Kind.SUBSEQUENCE, origin, [])
    opened, _consts = fix_constants(lemma)
    if proof is None:
        s1 = b.alloc(opened, Kind.BY_CONTEXT, origin, [])
    else:
        s1 = b.alloc(opened, Kind.SUBSEQUENCE, origin, [])
        s1.children = tuple(_block(b, opened, list(proof.steps), [], origin))
    root.children = (s1,)
    return root


def _structurally_equal(a: Formula, b: Formula) -> bool:
    return a == b


def _block(
    b: _Builder,
    goal: Formula,
    steps: list[Step],
    ctx: list[Statement],
    origin: Loc,
) -> list[Statement]:
    """Translate one proof block; appends a synthetic obligation unless the
    pending goal is discharged structurally."""
    if steps and isinstance(steps[0], Assume):
        assume = steps[0]
        if isinstance(goal, Implies):
            if not _structurally_equal(assume.formula, goal.left):
                raise StructureError(
                    f"assumption does not match the goal antecedent "
                    f"({fol_text(assume.formula)} vs {fol_text(goal.left)})",
                    assume.loc,
                )
            assumed = b.alloc(assume.formula, Kind.ASSUMED, assume.loc, ctx)
            rest = steps[1:]
            if (
                len(rest) == 1
                and isinstance(rest[0], Derive)
                and rest[0].kind == "hence"
                and _structurally_equal(rest[0].goal, goal.right)
            ):
                # Assume A / Hence C: the consequent statement is the Hence
                # check itself, no wrapper needed.
                return [assumed] + _spine(b, goal.right, rest, ctx + [assumed], origin)
            inner = b.alloc(goal.right, Kind.SUBSEQUENCE, assume.loc, ctx)
            inner.children = tuple(
                _block(b, goal.right, rest, ctx + [assumed], origin)
            )
            return [assumed, inner]
        if isinstance(goal, Not):
            if not _structurally_equal(assume.formula, goal.body):
                raise StructureError(
                    f"assumption does not match the negated goal "
                    f"({fol_text(assume.formula)} vs {fol_text(goal.body)})",
                    assume.loc,
                )
            assumed = b.alloc(assume.formula, Kind.ASSUMED, assume.loc, ctx)
            rest = _spine(b, FALSUM, steps[1:], ctx + [assumed], origin)
            children = [assumed] + rest
            if not any(s.hence and s.goal == FALSUM for s in rest):
                children.append(
                    b.alloc(FALSUM, Kind.BY_CONTEXT, origin, ctx + children, synthetic=True)
                )
            return children
        raise StructureError(
            "Assume is only allowed when the pending goal is an implication or a negation",
            assume.loc,
        )
    children = _spine(b, goal, steps, ctx, origin)
    if not any(s.hence and _structurally_equal(s.goal, goal) for s in children):
        children.append(
            b.alloc(goal, Kind.BY_CONTEXT, origin, ctx + children, synthetic=True)
        )
    return children


def _spine(
    b: _Builder,
    pending_goal: Formula,
    steps: list[Step],
    ctx: list[Statement],
    origin: Loc,
) -> list[Statement]:
    out: list[Statement] = []
    local = list(ctx)
    deferred: list[tuple[Statement, Formula, list[Step], list[Statement], Loc, Formula | None]] = []

    for step in steps:
        if isinstance(step, Assume):
            raise StructureError(
                "Assume may only open a proof block whose goal is an implication or negation",
                step.loc,
            )
        if isinstance(step, Derive):
            hence = step.kind == "hence"
            if step.since is None:
                st = b.alloc(
                    step.goal,
                    Kind.BY_CONTEXT,
                    step.loc,
                    local,
                    restriction=step.by,
                    hence=hence,
                )
                out.append(st)
                local.append(st)
            else:
                wrapper = b.alloc(step.goal, Kind.SUBSEQUENCE, step.loc, local, hence=hence)
                s_since = b.alloc(
                    step.since, Kind.BY_CONTEXT, step.loc, local, restriction=step.by
                )
                s_goal = b.alloc(
                    step.goal,
                    Kind.BY_CONTEXT,
                    step.loc,
                    local + [s_since],
                    restriction=step.by,
                )
                wrapper.children = (s_since, s_goal)
                out.append(wrapper)
                local.append(wrapper)
        elif isinstance(step, Note):
            st = b.alloc(step.goal, Kind.SUBSEQUENCE, step.loc, local)
            deferred.append((st, step.goal, list(step.sub.steps), list(local), step.loc, None))
            out.append(st)
            local.append(st)
        elif isinstance(step, Cases):
            pre = list(local)
            for hyp, sub in step.cases:
                case_goal = Implies(hyp, pending_goal)
                st = b.alloc(case_goal, Kind.SUBSEQUENCE, step.loc, local)
                deferred.append((st, case_goal, list(sub.steps), list(local), step.loc, hyp))
                out.append(st)
                local.append(st)
            comp = b.alloc(
                or_all([hyp for hyp, _ in step.cases]),
                Kind.BY_CONTEXT,
                step.loc,
                pre,
                completeness=True,
            )
            out.append(comp)
            local.append(comp)
        elif isinstance(step, Take):
            exists_goal = Exists(step.vars, step.body)
            s_ex = b.alloc(
                exists_goal, Kind.BY_CONTEXT, step.loc, local, restriction=step.by
            )
            instantiated = substitute(step.body, {v: Const(v) for v in step.vars})
            s_in = b.alloc(instantiated, Kind.ASSUMED, step.loc, local + [s_ex])
            out.extend([s_ex, s_in])
            local.extend([s_ex, s_in])
        else:
            raise AssertionError(f"unknown step {step!r}")

    for st, goal, sub_steps, snap, loc, case_hyp in deferred:
        if case_hyp is not None:
            # Case block: hypothesis is implicitly assumed; the body proves
            # the pending goal under it.
            assert isinstance(goal, Implies)
            assumed = b.alloc(case_hyp, Kind.ASSUMED, loc, snap)
            inner = b.alloc(goal.right, Kind.SUBSEQUENCE, loc, snap)
            inner.children = tuple(_block(b, goal.right, sub_steps, snap + [assumed], loc))
            st.children = (assumed, inner)
        else:
            st.children = tuple(_block(b, goal, sub_steps, snap, loc))
    return out


def visible_context(
    stmt: Statement, root: Statement, ambient: list[tuple[str, str, Formula]]
) -> list[Formula]:
    """Formulas usable as premises: ambient library content plus the goals of
    the statements reachable through the context edges."""
    idx = root.index()
    out = [f for _, _, f in ambient]
    out.extend(idx[i].goal for i in stmt.context_ids)
    return out


def dump(root: Statement) -> str:
    """Indented `id [kind] goal` tree; used by golden tests and --debug output."""
    lines: list[str] = []

    def rec(s: Statement, depth: int) -> None:
        marks = ""
        if s.synthetic:
            marks = " (synthetic)"
        elif s.completeness:
            marks = " (completeness)"
        elif s.hence:
            marks = " (hence)"
        lines.append(f"{'  ' * depth}{s.id} [{s.kind.value}]{marks} {fol_text(s.goal)}")
        for c in s.children:
            rec(c, depth + 1)

    rec(root, 0)
    return "\n".join(lines) + "\n"
