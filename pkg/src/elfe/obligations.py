"""Proof obligations and verification reports.

Every ByContext statement yields one obligation: its goal must follow from
the visible context (restricted to named premises plus local facts when the
step carried `by`). Case completeness and Take existentials arrive here as
ordinary ByContext statements created by the sequence builder.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .errors import Loc
from .fol import Formula
from .sequence import Kind, Statement


@dataclass(frozen=True)
class Obligation:
    id: str
    premises: tuple[tuple[str, Formula], ...]
    goal: Formula
    origin: Loc
    restricted: bool = False
    lemma: str = ""
    completeness: bool = field(default=False, compare=False)

    @property
    def line(self) -> int:
        return self.origin.line

    def premise_labels(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.premises)


def derive_obligations(
    root: Statement,
    ambient: Iterable[tuple[str, str, Formula]],
    lemma_label: str,
    include_completeness: bool = True,
) -> list[Obligation]:
    """Flatten the statement sequence into obligations, in tree order.

    Obligation ids are `<lemma-label>/<line>/<k>` with k counting the
    obligations born on that source line.
    """
    ambient = list(ambient)
    ambient_by_label = {label: f for label, _, f in ambient}
    idx = root.index()
    out: list[Obligation] = []
    per_line: dict[int, int] = {}

    def visit(s: Statement) -> None:
        if s.kind is Kind.BY_CONTEXT:
            if s.completeness and not include_completeness:
                return
            local = tuple((i, idx[i].goal) for i in s.context_ids)
            if s.restriction is None:
                premises = tuple((label, f) for label, _, f in ambient) + local
                restricted = False
            else:
                named = tuple(
                    (label, ambient_by_label[label])
                    for label in s.restriction
                    if label in ambient_by_label
                )
                premises = named + local
                restricted = True
            line = s.origin.line
            per_line[line] = per_line.get(line, 0) + 1
            out.append(
                Obligation(
                    id=f"{lemma_label}/{line}/{per_line[line]}",
                    premises=premises,
                    goal=s.goal,
                    origin=s.origin,
                    restricted=restricted,
                    lemma=lemma_label,
                    completeness=s.completeness,
                )
            )
        for c in s.children:
            visit(c)

    visit(root)
    return out


# ---------------------------------------------------------------------------
# Verdicts


@dataclass(frozen=True)
class Verdict:
    """Outcome of checking one obligation.

    status: proved | disproved | unknown. Disproved always carries a model
    that the evaluator confirmed falsifies the obligation. Unknown carries
    the strongest reason seen (saturated > timeout > error).
    """

    status: str
    backend: str = ""
    elapsed_ms: int = 0
    model: object | None = None  # models.Model, kept loose to avoid a cycle
    reason: str = ""
    details: str = ""

    @staticmethod
    def proved(backend: str, elapsed_ms: int) -> "Verdict":
        return Verdict("proved", backend, elapsed_ms)

    @staticmethod
    def disproved(model: object, backend: str, elapsed_ms: int = 0) -> "Verdict":
        return Verdict("disproved", backend, elapsed_ms, model)

    @staticmethod
    def unknown(reason: str, details: str = "") -> "Verdict":
        return Verdict("unknown", reason=reason, details=details)


_REASON_RANK = {"saturated": 3, "timeout": 2, "error": 1, "": 0}


def strongest_unknown(reasons: list[Verdict]) -> Verdict:
    best = Verdict.unknown("error", "no backend produced a result")
    for v in reasons:
        if _REASON_RANK.get(v.reason, 0) >= _REASON_RANK.get(best.reason, 0):
            best = v
    return best


# ---------------------------------------------------------------------------
# Reports


@dataclass
class ObligationResult:
    obligation: Obligation
    verdict: Verdict


@dataclass
class VerificationReport:
    status: str  # verified | failed | unknown
    lines: list[tuple[int, str]]  # (line, verified|failed|unknown|pending)
    results: list[ObligationResult]
    assumed: list[str]  # labels streamed as ASSUMED
    total_lines: int
    wall_ms: int
    backend_counts: dict[str, int]

    @property
    def counts(self) -> tuple[int, int, int]:
        proved = sum(1 for r in self.results if r.verdict.status == "proved")
        failed = sum(1 for r in self.results if r.verdict.status == "disproved")
        unknown = sum(1 for r in self.results if r.verdict.status == "unknown")
        return proved, failed, unknown


def line_status(verdicts: list[Verdict]) -> str:
    if any(v.status == "disproved" for v in verdicts):
        return "failed"
    if any(v.status == "pending" for v in verdicts):
        return "pending"
    if any(v.status == "unknown" for v in verdicts):
        return "unknown"
    return "verified"


def assemble_report(
    results: list[tuple[Obligation, Verdict]],
    total_lines: int,
    wall_ms: int = 0,
    assumed: list[str] | None = None,
) -> VerificationReport:
    """Aggregate per-obligation verdicts into the per-line report.

    A line is verified iff every obligation originating at it was proved;
    lines with no obligations are vacuously verified. Verdicts with status
    "pending" mark a run still in progress (served by the web service).
    """
    by_line: dict[int, list[Verdict]] = {}
    for ob, v in results:
        by_line.setdefault(ob.line, []).append(v)
    lines: list[tuple[int, str]] = []
    for n in range(1, total_lines + 1):
        if n in by_line:
            lines.append((n, line_status(by_line[n])))
        else:
            lines.append((n, "verified"))
    statuses = [s for _, s in lines]
    if "failed" in statuses:
        status = "failed"
    elif "unknown" in statuses or "pending" in statuses:
        status = "unknown"
    else:
        status = "verified"
    backend_counts: dict[str, int] = {}
    for _, v in results:
        if v.status == "proved":
            backend_counts[v.backend] = backend_counts.get(v.backend, 0) + 1
    return VerificationReport(
        status=status,
        lines=lines,
        results=[ObligationResult(ob, v) for ob, v in results],
        assumed=assumed or [],
        total_lines=total_lines,
        wall_ms=wall_ms,
        backend_counts=backend_counts,
    )
