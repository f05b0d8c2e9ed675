"""End-to-end verification pipeline shared by the CLI and the web service.

parse -> desugar -> statement sequences -> obligations -> backend dispatch
-> report. The JSON report produced here is the single source of truth: the
CLI prints it under --json and the service returns it verbatim, so the two
surfaces can be compared byte for byte.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable

from .backends import BackendConfig, default_backends, dispatch, write_tptp_file
from .desugar import Decl, Document, desugar
from .errors import ElfeError
from .fol import Formula, fol_text
from .library import LibraryStore
from .models import Model
from .obligations import (
    Obligation,
    VerificationReport,
    Verdict,
    assemble_report,
    derive_obligations,
)
from .parser import parse_source
from .sequence import Kind, Statement, build_sequence


@dataclass
class VerifyOptions:
    lib_dirs: list[str] = field(default_factory=list)
    backends: list[BackendConfig] | None = None
    timeout_s: float = 10.0
    jobs: int = 4
    case_completeness: bool = True
    deterministic: bool = False
    keep_tptp_dir: str | None = None
    max_model_size: int = 3
    inline_libraries: dict[str, str] = field(default_factory=dict)
    skip_preverified: frozenset[str] = frozenset()

    def resolved_backends(self) -> list[BackendConfig]:
        configs = self.backends if self.backends is not None else default_backends(self.timeout_s)
        return [replace(c, max_model_size=self.max_model_size) for c in configs]


@dataclass
class LemmaUnit:
    decl: Decl
    sequence: Statement
    obligations: list[Obligation]


@dataclass
class Prepared:
    document: Document
    units: list[LemmaUnit]
    obligations: list[Obligation]
    assumed: list[str]
    total_lines: int
    source: str


def prepare(text: str, options: VerifyOptions | None = None) -> Prepared:
    """Parse, desugar and derive every obligation of a document.

    Raises ElfeError subclasses (possibly DocumentErrors) on bad input.
    """
    options = options or VerifyOptions()
    store = LibraryStore(options.lib_dirs)
    for name, src in options.inline_libraries.items():
        store.add_inline(name, src)
    raw = parse_source(text)
    doc = desugar(raw, store.resolver())

    ambient: list[tuple[str, str, Formula]] = list(doc.ambient)
    assumed: list[str] = [label for label, _, _ in ambient]
    units: list[LemmaUnit] = []
    obligations: list[Obligation] = []
    for decl in doc.decls:
        if decl.kind == "lemma" and decl.label not in options.skip_preverified:
            seq = build_sequence(decl.formula, decl.proof, decl.loc)
            obs = derive_obligations(
                seq, ambient, decl.label, include_completeness=options.case_completeness
            )
            units.append(LemmaUnit(decl, seq, obs))
            obligations.extend(obs)
            for stmt in seq.walk():
                if stmt.kind is Kind.ASSUMED:
                    assumed.append(f"{decl.label}/{stmt.id}")
        ambient.append((decl.label, decl.kind, decl.formula))
    total_lines = text.count("\n") + (0 if text.endswith("\n") or not text else 1)
    return Prepared(doc, units, obligations, assumed, total_lines, text)


ProgressFn = Callable[[Obligation, Verdict], None]


def check(
    prepared: Prepared,
    options: VerifyOptions | None = None,
    progress: ProgressFn | None = None,
) -> VerificationReport:
    """Dispatch every obligation and assemble the report.

    Deterministic mode forces a single worker, sequential backends, and
    zeroed timings so output is stable for golden tests.
    """
    options = options or VerifyOptions()
    configs = options.resolved_backends()
    started = time.monotonic()

    if options.keep_tptp_dir:
        Path(options.keep_tptp_dir).mkdir(parents=True, exist_ok=True)
        for ob in prepared.obligations:
            write_tptp_file(ob, options.keep_tptp_dir)

    def run_one(ob: Obligation) -> tuple[Obligation, Verdict]:
        v = dispatch(
            ob,
            configs,
            deterministic=options.deterministic,
            tptp_dir=options.keep_tptp_dir,
        )
        if options.deterministic:
            v = replace(v, elapsed_ms=0)
        if progress is not None:
            progress(ob, v)
        return ob, v

    results: list[tuple[Obligation, Verdict]]
    if options.deterministic or options.jobs <= 1:
        results = [run_one(ob) for ob in prepared.obligations]
    else:
        with ThreadPoolExecutor(max_workers=options.jobs) as pool:
            results = list(pool.map(run_one, prepared.obligations))

    wall_ms = 0 if options.deterministic else int((time.monotonic() - started) * 1000)
    return assemble_report(results, prepared.total_lines, wall_ms, prepared.assumed)


def verify_text(
    text: str,
    options: VerifyOptions | None = None,
    progress: ProgressFn | None = None,
) -> VerificationReport:
    prepared = prepare(text, options)
    return check(prepared, options, progress)


def verify_path(
    path: str | Path,
    options: VerifyOptions | None = None,
    progress: ProgressFn | None = None,
) -> VerificationReport:
    text = Path(path).read_text(encoding="utf-8")
    return verify_text(text, options, progress)


# ---------------------------------------------------------------------------
# Canonical JSON report


def _countermodel_dict(model: Model | None) -> dict | None:
    if model is None:
        return None
    return {
        "domain_size": model.size,
        "constants": {k: model.constants[k] for k in sorted(model.constants)},
        "true_atoms": [
            f"{name}({','.join(str(a) for a in args)})"
            for name in sorted(model.predicates)
            for args in sorted(model.predicates[name])
        ],
        "text": model.text(),
    }


def report_json_dict(report: VerificationReport) -> dict:
    """Stable-shape dict for --json and the service (field order matters)."""
    obligations = []
    for r in report.results:
        ob, v = r.obligation, r.verdict
        obligations.append(
            {
                "id": ob.id,
                "line": ob.line,
                "goal": fol_text(ob.goal),
                "premises": list(ob.premise_labels()),
                "verdict": v.status,
                "backend": v.backend or None,
                "ms": v.elapsed_ms,
                "reason": v.reason or None,
                "countermodel": _countermodel_dict(v.model),  # type: ignore[arg-type]
            }
        )
    proved, failed, unknown = report.counts
    return {
        "status": report.status,
        "lines": [{"line": n, "status": s} for n, s in report.lines],
        "obligations": obligations,
        "stats": {
            "obligations": len(report.results),
            "proved": proved,
            "failed": failed,
            "unknown": unknown,
            "wall_ms": report.wall_ms,
            "backends": {k: report.backend_counts[k] for k in sorted(report.backend_counts)},
        },
    }
