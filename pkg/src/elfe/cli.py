"""Command line entry point: verify documents, serve the web API.

Exit codes for `verify`: 0 all obligations proved, 1 a derivation was
disproved, 2 undecided obligations remain, 3 usage or parse errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import threading
from pathlib import Path

from .backends import parse_backend_spec
from .errors import ElfeError
from .fol import fol_text
from .obligations import Obligation, Verdict, VerificationReport
from .pipeline import VerifyOptions, check, prepare, report_json_dict
from .sat import KERNEL


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="elfe", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="verify a proof document")
    v.add_argument("file", help="path to a .elfe document")
    v.add_argument("--lib", action="append", default=[], metavar="DIR",
                   help="extra library search directory (repeatable)")
    v.add_argument("--backend", action="append", default=[], metavar="SPEC",
                   help="backend to enable: builtin-resolution, builtin-modelfinder, "
                        "or name=<command with {file}> (repeatable)")
    v.add_argument("--timeout", type=float, default=10.0, metavar="S",
                   help="per-obligation backend timeout in seconds (default 10)")
    v.add_argument("--jobs", type=int, default=4, metavar="N",
                   help="obligations checked in parallel (default 4)")
    v.add_argument("--no-case-completeness", action="store_true",
                   help="skip the case-completeness obligations")
    v.add_argument("--deterministic", action="store_true",
                   help="single worker, sequential backends, zeroed timings")
    v.add_argument("--keep-tptp", metavar="DIR",
                   help="write one TPTP .p file per obligation into DIR")
    v.add_argument("--json", action="store_true", help="print the machine report")
    v.add_argument("--max-model-size", type=int, default=3, metavar="N",
                   help="countermodel search bound (default 3)")
    v.add_argument("--dump-sequence", action="store_true",
                   help="print the statement sequences instead of verifying")

    s = sub.add_parser("serve", help="run the verification web service")
    s.add_argument("--host", default=os.environ.get("HOST", "127.0.0.1"))
    s.add_argument("--port", type=int, default=int(os.environ.get("PORT", "8730")))
    s.add_argument("--lib", action="append",
                   default=[p for p in os.environ.get("LIB_DIR", "").split(":") if p],
                   metavar="DIR")
    s.add_argument("--timeout", type=float,
                   default=float(os.environ.get("TIMEOUT_S", "10")), metavar="S")
    s.add_argument("--frontend", metavar="DIR", default=os.environ.get("FRONTEND_DIR"),
                   help="serve a built web UI from DIR at /")
    return parser


def _options_from_args(args: argparse.Namespace) -> VerifyOptions:
    backends = None
    if args.backend:
        backends = [parse_backend_spec(s, args.timeout) for s in args.backend]
    return VerifyOptions(
        lib_dirs=list(args.lib),
        backends=backends,
        timeout_s=args.timeout,
        jobs=1 if args.deterministic else args.jobs,
        case_completeness=not args.no_case_completeness,
        deterministic=args.deterministic,
        keep_tptp_dir=args.keep_tptp,
        max_model_size=args.max_model_size,
    )


def _print_failed_details(report: VerificationReport, out) -> None:
    for r in report.results:
        if r.verdict.status != "disproved":
            continue
        ob = r.obligation
        print(f"FAILED {ob.id} (line {ob.line})", file=out)
        print(f"  goal: {fol_text(ob.goal)}", file=out)
        print(f"  premises: {', '.join(ob.premise_labels()) or '(none)'}", file=out)
        if r.verdict.model is not None:
            print("  countermodel:", file=out)
            for line in r.verdict.model.text().splitlines():  # type: ignore[union-attr]
                print(f"    {line}", file=out)


def cmd_verify(args: argparse.Namespace) -> int:
    path = Path(args.file)
    if not path.is_file():
        print(f"error: no such file: {path}", file=sys.stderr)
        return 3
    options = _options_from_args(args)
    try:
        text = path.read_text(encoding="utf-8")
        prepared = prepare(text, options)
    except ElfeError as exc:
        errors = getattr(exc, "errors", [exc])
        for e in errors:
            where = f"{path}:{e.loc}" if e.loc else str(path)
            print(f"error: {where}: {e.message}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3

    if args.dump_sequence:
        from .sequence import dump

        for unit in prepared.units:
            print(f"== {unit.decl.label}")
            print(dump(unit.sequence))
        return 0

    out = sys.stdout
    lock = threading.Lock()

    def progress(ob: Obligation, v: Verdict) -> None:
        if args.json:
            return
        with lock:
            if v.status == "proved":
                print(f"CHECK {ob.id} ... PROVED by {v.backend} ({v.elapsed_ms} ms)", file=out)
            elif v.status == "disproved":
                print(f"CHECK {ob.id} ... FAILED", file=out)
            else:
                print(f"CHECK {ob.id} ... UNKNOWN ({v.reason})", file=out)

    if not args.json:
        for label in prepared.assumed:
            print(f"ASSUMED {label}", file=out)

    report = check(prepared, options, progress)

    if args.json:
        print(json.dumps(report_json_dict(report), indent=2), file=out)
    else:
        _print_failed_details(report, out)
        proved, failed, unknown = report.counts
        print("===", file=out)
        print(f"result: {report.status}", file=out)
        print(
            f"obligations: {len(report.results)}  proved: {proved}  "
            f"failed: {failed}  unknown: {unknown}",
            file=out,
        )
        print(f"wall time: {report.wall_ms} ms  (sat kernel: {KERNEL})", file=out)
        by_backend = ", ".join(f"{k}: {v}" for k, v in sorted(report.backend_counts.items()))
        print(f"proofs by backend: {by_backend or '(none)'}", file=out)

    return {"verified": 0, "failed": 1, "unknown": 2}[report.status]


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(
        lib_dirs=list(args.lib),
        timeout_s=args.timeout,
        frontend_dir=args.frontend,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "verify":
        return cmd_verify(args)
    if args.command == "serve":
        return cmd_serve(args)
    return 3


if __name__ == "__main__":
    sys.exit(main())
