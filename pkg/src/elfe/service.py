"""HTTP verification service backing the web UI.

Async job model: POST /api/verify enqueues a document and returns a job id;
GET /api/jobs/{id} polls per-line statuses and per-obligation details while
the worker pool runs. The finished report is exactly the CLI --json report
(same code path), so the two can be compared byte for byte. Jobs expire
after an hour; there is no authentication (classroom tool, loopback bind by
default).
"""

from __future__ import annotations

import threading
import time
import uuid
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .errors import ElfeError
from .library import LibraryStore, corpus_examples
from .obligations import Obligation, Verdict
from .pipeline import Prepared, VerifyOptions, check, prepare, report_json_dict

JOB_TTL_S = 3600.0
DEFAULT_BODY_CAP = 256 * 1024

_OPTION_KEYS = {
    "timeout_s": float,
    "jobs": int,
    "case_completeness": bool,
    "deterministic": bool,
    "max_model_size": int,
}


class Job:
    def __init__(self, job_id: str):
        self.id = job_id
        self.state = "queued"  # queued | running | done
        self.created = time.monotonic()
        self.lock = threading.Lock()
        self.prepared: Prepared | None = None
        self.verdicts: dict[str, Verdict] = {}
        self.final: dict[str, Any] | None = None
        self.error: dict[str, Any] | None = None

    def snapshot(self) -> dict[str, Any]:
        from .obligations import assemble_report

        with self.lock:
            if self.final is not None:
                return {"state": "done", **self.final}
            if self.error is not None:
                return {"state": "done", "error": self.error}
            if self.prepared is None:
                return {"state": self.state}
            results = [
                (ob, self.verdicts.get(ob.id, Verdict("pending")))
                for ob in self.prepared.obligations
            ]
            report = assemble_report(
                results, self.prepared.total_lines, 0, self.prepared.assumed
            )
            return {"state": "running", **report_json_dict(report)}


class JobStore:
    def __init__(self) -> None:
        self.lock = threading.Lock()
        self.jobs: dict[str, Job] = {}

    def new(self) -> Job:
        job = Job(uuid.uuid4().hex)
        with self.lock:
            self._purge()
            self.jobs[job.id] = job
        return job

    def get(self, job_id: str) -> Job | None:
        with self.lock:
            self._purge()
            return self.jobs.get(job_id)

    def _purge(self) -> None:
        cutoff = time.monotonic() - JOB_TTL_S
        for jid in [j for j, job in self.jobs.items() if job.created < cutoff]:
            del self.jobs[jid]


def create_app(
    lib_dirs: list[str] | None = None,
    timeout_s: float = 10.0,
    body_cap: int = DEFAULT_BODY_CAP,
    frontend_dir: str | None = None,
    workers: int = 2,
) -> FastAPI:
    app = FastAPI(title="elfe verification service")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    store = JobStore()
    pool = ThreadPoolExecutor(max_workers=workers)
    base_lib_dirs = list(lib_dirs or [])

    @app.exception_handler(RequestValidationError)
    async def malformed(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": "malformed request body"})

    def run_job(job: Job, text: str, options: VerifyOptions) -> None:
        job.state = "running"
        try:
            prepared = prepare(text, options)
            with job.lock:
                job.prepared = prepared

            def progress(ob: Obligation, v: Verdict) -> None:
                with job.lock:
                    job.verdicts[ob.id] = v

            report = check(prepared, options, progress)
            with job.lock:
                job.final = report_json_dict(report)
                job.state = "done"
        except ElfeError as exc:
            errors = getattr(exc, "errors", [exc])
            with job.lock:
                job.error = {
                    "message": errors[0].message,
                    "errors": [
                        {
                            "message": e.message,
                            "line": e.loc.line if e.loc else None,
                            "column": e.loc.column if e.loc else None,
                        }
                        for e in errors
                    ],
                }
                job.state = "done"
        except Exception as exc:  # defensive: a job must never wedge the service
            with job.lock:
                job.error = {"message": f"internal error: {exc!r}"}
                job.state = "done"

    @app.post("/api/verify", status_code=202)
    async def verify(request: Request):
        try:
            body = await request.json()
        except Exception:
            return JSONResponse(status_code=400, content={"error": "malformed request body"})
        if not isinstance(body, dict) or not isinstance(body.get("text", ""), str):
            return JSONResponse(status_code=400, content={"error": "malformed request body"})
        text = body.get("text", "")
        if len(text.encode("utf-8")) > body_cap:
            return JSONResponse(
                status_code=413,
                content={"error": f"document exceeds the {body_cap} byte cap"},
            )
        libraries = body.get("libraries") or {}
        if not isinstance(libraries, dict) or not all(
            isinstance(k, str) and isinstance(v, str) for k, v in libraries.items()
        ):
            return JSONResponse(status_code=400, content={"error": "malformed request body"})
        raw_options = body.get("options") or {}
        if not isinstance(raw_options, dict):
            return JSONResponse(status_code=400, content={"error": "malformed request body"})
        kwargs: dict[str, Any] = {}
        for key, cast in _OPTION_KEYS.items():
            if key in raw_options:
                try:
                    kwargs[key] = cast(raw_options[key])
                except (TypeError, ValueError):
                    return JSONResponse(
                        status_code=400, content={"error": f"bad option {key!r}"}
                    )
        options = VerifyOptions(
            lib_dirs=base_lib_dirs,
            inline_libraries=dict(libraries),
            **{"timeout_s": timeout_s, **kwargs},
        )
        if options.deterministic:
            options.jobs = 1
        job = store.new()
        pool.submit(run_job, job, text, options)
        return {"job_id": job.id}

    @app.get("/api/jobs/{job_id}")
    async def job_status(job_id: str):
        job = store.get(job_id)
        if job is None:
            return JSONResponse(status_code=404, content={"error": "unknown job id"})
        return job.snapshot()

    @app.get("/api/examples")
    async def examples():
        return {"examples": sorted(corpus_examples())}

    @app.get("/api/examples/{name}")
    async def example(name: str):
        files = corpus_examples()
        if name not in files:
            return JSONResponse(status_code=404, content={"error": f"unknown example {name!r}"})
        return {"name": name, "text": files[name].read_text(encoding="utf-8")}

    @app.get("/api/libraries")
    async def libraries():
        return {"libraries": LibraryStore(base_lib_dirs).available()}

    @app.get("/api/libraries/{name}")
    async def library(name: str):
        lib_store = LibraryStore(base_lib_dirs)
        path = lib_store.find(name)
        if path is None:
            return JSONResponse(status_code=404, content={"error": f"unknown library {name!r}"})
        return {"name": name, "text": path.read_text(encoding="utf-8")}

    if frontend_dir and Path(frontend_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=frontend_dir, html=True), name="ui")

    return app
