"""Backend orchestration: race provers and the countermodel finder per obligation.

All enabled proving backends run concurrently with the model finder on the
negated obligation; the first Proved wins and cancels the rest, a confirmed
countermodel yields Disproved, and otherwise the strongest Unknown reason is
reported (saturated > timeout > error). External TPTP provers are plain
subprocesses built from a `{file}` command template; their stdout is scanned
for SZS status lines and nothing else, so integrating a new prover is one
configuration line.
"""

from __future__ import annotations

import os
import shlex
import subprocess
import tempfile
import threading
import time
from concurrent.futures import FIRST_COMPLETED, Future, ThreadPoolExecutor, wait
from dataclasses import dataclass

from .models import find_countermodel
from .obligations import Obligation, Verdict, strongest_unknown
from .prover import ProverLimits, prove
from .tptp import parse_szs, to_tptp

BUILTIN_RESOLUTION = "builtin-resolution"
BUILTIN_MODELFINDER = "builtin-modelfinder"


@dataclass(frozen=True)
class BackendConfig:
    name: str
    kind: str  # external-tptp | builtin-resolution | builtin-modelfinder
    command: str | None = None  # template with a {file} placeholder
    timeout: float = 10.0
    enabled: bool = True
    max_model_size: int = 3

    def __post_init__(self) -> None:
        if self.timeout <= 0:
            raise ValueError("backend timeout must be positive")


def default_backends(timeout: float = 10.0) -> list[BackendConfig]:
    return [
        BackendConfig(BUILTIN_RESOLUTION, "builtin-resolution", timeout=timeout),
        BackendConfig(BUILTIN_MODELFINDER, "builtin-modelfinder", timeout=timeout),
    ]


def parse_backend_spec(spec: str, timeout: float = 10.0) -> BackendConfig:
    """`builtin-resolution`, `builtin-modelfinder`, or `name=command {file}`."""
    if "=" in spec:
        name, command = spec.split("=", 1)
        return BackendConfig(name.strip(), "external-tptp", command.strip(), timeout)
    name = spec.strip()
    if name == BUILTIN_RESOLUTION:
        return BackendConfig(name, "builtin-resolution", timeout=timeout)
    if name == BUILTIN_MODELFINDER:
        return BackendConfig(name, "builtin-modelfinder", timeout=timeout)
    raise ValueError(
        f"unknown backend {name!r}; use {BUILTIN_RESOLUTION}, {BUILTIN_MODELFINDER} "
        "or name=<command with {file}>"
    )


def write_tptp_file(ob: Obligation, directory: str) -> str:
    fname = ob.id.replace("/", "_").replace("'", "_prime") + ".p"
    path = os.path.join(directory, fname)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(to_tptp(ob))
    return path


# ---------------------------------------------------------------------------
# Individual backends


def _run_resolution(ob: Obligation, cfg: BackendConfig, cancel: threading.Event) -> Verdict:
    start = time.monotonic()
    limits = ProverLimits(max_seconds=cfg.timeout)
    result = prove([f for _, f in ob.premises], ob.goal, limits, cancel)
    ms = int((time.monotonic() - start) * 1000)
    if result.refuted:
        return Verdict.proved(cfg.name, ms)
    if result.status == "saturated":
        return Verdict.unknown("saturated", "clause set saturated without refutation")
    return Verdict.unknown("timeout", f"resource out: {result.limit}")


def _run_modelfinder(ob: Obligation, cfg: BackendConfig, cancel: threading.Event) -> Verdict:
    start = time.monotonic()
    model = find_countermodel(
        ob, max_n=cfg.max_model_size, budget_ms=int(cfg.timeout * 1000), cancel=cancel
    )
    ms = int((time.monotonic() - start) * 1000)
    if model is not None:
        return Verdict.disproved(model, cfg.name, ms)
    return Verdict.unknown(
        "timeout", f"no countermodel up to domain size {cfg.max_model_size}"
    )


class _ProcRegistry:
    """Live subprocess tracking so a winning verdict can cancel the losers."""

    def __init__(self) -> None:
        self.lock = threading.Lock()
        self.procs: list[subprocess.Popen] = []

    def add(self, p: subprocess.Popen) -> None:
        with self.lock:
            self.procs.append(p)

    def kill_all(self) -> None:
        with self.lock:
            for p in self.procs:
                if p.poll() is None:
                    p.kill()


def _run_external(
    ob: Obligation,
    cfg: BackendConfig,
    cancel: threading.Event,
    registry: _ProcRegistry,
    tptp_dir: str | None,
) -> Verdict:
    start = time.monotonic()
    owns_dir = tptp_dir is None
    directory = tptp_dir or tempfile.mkdtemp(prefix="elfe-tptp-")
    try:
        path = write_tptp_file(ob, directory)
        argv = [a.replace("{file}", path) for a in shlex.split(cfg.command or "")]
        if not argv:
            return Verdict.unknown("error", f"backend {cfg.name}: empty command")
        try:
            proc = subprocess.Popen(
                argv, stdout=subprocess.PIPE, stderr=subprocess.STDOUT, text=True
            )
        except OSError as exc:
            return Verdict.unknown("error", f"BackendSpawnError: {exc}")
        registry.add(proc)
        deadline = start + cfg.timeout
        while True:
            if proc.poll() is not None:
                break
            if cancel.is_set():
                proc.kill()
                proc.wait()
                return Verdict.unknown("error", "cancelled")
            if time.monotonic() > deadline:
                proc.kill()
                proc.wait()
                return Verdict.unknown("timeout", f"{cfg.name} exceeded {cfg.timeout}s")
            time.sleep(0.02)
        output = proc.stdout.read() if proc.stdout else ""
        ms = int((time.monotonic() - start) * 1000)
        status = parse_szs(output)
        if status == "theorem":
            return Verdict.proved(cfg.name, ms)
        if status == "countersatisfiable":
            # External provers do not hand us a model; rerun the built-in
            # finder so Disproved always carries a checkable countermodel.
            model = find_countermodel(ob, max_n=cfg.max_model_size, budget_ms=3000)
            if model is not None:
                return Verdict.disproved(model, cfg.name, ms)
            return Verdict.unknown(
                "error",
                f"{cfg.name} reported CounterSatisfiable but no small model was found",
            )
        if status == "timeout":
            return Verdict.unknown("timeout", f"{cfg.name} gave SZS Timeout")
        return Verdict.unknown("error", f"{cfg.name} produced no usable SZS status")
    finally:
        if owns_dir:
            try:
                for name in os.listdir(directory):
                    os.unlink(os.path.join(directory, name))
                os.rmdir(directory)
            except OSError:
                pass


def _run_backend(
    ob: Obligation,
    cfg: BackendConfig,
    cancel: threading.Event,
    registry: _ProcRegistry,
    tptp_dir: str | None,
) -> Verdict:
    if cfg.kind == "builtin-resolution":
        return _run_resolution(ob, cfg, cancel)
    if cfg.kind == "builtin-modelfinder":
        return _run_modelfinder(ob, cfg, cancel)
    if cfg.kind == "external-tptp":
        return _run_external(ob, cfg, cancel, registry, tptp_dir)
    return Verdict.unknown("error", f"unknown backend kind {cfg.kind!r}")


# ---------------------------------------------------------------------------
# Dispatch


def dispatch(
    ob: Obligation,
    configs: list[BackendConfig],
    deterministic: bool = False,
    tptp_dir: str | None = None,
) -> Verdict:
    """Check one obligation against every enabled backend.

    Deterministic mode runs backends sequentially in configuration order
    (used for golden output); otherwise they race and the first conclusive
    verdict cancels the rest.
    """
    enabled = [c for c in configs if c.enabled]
    if not enabled:
        raise ValueError("at least one backend must be enabled")
    registry = _ProcRegistry()

    if deterministic:
        losers: list[Verdict] = []
        for cfg in enabled:
            v = _run_backend(ob, cfg, threading.Event(), registry, tptp_dir)
            if v.status in ("proved", "disproved"):
                return v
            losers.append(v)
        return strongest_unknown(losers)

    cancel = threading.Event()
    with ThreadPoolExecutor(max_workers=len(enabled)) as pool:
        futures: dict[Future, BackendConfig] = {
            pool.submit(_run_backend, ob, cfg, cancel, registry, tptp_dir): cfg
            for cfg in enabled
        }
        outstanding = set(futures)
        losers = []
        winner: Verdict | None = None
        while outstanding:
            done, outstanding = wait(outstanding, return_when=FIRST_COMPLETED)
            for fut in done:
                try:
                    v = fut.result()
                except Exception as exc:  # backend bug: degrade, never crash the run
                    v = Verdict.unknown("error", f"{futures[fut].name}: {exc!r}")
                if v.status in ("proved", "disproved") and winner is None:
                    winner = v
                    cancel.set()
                    registry.kill_all()
                else:
                    losers.append(v)
            if winner is not None:
                # Let the remaining backends notice cancellation.
                for fut in outstanding:
                    fut.cancel()
                break
        if winner is not None:
            return winner
        return strongest_unknown(losers)
