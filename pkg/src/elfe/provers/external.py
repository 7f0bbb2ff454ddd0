"""External ATP invocation: one temporary problem file and one child process
per call, SZS verdicts parsed from stdout.  A missing or crashing binary is
an Error verdict, never an exception."""

from __future__ import annotations

import os
import shlex
import subprocess
import tempfile
import time
from dataclasses import dataclass
from threading import Event

from ..tptp import ERROR, TIMEOUT, UNKNOWN, ProverVerdict, parse_szs

GRACE_SECONDS = 2.0
_POLL_INTERVAL = 0.05

INTERNAL_RESOLUTION = "internal-resolution"
INTERNAL_MODEL_FINDER = "internal-model-finder"
EXTERNAL = "external"


@dataclass(frozen=True, slots=True)
class ProverConfig:
    """One portfolio entry.

    `command` is a template with "{file}" (exactly once) and optionally
    "{timeout}"; it is only used for external provers.
    """

    name: str
    kind: str = EXTERNAL
    command: str = ""
    timeout: float = 5.0
    max_domain: int = 4
    max_clauses: int = 50_000

    def __post_init__(self) -> None:
        if self.kind == EXTERNAL and self.command.count("{file}") != 1:
            raise ValueError(
                f"prover '{self.name}': command template must contain "
                "{file} exactly once"
            )
        if self.kind not in (EXTERNAL, INTERNAL_RESOLUTION, INTERNAL_MODEL_FINDER):
            raise ValueError(f"unknown prover kind {self.kind!r}")


def run_external(
    cfg: ProverConfig, problem: str, cancel: Event | None = None
) -> ProverVerdict:
    """Run one external prover on `problem`, capped at timeout + grace."""
    start = time.monotonic()
    fd, path = tempfile.mkstemp(suffix=".p", prefix="elfe_")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(problem)
        cmd = shlex.split(
            cfg.command.format(file=path, timeout=max(1, int(cfg.timeout)))
        )
        try:
            proc = subprocess.Popen(
                cmd,
                stdout=subprocess.PIPE,
                stderr=subprocess.PIPE,
                text=True,
            )
        except (FileNotFoundError, OSError) as exc:
            return ProverVerdict(ERROR, None, time.monotonic() - start, str(exc))
        deadline = start + cfg.timeout + GRACE_SECONDS
        while proc.poll() is None:
            if time.monotonic() > deadline or (cancel is not None and cancel.is_set()):
                proc.terminate()
                try:
                    proc.wait(timeout=1.0)
                except subprocess.TimeoutExpired:
                    proc.kill()
                    proc.wait()
                elapsed = time.monotonic() - start
                status = TIMEOUT if time.monotonic() > deadline else UNKNOWN
                return ProverVerdict(status, None, elapsed, "killed")
            time.sleep(_POLL_INTERVAL)
        stdout = proc.stdout.read() if proc.stdout else ""
        stderr = proc.stderr.read() if proc.stderr else ""
        elapsed = time.monotonic() - start
        verdict = parse_szs(stdout, elapsed)
        if verdict.status == UNKNOWN and proc.returncode != 0 and "SZS" not in stdout:
            return ProverVerdict(ERROR, None, elapsed, stdout + stderr)
        return verdict
    finally:
        try:
            os.unlink(path)
        except OSError:
            pass
