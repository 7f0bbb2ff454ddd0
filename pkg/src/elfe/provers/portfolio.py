"""Portfolio dispatch: every configured prover attacks the same obligation
concurrently; the first decisive verdict wins and cancels the rest.

The final result is a pure function of the individual verdicts, not of
completion order: decisive answers are mutually exclusive for sound provers,
and should they ever conflict the portfolio reports an Error carrying both
outputs instead of guessing.
"""

from __future__ import annotations

import shutil
import threading
import time
from concurrent.futures import FIRST_COMPLETED, ThreadPoolExecutor, wait
from dataclasses import dataclass, field

from ..kernel import Obligation
from ..tptp import (
    COUNTER_SATISFIABLE,
    ERROR,
    SATISFIABLE,
    THEOREM,
    UNKNOWN,
    ProverVerdict,
    emit,
)
from .external import (
    EXTERNAL,
    INTERNAL_MODEL_FINDER,
    INTERNAL_RESOLUTION,
    ProverConfig,
    run_external,
)
from .modelfinder import find_model
from .resolution import ResolutionLimits, resolution_prove

PROVED = "Proved"
REFUTED = "Refuted"

_DECISIVE = {THEOREM, COUNTER_SATISFIABLE, SATISFIABLE}


@dataclass(slots=True)
class ObligationResult:
    verdict: str  # Proved | Refuted | Unknown | Error
    prover: str | None = None
    model: str | None = None
    elapsed: float = 0.0
    verdicts: dict[str, ProverVerdict] = field(default_factory=dict)


def default_configs(timeout: float = 5.0, max_domain: int = 4) -> list[ProverConfig]:
    """The built-in portfolio: saturation prover plus model finder."""
    return [
        ProverConfig("resolution", INTERNAL_RESOLUTION, timeout=timeout),
        ProverConfig("modelfinder", INTERNAL_MODEL_FINDER, timeout=timeout,
                     max_domain=max_domain),
    ]


def detect_external_configs(timeout: float = 5.0) -> list[ProverConfig]:
    """Configs for well-known SZS provers present on PATH."""
    out = []
    if shutil.which("eprover"):
        out.append(ProverConfig(
            "eprover", EXTERNAL,
            "eprover --auto --silent --szs-results --cpu-limit={timeout} {file}",
            timeout=timeout,
        ))
    if shutil.which("vampire"):
        out.append(ProverConfig(
            "vampire", EXTERNAL, "vampire --mode casc -t {timeout} {file}",
            timeout=timeout,
        ))
    return out


def run_prover(
    cfg: ProverConfig,
    ob: Obligation,
    problem_text: str,
    cancel: threading.Event | None = None,
    external_semaphore: threading.Semaphore | None = None,
) -> ProverVerdict:
    """Run one portfolio member on one obligation."""
    start = time.monotonic()
    axioms = [g for _, g in ob.axioms]
    if cfg.kind == INTERNAL_RESOLUTION:
        status = resolution_prove(
            axioms,
            ob.conjecture,
            ResolutionLimits(max_seconds=cfg.timeout, max_clauses=cfg.max_clauses),
            cancel,
        )
        return ProverVerdict(status, None, time.monotonic() - start)
    if cfg.kind == INTERNAL_MODEL_FINDER:
        model = find_model(
            axioms, ob.conjecture, cfg.max_domain, cfg.timeout, cancel
        )
        elapsed = time.monotonic() - start
        if model is None:
            return ProverVerdict(UNKNOWN, None, elapsed)
        return ProverVerdict(COUNTER_SATISFIABLE, model.render(), elapsed)
    if external_semaphore is not None:
        with external_semaphore:
            return run_external(cfg, problem_text, cancel)
    return run_external(cfg, problem_text, cancel)


def portfolio(
    ob: Obligation,
    cfgs: list[ProverConfig],
    problem_text: str | None = None,
    external_semaphore: threading.Semaphore | None = None,
) -> ObligationResult:
    """Launch every configured prover on `ob`; first decisive answer wins."""
    if not cfgs:
        raise ValueError("portfolio needs at least one prover config")
    if problem_text is None:
        problem_text = emit(ob).text()
    start = time.monotonic()
    cancel = threading.Event()
    verdicts: dict[str, ProverVerdict] = {}

    with ThreadPoolExecutor(max_workers=len(cfgs)) as pool:
        futures = {
            pool.submit(
                run_prover, cfg, ob, problem_text, cancel, external_semaphore
            ): cfg
            for cfg in cfgs
        }
        pending = set(futures)
        while pending:
            done, pending = wait(pending, return_when=FIRST_COMPLETED)
            for fut in done:
                cfg = futures[fut]
                try:
                    verdicts[cfg.name] = fut.result()
                except Exception as exc:  # prover bug: report, don't abort
                    verdicts[cfg.name] = ProverVerdict(ERROR, None, 0.0, repr(exc))
            if any(v.status in _DECISIVE for v in verdicts.values()):
                cancel.set()
    return _combine(cfgs, verdicts, time.monotonic() - start)


def _combine(
    cfgs: list[ProverConfig],
    verdicts: dict[str, ProverVerdict],
    elapsed: float,
) -> ObligationResult:
    """Pure function of the verdict set; ties broken by configuration order."""
    proving = [c.name for c in cfgs if verdicts.get(c.name, _NONE).status == THEOREM]
    refuting = [
        c.name
        for c in cfgs
        if verdicts.get(c.name, _NONE).status in (COUNTER_SATISFIABLE, SATISFIABLE)
    ]
    if proving and refuting:
        # sound provers cannot disagree; surface both outputs via `verdicts`
        return ObligationResult(ERROR, None, None, elapsed, verdicts)
    if proving:
        return ObligationResult(PROVED, proving[0], None, elapsed, verdicts)
    if refuting:
        name = refuting[0]
        return ObligationResult(REFUTED, name, verdicts[name].model, elapsed, verdicts)
    return ObligationResult(UNKNOWN, None, None, elapsed, verdicts)


_NONE = ProverVerdict(UNKNOWN)
