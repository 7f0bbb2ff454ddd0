"""Command-line front end for batch verification and debugging."""

from __future__ import annotations

import argparse
import json
import os
import sys
from importlib import resources
from pathlib import Path

from .provers import (
    EXTERNAL,
    ProverConfig,
    default_configs,
    detect_external_configs,
)
from .verifier import (
    PARSE_ERROR,
    PROVED,
    REFUTED,
    VerifyOptions,
    status_color,
    verify_text,
)

ENV_LIB = "ELFE_LIB"

_ANSI = {"green": "\x1b[32m", "orange": "\x1b[33m", "red": "\x1b[31m"}
_RESET = "\x1b[0m"


def packaged_lib_dir() -> Path:
    return Path(str(resources.files("elfe") / "lib"))


def library_search_path(extra: list[str]) -> tuple[Path, ...]:
    """--lib dirs, then $ELFE_LIB entries, then ./lib, then the packaged
    libraries."""
    dirs: list[Path] = [Path(d) for d in extra]
    env = os.environ.get(ENV_LIB)
    if env:
        dirs.extend(Path(d) for d in env.split(os.pathsep) if d)
    dirs.append(Path("lib"))
    dirs.append(packaged_lib_dir())
    return tuple(d for d in dirs if d.is_dir())


def load_prover_configs(path: str | None, timeout: float, max_domain: int) -> list[ProverConfig]:
    """Built-in portfolio plus detected/configured external provers."""
    configs = default_configs(timeout, max_domain)
    if path is None:
        configs.extend(detect_external_configs(timeout))
        return configs
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    for entry in raw:
        configs.append(
            ProverConfig(
                name=entry["name"],
                kind=entry.get("kind", EXTERNAL),
                command=entry.get("command", ""),
                timeout=float(entry.get("timeout", timeout)),
                max_domain=int(entry.get("maxDomain", max_domain)),
            )
        )
    return configs


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="elfe",
        description="Verify proofs written in the controlled mathematical language.",
    )
    p.add_argument("input", help="source file (.elfe), or '-' for stdin")
    p.add_argument("--lib", action="append", default=[], metavar="DIR",
                   help="library search directory (repeatable)")
    p.add_argument("--provers", metavar="NAMES",
                   help="comma-separated subset of configured provers")
    p.add_argument("--config", metavar="FILE",
                   help="JSON prover configuration file")
    p.add_argument("--timeout", type=float, default=5.0, metavar="SECONDS",
                   help="per-prover time limit per obligation (default 5)")
    p.add_argument("--max-domain", type=int, default=4, metavar="N",
                   help="model finder domain bound (default 4)")
    p.add_argument("--emit-tptp", metavar="DIR",
                   help="write each obligation as DIR/<id>.p")
    p.add_argument("--json", action="store_true", help="machine-readable report")
    p.add_argument("--verbose", action="store_true",
                   help="show obligations and prover details")
    p.add_argument("--color", choices=["auto", "always", "never"], default="auto")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)

    if args.input == "-":
        text = sys.stdin.read()
    else:
        try:
            text = Path(args.input).read_text(encoding="utf-8")
        except OSError as exc:
            print(f"elfe: cannot read {args.input}: {exc}", file=sys.stderr)
            return 2

    try:
        configs = load_prover_configs(args.config, args.timeout, args.max_domain)
    except (OSError, ValueError, KeyError) as exc:
        print(f"elfe: bad prover config: {exc}", file=sys.stderr)
        return 2

    if args.provers:
        wanted = [n.strip() for n in args.provers.split(",") if n.strip()]
        known = {c.name for c in configs}
        unknown = [n for n in wanted if n not in known]
        if unknown:
            print(
                f"elfe: unknown prover(s): {', '.join(unknown)} "
                f"(configured: {', '.join(sorted(known))})",
                file=sys.stderr,
            )
            return 2
        configs = [c for c in configs if c.name in wanted]

    options = VerifyOptions(
        lib_path=library_search_path(args.lib),
        prover_configs=configs,
        timeout=args.timeout,
        max_domain=args.max_domain,
        emit_dir=args.emit_tptp,
    )
    report = verify_text(text, options)

    if args.json:
        print(report.text())
    else:
        use_color = args.color == "always" or (
            args.color == "auto" and sys.stdout.isatty()
        )
        print(render_report(report, text, verbose=args.verbose, color=use_color))

    if any(e.status == PARSE_ERROR for e in report.statements):
        return 2
    return 0 if report.verified else 1


def render_report(report, source: str, verbose: bool = False, color: bool = False) -> str:
    def paint(s: str, c: str) -> str:
        return f"{_ANSI[c]}{s}{_RESET}" if color else s

    lines = source.splitlines()
    out = []
    for e in report.statements:
        col = status_color(e.status, verbose and e.tptp is not None)
        where = f"{e.span.start_line:>4}" if e.span else "   ?"
        label = e.status
        if e.status == PROVED and e.prover:
            label = f"{e.status} [{e.prover}, {e.ms:.0f} ms]"
        snippet = ""
        if e.span and 0 < e.span.start_line <= len(lines):
            snippet = lines[e.span.start_line - 1].strip()
        out.append(paint(f"{where}  {label:<32} {snippet}", col))
        if e.status == PARSE_ERROR and e.message:
            out.append(paint(f"      {e.message}", "red"))
        if e.status == REFUTED and e.model:
            out.append(paint("      countermodel:", "red"))
            out.extend(paint(f"        {ln}", "red") for ln in e.model.splitlines())
        if verbose and e.tptp:
            out.extend(f"        {ln}" for ln in e.tptp.splitlines())
    overall = "verified" if report.verified else "NOT verified"
    out.append(
        paint(
            f"=> {overall} ({report.elapsed_ms:.0f} ms)",
            "green" if report.verified else "red",
        )
    )
    return "\n".join(out)


if __name__ == "__main__":
    sys.exit(main())
