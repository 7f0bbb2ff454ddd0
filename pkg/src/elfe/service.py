"""HTTP API exposing verification to the browser editor and other clients.

Stateless: every request runs its own pipeline; a global semaphore bounds
concurrent verifications (503 when saturated) and a second one throttles
external prover processes.  The built front-end is served from a static
directory with single-page-app fallback.
"""

from __future__ import annotations

import argparse
import os
import threading
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import HTMLResponse, JSONResponse, Response

from .cli import ENV_LIB, library_search_path, load_prover_configs, packaged_lib_dir
from .verifier import VerifyOptions, verify_text

MAX_TEXT_BYTES = 64 * 1024

_FALLBACK_PAGE = """<!doctype html>
<html><head><meta charset="utf-8"><title>elfe</title></head>
<body><h1>elfe verification service</h1>
<p>The front-end build was not found. POST JSON to <code>/api/verify</code>
with <code>{"text": "..."}</code>, or build the editor under
<code>frontend/</code>.</p></body></html>
"""

_MEDIA_TYPES = {
    ".html": "text/html",
    ".js": "text/javascript",
    ".mjs": "text/javascript",
    ".css": "text/css",
    ".json": "application/json",
    ".svg": "image/svg+xml",
    ".png": "image/png",
    ".ico": "image/x-icon",
    ".map": "application/json",
}


class ServiceSettings:
    def __init__(
        self,
        lib_dirs: tuple[Path, ...] | None = None,
        prover_config: str | None = None,
        timeout: float = 5.0,
        max_domain: int = 4,
        max_concurrent: int = 2,
        max_external: int = 4,
        static_dir: str | Path | None = None,
    ):
        self.lib_dirs = lib_dirs if lib_dirs is not None else library_search_path([])
        self.prover_config = prover_config
        self.timeout = timeout
        self.max_domain = max_domain
        self.max_concurrent = max_concurrent
        self.static_dir = Path(static_dir) if static_dir else _default_static_dir()
        self.verify_slots = threading.BoundedSemaphore(max_concurrent)
        self.external_slots = threading.BoundedSemaphore(max_external)


def _default_static_dir() -> Path | None:
    env = os.environ.get("ELFE_STATIC")
    if env:
        return Path(env)
    candidate = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    return candidate


def create_app(settings: ServiceSettings | None = None) -> FastAPI:
    settings = settings or ServiceSettings()
    app = FastAPI(title="elfe verification service")

    @app.post("/api/verify")
    def verify(payload: dict, request: Request) -> Response:
        text = payload.get("text")
        if not isinstance(text, str):
            return JSONResponse({"error": "missing 'text' field"}, status_code=400)
        if len(text.encode("utf-8")) > MAX_TEXT_BYTES:
            return JSONResponse({"error": "text too large"}, status_code=400)
        raw_options = payload.get("options") or {}
        timeout = float(raw_options.get("timeout", settings.timeout))
        timeout = max(0.1, min(timeout, 120.0))
        configs = load_prover_configs(
            settings.prover_config, timeout, settings.max_domain
        )
        provers = raw_options.get("provers")
        if provers:
            known = {c.name for c in configs}
            unknown = [n for n in provers if n not in known]
            if unknown:
                return JSONResponse(
                    {"error": f"unknown provers: {', '.join(unknown)}"},
                    status_code=400,
                )
            configs = [c for c in configs if c.name in provers]
        if not settings.verify_slots.acquire(blocking=False):
            return JSONResponse({"error": "at capacity"}, status_code=503)
        try:
            report = verify_text(
                text,
                VerifyOptions(
                    lib_path=settings.lib_dirs,
                    prover_configs=configs,
                    timeout=timeout,
                    max_domain=settings.max_domain,
                    external_semaphore=settings.external_slots,
                ),
            )
        finally:
            settings.verify_slots.release()
        return JSONResponse(report.to_json())

    @app.get("/api/libraries")
    def libraries() -> Response:
        out = []
        seen = set()
        for d in settings.lib_dirs:
            if not d.is_dir():
                continue
            for path in sorted(d.glob("*.elfe")):
                if path.stem in seen:
                    continue  # earlier directories shadow later ones
                seen.add(path.stem)
                out.append({"name": path.stem, "source": path.read_text(encoding="utf-8")})
        return JSONResponse(out)

    @app.get("/api/{rest:path}")
    def unknown_api(rest: str) -> Response:
        return JSONResponse({"error": "not found"}, status_code=404)

    @app.get("/{asset:path}")
    def static(asset: str) -> Response:
        root = settings.static_dir
        if root is not None and root.is_dir():
            target = (root / asset) if asset else (root / "index.html")
            try:
                resolved = target.resolve()
                resolved.relative_to(root.resolve())
            except (ValueError, OSError):
                return Response(status_code=404)
            if resolved.is_file():
                media = _MEDIA_TYPES.get(resolved.suffix, "application/octet-stream")
                return Response(resolved.read_bytes(), media_type=media)
            index = root / "index.html"
            if index.is_file():  # single-page app fallback
                return HTMLResponse(index.read_text(encoding="utf-8"))
        return HTMLResponse(_FALLBACK_PAGE)

    return app


def main(argv: list[str] | None = None) -> int:
    p = argparse.ArgumentParser(prog="elfe-serve",
                                description="Serve the verification API and editor.")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--lib", action="append", default=[], metavar="DIR")
    p.add_argument("--config", metavar="FILE", help="JSON prover configuration")
    p.add_argument("--timeout", type=float, default=5.0)
    p.add_argument("--max-domain", type=int, default=4)
    p.add_argument("--max-concurrent", type=int, default=2,
                   help="simultaneous verifications (default 2)")
    p.add_argument("--static", metavar="DIR", help="front-end build directory")
    args = p.parse_args(argv)

    settings = ServiceSettings(
        lib_dirs=library_search_path(args.lib),
        prover_config=args.config,
        timeout=args.timeout,
        max_domain=args.max_domain,
        max_concurrent=args.max_concurrent,
        static_dir=args.static,
    )
    import uvicorn

    uvicorn.run(create_app(settings), host=args.host, port=args.port)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
