from __future__ import annotations

"""
Schauder LDP command-line entrypoint.

Batch commands run through the Runner and print (or write) one report; `serve`
starts the localhost-only API server in the foreground.
"""

import sys
from pathlib import Path

from schauder_ldp.api.app import create_app
from schauder_ldp.engine.config import RunConfig, parse_config
from schauder_ldp.engine.runner import Runner
from schauder_ldp.errors import EXIT_OK, EXIT_RUNTIME, SchauderLDPError, exit_code_for


def run(argv: list[str] | None = None) -> int:
    args = sys.argv[1:] if argv is None else list(argv)
    try:
        cfg = parse_config(args)
    except SchauderLDPError as ex:
        print(f"error: {ex}", file=sys.stderr)
        return exit_code_for(ex)

    runner = Runner(log_path=Path(cfg.log_path) if cfg.log_path else None)
    if cfg.command == "serve":
        return _run_api_server(runner, cfg)

    result = runner.run(cfg)
    if result.exit_code != EXIT_OK:
        print(f"error: {result.message}", file=sys.stderr)
    return result.exit_code


def _run_api_server(runner: Runner, cfg: RunConfig) -> int:
    try:
        import uvicorn  # type: ignore
    except Exception:
        runner.log.log_error("api", "uvicorn is not installed; API server not started.")
        print("error: uvicorn is not installed", file=sys.stderr)
        return EXIT_RUNTIME

    app = create_app(runner)
    try:
        uvicorn.run(app, host=cfg.host, port=int(cfg.port), log_level="warning")
    except Exception as ex:
        runner.log.log_error("api", f"{type(ex).__name__}: {ex}")
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(run())
