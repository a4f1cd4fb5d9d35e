"""Thin command-line client.

Subcommands reconstruct/scan/fisher/mc load a JSON config, execute either
in-process (default) or against a running service (--server URL), and
write the CSV to --out or stdout. ``serve`` starts the FastAPI service.

Exit codes: 0 success, 2 configuration error, 3 numeric-domain error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import ConfigError, NumericDomainError
from .runner import COMMANDS, load_config, run_command

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phasetomo",
        description="Direct wave-function tomography as complex phase estimation",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--config", required=True, help="path to JSON run config")
        p.add_argument("--out", help="output CSV path (default: stdout)")
        p.add_argument("--seed", type=int, help="override the shot-plan seed")
        p.add_argument("--threads", type=int, help="override the worker count")
        p.add_argument("--server", help="run against a service at this base URL")
    serve = sub.add_parser("serve", help="start the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    return parser


def _apply_overrides(cfg, args):
    updates = {}
    if args.seed is not None:
        if cfg.shots is None:
            raise ConfigError("--seed given but the config has no 'shots' plan")
        updates["shots"] = cfg.shots.model_copy(update={"seed": args.seed})
    if args.threads is not None:
        updates["threads"] = args.threads
    return cfg.model_copy(update=updates) if updates else cfg


def _run_remote(server: str, command: str, cfg) -> str:
    import httpx

    url = server.rstrip("/") + f"/run/{command}"
    resp = httpx.post(url, json=cfg.model_dump(), timeout=600.0)
    if resp.status_code == 422:
        raise ConfigError(f"service rejected config: {resp.text}")
    if resp.status_code == 400:
        raise NumericDomainError(f"service reported: {resp.text}")
    resp.raise_for_status()
    return resp.text


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)

    if args.command == "serve":
        import uvicorn

        uvicorn.run("phasetomo.service:app", host=args.host, port=args.port)
        return EXIT_OK

    try:
        text = Path(args.config).read_text()
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        cfg = _apply_overrides(load_config(text), args)
        if args.server:
            csv = _run_remote(args.server, args.command, cfg)
        else:
            csv = run_command(args.command, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericDomainError as exc:
        print(f"numeric-domain error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

    if args.out:
        Path(args.out).write_text(csv)
    else:
        sys.stdout.write(csv)
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
