"""CLI: run the adapter service."""

from __future__ import annotations

import argparse
import sys

from typofix_adapters.config import PORTS, AdapterConfig
from typofix_adapters.errors import StartupError
from typofix_adapters.registry import available_models
from typofix_adapters.service import serve


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="typofix-adapters",
        description="Serve model backends behind the typofix wire protocol.",
    )
    parser.add_argument("--config", help="JSON config file (AdapterConfig fields)")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8700)
    parser.add_argument("--device", default=None)
    for port in PORTS:
        parser.add_argument(
            f"--{port}", default=None, help=f"model for {port}: {available_models(port)}"
        )
    parser.add_argument("--list-models", action="store_true")
    args = parser.parse_args(argv)

    if args.list_models:
        for port in PORTS:
            print(f"{port}: {', '.join(available_models(port))}")
        return 0

    try:
        config = AdapterConfig.from_file(args.config) if args.config else AdapterConfig()
        overrides = {
            port: getattr(args, port) for port in PORTS if getattr(args, port) is not None
        }
        if args.device is not None:
            overrides["device"] = args.device
        if overrides:
            data = {**config.__dict__, **overrides}
            data.pop("ports", None)
            config = AdapterConfig(**data)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3

    try:
        print(f"typofix-adapters listening on http://{args.host}:{args.port}", flush=True)
        serve(config, host=args.host, port=args.port)
    except StartupError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        pass
    return 0


if __name__ == "__main__":
    sys.exit(main())
