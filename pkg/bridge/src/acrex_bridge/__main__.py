"""Entry point: python -m acrex_bridge --model <name> [--echo]"""

import argparse
import json
import logging
import os
import sys

from .serving import BridgeConfig, BridgeStartupError, serve


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="acrex_bridge",
        description="Serve a seq2seq model over a line-delimited JSON pipe.",
    )
    parser.add_argument(
        "--model",
        default="google/mt5-base",
        help="model name or local path (default: %(default)s)",
    )
    parser.add_argument(
        "--echo",
        action="store_true",
        help="answer every prompt with itself; loads no model",
    )
    parser.add_argument(
        "--max-new-tokens",
        type=int,
        default=64,
        help="generation length cap in tokens (default: %(default)s)",
    )
    parser.add_argument(
        "--num-beams",
        type=int,
        default=1,
        help="beam width; 1 means greedy (default: %(default)s)",
    )
    parser.add_argument(
        "--device",
        default="cpu",
        help="torch device hint, e.g. cpu or cuda (default: %(default)s)",
    )
    parser.add_argument(
        "--sentinel-map",
        metavar="PATH",
        help="JSON file mapping model-native sentinel strings to the "
        "plain <extra_id_N> forms",
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=getattr(logging, os.environ.get("ACREX_BRIDGE_LOG", "warning").upper(), logging.WARNING),
        format="%(name)s: %(message)s",
    )

    mapping = None
    if args.sentinel_map:
        try:
            with open(args.sentinel_map, encoding="utf-8") as handle:
                mapping = json.load(handle)
        except (OSError, json.JSONDecodeError) as exc:
            print(f"error: cannot read sentinel map: {exc}", file=sys.stderr)
            return 2
        if not isinstance(mapping, dict) or not all(
            isinstance(k, str) and isinstance(v, str) for k, v in mapping.items()
        ):
            print("error: sentinel map must be a string-to-string object", file=sys.stderr)
            return 2

    try:
        config = BridgeConfig(
            model=args.model,
            echo=args.echo,
            max_new_tokens=args.max_new_tokens,
            num_beams=args.num_beams,
            device=args.device,
            sentinel_map=mapping,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    try:
        return serve(config)
    except BridgeStartupError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
