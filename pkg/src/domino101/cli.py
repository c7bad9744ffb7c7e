"""Command-line entry point.

Subcommands: ``serve`` (host rooms over TCP/WebSocket), ``sim`` (headless
AI tournaments), ``replay`` (room-log timeline and validation), and
``dealspace`` (the deal-count identity).  Exit codes: 0 success,
1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import asyncio
import math
import sys
from pathlib import Path

from .policies import AiLevel
from .protocol import TCP_PORT, WS_PORT
from .replay import timeline, validate_log
from .rules import PASS_MODES, STRICT, deal_space_count
from .seeding import RNG_NAME
from .server import (
    MOVE_TIMEOUT_FLOOR_MS,
    RoomConfig,
    ServerConfig,
    serve_forever,
)
from .simulate import parse_seats, run_series, seats_string

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2


def _seats_arg(spec: str):
    try:
        return parse_seats(spec)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _level_arg(value: str) -> AiLevel:
    try:
        return AiLevel(value.strip().lower())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad AI level {value!r} (use l1..l4)")


def _timeout_arg(value: str) -> int:
    try:
        ms = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad timeout {value!r}")
    if ms < MOVE_TIMEOUT_FLOOR_MS:
        raise argparse.ArgumentTypeError(
            f"move timeout {ms} ms is below the {MOVE_TIMEOUT_FLOOR_MS} ms floor"
        )
    return ms


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="domino101",
        description="Partnership 101 dominoes: server, AI tournaments, "
                    "log replay.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("sim", help="run headless AI-vs-AI matches")
    p_sim.add_argument(
        "--seats", type=_seats_arg, default="l1,l1,l1,l1",
        help="AI level per seat, A,B,C,D order (e.g. l4,l1,l4,l1)",
    )
    budget = p_sim.add_mutually_exclusive_group(required=True)
    budget.add_argument("--rounds", type=int, help="minimum rounds to play")
    budget.add_argument("--matches", type=int, help="exact matches to play")
    p_sim.add_argument("--seed", type=int, default=0, help="root seed")
    p_sim.add_argument("--out", type=Path, help="write the report here "
                                                "(default: stdout)")
    p_sim.add_argument(
        "--format", choices=("csv", "json"), default="csv",
        help="report format",
    )
    p_sim.add_argument(
        "--pass-mode", choices=PASS_MODES, default=STRICT,
        help="strict rejects false passes; forfeit scores them",
    )
    p_sim.add_argument(
        "--workers", type=int, default=1,
        help="parallel worker processes (results are identical at any count)",
    )

    p_replay = sub.add_parser("replay", help="inspect or validate a room log")
    p_replay.add_argument("log", type=Path, help="JSONL room log")
    p_replay.add_argument(
        "--validate", action="store_true",
        help="print only the validation verdict",
    )

    sub.add_parser("dealspace", help="print the exact deal-count identity")

    p_serve = sub.add_parser("serve", help="host rooms over TCP and WebSocket")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=TCP_PORT,
                         help="TCP port (line-delimited JSON)")
    p_serve.add_argument("--ws-port", type=int, default=WS_PORT,
                         help="WebSocket port (path /ws)")
    p_serve.add_argument("--ai-fill", type=_level_arg, default=AiLevel.L1,
                         help="AI level for unfilled seats (l1..l4)")
    p_serve.add_argument("--move-timeout", type=_timeout_arg, default=60_000,
                         help="per-move deadline in ms (floor 1000)")
    p_serve.add_argument("--pass-mode", choices=PASS_MODES, default=STRICT)
    p_serve.add_argument("--seed", type=int, default=None,
                         help="room seed (default: fresh entropy)")
    p_serve.add_argument("--log-dir", default=None,
                         help="room log directory (default: logs/, or "
                              "DOMINO_LOG_DIR)")
    p_serve.add_argument("--expected-humans", type=int, default=1,
                         help="human seats to wait for before AI fill (0-4)")
    return parser


def cmd_sim(args) -> int:
    if (args.rounds is not None and args.rounds <= 0) or (
        args.matches is not None and args.matches <= 0
    ):
        print("sim: the round/match budget must be positive", file=sys.stderr)
        return EXIT_USAGE
    if args.workers < 1:
        print("sim: --workers must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    report = run_series(
        args.seats,
        args.seed,
        rounds=args.rounds,
        matches=args.matches,
        pass_mode=args.pass_mode,
        workers=args.workers,
    )
    text = report.to_json() if args.format == "json" else report.to_csv()
    if args.out:
        args.out.write_text(text, encoding="utf-8")
        print(
            f"{seats_string(args.seats)}: {report.matches} matches, "
            f"{report.rounds} rounds -> {args.out}"
        )
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_replay(args) -> int:
    if not args.log.exists():
        print(f"replay: no such log: {args.log}", file=sys.stderr)
        return EXIT_RUNTIME
    if args.validate:
        report = validate_log(args.log)
        print(report.verdict)
        return EXIT_OK if report.ok else EXIT_RUNTIME
    lines, report = timeline(args.log)
    for line in lines:
        print(line)
    print(report.verdict)
    return EXIT_OK if report.ok else EXIT_RUNTIME


def cmd_dealspace(_args) -> int:
    c28 = math.comb(28, 7)
    c21 = math.comb(21, 7)
    c14 = math.comb(14, 7)
    product = c28 * c21 * c14
    assert product == deal_space_count()
    print(f"C(28,7) = {c28:,}")
    print(f"C(21,7) = {c21:,}")
    print(f"C(14,7) = {c14:,}")
    print(f"deals   = {product:,}")
    return EXIT_OK


def cmd_serve(args) -> int:
    if not 0 <= args.expected_humans <= 4:
        print("serve: --expected-humans must be 0-4", file=sys.stderr)
        return EXIT_USAGE
    room = RoomConfig(
        move_timeout_ms=args.move_timeout,
        pass_mode=args.pass_mode,
        ai_fill_level=args.ai_fill,
        seed=args.seed,
        log_dir=args.log_dir,
        expected_humans=args.expected_humans,
    )
    config = ServerConfig(
        host=args.host, tcp_port=args.port, ws_port=args.ws_port, room=room
    )
    print(
        f"domino101 server on tcp://{args.host}:{args.port} and "
        f"ws://{args.host}:{args.ws_port}/ws  (rng {RNG_NAME})",
        flush=True,
    )
    try:
        asyncio.run(serve_forever(config))
    except OSError as exc:
        print(f"serve: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except KeyboardInterrupt:
        print("serve: interrupted; logs flushed")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "sim": cmd_sim,
        "replay": cmd_replay,
        "dealspace": cmd_dealspace,
        "serve": cmd_serve,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    raise SystemExit(main())
