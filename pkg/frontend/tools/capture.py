#!/usr/bin/env python3
"""Record real per-seat wire streams for the web client's test fixtures.

Starts the game server as a subprocess (the same ``domino101 serve``
command a deployment would run), seats four scripted players over the
public TCP endpoint, plays one full match with a trivial
first-legal-option policy, and writes every line each seat *received*,
verbatim, to test/fixtures/seat_<S>.jsonl.

The recorded streams carry the same JSON schema as the WebSocket
endpoint, so the browser model can be tested against genuine server
output without a live server in the loop.

Usage: python3 tools/capture.py [SEED]
"""

from __future__ import annotations

import json
import pathlib
import signal
import socket
import subprocess
import sys
import tempfile
import threading
import time

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "test" / "fixtures"
SEED = int(sys.argv[1]) if len(sys.argv) > 1 else 7207
ROOM = "capture"


def free_port() -> int:
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


class SeatScript:
    """One scripted player: greedy first-legal move, honest passes."""

    def __init__(self, name: str, port: int) -> None:
        self.sock = socket.create_connection(("127.0.0.1", port), timeout=30)
        self.rx = self.sock.makefile("r", encoding="utf-8", newline="\n")
        self.received: list[str] = []
        self.out_seq = 0
        self.seat: str | None = None
        self.hand: list[list[int]] = []
        self.ends: list[int] | None = None
        self.round_index = 0

    def send(self, msg_type: str, data: dict) -> None:
        self.out_seq += 1
        line = json.dumps(
            {"v": 1, "seq": self.out_seq, "type": msg_type, "data": data},
            separators=(",", ":"),
            ensure_ascii=False,
        )
        self.sock.sendall(line.encode("utf-8") + b"\n")

    def read(self) -> dict | None:
        line = self.rx.readline()
        if not line:
            return None
        self.received.append(line.rstrip("\n"))
        return json.loads(line)

    def legal(self) -> tuple[list[int], str] | None:
        if self.ends is None:
            if self.round_index == 1:
                return ([1, 1], "left") if [1, 1] in self.hand else None
            return (self.hand[0], "left") if self.hand else None
        left, right = self.ends
        for tile in self.hand:
            if left in tile:
                return tile, "left"
            if right in tile:
                return tile, "right"
        return None

    def react(self, msg: dict) -> bool:
        """Advance local state; True once the match is over."""
        data = msg["data"]
        kind = msg["type"]
        if kind == "welcome":
            self.seat = data["seat"]
        elif kind == "deal":
            self.hand = [list(t) for t in data["hand"]]
            self.ends = None
        elif kind == "round_start":
            self.round_index = data["round_index"]
        elif kind == "turn":
            self.ends = data["ends"]
            if data["seat"] == self.seat:
                choice = self.legal()
                if choice is None:
                    self.send("pass", {})
                else:
                    tile, end = choice
                    self.send("move", {"tile": tile, "end": end})
        elif kind == "played":
            if data["seat"] == self.seat:
                tile = list(data["tile"])
                self.hand.remove(tile if tile in self.hand else tile[::-1])
            self.ends = data["new_ends"]
        elif kind == "starter_prompt":
            self.send("choose_starter", {"seat": self.seat})
        elif kind == "match_end":
            return True
        return False

    def pump(self) -> None:
        """Read and react until match_end or EOF (run on its own thread:
        some messages go to a single seat, so seats cannot take turns
        reading without deadlocking on each other)."""
        while True:
            msg = self.read()
            if msg is None or self.react(msg):
                return

    def close(self) -> None:
        try:
            self.sock.close()
        except OSError:
            pass


def main() -> int:
    port, ws_port = free_port(), free_port()
    server = subprocess.Popen(
        [
            sys.executable, "-m", "domino101.cli", "serve",
            "--host", "127.0.0.1",
            "--port", str(port),
            "--ws-port", str(ws_port),
            "--seed", str(SEED),
            "--expected-humans", "4",
            "--log-dir", tempfile.mkdtemp(prefix="capture_logs_"),
        ],
        stdout=subprocess.PIPE,
        stderr=subprocess.STDOUT,
        text=True,
    )
    try:
        assert server.stdout is not None
        server.stdout.readline()  # wait for the ready banner

        players: list[SeatScript] = []
        for i in range(4):
            for attempt in range(50):
                try:
                    p = SeatScript(f"cap{i}", port)
                    break
                except OSError:
                    time.sleep(0.1)
            else:
                raise RuntimeError("server never accepted connections")
            p.send("hello", {"name": f"cap{i}", "room": ROOM})
            players.append(p)

        threads = [
            threading.Thread(target=p.pump, daemon=True) for p in players
        ]
        for t in threads:
            t.start()
        deadline = time.monotonic() + 120
        for t in threads:
            t.join(timeout=max(0.0, deadline - time.monotonic()))
            if t.is_alive():
                raise RuntimeError("match did not finish in time")

        FIXTURES.mkdir(parents=True, exist_ok=True)
        for p in players:
            path = FIXTURES / f"seat_{p.seat}.jsonl"
            path.write_text("\n".join(p.received) + "\n", encoding="utf-8")
            print(f"{path.name}: {len(p.received)} lines")
        for p in players:
            p.close()
        return 0
    finally:
        server.send_signal(signal.SIGINT)
        try:
            server.wait(timeout=10)
        except subprocess.TimeoutExpired:
            server.kill()


if __name__ == "__main__":
    raise SystemExit(main())
