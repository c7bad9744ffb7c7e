"""Start an in-process server, join it as a scripted human, and play a
full match against three AI seats — then validate the room's JSONL log
and show a timeline excerpt.

Everything the "human" knows comes off the wire: its own dealt hand plus
the public played/passed stream.  The script prints the first stretch of
wire traffic verbatim so the message shapes are easy to see.

Run:  python3 demos/serve_and_play.py
"""

from __future__ import annotations

import asyncio

from domino101.policies import AiLevel
from domino101.protocol import Envelope, SequenceSource, SequenceTracker, decode, encode
from domino101.replay import timeline, validate_log
from domino101.server import GameServer, RoomConfig, ServerConfig
from domino101.tiles import Seat, Tile

SHOW_LINES = 18


class WireClient:
    """Minimal scripted player: greedy legal move, pass otherwise."""

    def __init__(self, reader, writer):
        self.reader = reader
        self.writer = writer
        self.out_seq = SequenceSource()
        self.in_seq = SequenceTracker()
        self.seat: Seat | None = None
        self.hand: set[Tile] = set()
        self.ends: tuple[int, int] | None = None
        self.round_index = 0
        self.shown = 0

    async def send(self, msg_type, data):
        env = Envelope(seq=self.out_seq.next(), type=msg_type, data=data)
        raw = encode(env)
        self.show(">>", raw)
        self.writer.write(raw)
        await self.writer.drain()

    async def recv(self) -> Envelope:
        raw = await self.reader.readline()
        self.show("<<", raw)
        env = decode(raw)
        self.in_seq.check(env.seq)
        self.fold(env)
        return env

    def show(self, arrow, raw: bytes) -> None:
        if self.shown < SHOW_LINES:
            print(f"  {arrow} {raw.decode().rstrip()}")
            self.shown += 1
        elif self.shown == SHOW_LINES:
            print("  ... (truncating the live feed; the log has it all)")
            self.shown += 1

    def fold(self, env: Envelope) -> None:
        if env.type == "welcome":
            self.seat = Seat(env.data["seat"])
        elif env.type == "deal":
            self.hand = {Tile(*sorted(t)) for t in env.data["hand"]}
        elif env.type == "round_start":
            self.round_index = env.data["round_index"]
            self.ends = None
        elif env.type == "turn":
            ends = env.data["ends"]
            self.ends = tuple(ends) if ends else None
        elif env.type == "played":
            self.ends = tuple(env.data["new_ends"])
            if env.data["seat"] == self.seat.value:
                self.hand.discard(Tile(*sorted(env.data["tile"])))

    def pick(self):
        if self.ends is None:
            t = Tile(1, 1) if self.round_index == 1 else sorted(self.hand)[0]
            return "move", {"tile": [t.lo, t.hi], "end": "left"}
        left, right = self.ends
        for t in sorted(self.hand):
            if t.has_pip(left):
                return "move", {"tile": [t.lo, t.hi], "end": "left"}
            if t.has_pip(right):
                return "move", {"tile": [t.lo, t.hi], "end": "right"}
        return "pass", {}


async def play(log_dir: str):
    config = ServerConfig(
        host="127.0.0.1", tcp_port=0, ws_port=0,
        room=RoomConfig(seed=606, expected_humans=1,
                        ai_fill_level=AiLevel.L3, log_dir=log_dir),
    )
    server = GameServer(config)
    await server.start()
    print(f"server up on tcp port {server.tcp_port} "
          f"(ws would be on {server.ws_port})\n")
    try:
        reader, writer = await asyncio.open_connection("127.0.0.1", server.tcp_port)
        client = WireClient(reader, writer)
        await client.send("hello", {"name": "demo", "room": "main"})
        while True:
            env = await client.recv()
            if env.type == "match_end":
                print(f"\nmatch over: AC {env.data['scores']['AC']} - "
                      f"BD {env.data['scores']['BD']}")
                break
            if env.type == "turn" and env.data["seat"] == client.seat.value:
                msg_type, data = client.pick()
                await client.send(msg_type, data)
            elif env.type == "starter_prompt":
                await client.send("choose_starter", {"seat": client.seat.value})
        writer.close()
        return server.rooms["main"].log.path
    finally:
        await server.stop()


def main() -> None:
    import tempfile

    with tempfile.TemporaryDirectory() as td:
        path = asyncio.run(play(td))

        print("\n--- validating the room log ---")
        report = validate_log(path)
        print(f"{path.name}: {report.verdict}")

        lines, _ = timeline(path)
        print("\n--- timeline excerpt ---")
        for line in lines[:12]:
            print(line)
        print(f"... ({len(lines)} timeline lines total)")


if __name__ == "__main__":
    main()
