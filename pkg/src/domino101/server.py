"""Authoritative asyncio game host.

Humans connect over TCP (line-delimited JSON) or WebSocket (one envelope
per text frame); empty seats are filled with AI.  Each room runs a single
task that owns all game state and consumes a queue of connection events,
so every room observes one total order of events.  Every outbound event
is appended to a JSONL log before it is broadcast.
"""

from __future__ import annotations

import asyncio
import json
import os
import secrets
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

from .belief import observe, observed_event
from .errors import ProtocolError
from .policies import AiLevel, choose_move_l1, choose_starter
from .protocol import (
    ERR_MALFORMED,
    Envelope,
    SequenceSource,
    SequenceTracker,
    TCP_PORT,
    WS_PATH,
    WS_PORT,
    decode,
    encode,
    hand_to_wire,
    tile_to_wire,
    wire_to_tile,
)
from .rules import (
    DealVerdict,
    OUTCOME_CLOSED,
    OUTCOME_CLOSED_TIE,
    PASS,
    PASS_MODES,
    MatchState,
    Move,
    PassEvent,
    Play,
    RoundState,
    SAME_FACE_6_OR_7,
    STRICT,
    apply_move,
    deal,
    initial_starter,
    legal_moves,
    match_update,
    new_round,
    round_over,
    score_round,
    team_seats,
    validate_deal,
)
from .seeding import RNG_NAME, derived_rng
from .simulate import AiAgent
from .tiles import End, SEAT_ORDER, Seat, Tile, partner

DEFAULT_LOG_DIR = "logs"
MOVE_TIMEOUT_FLOOR_MS = 1000


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="milliseconds").replace(
        "+00:00", "Z"
    )


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------

@dataclass
class RoomConfig:
    """Per-room behaviour knobs.

    ``expected_humans`` is how many human players the room waits for
    before backfilling with AI and starting the match (0 means an
    AI-only room that starts immediately).
    """

    move_timeout_ms: int = 60_000
    pass_mode: str = STRICT
    ai_fill_level: AiLevel = AiLevel.L1
    seed: int | None = None
    log_dir: str | None = None
    expected_humans: int = 1
    reconnect_grace_ms: int = 30_000

    def __post_init__(self) -> None:
        if self.move_timeout_ms < MOVE_TIMEOUT_FLOOR_MS:
            raise ValueError(
                f"move_timeout_ms {self.move_timeout_ms} is below the "
                f"{MOVE_TIMEOUT_FLOOR_MS} ms floor"
            )
        if self.pass_mode not in PASS_MODES:
            raise ValueError(f"unknown pass mode: {self.pass_mode!r}")
        if not 0 <= self.expected_humans <= 4:
            raise ValueError("expected_humans must be between 0 and 4")

    def resolved_log_dir(self) -> Path:
        env = os.environ.get("DOMINO_LOG_DIR")
        return Path(self.log_dir or env or DEFAULT_LOG_DIR)


# ---------------------------------------------------------------------------
# Connections (transport neutral)
# ---------------------------------------------------------------------------

class Connection:
    """One client link: stamps outgoing seqs, tracks incoming ones."""

    def __init__(self) -> None:
        self.out_seq = SequenceSource()
        self.in_seq = SequenceTracker()
        self.closed = False

    async def send_raw(self, raw: bytes) -> None:  # pragma: no cover - abstract
        raise NotImplementedError

    async def recv_raw(self) -> bytes | None:  # pragma: no cover - abstract
        raise NotImplementedError

    def close(self) -> None:  # pragma: no cover - abstract
        raise NotImplementedError

    async def send(self, msg_type: str, data: dict[str, Any]) -> Envelope:
        env = Envelope(seq=self.out_seq.next(), type=msg_type, data=data)
        try:
            await self.send_raw(encode(env))
        except (ConnectionError, RuntimeError, OSError):
            self.closed = True
        return env


class TcpConnection(Connection):
    def __init__(self, reader: asyncio.StreamReader, writer: asyncio.StreamWriter):
        super().__init__()
        self.reader = reader
        self.writer = writer

    async def send_raw(self, raw: bytes) -> None:
        self.writer.write(raw)
        await self.writer.drain()

    async def recv_raw(self) -> bytes | None:
        try:
            line = await self.reader.readline()
        except (ConnectionError, asyncio.LimitOverrunError, ValueError):
            return None
        return line or None

    def close(self) -> None:
        self.closed = True
        try:
            self.writer.close()
        except RuntimeError:
            pass


class WsConnection(Connection):
    def __init__(self, websocket):
        super().__init__()
        self.websocket = websocket

    async def send_raw(self, raw: bytes) -> None:
        await self.websocket.send(raw.decode("utf-8").rstrip("\n"))

    async def recv_raw(self) -> bytes | None:
        try:
            frame = await self.websocket.recv()
        except Exception:
            return None
        if isinstance(frame, bytes):
            return frame + b"\n"
        return frame.encode("utf-8") + b"\n"

    def close(self) -> None:
        self.closed = True
        asyncio.ensure_future(self.websocket.close())


# ---------------------------------------------------------------------------
# Write-ahead room log
# ---------------------------------------------------------------------------

class RoomLog:
    """Append-only JSONL sink; one line per event, flushed immediately."""

    def __init__(self, log_dir: Path, room_id: str):
        self.dir = log_dir / room_id
        self.dir.mkdir(parents=True, exist_ok=True)
        stamp = datetime.now(timezone.utc).strftime("%Y%m%dT%H%M%S%fZ")
        self.path = self.dir / f"{stamp}.jsonl"
        self._fh = self.path.open("a", encoding="utf-8")
        self._seq = SequenceSource()

    def write(
        self,
        direction: str,
        seat: Seat | None,
        msg_type: str,
        data: dict[str, Any],
    ) -> None:
        record = {
            "ts": _utc_now(),
            "dir": direction,
            "seat": seat.value if seat else None,
            "v": 1,
            "seq": self._seq.next(),
            "type": msg_type,
            "data": data,
        }
        self._fh.write(json.dumps(record, ensure_ascii=False, separators=(",", ":")))
        self._fh.write("\n")
        self._fh.flush()

    def close(self) -> None:
        try:
            self._fh.close()
        except ValueError:
            pass


def update_scoreboard(log_dir: Path, room_id: str, final: MatchState) -> Path:
    """Merge one finished match into scoreboard.json (write-temp-rename)."""
    log_dir.mkdir(parents=True, exist_ok=True)
    path = log_dir / "scoreboard.json"
    board: dict[str, Any] = {}
    if path.exists():
        try:
            board = json.loads(path.read_text(encoding="utf-8"))
        except (json.JSONDecodeError, OSError):
            board = {}
    entry = board.setdefault(
        room_id, {"matches": 0, "wins": {"AC": 0, "BD": 0}}
    )
    entry["matches"] += 1
    if final.winner:
        entry["wins"][final.winner] += 1
    entry["last"] = {
        "AC": final.score_ac,
        "BD": final.score_bd,
        "ended": _utc_now(),
    }
    tmp = path.with_suffix(".json.tmp")
    tmp.write_text(json.dumps(board, indent=2, sort_keys=True), encoding="utf-8")
    tmp.replace(path)
    return path


# ---------------------------------------------------------------------------
# Seats
# ---------------------------------------------------------------------------

@dataclass
class SeatState:
    seat: Seat
    controller: str = "open"          # open | human | ai
    conn: Connection | None = None
    name: str = ""
    token: str = ""
    ai_level: AiLevel | None = None
    agent: AiAgent | None = None
    grace_deadline: float | None = None  # monotonic seconds; None = connected

    @property
    def is_ai(self) -> bool:
        return self.controller == "ai"

    @property
    def is_connected_human(self) -> bool:
        return self.controller == "human" and self.conn is not None


# ---------------------------------------------------------------------------
# Room
# ---------------------------------------------------------------------------

class Room:
    """One table: four seats, one match, one serialized event loop."""

    def __init__(self, room_id: str, config: RoomConfig):
        self.room_id = room_id
        self.config = config
        self.seed = (
            config.seed if config.seed is not None else secrets.randbits(48)
        )
        self.inbox: asyncio.Queue = asyncio.Queue()
        self.seats = {s: SeatState(s) for s in SEAT_ORDER}
        self.log = RoomLog(config.resolved_log_dir(), room_id)
        self.match = MatchState()
        self.state: RoundState | None = None
        self.round_hands0: dict[Seat, set[Tile]] = {}
        self.round_observed: list = []
        self.public_round_events: list[tuple[str, dict[str, Any]]] = []
        self.auto_rng = derived_rng(self.seed, "auto")
        self.task: asyncio.Task | None = None
        self.finished = asyncio.Event()

    # -- plumbing ----------------------------------------------------------

    def start(self) -> None:
        self.task = asyncio.create_task(self.run(), name=f"room-{self.room_id}")

    def post(self, item: tuple) -> None:
        self.inbox.put_nowait(item)

    def _seat_of(self, conn: Connection) -> SeatState | None:
        for ss in self.seats.values():
            if ss.conn is conn:
                return ss
        return None

    async def _send(
        self, ss: SeatState, msg_type: str, data: dict[str, Any], *, log: bool = True
    ) -> None:
        if log:
            self.log.write("out", ss.seat, msg_type, data)
        if ss.conn is not None:
            await ss.conn.send(msg_type, data)

    async def _broadcast(self, msg_type: str, data: dict[str, Any]) -> None:
        """Write-ahead log once, then fan out to all connected humans."""
        self.log.write("out", None, msg_type, data)
        for ss in self.seats.values():
            if ss.is_connected_human:
                await ss.conn.send(msg_type, data)

    def _sys(self, msg_type: str, data: dict[str, Any]) -> None:
        self.log.write("sys", None, msg_type, data)

    # -- seating -----------------------------------------------------------

    def _free_seat(self) -> SeatState | None:
        for s in SEAT_ORDER:
            if self.seats[s].controller == "open":
                return self.seats[s]
        return None

    def _seats_payload(self) -> dict[str, Any]:
        occupancy = {}
        ai_levels = {}
        for s in SEAT_ORDER:
            ss = self.seats[s]
            occupancy[s.value] = ss.controller
            if ss.is_ai and ss.ai_level:
                ai_levels[s.value] = ss.ai_level.value
        return {"occupancy": occupancy, "ai_levels": ai_levels}

    async def _handle_hello(self, conn: Connection, env: Envelope) -> SeatState | None:
        data = env.data
        name = data.get("name") or ""
        token = data.get("token")
        if token:
            for ss in self.seats.values():
                if ss.controller == "human" and ss.token == token:
                    old = ss.conn
                    if old is not None and old is not conn:
                        old.close()
                    ss.conn = conn
                    ss.grace_deadline = None
                    await self._send(
                        ss,
                        "welcome",
                        {"seat": ss.seat.value, "room_id": self.room_id,
                         "token": ss.token},
                    )
                    await self._broadcast("seats", self._seats_payload())
                    await self._resync(ss)
                    return ss
            await conn.send("error", {"code": "auth", "message": "unknown token"})
            conn.close()
            return None
        ss = self._free_seat()
        if ss is None:
            await conn.send("error", {"code": "full", "message": "no free seat"})
            conn.close()
            return None
        ss.controller = "human"
        ss.conn = conn
        ss.name = str(name)
        ss.token = secrets.token_hex(8)
        await self._send(
            ss,
            "welcome",
            {"seat": ss.seat.value, "room_id": self.room_id, "token": ss.token},
        )
        await self._broadcast("seats", self._seats_payload())
        return ss

    async def _resync(self, ss: SeatState) -> None:
        """Re-send the current round to a reconnected client: its original
        hand plus every public event so far, in order."""
        if self.state is None:
            return
        await self._send(
            ss,
            "deal",
            {"hand": hand_to_wire(self.round_hands0[ss.seat])},
            log=False,
        )
        for msg_type, data in self.public_round_events:
            await ss.conn.send(msg_type, data)

    def _fill_with_ai(self) -> None:
        for s in SEAT_ORDER:
            ss = self.seats[s]
            if ss.controller == "open":
                ss.controller = "ai"
                ss.ai_level = self.config.ai_fill_level
                ss.agent = AiAgent(
                    s, ss.ai_level, derived_rng(self.seed, "seat", s.value)
                )

    def _begin_grace(self, ss: SeatState) -> None:
        ss.conn = None
        ss.grace_deadline = (
            time.monotonic() + self.config.reconnect_grace_ms / 1000.0
        )
        self._sys("disconnect", {"seat": ss.seat.value})

    def _expire_graces(self) -> None:
        now = time.monotonic()
        for ss in self.seats.values():
            if (
                ss.controller == "human"
                and ss.conn is None
                and ss.grace_deadline is not None
                and now >= ss.grace_deadline
            ):
                self._ai_takeover(ss)

    def _ai_takeover(self, ss: SeatState) -> None:
        """Replace a departed human with an AI that has observed the
        whole round so far."""
        ss.controller = "ai"
        ss.grace_deadline = None
        ss.ai_level = self.config.ai_fill_level
        ss.agent = AiAgent(
            ss.seat,
            ss.ai_level,
            derived_rng(self.seed, "takeover", ss.seat.value),
        )
        if self.state is not None:
            ss.agent.start_round(self.round_hands0[ss.seat])
            if ss.agent.belief is not None:
                for obs in self.round_observed:
                    observe(ss.agent.belief, obs)
        self._sys("ai_takeover", {"seat": ss.seat.value,
                                  "level": ss.ai_level.value})

    def _next_grace_deadline(self) -> float | None:
        deadlines = [
            ss.grace_deadline
            for ss in self.seats.values()
            if ss.controller == "human" and ss.grace_deadline is not None
        ]
        return min(deadlines) if deadlines else None

    # -- inbox handling ----------------------------------------------------

    async def _dispatch_admin(self, item: tuple) -> None:
        """Handle joins, departures, pings, and out-of-turn traffic."""
        kind = item[0]
        if kind == "join":
            _, conn, env = item
            await self._handle_hello(conn, env)
        elif kind == "leave":
            _, conn = item
            ss = self._seat_of(conn)
            if ss is not None and ss.controller == "human":
                self._begin_grace(ss)
        elif kind == "msg":
            _, conn, env = item
            ss = self._seat_of(conn)
            if ss is None:
                await conn.send("error", {"code": "auth", "message": "not seated"})
                return
            if env.type == "ping":
                await ss.conn.send("pong", {})
            elif env.type == "hello":
                await ss.conn.send(
                    "invalid",
                    {"code": "state", "ref_seq": env.seq,
                     "message": "already seated"},
                )
            else:
                await ss.conn.send(
                    "invalid",
                    {"code": "turn", "ref_seq": env.seq,
                     "message": "not expecting that message now"},
                )

    def _accept(self, item: tuple) -> tuple:
        """Admit one inbox item: shutdown aborts the room; everything else
        is logged write-ahead and handed to the caller."""
        if item[0] == "shutdown":
            raise asyncio.CancelledError
        if item[0] in ("join", "msg"):
            conn, env = item[1], item[2]
            ss = self._seat_of(conn)
            self.log.write("in", ss.seat if ss else None, env.type, env.data)
        return item

    async def _wait_inbox(self, deadline: float | None, wake=None) -> tuple | None:
        """One inbox item, or None once ``deadline`` (monotonic) passes.

        ``wake()`` is re-checked whenever a grace period expires, so a
        caller waiting on a seat that just fell to AI control regains
        control immediately rather than at the move deadline.
        """
        while True:
            grace = self._next_grace_deadline()
            stops = [d for d in (deadline, grace) if d is not None]
            if not stops:
                return self._accept(await self.inbox.get())
            timeout = min(stops) - time.monotonic()
            if timeout <= 0:
                self._expire_graces()
                if wake is not None and wake():
                    return None
                if deadline is not None and time.monotonic() >= deadline:
                    return None
                continue
            try:
                item = await asyncio.wait_for(self.inbox.get(), timeout)
            except asyncio.TimeoutError:
                self._expire_graces()
                if wake is not None and wake():
                    return None
                if deadline is not None and time.monotonic() >= deadline:
                    return None
            else:
                return self._accept(item)

    # -- match flow --------------------------------------------------------

    async def run(self) -> None:
        try:
            await self._run_inner()
        except asyncio.CancelledError:
            raise
        except Exception as exc:  # an unrecoverable room error ends the match
            self._sys("room_error", {"message": f"{type(exc).__name__}: {exc}"})
            await self._broadcast(
                "match_end",
                {"scores": {"AC": self.match.score_ac, "BD": self.match.score_bd},
                 "error": True},
            )
        finally:
            self.log.close()
            for ss in self.seats.values():
                if ss.conn is not None:
                    ss.conn.close()
            self.finished.set()

    async def _run_inner(self) -> None:
        self._sys(
            "log_header",
            {
                "room_id": self.room_id,
                "seed": self.seed,
                "rng": RNG_NAME,
                "pass_mode": self.config.pass_mode,
                "ai_fill_level": self.config.ai_fill_level.value,
                "move_timeout_ms": self.config.move_timeout_ms,
                "expected_humans": self.config.expected_humans,
            },
        )
        while self._human_count() < self.config.expected_humans:
            item = await self._wait_inbox(None)
            if item is not None:
                await self._dispatch_admin(item)
        self._fill_with_ai()
        await self._broadcast("seats", self._seats_payload())
        await self._play_match()
        final = {"AC": self.match.score_ac, "BD": self.match.score_bd}
        await self._broadcast("match_end", {"scores": final})
        update_scoreboard(
            self.config.resolved_log_dir(), self.room_id, self.match
        )

    def _human_count(self) -> int:
        return sum(1 for ss in self.seats.values() if ss.controller == "human")

    async def _play_match(self) -> None:
        deal_rng = derived_rng(self.seed, "deal")
        while not self.match.over:
            hands, notices = self._deal_with_notices(deal_rng)
            for verdict, shown in notices:
                payload: dict[str, Any] = {
                    "reason": verdict.reason,
                    "seat": verdict.seat.value,
                }
                if shown is not None:
                    payload["shown_tiles"] = [tile_to_wire(t) for t in shown]
                await self._broadcast("redeal", payload)
            self.round_hands0 = {s: set(hands[s]) for s in SEAT_ORDER}
            self._sys(
                "round_hands",
                {
                    "round_index": self.match.round_index,
                    "hands": {
                        s.value: hand_to_wire(hands[s]) for s in SEAT_ORDER
                    },
                },
            )
            for ss in self.seats.values():
                if ss.is_ai and ss.agent is not None:
                    ss.agent.start_round(hands[ss.seat])
                elif ss.controller == "human":
                    await self._send(
                        ss, "deal", {"hand": hand_to_wire(hands[ss.seat])}
                    )
            starter = await self._determine_starter(hands)
            self.state = new_round(hands, starter, self.match.round_index)
            self.round_observed = []
            self.public_round_events = []
            await self._broadcast_round(
                "round_start",
                {
                    "starter": starter.value,
                    "round_index": self.match.round_index,
                    "scores": {
                        "AC": self.match.score_ac,
                        "BD": self.match.score_bd,
                    },
                },
            )
            await self._play_round()
            result = score_round(self.state)
            await self._broadcast_round(
                "round_end",
                {
                    "outcome": result.outcome,
                    "points": result.points,
                    "awarded_to": result.awarded_to,
                    "revealed_hands": {
                        s.value: hand_to_wire(result.revealed[s])
                        for s in SEAT_ORDER
                    },
                    "closed": result.outcome in (OUTCOME_CLOSED, OUTCOME_CLOSED_TIE),
                },
            )
            self.match = match_update(self.match, result)
            self.state = None

    async def _broadcast_round(self, msg_type: str, data: dict[str, Any]) -> None:
        self.public_round_events.append((msg_type, data))
        await self._broadcast(msg_type, data)

    @staticmethod
    def _deal_with_notices(
        rng,
    ) -> tuple[dict[Seat, set[Tile]], list[tuple[DealVerdict, list[Tile] | None]]]:
        """Deal until clean, keeping each redeal verdict together with the
        offending face's tiles (shown publicly for the six/seven rule)."""
        notices: list[tuple[DealVerdict, list[Tile] | None]] = []
        while True:
            hands = deal(rng)
            verdict = validate_deal(hands)
            if verdict.ok:
                return hands, notices
            shown = None
            if verdict.reason == SAME_FACE_6_OR_7:
                shown = sorted(
                    t for t in hands[verdict.seat] if t.has_pip(verdict.pip)
                )
            notices.append((verdict, shown))

    async def _determine_starter(self, hands: dict[Seat, set[Tile]]) -> Seat:
        if self.match.starter_right is None:
            return initial_starter(hands)
        team, anchor = self.match.starter_right
        a, b = team_seats(team)
        team_hands = {a: hands[a], b: hands[b]}
        chooser = None
        for candidate in (anchor, partner(anchor)):
            if self.seats[candidate].is_connected_human:
                chooser = self.seats[candidate]
                break
        if chooser is None:
            return choose_starter(team_hands)

        await self._send(chooser, "starter_prompt", {"team": team})
        deadline = time.monotonic() + self.config.move_timeout_ms / 1000.0
        while True:
            item = await self._wait_inbox(deadline)
            if item is None:
                self._sys("starter_default", {"team": team})
                return choose_starter(team_hands)
            if (
                item[0] == "msg"
                and self._seat_of(item[1]) is chooser
                and item[2].type == "choose_starter"
            ):
                env = item[2]
                try:
                    seat = Seat(env.data.get("seat"))
                except ValueError:
                    seat = None
                if seat in (a, b):
                    return seat
                await chooser.conn.send(
                    "invalid",
                    {"code": "bad_seat", "ref_seq": env.seq,
                     "message": f"seat must be one of {a.value}, {b.value}"},
                )
            else:
                await self._dispatch_admin(item)
                if not chooser.is_connected_human:
                    # the chooser left: fall back to the heuristic
                    return choose_starter(team_hands)

    async def _play_round(self) -> None:
        state = self.state
        while not round_over(state):
            await asyncio.sleep(0)  # let connection pumps run during AI streaks
            mover = state.to_move
            ends = state.chain.ends
            await self._broadcast_round(
                "turn",
                {
                    "seat": mover.value,
                    "ends": list(ends) if ends else None,
                    "deadline_ms": self.config.move_timeout_ms,
                },
            )
            move, auto = await self._obtain_move(mover)
            if auto:
                self._sys("auto_move", {"seat": mover.value, "reason": "timeout"})
            state_before = state
            state = apply_move(state, move, pass_mode=self.config.pass_mode)
            self.state = state
            event = state.history[-1]
            self.round_observed.append(observed_event(state_before, event))
            for ss in self.seats.values():
                if ss.is_ai and ss.agent is not None:
                    ss.agent.on_event(state_before, event)
            if isinstance(event, PassEvent):
                await self._broadcast_round("passed", {"seat": mover.value})
            else:
                new_ends = state.chain.ends
                await self._broadcast_round(
                    "played",
                    {
                        "seat": mover.value,
                        "tile": tile_to_wire(event.tile),
                        "end": event.end.value,
                        "new_ends": list(new_ends),
                    },
                )

    async def _obtain_move(self, mover: Seat) -> tuple[Move, bool]:
        """The mover's move: from its AI, its human, or the timeout rule."""
        self._expire_graces()
        ss = self.seats[mover]
        if ss.is_ai:
            return ss.agent.choose(self.state), False
        deadline = time.monotonic() + self.config.move_timeout_ms / 1000.0
        while True:
            item = await self._wait_inbox(
                deadline, wake=lambda: self.seats[mover].is_ai
            )
            ss = self.seats[mover]
            if ss.is_ai:
                # grace expired mid-wait and the seat was taken over
                return ss.agent.choose(self.state), False
            if item is None:
                return self._timeout_move(mover), True
            if (
                item[0] == "msg"
                and self._seat_of(item[1]) is ss
                and item[2].type in ("move", "pass")
            ):
                move = await self._validate_move(ss, item[2])
                if move is not None:
                    return move, False
            else:
                await self._dispatch_admin(item)

    def _timeout_move(self, mover: Seat) -> Move:
        return choose_move_l1(self.state, self.state.hands[mover], self.auto_rng)

    async def _validate_move(self, ss: SeatState, env: Envelope) -> Move | None:
        """Turn a move/pass envelope into a legal Move, or answer with
        invalid{} and return None."""
        legal = legal_moves(self.state, ss.seat)

        async def reject(code: str, message: str) -> None:
            await ss.conn.send(
                "invalid", {"code": code, "ref_seq": env.seq, "message": message}
            )

        if env.type == "pass":
            if not legal:
                return PASS
            if self.config.pass_mode != STRICT:
                return PASS  # forfeit mode scores the false pass
            await reject("illegal_pass", f"{legal[0].tile} is playable")
            return None
        try:
            t = wire_to_tile(env.data.get("tile"))
        except ProtocolError as exc:
            await reject("bad_tile", str(exc))
            return None
        end_raw = env.data.get("end")
        try:
            end = End(end_raw)
        except ValueError:
            await reject("bad_end", f"bad end: {end_raw!r}")
            return None
        move = Play(t, end)
        if move not in legal:
            await reject("illegal_move", f"{t} cannot go on the {end.value} end")
            return None
        return move


# ---------------------------------------------------------------------------
# Server
# ---------------------------------------------------------------------------

@dataclass
class ServerConfig:
    host: str = "127.0.0.1"
    tcp_port: int = TCP_PORT
    ws_port: int | None = WS_PORT
    room: RoomConfig = field(default_factory=RoomConfig)

    def __post_init__(self) -> None:
        for port in (self.tcp_port, self.ws_port):
            if port is not None and not 0 <= port <= 65535:
                raise ValueError(f"port {port} out of range")


class GameServer:
    """Accepts TCP and WebSocket clients and routes them into rooms."""

    def __init__(self, config: ServerConfig):
        self.config = config
        self.rooms: dict[str, Room] = {}
        self._tcp_server: asyncio.AbstractServer | None = None
        self._ws_server = None
        self.tcp_port: int | None = None
        self.ws_port: int | None = None

    # -- lifecycle ---------------------------------------------------------

    async def start(self) -> None:
        self._tcp_server = await asyncio.start_server(
            self._on_tcp,
            self.config.host,
            self.config.tcp_port,
            limit=64 * 1024,
        )
        self.tcp_port = self._tcp_server.sockets[0].getsockname()[1]
        if self.config.ws_port is not None:
            import websockets

            self._ws_server = await websockets.serve(
                self._on_ws, self.config.host, self.config.ws_port
            )
            for sock in self._ws_server.sockets:
                self.ws_port = sock.getsockname()[1]
                break

    async def stop(self) -> None:
        if self._tcp_server is not None:
            self._tcp_server.close()
            await self._tcp_server.wait_closed()
        if self._ws_server is not None:
            self._ws_server.close()
            await self._ws_server.wait_closed()
        for room in list(self.rooms.values()):
            if room.task is not None and not room.task.done():
                # in-band shutdown: plain cancellation can be swallowed by
                # the wait_for race when a queue item lands simultaneously
                room.post(("shutdown",))
                room.task.cancel()
                try:
                    await room.task
                except (asyncio.CancelledError, Exception):
                    pass
            room.log.close()

    def get_or_create_room(self, room_id: str) -> Room:
        room = self.rooms.get(room_id)
        if room is None or room.finished.is_set():
            room = Room(room_id, self.config.room)
            self.rooms[room_id] = room
            room.start()
        return room

    # -- connection pumps --------------------------------------------------

    async def _on_tcp(
        self, reader: asyncio.StreamReader, writer: asyncio.StreamWriter
    ) -> None:
        conn = TcpConnection(reader, writer)
        try:
            await self._pump(conn)
        finally:
            conn.close()
            try:
                await writer.wait_closed()
            except (ConnectionError, OSError):
                pass

    async def _on_ws(self, websocket, path: str | None = None) -> None:
        if path is None:
            path = getattr(getattr(websocket, "request", None), "path", WS_PATH)
        if path.split("?")[0] != WS_PATH:
            await websocket.close(code=4404, reason="unknown path")
            return
        conn = WsConnection(websocket)
        await self._pump(conn)

    async def _pump(self, conn: Connection) -> None:
        """Per-connection read loop: first a hello, then room traffic."""
        room: Room | None = None
        while not conn.closed:
            raw = await conn.recv_raw()
            if raw is None:
                break
            try:
                env = decode(raw)
                conn.in_seq.check(env.seq)
            except ProtocolError as exc:
                await conn.send(
                    "error", {"code": exc.code, "message": str(exc)}
                )
                if exc.code == ERR_MALFORMED:
                    continue
                break
            if room is None:
                if env.type != "hello":
                    await conn.send(
                        "error",
                        {"code": "state", "message": "hello must come first"},
                    )
                    continue
                room_id = str(env.data.get("room") or "main")
                room = self.get_or_create_room(room_id)
                room.post(("join", conn, env))
            else:
                room.post(("msg", conn, env))
        if room is not None:
            room.post(("leave", conn))


async def serve_forever(config: ServerConfig) -> None:
    """Run the server until cancelled (CLI entry)."""
    server = GameServer(config)
    await server.start()
    try:
        await asyncio.Event().wait()
    finally:
        await server.stop()
