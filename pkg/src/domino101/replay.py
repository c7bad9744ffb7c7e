"""Room-log validation.

Reads a JSONL room log and re-derives the match from it: every logged
play is checked for legality against a reconstructed round state, every
logged score against an independent rescoring.  The validator answers
with a one-line verdict; any divergence is reported with the 1-based
line number of the offending record.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import DataError, ProtocolError
from .protocol import wire_to_tile
from .rules import (
    IllegalMove,
    IllegalPass,
    MatchState,
    PASS,
    PASS_MODES,
    Play,
    RoundState,
    STRICT,
    StateError,
    TurnError,
    apply_move,
    initial_starter,
    legal_moves,
    match_update,
    new_round,
    score_round,
    validate_deal,
)
from .tiles import End, SEAT_ORDER, Seat, Tile

_RECORD_KEYS = {"ts", "dir", "seat", "v", "seq", "type", "data"}
_DIRECTIONS = {"in", "out", "sys"}


class LogError(Exception):
    """A room log failed validation."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.reason = message


@dataclass(frozen=True)
class ReplayReport:
    """Outcome of validating one room log."""

    ok: bool
    events: int
    final: tuple[int, int] | None  # (AC, BD) when the match completed
    truncated: bool
    error_line: int | None = None
    error: str | None = None

    @property
    def verdict(self) -> str:
        if not self.ok:
            return f"line {self.error_line}: {self.error}"
        if self.final is not None and not self.truncated:
            return (
                f"OK, {self.events} events, "
                f"final score {self.final[0]}:{self.final[1]}"
            )
        return f"OK (truncated), {self.events} events, no final score"


def _wire_hand(raw, line: int) -> set[Tile]:
    if not isinstance(raw, list):
        raise LogError(line, "hand is not a list")
    try:
        hand = {wire_to_tile(t) for t in raw}
    except ProtocolError as exc:
        raise LogError(line, str(exc))
    if len(hand) != len(raw):
        raise LogError(line, "hand contains duplicate tiles")
    return hand


def _need(data: dict, key: str, line: int):
    if key not in data:
        raise LogError(line, f"missing field {key!r}")
    return data[key]


def _seat(data: dict, line: int, key: str = "seat") -> Seat:
    raw = _need(data, key, line)
    try:
        return Seat(raw)
    except ValueError:
        raise LogError(line, f"bad seat {raw!r}")


class _Replayer:
    """Folds log records in order, holding the reconstructed game."""

    def __init__(self) -> None:
        self.pass_mode = STRICT
        self.match = MatchState()
        self.pending_hands: dict[Seat, set[Tile]] | None = None
        self.state: RoundState | None = None
        self.first_round_seen = False
        self.final: tuple[int, int] | None = None

    # Each handler validates one record type against the reconstruction.

    def log_header(self, data: dict, line: int) -> None:
        mode = data.get("pass_mode", STRICT)
        if mode not in PASS_MODES:
            raise LogError(line, f"unknown pass mode {mode!r}")
        self.pass_mode = mode

    def round_hands(self, data: dict, line: int) -> None:
        raw = _need(data, "hands", line)
        if not isinstance(raw, dict) or set(raw) != {s.value for s in SEAT_ORDER}:
            raise LogError(line, "hands must map all four seats")
        hands = {Seat(k): _wire_hand(v, line) for k, v in raw.items()}
        try:
            verdict = validate_deal(hands)
        except DataError as exc:
            raise LogError(line, str(exc))
        if not verdict.ok:
            raise LogError(line, f"logged deal is a redeal hand: {verdict.reason}")
        self.pending_hands = hands

    def deal(self, data: dict, line: int, seat_field: Seat | None) -> None:
        hand = _wire_hand(_need(data, "hand", line), line)
        if self.pending_hands is not None and seat_field is not None:
            if hand != self.pending_hands[seat_field]:
                raise LogError(line, f"dealt hand for {seat_field} does not "
                                     "match the logged deal")

    def round_start(self, data: dict, line: int) -> None:
        if self.pending_hands is None:
            raise LogError(line, "round_start without a logged deal")
        starter = _seat(data, line, "starter")
        round_index = _need(data, "round_index", line)
        if round_index != self.match.round_index:
            raise LogError(
                line,
                f"round_index {round_index} but match is at "
                f"{self.match.round_index}",
            )
        if round_index == 1 and starter is not initial_starter(self.pending_hands):
            raise LogError(line, "round 1 starter does not hold the 1-1 tile")
        self.state = new_round(self.pending_hands, starter, round_index)
        self.pending_hands = None

    def turn(self, data: dict, line: int) -> None:
        if self.state is None:
            raise LogError(line, "turn outside a round")
        seat = _seat(data, line)
        if seat is not self.state.to_move:
            raise LogError(
                line, f"turn names {seat} but {self.state.to_move} is to move"
            )
        ends = data.get("ends")
        actual = self.state.chain.ends
        expected = list(actual) if actual else None
        if ends != expected:
            raise LogError(line, f"turn ends {ends} do not match {expected}")

    def played(self, data: dict, line: int) -> None:
        if self.state is None:
            raise LogError(line, "played outside a round")
        seat = _seat(data, line)
        try:
            tile = wire_to_tile(_need(data, "tile", line))
        except ProtocolError as exc:
            raise LogError(line, str(exc))
        try:
            end = End(_need(data, "end", line))
        except ValueError:
            raise LogError(line, f"bad end {data.get('end')!r}")
        move = Play(tile, end)
        try:
            if move not in legal_moves(self.state, seat):
                raise LogError(line, f"illegal play {tile} on the {end.value} end")
            self.state = apply_move(
                self.state, move, seat=seat, pass_mode=self.pass_mode
            )
        except (IllegalMove, TurnError, StateError) as exc:
            raise LogError(line, str(exc))
        new_ends = _need(data, "new_ends", line)
        actual = list(self.state.chain.ends)
        if new_ends != actual:
            raise LogError(line, f"new_ends {new_ends} do not match {actual}")

    def passed(self, data: dict, line: int) -> None:
        if self.state is None:
            raise LogError(line, "passed outside a round")
        seat = _seat(data, line)
        try:
            self.state = apply_move(
                self.state, PASS, seat=seat, pass_mode=self.pass_mode
            )
        except (IllegalPass, TurnError, StateError) as exc:
            raise LogError(line, str(exc))

    def round_end(self, data: dict, line: int) -> None:
        if self.state is None:
            raise LogError(line, "round_end outside a round")
        try:
            result = score_round(self.state)
        except StateError as exc:
            raise LogError(line, str(exc))
        for key, expected in (
            ("outcome", result.outcome),
            ("points", result.points),
            ("awarded_to", result.awarded_to),
        ):
            if _need(data, key, line) != expected:
                raise LogError(
                    line,
                    f"{key} {data[key]!r} disagrees with rescoring "
                    f"({expected!r})",
                )
        revealed = _need(data, "revealed_hands", line)
        if not isinstance(revealed, dict):
            raise LogError(line, "revealed_hands is not an object")
        for seat in SEAT_ORDER:
            shown = _wire_hand(revealed.get(seat.value, []), line)
            if shown != set(result.revealed[seat]):
                raise LogError(
                    line, f"revealed hand for {seat} does not match replay"
                )
        self.match = match_update(self.match, result)
        self.state = None

    def match_end(self, data: dict, line: int) -> None:
        scores = _need(data, "scores", line)
        if not isinstance(scores, dict):
            raise LogError(line, "scores is not an object")
        expected = {"AC": self.match.score_ac, "BD": self.match.score_bd}
        if {k: scores.get(k) for k in ("AC", "BD")} != expected:
            raise LogError(
                line,
                f"final scores {scores} disagree with replay {expected}",
            )
        if not data.get("error") and not self.match.over:
            raise LogError(line, "match_end logged before either team reached "
                                 f"{self.match.target}")
        self.final = (self.match.score_ac, self.match.score_bd)


def validate_log(path: str | Path, emit=None) -> ReplayReport:
    """Validate one room log file; never raises for content problems.

    ``emit(line_no, record, replayer)`` is called after each record is
    folded, with the reconstruction available for display.
    """
    events = 0
    replayer = _Replayer()
    try:
        raw_lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        return ReplayReport(
            ok=False, events=0, final=None, truncated=False,
            error_line=0, error=str(exc),
        )
    last_seq = 0
    try:
        for line_no, raw in enumerate(raw_lines, start=1):
            if not raw.strip():
                continue
            try:
                record = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise LogError(line_no, f"corrupt JSON: {exc.msg}")
            if not isinstance(record, dict) or not _RECORD_KEYS <= set(record):
                raise LogError(line_no, "record is missing required fields")
            if record["v"] != 1:
                raise LogError(line_no, f"unsupported version {record['v']!r}")
            if record["dir"] not in _DIRECTIONS:
                raise LogError(line_no, f"bad direction {record['dir']!r}")
            seq = record["seq"]
            if not isinstance(seq, int) or seq <= last_seq:
                raise LogError(line_no, f"seq {seq!r} does not increase")
            last_seq = seq
            data = record["data"]
            if not isinstance(data, dict):
                raise LogError(line_no, "data is not an object")
            if replayer.final is not None:
                raise LogError(line_no, "record after match_end")

            msg_type = record["type"]
            seat_field = None
            if record["seat"] is not None:
                try:
                    seat_field = Seat(record["seat"])
                except ValueError:
                    raise LogError(line_no, f"bad seat {record['seat']!r}")
            if msg_type == "log_header":
                replayer.log_header(data, line_no)
            elif msg_type == "round_hands":
                replayer.round_hands(data, line_no)
            elif msg_type == "deal" and record["dir"] == "out":
                replayer.deal(data, line_no, seat_field)
            elif msg_type == "round_start":
                replayer.round_start(data, line_no)
            elif msg_type == "turn":
                replayer.turn(data, line_no)
            elif msg_type == "played":
                replayer.played(data, line_no)
            elif msg_type == "passed":
                replayer.passed(data, line_no)
            elif msg_type == "round_end":
                replayer.round_end(data, line_no)
            elif msg_type == "match_end":
                replayer.match_end(data, line_no)
            # remaining traffic (welcome, seats, invalid, client input,
            # sys notes) is structural only
            events += 1
            if emit is not None:
                emit(line_no, record, replayer)
    except LogError as exc:
        return ReplayReport(
            ok=False, events=events, final=None, truncated=False,
            error_line=exc.line, error=exc.reason,
        )
    truncated = replayer.final is None
    return ReplayReport(
        ok=True,
        events=events,
        final=replayer.final,
        truncated=truncated,
    )


def timeline(path: str | Path) -> tuple[list[str], ReplayReport]:
    """Human-readable play-by-play of a room log, plus its verdict."""
    lines: list[str] = []

    def emit(line_no: int, record: dict, rp: _Replayer) -> None:
        msg_type, data = record["type"], record["data"]
        if record["dir"] == "in":
            return
        if msg_type == "log_header":
            lines.append(
                f"room {data.get('room_id')}  seed {data.get('seed')}  "
                f"rng {data.get('rng')}  pass mode {data.get('pass_mode')}"
            )
        elif msg_type == "redeal":
            lines.append(f"redeal: {data.get('reason')} at seat {data.get('seat')}")
        elif msg_type == "round_start":
            scores = data.get("scores") or {}
            lines.append(
                f"round {data.get('round_index')}: {data.get('starter')} starts"
                f"  (AC {scores.get('AC', '?')}  BD {scores.get('BD', '?')})"
            )
        elif msg_type == "played" and rp.state is not None:
            snake = " ".join(
                f"{a}-{b}" for a, b in rp.state.chain.oriented_pips()
            )
            tile = data["tile"]
            lines.append(
                f"  {data['seat']} plays {tile[0]}-{tile[1]} on the "
                f"{data['end']}: {snake}"
            )
        elif msg_type == "passed":
            lines.append(f"  {data['seat']} passes")
        elif msg_type == "auto_move":
            lines.append(f"  [timeout: server moves for {data.get('seat')}]")
        elif msg_type == "ai_takeover":
            lines.append(f"  [seat {data.get('seat')} handed to AI]")
        elif msg_type == "round_end":
            to = data.get("awarded_to") or "nobody"
            lines.append(
                f"round ends: {data.get('outcome')}, "
                f"{data.get('points')} points to {to}"
            )
        elif msg_type == "match_end":
            scores = data.get("scores", {})
            lines.append(
                f"match ends {scores.get('AC')}:{scores.get('BD')}"
            )

    report = validate_log(path, emit=emit)
    return lines, report
