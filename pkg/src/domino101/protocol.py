"""Wire schema shared by the TCP and WebSocket transports.

One JSON object per line (or per WebSocket text frame), wrapped in a
versioned envelope with a per-direction sequence number.  Decoding is
forward compatible: unknown fields are ignored, unknown message types are
rejected.  ``redact`` builds the per-seat view that keeps hidden hands
hidden until the round ends.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Mapping

from .errors import EncodeError, ProtocolError
from .tiles import SEAT_ORDER, Seat, Tile

PROTOCOL_VERSION = 1
MAX_LINE_BYTES = 16 * 1024

TCP_PORT = 7101
WS_PORT = 7102
WS_PATH = "/ws"

# ProtocolError codes
ERR_MALFORMED = "malformed"
ERR_VERSION = "version"
ERR_SEQ = "seq"
ERR_BAD_TILE = "bad_tile"
ERR_UNKNOWN_TYPE = "unknown_type"


# ---------------------------------------------------------------------------
# Envelope
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Envelope:
    seq: int
    type: str
    data: Mapping[str, Any] = field(default_factory=dict)
    v: int = PROTOCOL_VERSION


CLIENT_TYPES = frozenset({"hello", "move", "pass", "choose_starter", "ping"})
SERVER_TYPES = frozenset(
    {
        "welcome",
        "seats",
        "deal",
        "redeal",
        "round_start",
        "turn",
        "played",
        "passed",
        "invalid",
        "round_end",
        "starter_prompt",
        "match_end",
        "pong",
        "error",
    }
)
KNOWN_TYPES = CLIENT_TYPES | SERVER_TYPES


# ---------------------------------------------------------------------------
# Tile wire form
# ---------------------------------------------------------------------------

def tile_to_wire(t: Tile) -> list[int]:
    return [t.lo, t.hi]


def wire_to_tile(value: Any) -> Tile:
    """Parse a canonical [lo, hi] pair; anything else is a bad tile."""
    if (
        not isinstance(value, (list, tuple))
        or len(value) != 2
        or not all(isinstance(p, int) and not isinstance(p, bool) for p in value)
    ):
        raise ProtocolError(ERR_BAD_TILE, f"tile must be [lo, hi] ints: {value!r}")
    lo, hi = value
    if not (0 <= lo <= hi <= 6):
        raise ProtocolError(ERR_BAD_TILE, f"tile out of canonical range: {value!r}")
    return Tile(lo, hi)


def hand_to_wire(hand) -> list[list[int]]:
    return [tile_to_wire(t) for t in sorted(hand)]


def _check_tiles_in(data: Mapping[str, Any]) -> None:
    """Validate every tile-shaped field the payload may carry."""
    if "tile" in data:
        wire_to_tile(data["tile"])
    if "hand" in data and isinstance(data["hand"], list):
        for item in data["hand"]:
            wire_to_tile(item)
    if "shown_tiles" in data and isinstance(data["shown_tiles"], list):
        for item in data["shown_tiles"]:
            wire_to_tile(item)
    revealed = data.get("revealed_hands")
    if isinstance(revealed, Mapping):
        for hand in revealed.values():
            if isinstance(hand, list):
                for item in hand:
                    wire_to_tile(item)


# ---------------------------------------------------------------------------
# Encode / decode
# ---------------------------------------------------------------------------

def encode(envelope: Envelope) -> bytes:
    """Serialize to one LF-terminated UTF-8 JSON line (max 16 KiB)."""
    if envelope.type not in KNOWN_TYPES:
        raise EncodeError(f"unknown message type: {envelope.type!r}")
    payload = {
        "v": envelope.v,
        "seq": envelope.seq,
        "type": envelope.type,
        "data": dict(envelope.data),
    }
    line = json.dumps(payload, ensure_ascii=False, separators=(",", ":")) + "\n"
    raw = line.encode("utf-8")
    if len(raw) > MAX_LINE_BYTES:
        raise EncodeError(f"message of {len(raw)} bytes exceeds {MAX_LINE_BYTES}")
    return raw


def decode(line: bytes | str) -> Envelope:
    """Parse one line into an Envelope, enforcing the schema invariants.

    Unknown fields ride along untouched; unknown types, version skew, and
    non-canonical tiles are rejected with coded errors.
    """
    if isinstance(line, bytes):
        if len(line) > MAX_LINE_BYTES:
            raise ProtocolError(ERR_MALFORMED, "line exceeds the 16 KiB cap")
        try:
            text = line.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ProtocolError(ERR_MALFORMED, f"not UTF-8: {exc}") from None
    else:
        text = line
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProtocolError(ERR_MALFORMED, f"bad JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise ProtocolError(ERR_MALFORMED, "envelope must be a JSON object")

    v = obj.get("v")
    if v != PROTOCOL_VERSION:
        raise ProtocolError(ERR_VERSION, f"unsupported protocol version: {v!r}")
    seq = obj.get("seq")
    if not isinstance(seq, int) or isinstance(seq, bool) or seq < 0:
        raise ProtocolError(ERR_MALFORMED, f"seq must be a non-negative int: {seq!r}")
    msg_type = obj.get("type")
    if not isinstance(msg_type, str):
        raise ProtocolError(ERR_MALFORMED, "type must be a string")
    if msg_type not in KNOWN_TYPES:
        raise ProtocolError(ERR_UNKNOWN_TYPE, f"unknown message type: {msg_type!r}")
    data = obj.get("data", {})
    if not isinstance(data, dict):
        raise ProtocolError(ERR_MALFORMED, "data must be a JSON object")
    _check_tiles_in(data)
    return Envelope(seq=seq, type=msg_type, data=data, v=v)


class SequenceTracker:
    """Enforces strictly increasing seq numbers for one direction of one
    connection."""

    def __init__(self) -> None:
        self.last: int | None = None

    def check(self, seq: int) -> None:
        if self.last is not None and seq <= self.last:
            raise ProtocolError(
                ERR_SEQ, f"seq {seq} not greater than previous {self.last}"
            )
        self.last = seq


class SequenceSource:
    """Hands out the next outgoing seq for one direction."""

    def __init__(self) -> None:
        self._next = 1

    def next(self) -> int:
        value = self._next
        self._next += 1
        return value


# ---------------------------------------------------------------------------
# Per-seat redaction
# ---------------------------------------------------------------------------

def redact(full_view: Mapping[str, Any], seat: Seat) -> dict[str, Any]:
    """The game as ``seat`` may see it.

    The seat's own hand is listed; every other hand collapses to a count.
    When the view is flagged ``revealed`` (round end) all hands appear.
    Everything else in the view is public and passes through unchanged.
    """
    hands = full_view["hands"]
    out: dict[str, Any] = {
        k: v for k, v in full_view.items() if k not in ("hands",)
    }
    out["seat"] = seat.value
    out["hand"] = [list(t) for t in hands[seat.value]]
    out["hand_counts"] = {s.value: len(hands[s.value]) for s in SEAT_ORDER}
    if full_view.get("revealed"):
        out["revealed_hands"] = {
            s.value: [list(t) for t in hands[s.value]] for s in SEAT_ORDER
        }
    return out


def public_part(view: Mapping[str, Any]) -> dict[str, Any]:
    """Strip the seat-specific fields from a redacted view (what every
    seat should agree on)."""
    return {
        k: v
        for k, v in view.items()
        if k not in ("seat", "hand", "revealed_hands")
    }
