"""Tiles, seats, and the fixed geometry of the four-player table.

A tile is an unordered pair of pip values 0..6 kept in canonical
``lo <= hi`` form; the full set has 28 distinct tiles.  Seats A, B, C, D
sit clockwise; A+C and B+D are partners.
"""

from __future__ import annotations

from enum import Enum
from typing import NamedTuple

PIP_MIN = 0
PIP_MAX = 6
PIPS = range(PIP_MIN, PIP_MAX + 1)
HAND_SIZE = 7


class Tile(NamedTuple):
    lo: int
    hi: int

    @property
    def pip_sum(self) -> int:
        return self.lo + self.hi

    @property
    def is_double(self) -> bool:
        return self.lo == self.hi

    def has_pip(self, v: int) -> bool:
        return self.lo == v or self.hi == v

    def other_pip(self, v: int) -> int:
        """The pip left exposed when this tile is attached by its ``v`` half."""
        return self.hi if self.lo == v else self.lo

    def __str__(self) -> str:
        return f"{self.lo}-{self.hi}"


def tile(a: int, b: int) -> Tile:
    """Canonical tile for an unordered pip pair."""
    if not (PIP_MIN <= a <= PIP_MAX and PIP_MIN <= b <= PIP_MAX):
        raise ValueError(f"pip out of range: {a}, {b}")
    return Tile(a, b) if a <= b else Tile(b, a)


FULL_SET: tuple[Tile, ...] = tuple(
    Tile(lo, hi) for lo in PIPS for hi in range(lo, PIP_MAX + 1)
)
TOTAL_PIPS = sum(t.pip_sum for t in FULL_SET)  # 168
STARTING_TILE = Tile(1, 1)


class Seat(str, Enum):
    A = "A"
    B = "B"
    C = "C"
    D = "D"

    def __str__(self) -> str:
        return self.value


SEAT_ORDER: tuple[Seat, Seat, Seat, Seat] = (Seat.A, Seat.B, Seat.C, Seat.D)

TEAM_AC = "AC"
TEAM_BD = "BD"
TEAMS = (TEAM_AC, TEAM_BD)

_NEXT = {Seat.A: Seat.B, Seat.B: Seat.C, Seat.C: Seat.D, Seat.D: Seat.A}
_PARTNER = {Seat.A: Seat.C, Seat.B: Seat.D, Seat.C: Seat.A, Seat.D: Seat.B}


def next_seat(s: Seat) -> Seat:
    """Clockwise neighbour (the next player to move)."""
    return _NEXT[s]


def partner(s: Seat) -> Seat:
    return _PARTNER[s]


def team_of(s: Seat) -> str:
    return TEAM_AC if s in (Seat.A, Seat.C) else TEAM_BD


def team_seats(team: str) -> tuple[Seat, Seat]:
    if team == TEAM_AC:
        return (Seat.A, Seat.C)
    if team == TEAM_BD:
        return (Seat.B, Seat.D)
    raise ValueError(f"unknown team: {team!r}")


def other_team(team: str) -> str:
    return TEAM_BD if team == TEAM_AC else TEAM_AC


def opponents(s: Seat) -> tuple[Seat, Seat]:
    return team_seats(other_team(team_of(s)))


def pip_total(tiles) -> int:
    """Sum of pips over an iterable of tiles."""
    return sum(t.pip_sum for t in tiles)


class End(str, Enum):
    LEFT = "left"
    RIGHT = "right"

    def __str__(self) -> str:
        return self.value


ENDS = (End.LEFT, End.RIGHT)
