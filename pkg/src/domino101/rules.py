"""Rules engine for four-player partnership 101 dominoes.

Pure and deterministic: dealing, deal validation with the three redeal
rules, turn flow, move legality, blocked-game detection, round scoring,
and 101-point match accounting.  State transitions never mutate their
inputs; ``apply_move`` returns a fresh ``RoundState``.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field, replace

from .errors import DataError, IllegalMove, IllegalPass, StateError, TurnError
from .tiles import (
    End,
    FULL_SET,
    HAND_SIZE,
    PIPS,
    SEAT_ORDER,
    STARTING_TILE,
    Seat,
    Tile,
    next_seat,
    opponents,
    other_team,
    partner,
    pip_total,
    team_of,
    team_seats,
)

Hand = set[Tile]

STRICT = "strict"
FORFEIT = "forfeit"
PASS_MODES = (STRICT, FORFEIT)


# ---------------------------------------------------------------------------
# Moves and history events
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Play:
    tile: Tile
    end: End


@dataclass(frozen=True)
class Pass:
    pass


PASS = Pass()
Move = Play | Pass


@dataclass(frozen=True)
class PlayEvent:
    seat: Seat
    tile: Tile
    end: End


@dataclass(frozen=True)
class PassEvent:
    seat: Seat
    ends_at_pass: tuple[int, int]


Event = PlayEvent | PassEvent


# ---------------------------------------------------------------------------
# Chain
# ---------------------------------------------------------------------------

class PlacedTile(tuple):
    """A chain entry: (tile, seat, oriented pips left-to-right)."""

    __slots__ = ()

    def __new__(cls, tile: Tile, seat: Seat, oriented: tuple[int, int]):
        return super().__new__(cls, (tile, seat, oriented))

    @property
    def tile(self) -> Tile:
        return self[0]

    @property
    def seat(self) -> Seat:
        return self[1]

    @property
    def oriented(self) -> tuple[int, int]:
        return self[2]


@dataclass
class Chain:
    """The played line, ordered left to right, with end provenance.

    ``left_end``/``right_end`` are the exposed pips; ``*_opened_by`` is the
    seat whose placement created the current end value.  ``pip_counts[v]``
    counts chain tiles containing pip ``v`` (a double counts once).
    """

    line: list[PlacedTile] = field(default_factory=list)
    left_end: int = -1
    right_end: int = -1
    left_opened_by: Seat | None = None
    right_opened_by: Seat | None = None
    pip_counts: list[int] = field(default_factory=lambda: [0] * 7)
    tiles: Hand = field(default_factory=set)

    @property
    def is_empty(self) -> bool:
        return not self.line

    @property
    def ends(self) -> tuple[int, int] | None:
        return None if self.is_empty else (self.left_end, self.right_end)

    def end_value(self, end: End) -> int:
        return self.left_end if end is End.LEFT else self.right_end

    def opener(self, end: End) -> Seat | None:
        return self.left_opened_by if end is End.LEFT else self.right_opened_by

    def count_with_pip(self, v: int) -> int:
        return self.pip_counts[v]

    def copy(self) -> Chain:
        return Chain(
            line=list(self.line),
            left_end=self.left_end,
            right_end=self.right_end,
            left_opened_by=self.left_opened_by,
            right_opened_by=self.right_opened_by,
            pip_counts=list(self.pip_counts),
            tiles=set(self.tiles),
        )

    def place(self, t: Tile, end: End, seat: Seat) -> None:
        """Attach ``t`` at ``end``; caller has already checked legality."""
        if self.is_empty:
            self.line.append(PlacedTile(t, seat, (t.lo, t.hi)))
            self.left_end, self.right_end = t.lo, t.hi
            self.left_opened_by = self.right_opened_by = seat
        elif end is End.LEFT:
            exposed = t.other_pip(self.left_end)
            self.line.insert(0, PlacedTile(t, seat, (exposed, self.left_end)))
            self.left_end = exposed
            self.left_opened_by = seat
        else:
            exposed = t.other_pip(self.right_end)
            self.line.append(PlacedTile(t, seat, (self.right_end, exposed)))
            self.right_end = exposed
            self.right_opened_by = seat
        self.tiles.add(t)
        self.pip_counts[t.lo] += 1
        if t.hi != t.lo:
            self.pip_counts[t.hi] += 1

    def oriented_pips(self) -> list[tuple[int, int]]:
        """Pip pairs as laid left to right (for display and serialization)."""
        return [p.oriented for p in self.line]


# ---------------------------------------------------------------------------
# Round state
# ---------------------------------------------------------------------------

@dataclass
class RoundState:
    hands: dict[Seat, Hand]
    chain: Chain
    to_move: Seat
    history: list[Event]
    round_index: int
    forfeited_by: Seat | None = None

    def copy(self) -> RoundState:
        return RoundState(
            hands={s: set(h) for s, h in self.hands.items()},
            chain=self.chain.copy(),
            to_move=self.to_move,
            history=list(self.history),
            round_index=self.round_index,
            forfeited_by=self.forfeited_by,
        )


def new_round(hands: dict[Seat, Hand], starter: Seat, round_index: int) -> RoundState:
    return RoundState(
        hands={s: set(hands[s]) for s in SEAT_ORDER},
        chain=Chain(),
        to_move=starter,
        history=[],
        round_index=round_index,
    )


def conservation_ok(state: RoundState) -> bool:
    """Hands plus chain partition the 28-tile set with no repetition."""
    seen: list[Tile] = list(state.chain.tiles)
    for s in SEAT_ORDER:
        seen.extend(state.hands[s])
    return len(seen) == len(FULL_SET) and set(seen) == set(FULL_SET)


# ---------------------------------------------------------------------------
# Dealing
# ---------------------------------------------------------------------------

def deal(rng_seed: int | random.Random) -> dict[Seat, Hand]:
    """Shuffle the 28 tiles and give seven to each seat.

    Accepts either a seed (deterministic: same seed, same deal) or a live
    ``random.Random`` whose stream advances by one shuffle.
    """
    rng = rng_seed if isinstance(rng_seed, random.Random) else random.Random(rng_seed)
    pool = list(FULL_SET)
    rng.shuffle(pool)
    return {
        seat: set(pool[i * HAND_SIZE:(i + 1) * HAND_SIZE])
        for i, seat in enumerate(SEAT_ORDER)
    }


def deal_space_count() -> int:
    """Exact number of distinct deals: C(28,7) * C(21,7) * C(14,7)."""
    return math.comb(28, 7) * math.comb(21, 7) * math.comb(14, 7)


FIVE_DOUBLES = "five_doubles"
SAME_FACE_6_OR_7 = "same_face_6_or_7"
SAME_FACE_5_NO_DOUBLE = "same_face_5_no_double"


@dataclass(frozen=True)
class DealVerdict:
    ok: bool
    reason: str | None = None
    seat: Seat | None = None
    pip: int | None = None


DEAL_OK = DealVerdict(ok=True)


def validate_deal(hands: dict[Seat, Hand]) -> DealVerdict:
    """Check the three redeal rules, in order, seat by seat.

    1. five or more doubles in one hand;
    2. six or seven tiles sharing a face;
    3. exactly five tiles sharing a face without holding its double.

    The first trigger found (seats in A..D order, pips ascending) is
    reported.
    """
    all_tiles = [t for s in SEAT_ORDER for t in hands[s]]
    if len(all_tiles) != len(FULL_SET) or set(all_tiles) != set(FULL_SET):
        raise DataError("malformed deal: hands do not partition the tile set")
    for seat in SEAT_ORDER:
        hand = hands[seat]
        doubles = sum(1 for t in hand if t.is_double)
        if doubles >= 5:
            return DealVerdict(False, FIVE_DOUBLES, seat, None)
        face_counts = [sum(1 for t in hand if t.has_pip(v)) for v in PIPS]
        for v in PIPS:
            if face_counts[v] >= 6:
                return DealVerdict(False, SAME_FACE_6_OR_7, seat, v)
        for v in PIPS:
            if face_counts[v] == 5 and Tile(v, v) not in hand:
                return DealVerdict(False, SAME_FACE_5_NO_DOUBLE, seat, v)
    return DEAL_OK


def deal_until_valid(
    rng: random.Random,
) -> tuple[dict[Seat, Hand], list[DealVerdict]]:
    """Deal, reshuffling on redeal verdicts; returns the hands and the
    redeal notices that occurred along the way."""
    notices: list[DealVerdict] = []
    while True:
        hands = deal(rng)
        verdict = validate_deal(hands)
        if verdict.ok:
            return hands, notices
        notices.append(verdict)


def initial_starter(hands: dict[Seat, Hand]) -> Seat:
    """The seat holding the 1-1 tile opens the first round."""
    for seat in SEAT_ORDER:
        if STARTING_TILE in hands[seat]:
            return seat
    raise DataError("no seat holds the 1-1 tile; deal is malformed")


# ---------------------------------------------------------------------------
# Legality and turn flow
# ---------------------------------------------------------------------------

def legal_moves(state: RoundState, seat: Seat) -> list[Play]:
    """All legal plays for ``seat``; an empty list means a pass is due.

    On an empty chain every hand tile may open on either notional end,
    except the very first move of round 1 which must be the 1-1 tile.
    Otherwise a tile is legal at an end iff it contains that end's pip;
    a double is listed once per matching end.
    """
    if seat is not state.to_move:
        raise TurnError(f"{seat} attempted to move; {state.to_move} is to move")
    hand = state.hands[seat]
    if state.chain.is_empty:
        if state.round_index == 1:
            candidates = [STARTING_TILE] if STARTING_TILE in hand else []
        else:
            candidates = sorted(hand)
        return [Play(t, e) for t in candidates for e in (End.LEFT, End.RIGHT)]
    left, right = state.chain.left_end, state.chain.right_end
    moves: list[Play] = []
    for t in sorted(hand):
        if t.has_pip(left):
            moves.append(Play(t, End.LEFT))
        if t.has_pip(right):
            moves.append(Play(t, End.RIGHT))
    return moves


def apply_move(
    state: RoundState,
    move: Move,
    *,
    seat: Seat | None = None,
    pass_mode: str = STRICT,
) -> RoundState:
    """Apply a play or a pass for the seat to move, returning the new state.

    ``seat``, when given, is checked against ``state.to_move`` (TurnError on
    mismatch).  A pass while a legal move exists raises IllegalPass in
    strict mode; in forfeit mode it ends the round against the passer's
    team (``forfeited_by`` set, scored by ``score_round``).
    """
    if pass_mode not in PASS_MODES:
        raise ValueError(f"unknown pass mode: {pass_mode!r}")
    mover = state.to_move
    if seat is not None and seat is not mover:
        raise TurnError(f"{seat} attempted to move; {mover} is to move")
    if round_over(state):
        raise StateError("round is already over")

    if isinstance(move, Play):
        t, end = move.tile, move.end
        hand = state.hands[mover]
        if t not in hand:
            raise IllegalMove(f"{mover} does not hold {t}")
        if state.chain.is_empty:
            if state.round_index == 1 and t != STARTING_TILE:
                raise IllegalMove("round 1 must open with the 1-1 tile")
        elif not t.has_pip(state.chain.end_value(end)):
            raise IllegalMove(
                f"{t} does not match the {end} end "
                f"({state.chain.end_value(end)})"
            )
        nxt = state.copy()
        nxt.hands[mover].discard(t)
        nxt.chain.place(t, end, mover)
        nxt.history.append(PlayEvent(mover, t, end))
        nxt.to_move = next_seat(mover)
        return nxt

    # Pass
    playable = legal_moves(state, mover)
    ends = state.chain.ends or (-1, -1)
    if playable:
        if pass_mode == STRICT:
            raise IllegalPass(f"{mover} passed while {playable[0].tile} is playable")
        nxt = state.copy()
        nxt.history.append(PassEvent(mover, ends))
        nxt.forfeited_by = mover
        return nxt
    nxt = state.copy()
    nxt.history.append(PassEvent(mover, ends))
    nxt.to_move = next_seat(mover)
    return nxt


def seat_has_move(state: RoundState, seat: Seat) -> bool:
    """Whether ``seat`` could play at the current ends (ignores turn order)."""
    hand = state.hands[seat]
    if state.chain.is_empty:
        if state.round_index == 1:
            return STARTING_TILE in hand
        return bool(hand)
    left, right = state.chain.left_end, state.chain.right_end
    return any(t.has_pip(left) or t.has_pip(right) for t in hand)


def is_blocked(state: RoundState) -> bool:
    """True iff no seat can play and no hand is empty (a closed game)."""
    if any(not state.hands[s] for s in SEAT_ORDER):
        return False
    return not any(seat_has_move(state, s) for s in SEAT_ORDER)


def round_over(state: RoundState) -> bool:
    if state.forfeited_by is not None:
        return True
    if any(not state.hands[s] for s in SEAT_ORDER):
        return True
    return is_blocked(state)


# ---------------------------------------------------------------------------
# Scoring
# ---------------------------------------------------------------------------

OUTCOME_DOMINO = "domino"
OUTCOME_CLOSED = "closed"
OUTCOME_CLOSED_TIE = "closed_tie"
OUTCOME_FORFEIT = "forfeit"


@dataclass(frozen=True)
class RoundResult:
    outcome: str
    points: int
    awarded_to: str | None
    winner_seat: Seat | None
    offender: Seat | None
    revealed: dict[Seat, frozenset[Tile]]
    starter_team: str
    starter_anchor: Seat


def _last_stone_anchor(state: RoundState) -> Seat:
    """Seat that played the last non-double tile; falls back to the last
    play of any kind (the round always contains at least one play)."""
    last_any: Seat | None = None
    for ev in reversed(state.history):
        if isinstance(ev, PlayEvent):
            if last_any is None:
                last_any = ev.seat
            if not ev.tile.is_double:
                return ev.seat
    if last_any is None:
        raise StateError("no tile was played; cannot anchor the next starter")
    return last_any


def score_round(state: RoundState) -> RoundResult:
    """Score a finished round (a hand emptied, the game closed, or a
    forfeit in forfeit pass mode)."""
    revealed = {s: frozenset(state.hands[s]) for s in SEAT_ORDER}
    team_pips = {
        team: sum(pip_total(state.hands[s]) for s in team_seats(team))
        for team in ("AC", "BD")
    }

    if state.forfeited_by is not None:
        offender = state.forfeited_by
        losing = team_of(offender)
        winning = other_team(losing)
        return RoundResult(
            outcome=OUTCOME_FORFEIT,
            points=team_pips[losing],
            awarded_to=winning,
            winner_seat=None,
            offender=offender,
            revealed=revealed,
            starter_team=winning,
            starter_anchor=team_seats(winning)[0],
        )

    empty = [s for s in SEAT_ORDER if not state.hands[s]]
    if empty:
        winner = empty[0]
        losing = other_team(team_of(winner))
        return RoundResult(
            outcome=OUTCOME_DOMINO,
            points=team_pips[losing],
            awarded_to=team_of(winner),
            winner_seat=winner,
            offender=None,
            revealed=revealed,
            starter_team=team_of(winner),
            starter_anchor=winner,
        )

    if not is_blocked(state):
        raise StateError("score_round called on a live round")

    anchor = _last_stone_anchor(state)
    if team_pips["AC"] == team_pips["BD"]:
        return RoundResult(
            outcome=OUTCOME_CLOSED_TIE,
            points=0,
            awarded_to=None,
            winner_seat=None,
            offender=None,
            revealed=revealed,
            starter_team=team_of(anchor),
            starter_anchor=anchor,
        )
    lower = "AC" if team_pips["AC"] < team_pips["BD"] else "BD"
    return RoundResult(
        outcome=OUTCOME_CLOSED,
        points=team_pips[other_team(lower)],
        awarded_to=lower,
        winner_seat=None,
        offender=None,
        revealed=revealed,
        starter_team=team_of(anchor),
        starter_anchor=anchor,
    )


# ---------------------------------------------------------------------------
# Match accounting
# ---------------------------------------------------------------------------

MATCH_TARGET = 101


@dataclass(frozen=True)
class MatchState:
    score_ac: int = 0
    score_bd: int = 0
    target: int = MATCH_TARGET
    round_index: int = 1
    starter_right: tuple[str, Seat] | None = None  # None: first round, 1-1 rule

    @property
    def over(self) -> bool:
        return max(self.score_ac, self.score_bd) >= self.target

    @property
    def winner(self) -> str | None:
        if not self.over:
            return None
        return "AC" if self.score_ac >= self.score_bd else "BD"

    def score_of(self, team: str) -> int:
        return self.score_ac if team == "AC" else self.score_bd


def match_update(match: MatchState, result: RoundResult) -> MatchState:
    """Credit the round's points and carry the starter right forward."""
    score_ac, score_bd = match.score_ac, match.score_bd
    if result.awarded_to == "AC":
        score_ac += result.points
    elif result.awarded_to == "BD":
        score_bd += result.points
    return replace(
        match,
        score_ac=score_ac,
        score_bd=score_bd,
        round_index=match.round_index + 1,
        starter_right=(result.starter_team, result.starter_anchor),
    )
