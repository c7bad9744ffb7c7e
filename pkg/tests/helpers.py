"""Shared fixtures and independent oracles used across the test suite.

The oracles here deliberately re-derive expected results from first
principles (brute force over hands, direct pip arithmetic) rather than
calling back into the code under test.
"""

from __future__ import annotations

import random

from domino101.rules import (
    PASS,
    Chain,
    PlacedTile,
    Play,
    PlayEvent,
    RoundState,
    apply_move,
    deal_until_valid,
    initial_starter,
    legal_moves,
    new_round,
    round_over,
)
from domino101.tiles import (
    ENDS,
    FULL_SET,
    SEAT_ORDER,
    STARTING_TILE,
    End,
    Seat,
    Tile,
    pip_total,
    tile,
)

# ---- direct state construction ----------------------------------------------

# Oriented pip pairs, appended left to right, for a chain whose ends are
# (6, 6) and which contains every tile with a 6.  Any hand drawn from the
# remaining 18 tiles is therefore unable to play: the position is blocked.
BLOCKED_CHAIN_66 = [
    (6, 1),
    (1, 0),
    (0, 6),
    (6, 6),
    (6, 2),
    (2, 3),
    (3, 6),
    (6, 4),
    (4, 5),
    (5, 6),
]


def chain_from_pairs(pairs: list[tuple[int, int]], seats=None) -> tuple[Chain, list[PlayEvent]]:
    """Build a chain by appending oriented (left, right) pairs rightward.

    The first pair seeds the line; every later pair must start with the
    current right end.  Returns the chain plus the matching play events
    (seats cycle A, B, C, D unless given explicitly).
    """
    chain = Chain()
    events: list[PlayEvent] = []
    for i, (a, b) in enumerate(pairs):
        seat = seats[i] if seats else SEAT_ORDER[i % 4]
        t = tile(a, b)
        if not chain.line:
            chain.line.append(PlacedTile(t, seat, (a, b)))
            chain.left_end, chain.right_end = a, b
            chain.left_opened_by = chain.right_opened_by = seat
            chain.tiles.add(t)
            for p in {t.lo, t.hi}:
                chain.pip_counts[p] += 1
            events.append(PlayEvent(seat, t, End.LEFT))
        else:
            if a != chain.right_end:
                raise ValueError(f"pair {(a, b)} does not continue right end {chain.right_end}")
            chain.place(t, End.RIGHT, seat)
            events.append(PlayEvent(seat, t, End.RIGHT))
    return chain, events


def state_from(
    chain_pairs: list[tuple[int, int]],
    hands: dict[Seat, set[Tile]],
    to_move: Seat,
    round_index: int = 2,
) -> RoundState:
    """Assemble a RoundState around an explicit chain and hands."""
    chain, events = chain_from_pairs(chain_pairs)
    return RoundState(
        hands={s: set(hands.get(s, set())) for s in Seat},
        chain=chain,
        to_move=to_move,
        history=list(events),
        round_index=round_index,
    )


def split_rest(ac_tiles: list[Tile], chain_pairs=BLOCKED_CHAIN_66) -> dict[Seat, set[Tile]]:
    """Split the 18 tiles absent from *chain_pairs*: AC gets ac_tiles (A 5, C 4)."""
    on_chain = {tile(a, b) for a, b in chain_pairs}
    rest = [t for t in FULL_SET if t not in on_chain]
    ac = list(ac_tiles)
    bd = [t for t in rest if t not in set(ac)]
    assert len(ac) == 9 and len(bd) == 9
    return {
        Seat.A: set(ac[:5]),
        Seat.C: set(ac[5:]),
        Seat.B: set(bd[:5]),
        Seat.D: set(bd[5:]),
    }


# ---- redeal verdict table ---------------------------------------------------


def complete_deal(fixed: dict[Seat, set[Tile]]) -> dict[Seat, set[Tile]]:
    """Extend explicitly fixed hands to a full 28-tile partition.

    Remaining tiles are spread round-robin across the unfixed seats so the
    filler hands stay far away from every redeal trigger.
    """
    used = {t for h in fixed.values() for t in h}
    assert len(used) == sum(len(h) for h in fixed.values()), "overlapping fixed hands"
    rest = [t for t in sorted(FULL_SET) if t not in used]
    free = [s for s in SEAT_ORDER if s not in fixed]
    hands: dict[Seat, set[Tile]] = {s: set(h) for s, h in fixed.items()}
    for s in free:
        hands[s] = set()
    for i, t in enumerate(rest):
        hands[free[i % len(free)]].add(t)
    return hands


def _t(*pairs: tuple[int, int]) -> set[Tile]:
    return {tile(a, b) for a, b in pairs}


# name -> (fixed hands, expected (ok, reason, seat, pip))
REDEAL_CASES: dict[str, tuple[dict[Seat, set[Tile]], tuple]] = {
    "five_doubles": (
        {Seat.B: _t((0, 0), (1, 1), (2, 2), (3, 3), (4, 4), (0, 1), (0, 2))},
        (False, "five_doubles", Seat.B, None),
    ),
    "six_doubles": (
        {Seat.A: _t((0, 0), (1, 1), (2, 2), (3, 3), (4, 4), (5, 5), (0, 1))},
        (False, "five_doubles", Seat.A, None),
    ),
    "seven_doubles": (
        {Seat.C: _t((0, 0), (1, 1), (2, 2), (3, 3), (4, 4), (5, 5), (6, 6))},
        (False, "five_doubles", Seat.C, None),
    ),
    "four_doubles_is_fine": (
        {Seat.A: _t((0, 0), (1, 1), (2, 2), (3, 3), (4, 5), (4, 6), (5, 6))},
        (True, None, None, None),
    ),
    "six_same_face": (
        {Seat.A: _t((0, 6), (1, 6), (2, 6), (3, 6), (4, 6), (5, 6), (2, 3))},
        (False, "same_face_6_or_7", Seat.A, 6),
    ),
    "seven_same_face": (
        {Seat.A: _t((0, 6), (1, 6), (2, 6), (3, 6), (4, 6), (5, 6), (6, 6))},
        (False, "same_face_6_or_7", Seat.A, 6),
    ),
    "six_same_face_double_does_not_save": (
        {Seat.B: _t((6, 6), (0, 6), (1, 6), (2, 6), (3, 6), (4, 6), (1, 2))},
        (False, "same_face_6_or_7", Seat.B, 6),
    ),
    "five_same_face_no_double": (
        {Seat.C: _t((0, 3), (1, 3), (2, 3), (3, 4), (3, 5), (0, 1), (0, 2))},
        (False, "same_face_5_no_double", Seat.C, 3),
    ),
    "five_same_face_with_double_is_fine": (
        {Seat.C: _t((0, 3), (1, 3), (2, 3), (3, 4), (3, 3), (0, 1), (0, 2))},
        (True, None, None, None),
    ),
    "five_blanks_no_double": (
        {Seat.D: _t((0, 1), (0, 2), (0, 3), (0, 4), (0, 5), (1, 2), (6, 6))},
        (False, "same_face_5_no_double", Seat.D, 0),
    ),
    "earlier_seat_reported_first": (
        {
            Seat.A: _t((0, 2), (1, 2), (2, 3), (2, 4), (2, 6), (0, 1), (5, 6)),
            Seat.B: _t((0, 0), (1, 1), (2, 2), (3, 3), (4, 4), (0, 3), (0, 4)),
        },
        (False, "same_face_5_no_double", Seat.A, 2),
    ),
    "earlier_seat_wins_across_rules": (
        {
            Seat.C: _t((0, 0), (1, 1), (2, 2), (3, 3), (4, 4), (0, 1), (0, 2)),
            Seat.D: _t((0, 6), (1, 6), (2, 6), (3, 6), (4, 6), (0, 3), (1, 4)),
        },
        (False, "five_doubles", Seat.C, None),
    ),
}


# ---- independent oracles ----------------------------------------------------


def legal_oracle(state: RoundState, seat: Seat) -> set[Play]:
    """Every (tile, end) pair from the hand that the table would accept."""
    hand = state.hands[seat]
    if not state.chain.line:
        if state.round_index == 1:
            starters = {STARTING_TILE} & hand
        else:
            starters = set(hand)
        return {Play(t, e) for t in starters for e in ENDS}
    out = set()
    for t in hand:
        for e in ENDS:
            if t.has_pip(state.chain.end_value(e)):
                out.add(Play(t, e))
    return out


def blocked_oracle(state: RoundState) -> bool:
    """Blocked: all hands non-empty and no tile anywhere fits either end."""
    if any(not h for h in state.hands.values()):
        return False
    if not state.chain.line:
        return False
    left, right = state.chain.ends
    for h in state.hands.values():
        for t in h:
            if t.has_pip(left) or t.has_pip(right):
                return False
    return True


def team_pips(state: RoundState) -> dict[str, int]:
    return {
        "AC": pip_total(state.hands[Seat.A]) + pip_total(state.hands[Seat.C]),
        "BD": pip_total(state.hands[Seat.B]) + pip_total(state.hands[Seat.D]),
    }


def end_match_oracle(tiles, x: int, y: int) -> int:
    """How many of *tiles* touch pip x or pip y (each tile counted once)."""
    return sum(1 for t in tiles if t.has_pip(x) or t.has_pip(y))


# ---- random playout sampling ------------------------------------------------


def playout_states(seed: int, count: int, max_steps: int = 40):
    """Yield *count* mid-game states drawn from random legal playouts."""
    rng = random.Random(seed)
    produced = 0
    while produced < count:
        hands, _ = deal_until_valid(rng)
        round_index = rng.randint(1, 4)
        if round_index == 1:
            starter = initial_starter(hands)
        else:
            starter = rng.choice(SEAT_ORDER)
        state = new_round(hands, starter, round_index)
        steps = rng.randint(0, max_steps)
        for _ in range(steps):
            if round_over(state):
                break
            moves = legal_moves(state, state.to_move)
            move = rng.choice(moves) if moves else PASS
            state = apply_move(state, move)
        yield state
        produced += 1


def finished_states(seed: int, count: int):
    """Yield *count* fully played-out terminal states."""
    rng = random.Random(seed)
    produced = 0
    while produced < count:
        hands, _ = deal_until_valid(rng)
        round_index = rng.randint(1, 4)
        starter = initial_starter(hands) if round_index == 1 else rng.choice(SEAT_ORDER)
        state = new_round(hands, starter, round_index)
        while not round_over(state):
            moves = legal_moves(state, state.to_move)
            state = apply_move(state, rng.choice(moves) if moves else PASS)
        yield state
        produced += 1
