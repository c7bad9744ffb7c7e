"""The four AI levels.

Level 1 plays a uniformly random legal move.  Level 2 ranks moves by how
many of its own tiles match the resulting ends minus how many of the next
opponent's (sampled) tiles do.  Level 3 adds value-monopoly avoidance:
when every remaining tile of an end value sits in its own hand the tiles
of that value are starred and withheld unless forced.  Level 4 replaces
the ranking with a partner-aware score (own + partner - opponent), adds a
tie-break ladder, and will deliberately close the game when the sampled
pip count says its team is ahead.

All levels share the compulsory pipeline: pass with no legal move, play a
forced single move, and play the biggest urgent double (one whose value
already appeared on more than three chain tiles) before consulting the
ranking.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum

from .belief import Belief
from .rules import Move, PASS, Play, RoundState, legal_moves
from .tiles import End, Seat, SEAT_ORDER, Tile, next_seat, partner, pip_total

MARK_STAR = "star"            # monopoly value: every remaining tile of it is ours
MARK_DOUBLE_STAR = "double_star"  # urgent double: its value opened on >3 chain tiles


class AiLevel(str, Enum):
    L1 = "l1"
    L2 = "l2"
    L3 = "l3"
    L4 = "l4"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class CandidateScore:
    move: Play
    resulting_ends: tuple[int, int]
    own_term: int
    partner_term: int
    opp_term: int
    score: int
    marks: frozenset[str]


# ---------------------------------------------------------------------------
# Level 1
# ---------------------------------------------------------------------------

def choose_move_l1(state: RoundState, hand: set[Tile], rng: random.Random) -> Move:
    """Uniform random legal play; pass when nothing is playable."""
    moves = legal_moves(state, state.to_move)
    if not moves:
        return PASS
    return rng.choice(moves)


# ---------------------------------------------------------------------------
# Marking functions
# ---------------------------------------------------------------------------

def mark_double_urgency(state: RoundState, hand: set[Tile]) -> set[Tile]:
    """Doubles in hand whose value already appears on more than three
    chain tiles (play them before they strand)."""
    return {
        t
        for t in hand
        if t.is_double and state.chain.count_with_pip(t.lo) > 3
    }


def mark_monopoly(state: RoundState, hand: set[Tile]) -> set[Tile]:
    """Hand tiles of an end value whose seven tiles are all accounted for
    by the chain plus this hand (nobody else can play that value)."""
    if state.chain.is_empty:
        return set()
    marked: set[Tile] = set()
    for v in {state.chain.left_end, state.chain.right_end}:
        in_hand = [t for t in hand if t.has_pip(v)]
        if state.chain.count_with_pip(v) + len(in_hand) == 7:
            marked.update(in_hand)
    return marked


# ---------------------------------------------------------------------------
# Ranking functions
# ---------------------------------------------------------------------------

def _resulting_ends(state: RoundState, move: Play) -> tuple[int, int]:
    chain = state.chain
    t = move.tile
    if chain.is_empty:
        return (t.lo, t.hi)
    if move.end is End.LEFT:
        return (t.other_pip(chain.left_end), chain.right_end)
    return (chain.left_end, t.other_pip(chain.right_end))


def _end_match_count(tiles, x: int, y: int) -> int:
    """Tiles containing either end pip, each tile counted once."""
    return sum(1 for t in tiles if t.lo == x or t.hi == x or t.lo == y or t.hi == y)


def maxmin_rank(
    state: RoundState,
    hand: set[Tile],
    sample: dict[Seat, set[Tile]],
    rng: random.Random,
) -> list[CandidateScore]:
    """Rank legal moves by own matches minus the next opponent's matches
    at the resulting ends, best first; equal scores in random order."""
    seat = state.to_move
    opp = sample[next_seat(seat)]
    stars = mark_monopoly(state, hand)
    urgent = mark_double_urgency(state, hand)
    scored = []
    for move in legal_moves(state, seat):
        x, y = _resulting_ends(state, move)
        remaining = hand - {move.tile}
        own = _end_match_count(remaining, x, y)
        other = _end_match_count(opp, x, y)
        scored.append(
            CandidateScore(
                move=move,
                resulting_ends=(x, y),
                own_term=own,
                partner_term=0,
                opp_term=other,
                score=own - other,
                marks=_marks_for(move.tile, stars, urgent),
            )
        )
    scored.sort(key=lambda c: (-c.score, rng.random()))
    return scored


def mmaxmin_rank(
    state: RoundState,
    hand: set[Tile],
    sample: dict[Seat, set[Tile]],
    rng: random.Random,
) -> list[CandidateScore]:
    """Partner-aware ranking: own + partner - opponent matches at the
    resulting ends.

    Ties break by a fixed ladder: (1) the move sits on an end the partner
    opened; (2) higher match count for whichever of self/partner holds
    fewer tiles; (3) higher tile pip sum; (4) random.
    """
    seat = state.to_move
    mate = partner(seat)
    opp = sample[next_seat(seat)]
    mate_hand = sample[mate]
    stars = mark_monopoly(state, hand)
    urgent = mark_double_urgency(state, hand)
    partner_is_shorter = len(mate_hand) < len(hand)
    scored = []
    for move in legal_moves(state, seat):
        x, y = _resulting_ends(state, move)
        remaining = hand - {move.tile}
        own = _end_match_count(remaining, x, y)
        mate_term = _end_match_count(mate_hand, x, y)
        other = _end_match_count(opp, x, y)
        on_partner_end = (
            not state.chain.is_empty and state.chain.opener(move.end) is mate
        )
        shorter_term = mate_term if partner_is_shorter else own
        scored.append(
            (
                CandidateScore(
                    move=move,
                    resulting_ends=(x, y),
                    own_term=own,
                    partner_term=mate_term,
                    opp_term=other,
                    score=own + mate_term - other,
                    marks=_marks_for(move.tile, stars, urgent),
                ),
                on_partner_end,
                shorter_term,
            )
        )
    scored.sort(
        key=lambda item: (
            -item[0].score,
            0 if item[1] else 1,
            -item[2],
            -item[0].move.tile.pip_sum,
            rng.random(),
        )
    )
    return [c for c, _, _ in scored]


def _marks_for(t: Tile, stars: set[Tile], urgent: set[Tile]) -> frozenset[str]:
    marks = set()
    if t in stars:
        marks.add(MARK_STAR)
    if t in urgent:
        marks.add(MARK_DOUBLE_STAR)
    return frozenset(marks)


# ---------------------------------------------------------------------------
# Closing logic (level 4)
# ---------------------------------------------------------------------------

def _blocks_game(state: RoundState, move: Play, belief: Belief) -> bool:
    """Would this move leave every seat without a play, taking the
    belief's sample as ground truth for the hidden hands?"""
    x, y = _resulting_ends(state, move)
    seat = state.to_move
    remaining = state.hands[seat] - {move.tile}
    if not remaining:
        return False  # that is a domino win, not a closure
    if any(t.has_pip(x) or t.has_pip(y) for t in remaining):
        return False
    for s in belief.hidden_seats:
        if any(t.has_pip(x) or t.has_pip(y) for t in belief.sample[s]):
            return False
    return True


def closing_decision(state: RoundState, belief: Belief) -> bool:
    """Close only when the sampled pip count favours our team: own hand
    plus sampled partner strictly below the sampled opponents."""
    seat = belief.owner
    mate = partner(seat)
    ours = pip_total(state.hands[seat]) + pip_total(belief.sample[mate])
    theirs = sum(
        pip_total(belief.sample[s]) for s in belief.hidden_seats if s is not mate
    )
    return ours < theirs


# ---------------------------------------------------------------------------
# The level pipeline
# ---------------------------------------------------------------------------

def choose_move(
    level: AiLevel,
    state: RoundState,
    hand: set[Tile],
    belief: Belief | None,
    rng: random.Random,
) -> Move:
    """Pick a move for the seat to move at the given level.

    Levels 2-4 share the pipeline: pass when forced, play a forced single
    move, play the biggest urgent double, then consult their ranking
    (level 3 and 4 skip starred monopoly tiles unless every candidate is
    starred; level 4 first promotes a blocking move when the closing
    comparison favours its team).
    """
    if level is AiLevel.L1:
        return choose_move_l1(state, hand, rng)
    if belief is None:
        raise ValueError(f"level {level} requires a belief")

    moves = legal_moves(state, state.to_move)
    if not moves:
        return PASS
    if len(moves) == 1:
        return moves[0]

    urgent_playable = sorted(
        {m.tile for m in moves if m.tile in mark_double_urgency(state, hand)}
    )
    if urgent_playable:
        biggest = urgent_playable[-1]
        return next(m for m in moves if m.tile == biggest)

    if level is AiLevel.L2:
        return maxmin_rank(state, hand, belief.sample, rng)[0].move

    if level is AiLevel.L3:
        ranked = maxmin_rank(state, hand, belief.sample, rng)
        return _first_unstarred(ranked).move

    ranked = mmaxmin_rank(state, hand, belief.sample, rng)
    blocking = [c for c in ranked if _blocks_game(state, c.move, belief)]
    if blocking and closing_decision(state, belief):
        return blocking[0].move
    return _first_unstarred(ranked).move


def _first_unstarred(ranked: list[CandidateScore]) -> CandidateScore:
    for c in ranked:
        if MARK_STAR not in c.marks:
            return c
    return ranked[0]


# ---------------------------------------------------------------------------
# Starter selection for an AI team
# ---------------------------------------------------------------------------

def choose_starter(team_hands: dict[Seat, set[Tile]]) -> Seat:
    """Deterministic starter pick within an entitled team: the member with
    the highest double, then the higher hand pip sum, then seat order."""

    def rank(seat: Seat) -> tuple[int, int, int]:
        hand = team_hands[seat]
        best_double = max((t.lo for t in hand if t.is_double), default=-1)
        return (best_double, sum(t.pip_sum for t in hand), -SEAT_ORDER.index(seat))

    return max(sorted(team_hands), key=rank)
