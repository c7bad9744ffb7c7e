"""A guided tour of the table rules: dealing, redeals, one full round
with the chain drawn after every move, and match accounting to 101.

Run:  python3 demos/rules_tour.py
"""

from __future__ import annotations

import random

from domino101.rules import (
    apply_move,
    deal_until_valid,
    initial_starter,
    legal_moves,
    match_update,
    new_round,
    round_over,
    score_round,
    MatchState,
    PassEvent,
)
from domino101.policies import choose_move_l1, choose_starter
from domino101.tiles import FULL_SET, SEAT_ORDER, Seat, pip_total, team_seats


def show_hand(seat: Seat, hand) -> str:
    return f"  {seat}: " + " ".join(str(t) for t in sorted(hand))


def snake(chain) -> str:
    return " ".join(f"{a}-{b}" for a, b in chain.oriented_pips())


def main() -> None:
    print(f"The set: {len(FULL_SET)} tiles, {pip_total(FULL_SET)} pips total")
    print(" ".join(str(t) for t in FULL_SET))

    rng = random.Random(101)
    print("\n--- dealing (seed 101) ---")
    hands, redeals = deal_until_valid(rng)
    for verdict in redeals:
        print(f"redeal: seat {verdict.seat} held {verdict.reason}"
              + (f" on pip {verdict.pip}" if verdict.pip is not None else ""))
    if not redeals:
        print("first deal accepted (no five-doubles or same-face hands)")
    for seat in SEAT_ORDER:
        print(show_hand(seat, hands[seat]))

    print("\n--- round 1: the 1-1 holder opens ---")
    starter = initial_starter(hands)
    print(f"seat {starter} holds 1-1 and must start")
    state = new_round(hands, starter, round_index=1)
    move_rng = random.Random(7)
    while not round_over(state):
        mover = state.to_move
        move = choose_move_l1(state, state.hands[mover], move_rng)
        state = apply_move(state, move)
        event = state.history[-1]
        if isinstance(event, PassEvent):
            print(f"{mover} passes on ends {event.ends_at_pass}")
        else:
            print(f"{mover} plays {event.tile} on the {event.end}: "
                  f"{snake(state.chain)}")

    result = score_round(state)
    print(f"\noutcome: {result.outcome}")
    for seat in SEAT_ORDER:
        left = sorted(result.revealed[seat])
        print(f"  {seat} left with {' '.join(map(str, left)) or 'nothing'} "
              f"({pip_total(left)} pips)")
    if result.awarded_to:
        print(f"{result.points} points to {result.awarded_to} "
              f"(the losing side's remaining pips)")
    else:
        print("tied pip counts: nobody scores")
    print(f"next round's choice belongs to {result.starter_team} "
          f"(anchor seat {result.starter_anchor})")

    print("\n--- a full match, round by round ---")
    match = MatchState()
    deal_rng = random.Random(2501)
    ai_rng = random.Random(2502)
    while not match.over:
        hands, _ = deal_until_valid(deal_rng)
        if match.starter_right is None:
            starter = initial_starter(hands)
        else:
            team, _anchor = match.starter_right
            a, b = team_seats(team)
            starter = choose_starter({a: hands[a], b: hands[b]})
        state = new_round(hands, starter, match.round_index)
        while not round_over(state):
            move = choose_move_l1(state, state.hands[state.to_move], ai_rng)
            state = apply_move(state, move)
        result = score_round(state)
        match = match_update(match, result)
        tag = f"+{result.points} {result.awarded_to}" if result.awarded_to else "tie"
        print(f"round {match.round_index - 1:2d}: {starter} started, "
              f"{result.outcome:10s} {tag:8s} -> AC {match.score_ac:3d}  "
              f"BD {match.score_bd:3d}")
    winner = "AC" if match.score_ac > match.score_bd else "BD"
    print(f"\n{winner} reaches 101 first and takes the match")


if __name__ == "__main__":
    main()
