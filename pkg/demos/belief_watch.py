"""Watch one seat's model of the hidden hands evolve during a round.

Seat A keeps a belief: the tiles it has not seen, hard pip exclusions
proven by passes, and one sampled assignment of the unseen tiles that is
repaired move by move.  After every event we print what changed and how
close the sample is to the truth it cannot see.

Run:  python3 demos/belief_watch.py
"""

from __future__ import annotations

import random

from domino101.belief import init_belief, observe, observed_event
from domino101.policies import AiLevel, choose_move
from domino101.rules import (
    PassEvent,
    apply_move,
    deal_until_valid,
    new_round,
    round_over,
    score_round,
)
from domino101.seeding import derived_rng
from domino101.simulate import AiAgent
from domino101.tiles import SEAT_ORDER, Seat

WATCHER = Seat.A
SEED = 404


def overlap(belief, truth) -> str:
    """How many sampled tiles per hidden seat are actually there."""
    parts = []
    for seat in belief.hidden_seats:
        hit = len(belief.sample[seat] & truth[seat])
        parts.append(f"{seat}:{hit}/{len(truth[seat])}")
    return "  ".join(parts)


def exclusions(belief) -> str:
    noted = {
        seat: sorted(pips)
        for seat, pips in belief.hard_excluded.items()
        if pips
    }
    if not noted:
        return "none yet"
    return "  ".join(f"{s} holds no {','.join(map(str, pips))}" for s, pips in noted.items())


def main() -> None:
    rng = random.Random(SEED)
    hands, _ = deal_until_valid(rng)
    agents = {
        s: AiAgent(s, AiLevel.L2, derived_rng(SEED, "seat", s.value))
        for s in SEAT_ORDER
    }
    for agent in agents.values():
        agent.start_round(hands[agent.seat])

    watcher = agents[WATCHER].belief
    print(f"seat {WATCHER} holds: "
          + " ".join(str(t) for t in sorted(hands[WATCHER])))
    print(f"unseen tiles: {len(watcher.unseen)}  "
          f"(dealt at random into three guessed hands)")
    print(f"initial sample accuracy  {overlap(watcher, hands)}\n")

    state = new_round(hands, Seat.B, round_index=2)
    step = 0
    while not round_over(state):
        mover = state.to_move
        move = agents[mover].choose(state)
        state_before = state
        state = apply_move(state, move)
        event = state.history[-1]
        for agent in agents.values():
            agent.on_event(state_before, event)
        step += 1

        if isinstance(event, PassEvent):
            what = f"{mover} passes on {event.ends_at_pass}"
        else:
            what = f"{mover} plays {event.tile} ({event.end})"
        print(f"{step:2d}. {what}")
        if mover is not WATCHER:
            print(f"    sample accuracy  {overlap(watcher, state.hands)}")
            print(f"    proven exclusions: {exclusions(watcher)}")
        assert watcher.sample_ok(), "sample must always satisfy hard facts"

    result = score_round(state)
    print(f"\nround over: {result.outcome}, "
          f"{result.points} points to {result.awarded_to or 'nobody'}")
    print("final sample vs revealed truth:")
    for seat in watcher.hidden_seats:
        guessed = " ".join(str(t) for t in sorted(watcher.sample[seat]))
        actual = " ".join(str(t) for t in sorted(state.hands[seat]))
        print(f"  {seat} guessed [{guessed or '-'}]  actually [{actual or '-'}]")


if __name__ == "__main__":
    main()
