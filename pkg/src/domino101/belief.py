"""Per-AI model of the three hidden hands.

Each AI seat keeps a ``Belief``: the set of tiles it has not seen, hard
pip exclusions learned from passes, soft per-pip penalties learned from
play patterns, and one persistent sampled assignment of the unseen tiles
to the hidden seats (a determinization).  The sample is kept consistent
move by move with a swap repair: when a player reveals a tile the sample
had given to someone else, the tile is moved to its true holder and a
random tile flows back the other way.

Hard exclusions are facts (a pass proves the passer holds neither end
pip, and hands only shrink), so the sample must always respect them.
Soft penalties only bias ``sample_fresh``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .errors import DataError, Unsatisfiable
from .rules import Event, PassEvent, PlayEvent, RoundState
from .tiles import End, FULL_SET, HAND_SIZE, Seat, SEAT_ORDER, Tile, partner

SOFT_FACTOR = 0.5
SOFT_FLOOR = 0.0625

_SAMPLE_ATTEMPTS = 200  # per phase: soft-weighted, then unweighted


@dataclass
class Belief:
    owner: Seat
    unseen: set[Tile]
    hand_sizes: dict[Seat, int]
    hard_excluded: dict[Seat, set[int]]
    soft_penalty: dict[Seat, list[float]]  # index by pip, weight in (0, 1]
    sample: dict[Seat, set[Tile]]
    rng: random.Random
    # consecutive personal turns on which the seat extended an end its own
    # tile created (feeds the "insistently" inference)
    own_end_streak: dict[Seat, int] = field(default_factory=dict)

    @property
    def hidden_seats(self) -> tuple[Seat, ...]:
        return tuple(s for s in SEAT_ORDER if s is not self.owner)

    def halve_soft(self, seat: Seat, pip: int) -> None:
        w = self.soft_penalty[seat][pip] * SOFT_FACTOR
        self.soft_penalty[seat][pip] = max(w, SOFT_FLOOR)

    def sample_ok(self) -> bool:
        """Sample hands are disjoint, correctly sized, drawn from unseen,
        and avoid hard-excluded pips."""
        seen: set[Tile] = set()
        total = 0
        for s in self.hidden_seats:
            hand = self.sample[s]
            if len(hand) != self.hand_sizes[s]:
                return False
            total += len(hand)
            excl = self.hard_excluded[s]
            for t in hand:
                if t not in self.unseen or t in seen:
                    return False
                if excl and (t.lo in excl or t.hi in excl):
                    return False
            seen |= hand
        return total == len(self.unseen)


# ---------------------------------------------------------------------------
# Observed events (history entries plus the provenance context the
# estimation inferences need)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ObservedPlay:
    seat: Seat
    tile: Tile
    end: End
    ends_before: tuple[int, int] | None
    openers_before: tuple[Seat, Seat] | None  # (left, right); None on the opening play


@dataclass(frozen=True)
class ObservedPass:
    seat: Seat
    ends: tuple[int, int]


ObservedEvent = ObservedPlay | ObservedPass


def observed_event(state_before: RoundState, event: Event) -> ObservedEvent:
    """Wrap a history entry with the chain context preceding it."""
    chain = state_before.chain
    if isinstance(event, PlayEvent):
        if chain.is_empty:
            return ObservedPlay(event.seat, event.tile, event.end, None, None)
        return ObservedPlay(
            event.seat,
            event.tile,
            event.end,
            (chain.left_end, chain.right_end),
            (chain.left_opened_by, chain.right_opened_by),
        )
    return ObservedPass(event.seat, event.ends_at_pass)


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------

def init_belief(owner: Seat, own_hand: set[Tile], rng: random.Random) -> Belief:
    """Fresh belief at round start: 21 unseen tiles dealt uniformly at
    random into three seven-tile sample hands."""
    if len(own_hand) != HAND_SIZE:
        raise DataError(f"own hand has {len(own_hand)} tiles, expected {HAND_SIZE}")
    unseen = set(FULL_SET) - own_hand
    hidden = tuple(s for s in SEAT_ORDER if s is not owner)
    pool = sorted(unseen)
    rng.shuffle(pool)
    sample = {
        s: set(pool[i * HAND_SIZE:(i + 1) * HAND_SIZE]) for i, s in enumerate(hidden)
    }
    return Belief(
        owner=owner,
        unseen=unseen,
        hand_sizes={s: HAND_SIZE for s in hidden},
        hard_excluded={s: set() for s in hidden},
        soft_penalty={s: [1.0] * 7 for s in hidden},
        sample=sample,
        rng=rng,
        own_end_streak={s: 0 for s in hidden},
    )


# ---------------------------------------------------------------------------
# Maintenance
# ---------------------------------------------------------------------------

def observe(belief: Belief, event: ObservedEvent) -> Belief:
    """Fold the next history entry into the belief (mutates and returns it).

    A pass hard-excludes both end pips for the passer and repairs the
    sample.  A play removes the tile via the swap repair and applies the
    two soft inferences: repeatedly extending an end one's own tile
    created, or playing onto an end one's partner opened, each halve the
    penalty on the opposite end's pip for that seat.
    """
    if isinstance(event, ObservedPass):
        seat = event.seat
        if seat is belief.owner:
            return belief
        belief.hard_excluded[seat].update(event.ends)
        belief.own_end_streak[seat] = 0
        _purge_excluded(belief, seat)
        return belief

    seat = event.seat
    if seat is belief.owner:
        return belief
    if event.tile not in belief.unseen:
        raise DataError(f"{event.tile} was already seen; inconsistent event")
    repair_sample(belief, seat, event.tile)

    if event.ends_before is not None:
        end_idx = 0 if event.end is End.LEFT else 1
        opener = event.openers_before[end_idx]
        other_pip = event.ends_before[1 - end_idx]
        if opener is seat:
            belief.own_end_streak[seat] += 1
            if belief.own_end_streak[seat] >= 2:
                belief.halve_soft(seat, other_pip)
        else:
            belief.own_end_streak[seat] = 0
            if opener is partner(seat):
                belief.halve_soft(seat, other_pip)
    else:
        belief.own_end_streak[seat] = 0
    return belief


def repair_sample(belief: Belief, seat: Seat, played: Tile) -> Belief:
    """Account for ``seat`` playing ``played``, keeping the sample a valid
    partition of the remaining unseen tiles.

    If the sample already had the tile with its true holder it is simply
    removed.  Otherwise the tile is taken from whichever sample hand held
    it, and a random tile of the player's sample hand flows back the other
    way (preferring one the receiving seat's exclusions allow; if there is
    none, the whole sample is redrawn under the hard constraints).
    """
    belief.unseen.discard(played)
    belief.hand_sizes[seat] -= 1
    mine = belief.sample[seat]
    if played in mine:
        mine.discard(played)
        return belief

    holder = next(s for s in belief.hidden_seats if played in belief.sample[s])
    belief.sample[holder].discard(played)
    excl = belief.hard_excluded[holder]
    compatible = sorted(
        t for t in mine if not (t.lo in excl or t.hi in excl)
    )
    if compatible:
        swapped = belief.rng.choice(compatible)
        mine.discard(swapped)
        belief.sample[holder].add(swapped)
        return belief
    belief.sample = sample_fresh(belief, belief.rng)
    return belief


def _purge_excluded(belief: Belief, seat: Seat) -> None:
    """After new exclusions for ``seat``, swap offending sample tiles into
    other hands (full redraw when no swap fits)."""
    excl = belief.hard_excluded[seat]
    offending = sorted(t for t in belief.sample[seat] if t.lo in excl or t.hi in excl)
    for t in offending:
        others = [s for s in belief.hidden_seats if s is not seat]
        candidates: list[tuple[Seat, Tile]] = []
        for q in others:
            q_excl = belief.hard_excluded[q]
            if t.lo in q_excl or t.hi in q_excl:
                continue
            for u in sorted(belief.sample[q]):
                if u.lo in excl or u.hi in excl:
                    continue
                candidates.append((q, u))
        if not candidates:
            belief.sample = sample_fresh(belief, belief.rng)
            return
        q, u = belief.rng.choice(candidates)
        belief.sample[seat].discard(t)
        belief.sample[seat].add(u)
        belief.sample[q].discard(u)
        belief.sample[q].add(t)


def sample_fresh(belief: Belief, rng: random.Random) -> dict[Seat, set[Tile]]:
    """Draw a new assignment of the unseen tiles to the hidden seats.

    Tiles are dealt one at a time; a seat's chance of receiving a tile is
    proportional to its soft penalties for the tile's pips, and seats with
    a hard exclusion on either pip get zero weight.  Dead ends restart the
    draw; after a bounded number of attempts the soft weights are relaxed
    to uniform, and if that also fails the constraints are unsatisfiable.
    """
    hidden = belief.hidden_seats
    pool = sorted(belief.unseen)
    for attempt in range(2 * _SAMPLE_ATTEMPTS):
        weighted = attempt < _SAMPLE_ATTEMPTS
        order = list(pool)
        rng.shuffle(order)
        capacity = dict(belief.hand_sizes)
        hands: dict[Seat, set[Tile]] = {s: set() for s in hidden}
        ok = True
        for t in order:
            seats = [
                s
                for s in hidden
                if capacity[s] > 0
                and t.lo not in belief.hard_excluded[s]
                and t.hi not in belief.hard_excluded[s]
            ]
            if not seats:
                ok = False
                break
            if weighted:
                if t.is_double:
                    weights = [belief.soft_penalty[s][t.lo] for s in seats]
                else:
                    weights = [
                        belief.soft_penalty[s][t.lo] * belief.soft_penalty[s][t.hi]
                        for s in seats
                    ]
                chosen = rng.choices(seats, weights=weights)[0]
            else:
                chosen = rng.choice(seats)
            hands[chosen].add(t)
            capacity[chosen] -= 1
        if ok:
            return hands
    raise Unsatisfiable(
        "no assignment of unseen tiles satisfies the hard constraints"
    )
