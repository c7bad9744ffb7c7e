"""Headless AI-only match running and seeded tournament statistics.

A match is fully determined by (root seed, match index, seat levels,
pass mode); per-match sub-streams are derived with ``seeding.derive_seed``
so matches can be sharded across processes without changing any result.
"""

from __future__ import annotations

import csv
import io
import json
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .belief import Belief, init_belief, observe, observed_event
from .policies import AiLevel, choose_move, choose_starter
from .rules import (
    DealVerdict,
    Event,
    MatchState,
    Pass,
    PassEvent,
    Play,
    RoundResult,
    RoundState,
    apply_move,
    deal_until_valid,
    initial_starter,
    match_update,
    new_round,
    round_over,
    score_round,
)
from .seeding import RNG_NAME, derive_seed, derived_rng
from .tiles import Seat, SEAT_ORDER, Tile, team_seats

LEVEL_NEEDS_BELIEF = {AiLevel.L1: False, AiLevel.L2: True, AiLevel.L3: True, AiLevel.L4: True}


class AiAgent:
    """One AI seat: its level, its policy RNG, and (for levels 2+) its
    belief over the hidden hands."""

    def __init__(self, seat: Seat, level: AiLevel, rng: random.Random):
        self.seat = seat
        self.level = level
        self.rng = rng
        self.belief: Belief | None = None

    def start_round(self, hand: set[Tile]) -> None:
        if LEVEL_NEEDS_BELIEF[self.level]:
            self.belief = init_belief(self.seat, set(hand), self.rng)
        else:
            self.belief = None

    def on_event(self, state_before: RoundState, event: Event) -> None:
        if self.belief is not None:
            observe(self.belief, observed_event(state_before, event))

    def choose(self, state: RoundState):
        return choose_move(
            self.level, state, state.hands[self.seat], self.belief, self.rng
        )


@dataclass
class RoundLog:
    """Everything needed to replay one round independently."""

    round_index: int
    hands0: dict[Seat, frozenset[Tile]]
    starter: Seat
    redeals: list[DealVerdict]
    events: list[Event]
    result: RoundResult


@dataclass
class MatchRecord:
    seed: int
    match_index: int
    levels: dict[Seat, AiLevel]
    rounds: list[RoundLog]
    final: MatchState

    @property
    def round_count(self) -> int:
        return len(self.rounds)


def run_match(
    levels: dict[Seat, AiLevel],
    root_seed: int,
    match_index: int = 0,
    *,
    pass_mode: str = "strict",
    event_hook=None,
) -> MatchRecord:
    """Play one full match to 101 with AI in all four seats.

    ``event_hook(agents, state_before, event, state_after)`` runs after
    every applied event (used by the test suite to assert invariants).
    """
    match_seed = derive_seed(root_seed, "match", match_index)
    deal_rng = derived_rng(match_seed, "deal")
    agents = {
        s: AiAgent(s, levels[s], derived_rng(match_seed, "seat", s.value))
        for s in SEAT_ORDER
    }
    match = MatchState()
    rounds: list[RoundLog] = []
    while not match.over:
        hands, redeals = deal_until_valid(deal_rng)
        for agent in agents.values():
            agent.start_round(hands[agent.seat])
        if match.starter_right is None:
            starter = initial_starter(hands)
        else:
            team, _anchor = match.starter_right
            a, b = team_seats(team)
            starter = choose_starter({a: hands[a], b: hands[b]})
        state = new_round(hands, starter, match.round_index)
        events: list[Event] = []
        while not round_over(state):
            mover = state.to_move
            move = agents[mover].choose(state)
            state_before = state
            state = apply_move(state, move, pass_mode=pass_mode)
            event = state.history[-1]
            events.append(event)
            for agent in agents.values():
                agent.on_event(state_before, event)
            if event_hook is not None:
                event_hook(agents, state_before, event, state)
        result = score_round(state)
        rounds.append(
            RoundLog(
                round_index=match.round_index,
                hands0={s: frozenset(hands[s]) for s in SEAT_ORDER},
                starter=starter,
                redeals=redeals,
                events=events,
                result=result,
            )
        )
        match = match_update(match, result)
    return MatchRecord(
        seed=root_seed,
        match_index=match_index,
        levels=dict(levels),
        rounds=rounds,
        final=match,
    )


def replay_round(log: RoundLog, pass_mode: str = "strict") -> RoundResult:
    """Re-drive a recorded round through the engine and score it afresh."""
    state = new_round(
        {s: set(log.hands0[s]) for s in SEAT_ORDER}, log.starter, log.round_index
    )
    for event in log.events:
        if isinstance(event, PassEvent):
            state = apply_move(state, Pass(), seat=event.seat, pass_mode=pass_mode)
        else:
            state = apply_move(
                state, Play(event.tile, event.end), seat=event.seat, pass_mode=pass_mode
            )
    return score_round(state)


# ---------------------------------------------------------------------------
# Tournament statistics
# ---------------------------------------------------------------------------

REPORT_COLUMNS = [
    "seats",
    "matches",
    "rounds",
    "wins_ac",
    "wins_bd",
    "ties",
    "points_ac",
    "points_bd",
    "mean_points_per_round",
    "pass_rate",
    "closed_rate",
    "redeal_rate",
    "seed",
    "rng",
]


@dataclass
class SimReport:
    """Aggregate statistics for one seats configuration.

    ``pass_rate`` is pass events over all events, ``closed_rate`` counts
    blocked rounds (ties included) per round, and ``redeal_rate`` counts
    redeal notices per round.
    """

    seats: str
    seed: int
    matches: int = 0
    rounds: int = 0
    wins_ac: int = 0
    wins_bd: int = 0
    ties: int = 0
    points_ac: int = 0
    points_bd: int = 0
    events: int = 0
    passes: int = 0
    closed_rounds: int = 0
    redeals: int = 0
    rng: str = RNG_NAME

    def add_match(self, record: MatchRecord) -> None:
        self.matches += 1
        for rnd in record.rounds:
            self.rounds += 1
            result = rnd.result
            if result.awarded_to == "AC":
                self.wins_ac += 1
                self.points_ac += result.points
            elif result.awarded_to == "BD":
                self.wins_bd += 1
                self.points_bd += result.points
            else:
                self.ties += 1
            if result.outcome in ("closed", "closed_tie"):
                self.closed_rounds += 1
            self.redeals += len(rnd.redeals)
            self.events += len(rnd.events)
            self.passes += sum(1 for e in rnd.events if isinstance(e, PassEvent))

    def row(self) -> dict[str, object]:
        mean_pts = (
            (self.points_ac + self.points_bd) / self.rounds if self.rounds else 0.0
        )
        return {
            "seats": self.seats,
            "matches": self.matches,
            "rounds": self.rounds,
            "wins_ac": self.wins_ac,
            "wins_bd": self.wins_bd,
            "ties": self.ties,
            "points_ac": self.points_ac,
            "points_bd": self.points_bd,
            "mean_points_per_round": f"{mean_pts:.4f}",
            "pass_rate": f"{(self.passes / self.events if self.events else 0.0):.4f}",
            "closed_rate": f"{(self.closed_rounds / self.rounds if self.rounds else 0.0):.4f}",
            "redeal_rate": f"{(self.redeals / self.rounds if self.rounds else 0.0):.4f}",
            "seed": self.seed,
            "rng": self.rng,
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=REPORT_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerow(self.row())
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps(self.row(), indent=2, sort_keys=False) + "\n"


def parse_seats(spec: str) -> dict[Seat, AiLevel]:
    """Parse a seats spec like ``l4,l1,l4,l1`` (A,B,C,D order)."""
    parts = [p.strip().lower() for p in spec.split(",")]
    if len(parts) != 4:
        raise ValueError(f"seats spec needs 4 levels, got {spec!r}")
    try:
        return {s: AiLevel(p) for s, p in zip(SEAT_ORDER, parts)}
    except ValueError:
        raise ValueError(f"bad level in seats spec {spec!r} (use l1..l4)") from None


def seats_string(levels: dict[Seat, AiLevel]) -> str:
    return ",".join(levels[s].value for s in SEAT_ORDER)


def _run_one(args: tuple) -> MatchRecord:
    levels_values, root_seed, index, pass_mode = args
    levels = {s: AiLevel(v) for s, v in zip(SEAT_ORDER, levels_values)}
    return run_match(levels, root_seed, index, pass_mode=pass_mode)


def run_series(
    levels: dict[Seat, AiLevel],
    seed: int,
    *,
    rounds: int | None = None,
    matches: int | None = None,
    pass_mode: str = "strict",
    workers: int = 1,
    match_hook=None,
) -> SimReport:
    """Run matches until ``matches`` played, or until at least ``rounds``
    rounds accumulated (the final match always completes).

    With ``workers`` greater than one, matches run across processes in
    chunks; per-match seeds are derived from (seed, index) so the report
    is identical regardless of the worker count.
    """
    if (rounds is None) == (matches is None):
        raise ValueError("specify exactly one of rounds or matches")
    report = SimReport(seats=seats_string(levels), seed=seed)

    def done() -> bool:
        if matches is not None:
            return report.matches >= matches
        return report.rounds >= rounds

    index = 0
    if workers <= 1:
        while not done():
            record = run_match(levels, seed, index, pass_mode=pass_mode)
            report.add_match(record)
            if match_hook is not None:
                match_hook(record)
            index += 1
        return report

    levels_values = tuple(levels[s].value for s in SEAT_ORDER)
    chunk = max(workers * 4, 8)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        while not done():
            args = [
                (levels_values, seed, i, pass_mode)
                for i in range(index, index + chunk)
            ]
            for record in pool.map(_run_one, args):
                report.add_match(record)
                if match_hook is not None:
                    match_hook(record)
                index += 1
                if done():
                    break
    return report
