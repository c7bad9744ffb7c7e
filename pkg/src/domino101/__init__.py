"""Partnership 101 dominoes: rules engine, opponent-modeling AI, wire
protocol, authoritative game server, and self-play tools."""

from .tiles import (
    End,
    FULL_SET,
    Seat,
    Tile,
    next_seat,
    opponents,
    partner,
    team_of,
    tile,
)
from .rules import (
    Chain,
    DealVerdict,
    MatchState,
    Move,
    PASS,
    Pass,
    Play,
    RoundResult,
    RoundState,
    apply_move,
    deal,
    deal_space_count,
    initial_starter,
    is_blocked,
    legal_moves,
    match_update,
    new_round,
    score_round,
    validate_deal,
)
from .belief import Belief, init_belief, observe, repair_sample, sample_fresh
from .policies import AiLevel, choose_move, choose_starter

__version__ = "0.1.0"

__all__ = [
    "AiLevel",
    "Belief",
    "Chain",
    "DealVerdict",
    "End",
    "FULL_SET",
    "MatchState",
    "Move",
    "PASS",
    "Pass",
    "Play",
    "RoundResult",
    "RoundState",
    "Seat",
    "Tile",
    "apply_move",
    "choose_move",
    "choose_starter",
    "deal",
    "deal_space_count",
    "init_belief",
    "initial_starter",
    "is_blocked",
    "legal_moves",
    "match_update",
    "new_round",
    "next_seat",
    "observe",
    "opponents",
    "partner",
    "repair_sample",
    "sample_fresh",
    "score_round",
    "team_of",
    "tile",
    "validate_deal",
]
