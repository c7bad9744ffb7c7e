"""Pit the AI levels against each other in seeded mini-tournaments.

Each pairing seats the challenger on team AC and level 1 on team BD,
plays a fixed budget of rounds, and reports round win rates.  The same
seed always reproduces the same table.

Run:  python3 demos/level_arena.py [rounds]
"""

from __future__ import annotations

import sys
import time

from domino101.simulate import parse_seats, run_series

PAIRINGS = [
    ("l1,l1,l1,l1", "level 1 mirror (should be near even)"),
    ("l2,l1,l2,l1", "level 2: counting own vs next opponent"),
    ("l3,l1,l3,l1", "level 3: adds monopoly withholding"),
    ("l4,l1,l4,l1", "level 4: partner-aware, closes when ahead"),
]


def main() -> None:
    rounds = int(sys.argv[1]) if len(sys.argv) > 1 else 600
    seed = 1812
    print(f"{rounds} rounds per pairing, seed {seed}\n")
    print(f"{'seats':<14} {'AC wins':>8} {'BD wins':>8} {'ties':>5} "
          f"{'AC rate':>8}  note")
    for spec, note in PAIRINGS:
        t0 = time.perf_counter()
        report = run_series(parse_seats(spec), seed, rounds=rounds)
        decided = report.wins_ac + report.wins_bd
        rate = report.wins_ac / decided if decided else 0.0
        took = time.perf_counter() - t0
        print(f"{spec:<14} {report.wins_ac:>8} {report.wins_bd:>8} "
              f"{report.ties:>5} {rate:>8.3f}  {note} ({took:.1f}s)")
    print("\nHigher levels should clearly beat level 1; rerun with more "
          "rounds to tighten the estimates.")


if __name__ == "__main__":
    main()
