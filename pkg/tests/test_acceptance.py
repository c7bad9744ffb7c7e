"""Release gate: one test per headline guarantee of the package.

Every test re-derives its expected results from first principles (brute
force, closed-form counting, independent refolds) and prints a PASS/FAIL
line straight to the terminal so a full run reads as a report.  Budgets
for the statistical checks are chosen so each guarantee is testable at
desk scale while keeping the claimed tolerances exact.
"""

from __future__ import annotations

import asyncio
import json
import math
import random
import time
from pathlib import Path

import pytest
from scipy.stats import binomtest

from helpers import (
    REDEAL_CASES,
    blocked_oracle,
    chain_from_pairs,
    complete_deal,
    end_match_oracle,
    finished_states,
    legal_oracle,
    playout_states,
    state_from,
    team_pips,
)
from nethelpers import (
    NetClient,
    leak_audit,
    public_stream,
    room_log_path,
    run,
    server_ctx,
)

from domino101.policies import (
    mark_double_urgency,
    mark_monopoly,
    maxmin_rank,
    mmaxmin_rank,
)
from domino101.protocol import decode, encode
from domino101.replay import validate_log
from domino101.rules import (
    MatchState,
    OUTCOME_CLOSED,
    OUTCOME_CLOSED_TIE,
    OUTCOME_DOMINO,
    deal_space_count,
    is_blocked,
    legal_moves,
    match_update,
    validate_deal,
)
from domino101.server import RoomConfig
from domino101.simulate import parse_seats, replay_round, run_match, run_series
from domino101.tiles import (
    End,
    FULL_SET,
    SEAT_ORDER,
    Seat,
    Tile,
    next_seat,
    partner,
    tile,
)

GOLDEN = Path(__file__).parent / "data" / "protocol_golden.jsonl"

CORPUS_SEED = 20260825
CORPUS_MATCHES = 1000


def gate(capsys, label: str, ok: bool, detail: str) -> None:
    """Print the criterion verdict on the live terminal, then enforce it."""
    with capsys.disabled():
        print(f"\n[acceptance] {label}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"{label}: {detail}"


# ---------------------------------------------------------------------------
# Deal-space count
# ---------------------------------------------------------------------------


def test_deal_space_exact(capsys):
    """The number of distinct deals, cross-checked by two closed forms."""
    t0 = time.perf_counter()

    def comb_mult(n: int, k: int) -> int:
        r = 1
        for i in range(k):
            r = r * (n - i) // (i + 1)
        return r

    by_binomials = comb_mult(28, 7) * comb_mult(21, 7) * comb_mult(14, 7)
    by_factorials = math.factorial(28) // math.factorial(7) ** 4
    from domino101.cli import main

    assert main(["dealspace"]) == 0
    printed = capsys.readouterr().out
    elapsed = time.perf_counter() - t0
    ok = (
        by_binomials == by_factorials == deal_space_count()
        and f"{by_binomials:,}" in printed
        and elapsed < 1.0
    )
    gate(
        capsys, "deal-space", ok,
        f"C(28,7)*C(21,7)*C(14,7) = {by_binomials:,} by two methods, "
        f"CLI agrees ({elapsed * 1000:.0f} ms)",
    )


# ---------------------------------------------------------------------------
# Rules against brute force
# ---------------------------------------------------------------------------


def _score_oracle(state):
    """First-principles scoring of a finished round (no forfeits arise
    from legal random play)."""
    pips = team_pips(state)
    empty = [s for s in SEAT_ORDER if not state.hands[s]]
    if empty:
        team = "AC" if empty[0] in (Seat.A, Seat.C) else "BD"
        loser = "BD" if team == "AC" else "AC"
        return (OUTCOME_DOMINO, pips[loser], team)
    if pips["AC"] == pips["BD"]:
        return (OUTCOME_CLOSED_TIE, 0, None)
    lower = "AC" if pips["AC"] < pips["BD"] else "BD"
    return (OUTCOME_CLOSED, max(pips.values()), lower)


def test_rules_match_brute_force(capsys):
    """Legality, blockage, scoring, and redeal verdicts versus oracles."""
    t0 = time.perf_counter()
    n_states = 10_000
    for state in playout_states(seed=8101, count=n_states):
        mover = state.to_move
        assert set(legal_moves(state, mover)) == legal_oracle(state, mover)
        assert is_blocked(state) == blocked_oracle(state)

    n_finished = 10_000
    for state in finished_states(seed=8102, count=n_finished):
        from domino101.rules import score_round

        result = score_round(state)
        assert (result.outcome, result.points, result.awarded_to) == (
            _score_oracle(state)
        )

    for name, (fixed, expected) in sorted(REDEAL_CASES.items()):
        v = validate_deal(complete_deal(fixed))
        assert (v.ok, v.reason, v.seat, v.pip) == expected, name

    elapsed = time.perf_counter() - t0
    gate(
        capsys, "rules-oracles", elapsed < 30.0,
        f"{n_states:,} legality/blockage states, {n_finished:,} scored "
        f"rounds, {len(REDEAL_CASES)} redeal hands, all exact "
        f"({elapsed:.1f} s)",
    )


# ---------------------------------------------------------------------------
# Shared self-play corpus (conservation + replay + belief validity)
# ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def corpus():
    """Seeded self-play matches with one seat per AI level, instrumented
    for tile conservation and belief-constraint checks on every event."""
    levels = parse_seats("l2,l1,l3,l4")
    stats = {
        "conservation_bad": 0,
        "sample_bad": 0,
        "truth_bad": 0,
        "events": 0,
        "belief_checks": 0,
    }
    full = set(FULL_SET)

    def hook(agents, state_before, event, state_after):
        stats["events"] += 1
        held = [t for s in SEAT_ORDER for t in state_after.hands[s]]
        placed = state_after.chain.tiles
        if len(held) + len(placed) != 28 or set(held) | placed != full:
            stats["conservation_bad"] += 1
        for agent in agents.values():
            belief = agent.belief
            if belief is None:
                continue
            stats["belief_checks"] += 1
            if not belief.sample_ok():
                stats["sample_bad"] += 1
            for s in belief.hidden_seats:
                truth = state_after.hands[s]
                excluded = belief.hard_excluded[s]
                if len(truth) != belief.hand_sizes[s] or any(
                    t not in belief.unseen
                    or t.lo in excluded
                    or t.hi in excluded
                    for t in truth
                ):
                    stats["truth_bad"] += 1

    t0 = time.perf_counter()
    records = [
        run_match(levels, CORPUS_SEED, i, event_hook=hook)
        for i in range(CORPUS_MATCHES)
    ]
    stats["elapsed"] = time.perf_counter() - t0
    return records, stats


def test_conservation_and_replay(capsys, corpus):
    """Every match completes, conserves tiles, and refolds identically."""
    records, stats = corpus
    assert all(rec.final.over for rec in records)
    for rec in records:
        refold = MatchState()
        for round_log in rec.rounds:
            result = replay_round(round_log)
            assert result == round_log.result
            refold = match_update(refold, result)
        assert (refold.score_ac, refold.score_bd) == (
            rec.final.score_ac, rec.final.score_bd,
        )
    rounds = sum(rec.round_count for rec in records)
    ok = stats["conservation_bad"] == 0 and stats["elapsed"] < 120.0
    gate(
        capsys, "conservation-replay", ok,
        f"{len(records):,} matches, {rounds:,} rounds, {stats['events']:,} "
        f"events conserved and replayed to identical scores "
        f"({stats['elapsed']:.1f} s)",
    )


def test_belief_validity(capsys, corpus):
    """Maintained determinizations always satisfy the hard constraints,
    and the true hidden hands never violate them."""
    _records, stats = corpus
    ok = stats["sample_bad"] == 0 and stats["truth_bad"] == 0
    gate(
        capsys, "belief-validity", ok,
        f"{stats['belief_checks']:,} belief checks: "
        f"{stats['sample_bad']} invalid samples, "
        f"{stats['truth_bad']} truth violations",
    )


# ---------------------------------------------------------------------------
# Marking functions against brute force
# ---------------------------------------------------------------------------


def test_marking_oracles(capsys):
    """Monopoly marks match an unseen-tile brute force; the urgent-double
    threshold sits exactly between three and four opened tiles."""
    t0 = time.perf_counter()
    n_states = 10_000
    marked_states = 0
    for state in playout_states(seed=8103, count=n_states):
        hand = state.hands[state.to_move]
        expected: set[Tile] = set()
        if not state.chain.is_empty:
            for v in set(state.chain.ends):
                loose = [
                    u for u in FULL_SET
                    if u.has_pip(v) and u not in state.chain.tiles and u not in hand
                ]
                if not loose:
                    expected |= {u for u in hand if u.has_pip(v)}
        got = mark_monopoly(state, hand)
        assert got == expected
        marked_states += bool(got)

    three_opened = [(1, 5), (5, 2), (2, 0), (0, 5)]
    four_opened = three_opened + [(5, 3)]
    hand = {tile(5, 5), tile(6, 6)}
    at_three = state_from(three_opened, {Seat.A: hand}, Seat.A)
    at_four = state_from(four_opened, {Seat.A: hand}, Seat.A)
    assert at_three.chain.count_with_pip(5) == 3
    assert at_four.chain.count_with_pip(5) == 4
    boundary_ok = (
        mark_double_urgency(at_three, hand) == set()
        and mark_double_urgency(at_four, hand) == {tile(5, 5)}
    )

    elapsed = time.perf_counter() - t0
    gate(
        capsys, "marking-oracles", boundary_ok,
        f"{n_states:,} monopoly states exact ({marked_states} with marks), "
        f"urgency boundary 3-vs-4 exact ({elapsed:.1f} s)",
    )


# ---------------------------------------------------------------------------
# Ranking functions against brute force
# ---------------------------------------------------------------------------


def _ends_after(state, t: Tile, end: End) -> tuple[int, int]:
    if state.chain.is_empty:
        return (t.lo, t.hi)
    left, right = state.chain.ends
    if end is End.LEFT:
        return (t.hi if t.lo == left else t.lo, right)
    return (left, t.hi if t.lo == right else t.lo)


def test_ranking_argmax(capsys):
    """Both rankings put exactly the brute-force argmax set on top."""
    t0 = time.perf_counter()
    rng = random.Random(8104)
    target = 10_000
    checked = 0
    for state in playout_states(seed=8105, count=16_000):
        seat = state.to_move
        hand = state.hands[seat]
        moves = legal_moves(state, seat)
        if not moves:
            continue
        sample = {s: set(state.hands[s]) for s in SEAT_ORDER if s is not seat}

        own_minus_opp = {}
        with_partner = {}
        for m in moves:
            x, y = _ends_after(state, m.tile, m.end)
            own = end_match_oracle(hand - {m.tile}, x, y)
            opp = end_match_oracle(sample[next_seat(seat)], x, y)
            mate = end_match_oracle(sample[partner(seat)], x, y)
            own_minus_opp[(m.tile, m.end)] = own - opp
            with_partner[(m.tile, m.end)] = own + mate - opp

        for rank_fn, oracle in (
            (maxmin_rank, own_minus_opp),
            (mmaxmin_rank, with_partner),
        ):
            ranked = rank_fn(state, hand, sample, rng)
            best = max(oracle.values())
            expected_top = {k for k, v in oracle.items() if v == best}
            got_top = {
                (c.move.tile, c.move.end) for c in ranked if c.score == best
            }
            assert ranked[0].score == best
            assert got_top == expected_top
            assert all(
                c.score == oracle[(c.move.tile, c.move.end)] for c in ranked
            )
        checked += 1
        if checked == target:
            break

    elapsed = time.perf_counter() - t0
    gate(
        capsys, "ranking-oracles", checked >= target,
        f"{checked:,} states, argmax tie-sets and per-move scores exact "
        f"for both rankings ({elapsed:.1f} s)",
    )


# ---------------------------------------------------------------------------
# Level ordering
# ---------------------------------------------------------------------------


def test_level_ordering(capsys):
    """Higher levels beat level 1 with 99% binomial confidence; the
    all-level-1 table stays near even."""
    t0 = time.perf_counter()
    budget = 5_500  # decided rounds stay above 5,000 despite rare ties
    details = []
    ok = True
    for spec in ("l2,l1,l2,l1", "l4,l1,l4,l1"):
        report = run_series(parse_seats(spec), 8106, rounds=budget)
        decided = report.wins_ac + report.wins_bd
        assert decided >= 5_000
        rate = report.wins_ac / decided
        p = binomtest(report.wins_ac, decided, 0.5, alternative="greater").pvalue
        ok = ok and rate > 0.5 and p < 0.01
        details.append(f"{spec.split(',')[0]} rate {rate:.3f} (p={p:.1e})")

    report = run_series(parse_seats("l1,l1,l1,l1"), 8107, rounds=budget)
    decided = report.wins_ac + report.wins_bd
    assert decided >= 5_000
    balance = report.wins_ac / decided
    ok = ok and 0.45 <= balance <= 0.55
    elapsed = time.perf_counter() - t0
    gate(
        capsys, "level-ordering", ok,
        ", ".join(details) + f", l1 symmetry {balance:.3f} "
        f"({decided:,} decided rounds each, {elapsed:.0f} s)",
    )


# ---------------------------------------------------------------------------
# Wire protocol
# ---------------------------------------------------------------------------


def test_protocol_wire(capsys, tmp_path):
    """Golden lines round-trip byte-exact; four scripted clients finish a
    match over loopback with no hidden-tile leaks; out-of-order sequence
    numbers are rejected wherever the violation lands."""
    raw_lines = GOLDEN.read_bytes().splitlines(keepends=True)
    assert len(raw_lines) == 22
    for raw in raw_lines:
        assert encode(decode(raw)) == raw

    async def match_scenario():
        room = RoomConfig(seed=8108, expected_humans=4, log_dir=str(tmp_path))
        async with server_ctx(room) as server:
            clients = [
                await (await NetClient.connect(server.tcp_port, n)).join()
                for n in ("n", "e", "s", "w")
            ]
            ends = await asyncio.gather(
                *(c.play_until_match_end() for c in clients)
            )
            scores = [env.data["scores"] for env in ends]
            assert all(s == scores[0] for s in scores)
            assert max(scores[0].values()) >= 101
            for c in clients:
                leak_audit(c)
            streams = [public_stream(c) for c in clients]
            assert all(s == streams[0] for s in streams)
            for c in clients:
                c.close()
            return scores[0]

    final = run(match_scenario())

    async def fuzz_scenario():
        room = RoomConfig(seed=8109, expected_humans=4, log_dir=str(tmp_path))
        async with server_ctx(room) as server:
            rng = random.Random(8110)
            rejected = 0
            for i in range(12):
                reader, writer = await asyncio.open_connection(
                    "127.0.0.1", server.tcp_port
                )
                seqs = []
                last = 0
                for _ in range(rng.randint(2, 6)):
                    last += rng.randint(1, 5)
                    seqs.append(last)
                bad = rng.randint(1, last)  # repeat or regress, never ahead

                def line(seq, msg_type, data):
                    return (
                        json.dumps(
                            {"v": 1, "seq": seq, "type": msg_type, "data": data},
                            separators=(",", ":"),
                        ).encode() + b"\n"
                    )

                writer.write(line(seqs[0], "hello", {"room": f"fz{i}"}))
                await writer.drain()
                for seq in seqs[1:]:
                    writer.write(line(seq, "ping", {}))
                    await writer.drain()
                    while True:
                        env = decode(await reader.readline())
                        if env.type == "pong":
                            break
                writer.write(line(bad, "ping", {}))
                await writer.drain()
                while True:
                    payload = await reader.readline()
                    if not payload:
                        break
                    env = decode(payload)
                    if env.type == "error":
                        assert env.data["code"] == "seq"
                        rejected += 1
                        break
                writer.close()
            return rejected

    rejected = run(fuzz_scenario())
    gate(
        capsys, "protocol", rejected == 12,
        f"22 golden lines byte-exact, four-client loopback match to "
        f"{final['AC']}:{final['BD']} with zero leaks, 12/12 fuzzed "
        f"sequence violations rejected",
    )


# ---------------------------------------------------------------------------
# Resilience
# ---------------------------------------------------------------------------


def test_resilience_transcripts(capsys, tmp_path):
    """Timeout and drop/reconnect scenarios finish the match and leave
    transcripts the validator accepts end to end."""

    async def timeout_scenario():
        room = RoomConfig(
            seed=8111, expected_humans=1, move_timeout_ms=1000,
            log_dir=str(tmp_path / "t"),
        )
        async with server_ctx(room) as server:
            client = await (await NetClient.connect(server.tcp_port, "idle")).join()
            stalled = {"n": 0}

            async def hook(c, env):
                if (
                    env.type == "turn"
                    and env.data["seat"] == c.seat.value
                    and stalled["n"] == 0
                ):
                    stalled["n"] = 1
                    return True
                return False

            end = await client.play_until_match_end(hook=hook)
            assert stalled["n"] == 1 and max(end.data["scores"].values()) >= 101
            path = room_log_path(server)
            client.close()
        return path

    async def reconnect_scenario():
        room = RoomConfig(
            seed=8112, expected_humans=1, log_dir=str(tmp_path / "r"),
        )
        async with server_ctx(room) as server:
            first = await (await NetClient.connect(server.tcp_port, "flak")).join()
            moved = {"n": 0}

            async def hook(c, env):
                if env.type == "turn" and env.data["seat"] == c.seat.value:
                    moved["n"] += 1
                    if moved["n"] == 2:
                        raise ConnectionResetError("simulated drop")
                return False

            with pytest.raises((ConnectionError, AssertionError)):
                await first.play_until_match_end(hook=hook)
            first.close()

            second = await NetClient.connect(server.tcp_port, "flak")
            second.token = first.token
            await second.rejoin()
            assert second.seat == first.seat
            end = await second.play_until_match_end()
            assert max(end.data["scores"].values()) >= 101
            path = room_log_path(server)
            second.close()
        return path

    verdicts = []
    for scenario in (timeout_scenario(), reconnect_scenario()):
        path = run(scenario)
        report = validate_log(path)
        assert report.ok and not report.truncated, report.verdict
        verdicts.append(report.verdict)
    gate(
        capsys, "resilience", len(verdicts) == 2,
        f"timeout: {verdicts[0]}; reconnect: {verdicts[1]}",
    )
