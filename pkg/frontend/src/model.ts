/**
 * The client's whole knowledge of the table, built as a pure fold over
 * the messages the server sent *to this seat*.  Folding the same stream
 * twice yields identical views; nothing here ever guesses at another
 * player's tiles — before the round's reveal the other hands exist only
 * as face-down counts.
 */

import {
  EndName,
  SEATS,
  SeatName,
  TilePair,
  Wire,
  asTile,
  sameTile,
} from "./protocol.js";

export type Phase =
  | "lobby"
  | "round"
  | "starter_prompt"
  | "round_end"
  | "match_end";

export interface RoundEndInfo {
  outcome: string;
  points: number;
  awardedTo: string | null;
  closed: boolean;
}

export interface ClientView {
  mySeat: SeatName | null;
  token: string | null;
  roomId: string | null;
  phase: Phase;
  occupancy: Partial<Record<SeatName, string>>;
  aiLevels: Partial<Record<SeatName, string>>;
  myHand: TilePair[];
  /** Face-down tile counts, all four seats (own mirrors myHand.length). */
  counts: Record<SeatName, number>;
  /** Oriented pip pairs, leftmost first. */
  chain: TilePair[];
  ends: TilePair | null;
  toMove: SeatName | null;
  deadlineMs: number | null;
  roundIndex: number;
  scores: { AC: number; BD: number };
  starterTeam: string | null;
  revealed: Partial<Record<SeatName, TilePair[]>> | null;
  roundEnd: RoundEndInfo | null;
  /** Latest transient notice (invalid move, redeal, protocol error). */
  notice: string | null;
}

export function initialView(): ClientView {
  return {
    mySeat: null,
    token: null,
    roomId: null,
    phase: "lobby",
    occupancy: {},
    aiLevels: {},
    myHand: [],
    counts: { A: 0, B: 0, C: 0, D: 0 },
    chain: [],
    ends: null,
    toMove: null,
    deadlineMs: null,
    roundIndex: 0,
    scores: { AC: 0, BD: 0 },
    starterTeam: null,
    revealed: null,
    roundEnd: null,
    notice: null,
  };
}

function sortHand(hand: TilePair[]): TilePair[] {
  return [...hand].sort((a, b) => a[0] - b[0] || a[1] - b[1]);
}

/** Orient a played tile for display, given the ends it produced. */
function orient(tile: TilePair, end: EndName, newEnds: TilePair): TilePair {
  const pipSum = tile[0] + tile[1];
  if (end === "left") {
    return [newEnds[0], pipSum - newEnds[0]];
  }
  return [pipSum - newEnds[1], newEnds[1]];
}

export function fold(view: ClientView, msg: Wire): ClientView {
  const next: ClientView = {
    ...view,
    occupancy: { ...view.occupancy },
    aiLevels: { ...view.aiLevels },
    myHand: [...view.myHand],
    counts: { ...view.counts },
    chain: [...view.chain],
    scores: { ...view.scores },
    notice: null,
  };
  const d = msg.data;

  switch (msg.type) {
    case "welcome":
      next.mySeat = d.seat as SeatName;
      next.token = d.token as string;
      next.roomId = d.room_id as string;
      break;

    case "seats":
      next.occupancy = { ...(d.occupancy as Record<SeatName, string>) };
      next.aiLevels = { ...(d.ai_levels as Record<SeatName, string>) };
      break;

    case "deal":
      next.myHand = sortHand((d.hand as unknown[]).map(asTile));
      for (const seat of SEATS) {
        next.counts[seat] = 7;
      }
      next.chain = [];
      next.ends = null;
      next.revealed = null;
      next.roundEnd = null;
      next.toMove = null;
      break;

    case "redeal": {
      const pip = "shown_tiles" in d ? " (same face)" : "";
      next.notice = `redeal: seat ${String(d.seat)} drew a ${String(d.reason)} hand${pip}`;
      break;
    }

    case "round_start":
      next.phase = "round";
      next.roundIndex = d.round_index as number;
      if (d.scores) {
        next.scores = { ...(d.scores as { AC: number; BD: number }) };
      }
      next.starterTeam = null;
      break;

    case "turn": {
      next.toMove = d.seat as SeatName;
      next.deadlineMs = d.deadline_ms as number;
      const ends = d.ends as [number, number] | null;
      next.ends = ends ? [ends[0], ends[1]] : null;
      break;
    }

    case "played": {
      const seat = d.seat as SeatName;
      const tile = asTile(d.tile);
      const end = d.end as EndName;
      const newEnds = asTile(d.new_ends);
      const pair: TilePair =
        next.chain.length === 0 ? newEnds : orient(tile, end, newEnds);
      if (next.chain.length === 0 || end === "right") {
        next.chain.push(pair);
      } else {
        next.chain.unshift(pair);
      }
      next.ends = newEnds;
      next.counts[seat] = Math.max(0, next.counts[seat] - 1);
      if (seat === view.mySeat) {
        next.myHand = next.myHand.filter((t) => !sameTile(t, tile));
      }
      next.toMove = null;
      break;
    }

    case "passed":
      next.toMove = null;
      break;

    case "invalid":
      next.notice = `rejected: ${String(d.code)}${d.message ? ` — ${String(d.message)}` : ""}`;
      break;

    case "starter_prompt":
      next.phase = "starter_prompt";
      next.starterTeam = d.team as string;
      break;

    case "round_end": {
      next.phase = "round_end";
      const revealed = d.revealed_hands as Record<SeatName, unknown[]>;
      next.revealed = Object.fromEntries(
        Object.entries(revealed).map(([seat, tiles]) => [
          seat,
          sortHand((tiles as unknown[]).map(asTile)),
        ]),
      ) as Partial<Record<SeatName, TilePair[]>>;
      next.roundEnd = {
        outcome: d.outcome as string,
        points: d.points as number,
        awardedTo: (d.awarded_to as string | null) ?? null,
        closed: Boolean(d.closed),
      };
      next.toMove = null;
      break;
    }

    case "match_end":
      next.phase = "match_end";
      next.scores = { ...(d.scores as { AC: number; BD: number }) };
      next.toMove = null;
      break;

    case "error":
      next.notice = `protocol error: ${String(d.code)}`;
      break;

    case "pong":
      break;

    default:
      // Unknown additive message types are ignored by design.
      break;
  }
  return next;
}

/**
 * Display-model conservation: once a round is dealt, the tiles on the
 * chain plus every seat's count must cover the full set of 28.
 */
export function conserved(view: ClientView): boolean {
  if (view.counts.A + view.counts.B + view.counts.C + view.counts.D === 0) {
    return true; // nothing dealt yet
  }
  const held = SEATS.reduce((acc, seat) => acc + view.counts[seat], 0);
  return held + view.chain.length === 28 &&
    (view.mySeat === null || view.counts[view.mySeat] === view.myHand.length);
}
