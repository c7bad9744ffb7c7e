/**
 * Shared access to the captured per-seat wire streams under
 * test/fixtures/.  Each file holds every line one seat received from a
 * real server during one complete four-human match, verbatim
 * (regenerate with tools/capture.py).
 */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { SeatName, Wire, decode } from "../src/protocol.js";
import { ClientView, fold, initialView } from "../src/model.js";

const here = dirname(fileURLToPath(import.meta.url));

export const FIXTURE_SEATS: readonly SeatName[] = ["A", "B", "C", "D"];

export function seatStream(seat: SeatName): Wire[] {
  const path = join(here, "fixtures", `seat_${seat}.jsonl`);
  const text = readFileSync(path, "utf-8");
  return text
    .split("\n")
    .filter((line) => line.length > 0)
    .map(decode);
}

export interface Decision {
  /** The view exactly when this seat was told to move. */
  view: ClientView;
  /** The `played` or `passed` echo the server then broadcast for it. */
  action: Wire;
}

/** Every own-turn snapshot in a seat's stream, with its resolution. */
export function decisions(seat: SeatName): Decision[] {
  const stream = seatStream(seat);
  const out: Decision[] = [];
  let view = initialView();
  for (let i = 0; i < stream.length; i += 1) {
    const m = stream[i]!;
    view = fold(view, m);
    if (m.type !== "turn" || m.data.seat !== seat) {
      continue;
    }
    for (let j = i + 1; j < stream.length; j += 1) {
      const next = stream[j]!;
      if (next.type === "played" || next.type === "passed") {
        if (next.data.seat !== seat) {
          throw new Error(
            `stream ${seat}: turn at seq ${m.seq} resolved by ${String(next.data.seat)}`,
          );
        }
        out.push({ view, action: next });
        break;
      }
    }
  }
  return out;
}
