/**
 * Every player sees the table from their own chair: their seat at the
 * bottom edge, their partner opposite, and the play order preserved
 * around the ring.  The seats A, B, C, D form a fixed ring; the view is
 * a pure rotation of it.
 */

import { SEATS, SeatName } from "./protocol.js";

export type TablePos = "bottom" | "right" | "top" | "left";

const RING: readonly TablePos[] = ["bottom", "right", "top", "left"];

/** Where each seat sits on screen when `mySeat` views the table. */
export function tablePositions(mySeat: SeatName): Record<SeatName, TablePos> {
  const myIndex = SEATS.indexOf(mySeat);
  const out = {} as Record<SeatName, TablePos>;
  for (const seat of SEATS) {
    const offset = (SEATS.indexOf(seat) - myIndex + 4) % 4;
    out[seat] = RING[offset]!;
  }
  return out;
}

/** The seat currently shown at a given screen position. */
export function seatAt(mySeat: SeatName, pos: TablePos): SeatName {
  const positions = tablePositions(mySeat);
  const found = SEATS.find((seat) => positions[seat] === pos);
  if (!found) {
    throw new Error(`no seat at ${pos}`);
  }
  return found;
}
