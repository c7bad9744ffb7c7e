/**
 * Local legality, computed from public state plus the player's own hand
 * (the chain is public and the hand is known, so no server round-trip
 * is needed to highlight ends or to gate the pass control).  The server
 * stays the final authority; these checks only drive the UI.
 */

import { EndName, TilePair } from "./protocol.js";
import { ClientView } from "./model.js";

export interface MoveOption {
  tile: TilePair;
  ends: EndName[];
}

/** Every playable (tile, ends) pair for a hand facing the given ends. */
export function legalOptions(
  hand: TilePair[],
  ends: TilePair | null,
  roundIndex: number,
): MoveOption[] {
  if (ends === null) {
    // Empty chain: round 1 must open with the 1-1; later rounds open
    // with anything.  Either end is equivalent for the first tile.
    const openers =
      roundIndex === 1
        ? hand.filter((t) => t[0] === 1 && t[1] === 1)
        : hand;
    return openers.map((tile) => ({ tile, ends: ["left", "right"] }));
  }
  const [left, right] = ends;
  const options: MoveOption[] = [];
  for (const tile of hand) {
    const fits: EndName[] = [];
    if (tile[0] === left || tile[1] === left) {
      fits.push("left");
    }
    if (tile[0] === right || tile[1] === right) {
      fits.push("right");
    }
    if (fits.length > 0) {
      options.push({ tile, ends: fits });
    }
  }
  return options;
}

export function hasLegalMove(
  hand: TilePair[],
  ends: TilePair | null,
  roundIndex: number,
): boolean {
  return legalOptions(hand, ends, roundIndex).length > 0;
}

/** Ends playable for one specific tile (for highlighting a selection). */
export function endsForTile(
  tile: TilePair,
  ends: TilePair | null,
  roundIndex: number,
): EndName[] {
  const match = legalOptions([tile], ends, roundIndex);
  return match.length > 0 ? match[0]!.ends : [];
}

/** It is my turn and I genuinely cannot play: only then may I pass. */
export function passEnabled(view: ClientView): boolean {
  return (
    view.mySeat !== null &&
    view.toMove === view.mySeat &&
    !hasLegalMove(view.myHand, view.ends, view.roundIndex)
  );
}

/** It is my turn and this move is locally legal. */
export function moveEnabled(view: ClientView, tile: TilePair, end: EndName): boolean {
  return (
    view.mySeat !== null &&
    view.toMove === view.mySeat &&
    endsForTile(tile, view.ends, view.roundIndex).includes(end)
  );
}
