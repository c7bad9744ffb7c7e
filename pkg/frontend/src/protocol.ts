/**
 * Wire envelope handling: one JSON object per message, identical schema
 * on TCP and WebSocket.  Sequence numbers are strictly monotone per
 * direction; the server hangs up on any repeat or regression, so the
 * client enforces the same rule on what it receives.
 */

export const PROTOCOL_VERSION = 1;

export type SeatName = "A" | "B" | "C" | "D";
export const SEATS: readonly SeatName[] = ["A", "B", "C", "D"];

export type TilePair = [number, number];
export type EndName = "left" | "right";

export interface Wire {
  v: number;
  seq: number;
  type: string;
  data: Record<string, unknown>;
}

export function partnerOf(seat: SeatName): SeatName {
  switch (seat) {
    case "A": return "C";
    case "B": return "D";
    case "C": return "A";
    case "D": return "B";
  }
}

export function teamOf(seat: SeatName): "AC" | "BD" {
  return seat === "A" || seat === "C" ? "AC" : "BD";
}

/** Outbound counter: 1, 2, 3, ... */
export class SeqSource {
  private n = 0;
  next(): number {
    this.n += 1;
    return this.n;
  }
}

/** Inbound guard: every seq must strictly exceed the last. */
export class SeqTracker {
  private last = 0;
  check(seq: number): void {
    if (!Number.isInteger(seq) || seq <= this.last) {
      throw new Error(`sequence violation: got ${seq} after ${this.last}`);
    }
    this.last = seq;
  }
}

export function encode(seq: number, type: string, data: Record<string, unknown>): string {
  return JSON.stringify({ v: PROTOCOL_VERSION, seq, type, data });
}

export function decode(line: string): Wire {
  let parsed: unknown;
  try {
    parsed = JSON.parse(line);
  } catch (err) {
    throw new Error(`malformed message: ${(err as Error).message}`);
  }
  if (typeof parsed !== "object" || parsed === null || Array.isArray(parsed)) {
    throw new Error("malformed message: not an object");
  }
  const obj = parsed as Record<string, unknown>;
  if (obj.v !== PROTOCOL_VERSION) {
    throw new Error(`unsupported protocol version: ${String(obj.v)}`);
  }
  if (typeof obj.seq !== "number" || !Number.isInteger(obj.seq)) {
    throw new Error("malformed message: bad seq");
  }
  if (typeof obj.type !== "string") {
    throw new Error("malformed message: bad type");
  }
  const data = obj.data;
  if (typeof data !== "object" || data === null || Array.isArray(data)) {
    throw new Error("malformed message: bad data");
  }
  return {
    v: PROTOCOL_VERSION,
    seq: obj.seq,
    type: obj.type,
    data: data as Record<string, unknown>,
  };
}

export function asTile(raw: unknown): TilePair {
  if (!Array.isArray(raw) || raw.length !== 2) {
    throw new Error(`bad tile: ${JSON.stringify(raw)}`);
  }
  const [a, b] = raw as [unknown, unknown];
  if (typeof a !== "number" || typeof b !== "number") {
    throw new Error(`bad tile: ${JSON.stringify(raw)}`);
  }
  return [a, b];
}

export function sameTile(a: TilePair, b: TilePair): boolean {
  return a[0] === b[0] && a[1] === b[1];
}

export function tileKey(t: TilePair): string {
  return `${t[0]}-${t[1]}`;
}
