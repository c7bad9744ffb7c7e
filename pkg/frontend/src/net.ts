/**
 * One WebSocket session: hello on open, envelope encode/decode with
 * strict sequence checking, and messages delivered in arrival order.
 * The constructor is injectable so tests can drive the same code with a
 * Node WebSocket implementation.
 */

import { SeqSource, SeqTracker, Wire, decode, encode } from "./protocol.js";

export interface WebSocketLike {
  send(data: string): void;
  close(): void;
  addEventListener(type: "open" | "message" | "close" | "error", fn: (ev: any) => void): void;
}

export type WebSocketFactory = (url: string) => WebSocketLike;

export interface SessionOptions {
  url: string;
  name: string;
  room: string;
  token?: string;
  makeSocket?: WebSocketFactory;
  onMessage: (msg: Wire) => void;
  onClose: (reason: string) => void;
}

export interface Session {
  send(type: string, data: Record<string, unknown>): void;
  close(): void;
}

export function connect(options: SessionOptions): Session {
  const makeSocket: WebSocketFactory =
    options.makeSocket ?? ((url) => new WebSocket(url) as unknown as WebSocketLike);
  const socket = makeSocket(options.url);
  const outSeq = new SeqSource();
  const inSeq = new SeqTracker();
  let closed = false;

  const session: Session = {
    send(type, data) {
      socket.send(encode(outSeq.next(), type, data));
    },
    close() {
      closed = true;
      socket.close();
    },
  };

  socket.addEventListener("open", () => {
    const hello: Record<string, unknown> = {
      name: options.name,
      room: options.room,
    };
    if (options.token) {
      hello.token = options.token;
    }
    session.send("hello", hello);
  });

  socket.addEventListener("message", (event: { data: unknown }) => {
    const text =
      typeof event.data === "string" ? event.data : String(event.data);
    let msg: Wire;
    try {
      msg = decode(text);
      inSeq.check(msg.seq);
    } catch (err) {
      socket.close();
      options.onClose((err as Error).message);
      return;
    }
    options.onMessage(msg);
  });

  socket.addEventListener("close", () => {
    if (!closed) {
      options.onClose("connection closed");
    }
  });

  socket.addEventListener("error", () => {
    options.onClose("connection error");
  });

  return session;
}
