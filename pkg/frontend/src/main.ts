/**
 * Browser entry point: join a room from the URL (or a small form),
 * fold every server message into the view, and re-render.  The page
 * keeps the session token so a reload within the server's grace period
 * reclaims the same seat.
 */

import { EndName, SeatName, TilePair, Wire } from "./protocol.js";
import { ClientView, fold, initialView } from "./model.js";
import { render, Handlers } from "./render.js";
import { Session, connect } from "./net.js";

const PING_INTERVAL_MS = 15_000;

function defaultUrl(): string {
  const host = location.hostname || "127.0.0.1";
  return `ws://${host}:7102/ws`;
}

function tokenStorageKey(room: string): string {
  return `domino101:${room}:token`;
}

function start(root: HTMLElement, url: string, room: string, name: string): void {
  let view: ClientView = initialView();
  let session: Session | null = null;

  const handlers: Handlers = {
    onPlay(tile: TilePair, end: EndName) {
      session?.send("move", { tile, end });
    },
    onPass() {
      session?.send("pass", {});
    },
    onChooseStarter(seat: SeatName) {
      session?.send("choose_starter", { seat });
    },
  };

  const paint = () => render(root, view, handlers);

  const token = sessionStorage.getItem(tokenStorageKey(room)) ?? undefined;
  session = connect({
    url,
    name,
    room,
    token,
    onMessage(msg: Wire) {
      view = fold(view, msg);
      if (view.token) {
        sessionStorage.setItem(tokenStorageKey(room), view.token);
      }
      paint();
    },
    onClose(reason: string) {
      clearInterval(keepalive);
      view = { ...view, notice: `disconnected: ${reason} — reload to rejoin` };
      paint();
    },
  });

  const keepalive = setInterval(() => {
    if (view.phase !== "match_end") {
      session?.send("ping", {});
    }
  }, PING_INTERVAL_MS);

  paint();
}

function showJoinForm(root: HTMLElement): void {
  const doc = root.ownerDocument;
  root.textContent = "";
  const form = doc.createElement("form");
  form.className = "join-form";
  const fields: Array<[string, string, string]> = [
    ["name", "your name", "guest"],
    ["room", "room", "table1"],
    ["ws", "server", defaultUrl()],
  ];
  for (const [key, label, fallback] of fields) {
    const row = doc.createElement("label");
    row.textContent = `${label} `;
    const input = doc.createElement("input");
    input.name = key;
    input.value = fallback;
    row.appendChild(input);
    form.appendChild(row);
  }
  const go = doc.createElement("button");
  go.type = "submit";
  go.textContent = "join";
  form.appendChild(go);
  form.addEventListener("submit", (ev) => {
    ev.preventDefault();
    const data = new FormData(form);
    const params = new URLSearchParams();
    for (const [key] of fields) {
      params.set(key, String(data.get(key) ?? ""));
    }
    location.search = params.toString();
  });
  root.appendChild(form);
}

function boot(): void {
  const root = document.getElementById("app");
  if (!root) {
    throw new Error("missing #app container");
  }
  const params = new URLSearchParams(location.search);
  const room = params.get("room");
  if (!room) {
    showJoinForm(root);
    return;
  }
  const url = params.get("ws") || defaultUrl();
  const name = params.get("name") || "guest";
  start(root, url, room, name);
}

boot();
