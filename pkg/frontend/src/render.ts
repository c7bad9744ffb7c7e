/**
 * DOM projection of a ClientView.  Rendering is a pure function of the
 * view: the whole tree under the root is rebuilt on every call, so
 * there is no incremental state to drift.  All interactive controls are
 * gated by the same legality helpers the tests exercise — in
 * particular the pass button is enabled only when no legal move exists.
 */

import { EndName, SEATS, SeatName, TilePair, partnerOf, teamOf, tileKey } from "./protocol.js";
import { ClientView } from "./model.js";
import { endsForTile, passEnabled } from "./legal.js";
import { tablePositions } from "./rotation.js";

export interface Handlers {
  onPlay(tile: TilePair, end: EndName): void;
  onPass(): void;
  onChooseStarter(seat: SeatName): void;
}

function el(
  doc: Document,
  tag: string,
  className: string,
  text?: string,
): HTMLElement {
  const node = doc.createElement(tag);
  if (className) {
    node.className = className;
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

function tileFace(doc: Document, tile: TilePair, extra = ""): HTMLElement {
  const node = el(doc, "span", `tile ${extra}`.trim());
  node.dataset.tile = tileKey(tile);
  node.appendChild(el(doc, "span", "pip", String(tile[0])));
  node.appendChild(el(doc, "span", "half-sep"));
  node.appendChild(el(doc, "span", "pip", String(tile[1])));
  return node;
}

function tileBack(doc: Document): HTMLElement {
  return el(doc, "span", "tile back");
}

function seatTitle(view: ClientView, seat: SeatName): string {
  const who = view.occupancy[seat] ?? "open";
  const level = view.aiLevels[seat];
  if (seat === view.mySeat) {
    return `${seat} — you`;
  }
  if (who === "ai" && level) {
    return `${seat} — AI ${level}`;
  }
  return `${seat} — ${who}`;
}

function renderSeatZone(
  doc: Document,
  view: ClientView,
  seat: SeatName,
  handlers: Handlers,
): HTMLElement {
  const mine = seat === view.mySeat;
  const classes = ["seat"];
  if (mine) {
    classes.push("me");
  }
  if (view.toMove === seat) {
    classes.push("to-move");
  }
  if (view.mySeat !== null && teamOf(seat) === teamOf(view.mySeat)) {
    classes.push("my-team");
  }
  const zone = el(doc, "div", classes.join(" "));
  zone.dataset.seat = seat;

  const title = el(doc, "div", "seat-title", seatTitle(view, seat));
  if (view.toMove === seat) {
    title.appendChild(el(doc, "span", "turn-marker", " ●"));
  }
  zone.appendChild(title);

  const tiles = el(doc, "div", "seat-tiles");
  if (mine) {
    for (const tile of view.myHand) {
      tiles.appendChild(renderHandTile(doc, view, tile, handlers));
    }
  } else {
    for (let i = 0; i < view.counts[seat]; i += 1) {
      tiles.appendChild(tileBack(doc));
    }
  }
  zone.appendChild(tiles);
  return zone;
}

function renderHandTile(
  doc: Document,
  view: ClientView,
  tile: TilePair,
  handlers: Handlers,
): HTMLElement {
  const myTurn = view.phase === "round" && view.toMove === view.mySeat;
  const ends = myTurn ? endsForTile(tile, view.ends, view.roundIndex) : [];
  const wrap = el(doc, "span", ends.length > 0 ? "hand-tile playable" : "hand-tile");
  wrap.dataset.tile = tileKey(tile);
  const face = tileFace(doc, tile, ends.length > 0 ? "legal" : "");
  wrap.appendChild(face);

  if (ends.length === 0) {
    return wrap;
  }
  if (view.ends === null || ends.length === 1) {
    // Opening tile, or only one end fits: a single click plays it.
    const end: EndName = view.ends === null ? "left" : ends[0]!;
    face.classList.add("clickable");
    face.addEventListener("click", () => handlers.onPlay(tile, end));
    return wrap;
  }
  // The tile fits both ends: offer an explicit picker per end.
  const picker = el(doc, "span", "end-picker");
  const labels: Record<EndName, string> = { left: "◀", right: "▶" };
  for (const end of ends) {
    const btn = el(doc, "button", "end-choice", labels[end]) as HTMLButtonElement;
    btn.type = "button";
    btn.dataset.end = end;
    btn.addEventListener("click", () => handlers.onPlay(tile, end));
    picker.appendChild(btn);
  }
  wrap.appendChild(picker);
  return wrap;
}

function renderChain(doc: Document, view: ClientView): HTMLElement {
  const center = el(doc, "div", "chain");
  if (view.chain.length === 0) {
    center.appendChild(el(doc, "div", "chain-empty", "table is empty"));
    return center;
  }
  center.appendChild(el(doc, "span", "end-label", "left"));
  for (const pair of view.chain) {
    const extra = pair[0] === pair[1] ? "double" : "";
    center.appendChild(tileFace(doc, pair, extra));
  }
  center.appendChild(el(doc, "span", "end-label", "right"));
  return center;
}

function renderHud(doc: Document, view: ClientView): HTMLElement {
  const hud = el(doc, "div", "hud");
  hud.appendChild(el(doc, "span", "room", view.roomId ? `room ${view.roomId}` : "connecting…"));
  if (view.roundIndex > 0) {
    hud.appendChild(el(doc, "span", "round", `round ${view.roundIndex}`));
  }
  const mySide = view.mySeat ? teamOf(view.mySeat) : null;
  const scoreText = `AC ${view.scores.AC} · BD ${view.scores.BD}`;
  const score = el(doc, "span", "scores", scoreText);
  if (mySide) {
    score.dataset.myTeam = mySide;
  }
  hud.appendChild(score);
  return hud;
}

function renderControls(
  doc: Document,
  view: ClientView,
  handlers: Handlers,
): HTMLElement {
  const bar = el(doc, "div", "controls");
  const pass = el(doc, "button", "pass-button", "pass") as HTMLButtonElement;
  pass.type = "button";
  pass.id = "pass";
  pass.disabled = !passEnabled(view);
  pass.addEventListener("click", () => {
    if (passEnabled(view)) {
      handlers.onPass();
    }
  });
  bar.appendChild(pass);
  if (view.notice) {
    bar.appendChild(el(doc, "div", "notice", view.notice));
  }
  return bar;
}

function renderStarterDialog(
  doc: Document,
  view: ClientView,
  handlers: Handlers,
): HTMLElement {
  const box = el(doc, "div", "dialog starter-dialog");
  box.appendChild(
    el(doc, "div", "dialog-title", `your team (${view.starterTeam ?? ""}) leads — pick the opener`),
  );
  if (view.mySeat) {
    const row = el(doc, "div", "dialog-row");
    for (const seat of [view.mySeat, partnerOf(view.mySeat)]) {
      const label = seat === view.mySeat ? `${seat} (me)` : `${seat} (partner)`;
      const btn = el(doc, "button", "starter-choice", label) as HTMLButtonElement;
      btn.type = "button";
      btn.dataset.seat = seat;
      btn.addEventListener("click", () => handlers.onChooseStarter(seat));
      row.appendChild(btn);
    }
    box.appendChild(row);
  }
  return box;
}

function renderRoundEnd(doc: Document, view: ClientView): HTMLElement {
  const box = el(doc, "div", "dialog round-end-dialog");
  const info = view.roundEnd;
  if (info) {
    const what = info.closed ? "closed" : info.outcome;
    const line =
      info.awardedTo === null
        ? `${what}: no points`
        : `${what}: ${info.points} to ${info.awardedTo}`;
    box.appendChild(el(doc, "div", "dialog-title", line));
  }
  if (view.revealed) {
    for (const seat of SEATS) {
      const tiles = view.revealed[seat];
      if (!tiles || tiles.length === 0) {
        continue;
      }
      const row = el(doc, "div", "reveal-row");
      row.appendChild(el(doc, "span", "reveal-seat", `${seat} kept:`));
      for (const tile of tiles) {
        row.appendChild(tileFace(doc, tile, "small"));
      }
      box.appendChild(row);
    }
  }
  return box;
}

function renderMatchEnd(doc: Document, view: ClientView): HTMLElement {
  const box = el(doc, "div", "dialog match-end-dialog");
  const winner = view.scores.AC >= view.scores.BD ? "AC" : "BD";
  box.appendChild(
    el(
      doc,
      "div",
      "dialog-title",
      `match over — ${winner} wins ${view.scores.AC}:${view.scores.BD}`,
    ),
  );
  return box;
}

export function render(root: HTMLElement, view: ClientView, handlers: Handlers): void {
  const doc = root.ownerDocument;
  root.textContent = "";
  root.appendChild(renderHud(doc, view));

  if (view.mySeat === null) {
    root.appendChild(el(doc, "div", "lobby", "waiting for a seat…"));
    return;
  }

  const table = el(doc, "div", "table");
  const positions = tablePositions(view.mySeat);
  for (const seat of SEATS) {
    const zone = renderSeatZone(doc, view, seat, handlers);
    zone.classList.add(`pos-${positions[seat]}`);
    table.appendChild(zone);
  }
  table.appendChild(renderChain(doc, view));
  root.appendChild(table);
  root.appendChild(renderControls(doc, view, handlers));

  if (view.phase === "lobby") {
    root.appendChild(el(doc, "div", "lobby", "waiting for players…"));
  } else if (view.phase === "starter_prompt") {
    root.appendChild(renderStarterDialog(doc, view, handlers));
  } else if (view.phase === "round_end") {
    root.appendChild(renderRoundEnd(doc, view));
  } else if (view.phase === "match_end") {
    root.appendChild(renderMatchEnd(doc, view));
  }
}
