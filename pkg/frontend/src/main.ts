// Browser wiring: menu, canvas, keyboard, the 30 fps lockstep loop, the
// decision-tree viewer. Served statically by `platgp serve` or any static
// host pointed at the same origin as the session server.

import { KeyTracker } from "./input.js";
import { FinishedMessage, StateMessage } from "./protocol.js";
import { renderFrame } from "./render.js";
import {
  ClientSession,
  ServerError,
  SocketLike,
  sessionLoop,
} from "./session.js";
import { drawTree, fetchAgentTree, layoutTree } from "./tree.js";

const $ = <T extends HTMLElement>(id: string) =>
  document.getElementById(id) as T;

function wsUrl(): string {
  const proto = location.protocol === "https:" ? "wss:" : "ws:";
  return `${proto}//${location.host}/session`;
}

function banner(text: string, kind: "info" | "error" = "info"): void {
  const el = $("banner");
  el.textContent = text;
  el.className = kind;
  el.style.display = text ? "block" : "none";
}

async function refreshAgents(): Promise<void> {
  const select = $<HTMLSelectElement>("agent");
  try {
    const res = await fetch("/api/agents");
    const ids = (await res.json()) as string[];
    select.innerHTML = "";
    for (const id of ids) {
      const opt = document.createElement("option");
      opt.value = id;
      opt.textContent = id;
      select.appendChild(opt);
    }
  } catch {
    banner("cannot reach the server for the agent list", "error");
  }
}

let activeSession: ClientSession | null = null;

async function startSession(mode: "play" | "watch"): Promise<void> {
  activeSession?.close();
  const canvas = $<HTMLCanvasElement>("game");
  const ctx = canvas.getContext("2d")!;
  const keys = new KeyTracker();
  keys.attach(window);
  const seed = Number($<HTMLInputElement>("seed").value) || 1;
  const difficulty = Number($<HTMLInputElement>("difficulty").value) || 0;
  const overlayBox = $<HTMLInputElement>("overlay");

  banner("");
  const socket = new WebSocket(wsUrl());
  const session = new ClientSession(socket as unknown as SocketLike);
  activeSession = session;
  await new Promise<void>((resolve, reject) => {
    socket.addEventListener("open", () => resolve());
    socket.addEventListener("error", () =>
      reject(new Error("cannot connect to the session server")));
  });
  try {
    const welcome = await session.hello();
    if (mode === "watch") {
      session.start({
        levelSeed: seed,
        difficulty,
        mode,
        agentId: $<HTMLSelectElement>("agent").value,
      });
    } else {
      session.start({ levelSeed: seed, difficulty, mode });
    }
    void welcome;
    let bits = 0;
    const finished = await sessionLoop(
      session,
      () => {
        bits = mode === "play" ? keys.bits() : 0;
        return bits;
      },
      {
        tickMs: 33,
        onState: (state: StateMessage) => {
          canvas.width = state.viewport.width * 32;
          canvas.height = state.viewport.rows.length * 32;
          renderFrame(ctx, state, bits, {
            showObservationGrid: overlayBox.checked,
          });
        },
      },
    );
    endScreen(finished);
  } catch (err) {
    if (err instanceof ServerError) {
      banner(`server refused: ${err.message}`, "error");
    } else {
      banner(
        "session lost: the connection dropped and the trace was NOT saved",
        "error",
      );
    }
  }
}

function endScreen(finished: FinishedMessage | null): void {
  if (!finished) return;
  const trace = finished.traceId
    ? ` — trace ${finished.traceId} saved (use it in evolve configs)`
    : "";
  banner(`${finished.outcome}${trace}`, "info");
}

async function showTree(): Promise<void> {
  const canvas = $<HTMLCanvasElement>("tree");
  const ctx = canvas.getContext("2d")!;
  const agentId = $<HTMLSelectElement>("agent").value;
  try {
    const tree = await fetchAgentTree("", agentId);
    const layout = layoutTree(tree.root);
    const view = { panX: 20, panY: 20, zoom: 1 };
    const redraw = () =>
      drawTree(ctx, layout, view, canvas.width, canvas.height);
    canvas.onwheel = (ev) => {
      ev.preventDefault();
      view.zoom = Math.min(4, Math.max(0.2, view.zoom * (ev.deltaY < 0 ? 1.1 : 0.9)));
      redraw();
    };
    let dragging: { x: number; y: number } | null = null;
    canvas.onmousedown = (ev) => (dragging = { x: ev.clientX, y: ev.clientY });
    canvas.onmouseup = () => (dragging = null);
    canvas.onmousemove = (ev) => {
      if (!dragging) return;
      view.panX += ev.clientX - dragging.x;
      view.panY += ev.clientY - dragging.y;
      dragging = { x: ev.clientX, y: ev.clientY };
      redraw();
    };
    banner(`${agentId}: ${tree.nodeCount} nodes`);
    redraw();
  } catch (err) {
    banner(String(err), "error");
  }
}

window.addEventListener("DOMContentLoaded", () => {
  void refreshAgents();
  $("play").addEventListener("click", () => void startSession("play"));
  $("watch").addEventListener("click", () => void startSession("watch"));
  $("view-tree").addEventListener("click", () => void showTree());
});
