// Canvas rendering of one state message: viewport tiles, entities, HUD and
// the optional 6x6 observation-grid overlay. Rendering is stateless: every
// frame is drawn entirely from the last state message, so a refresh or a
// dropped canvas redraws identically.

import { FP, StateMessage } from "./protocol.js";
import { decodeBits } from "./input.js";

export const TILE_PX = 32;

export const COLORS = {
  sky: "#cfe8ff",
  solid: "#6b4a2b",
  brick: "#b5651d",
  coin: "#e8b800",
  agent: "#d02020",
  agentSmall: "#f06060",
  enemy: "#3a7a2a",
  projectile: "#222222",
  overlay: "rgba(30, 90, 200, 0.8)",
  hud: "#111111",
};

// the minimal 2D-context surface we use; browser canvas satisfies it and
// node tests count calls on a stub
export interface Ctx2D {
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  font: string;
  globalAlpha: number;
  fillRect(x: number, y: number, w: number, h: number): void;
  strokeRect(x: number, y: number, w: number, h: number): void;
  fillText(text: string, x: number, y: number): void;
}

export interface RenderOptions {
  showObservationGrid?: boolean;
}

function tileColor(glyph: string): string | null {
  switch (glyph) {
    case "#":
      return COLORS.solid;
    case "B":
      return COLORS.brick;
    case "c":
      return COLORS.coin;
    default:
      return null; // empty / markers draw nothing
  }
}

export interface RenderCounts {
  tiles: number;
  coins: number;
  enemies: number;
  projectiles: number;
  overlayCells: number;
}

/** Draw one frame; returns what was drawn (used by tests and the HUD). */
export function renderFrame(
  ctx: Ctx2D,
  state: StateMessage,
  bits: number,
  opts: RenderOptions = {},
): RenderCounts {
  const vp = state.viewport;
  const counts: RenderCounts = {
    tiles: 0,
    coins: 0,
    enemies: 0,
    projectiles: 0,
    overlayCells: 0,
  };
  const widthPx = vp.width * TILE_PX;
  const heightPx = vp.rows.length * TILE_PX;
  ctx.globalAlpha = 1;
  ctx.fillStyle = COLORS.sky;
  ctx.fillRect(0, 0, widthPx, heightPx);

  const toPxX = (worldX: number) => (worldX / FP - vp.x0) * TILE_PX;
  const toPxY = (worldY: number) => (worldY / FP) * TILE_PX;

  for (let y = 0; y < vp.rows.length; y++) {
    const row = vp.rows[y];
    for (let x = 0; x < row.length; x++) {
      const color = tileColor(row[x]);
      if (!color) continue;
      ctx.fillStyle = color;
      if (row[x] === "c") {
        counts.coins += 1;
        const cx = (x + 0.25) * TILE_PX;
        ctx.fillRect(cx, (y + 0.25) * TILE_PX, TILE_PX / 2, TILE_PX / 2);
      } else {
        counts.tiles += 1;
        ctx.fillRect(x * TILE_PX, y * TILE_PX, TILE_PX, TILE_PX);
      }
    }
  }

  for (const enemy of state.enemies) {
    ctx.fillStyle = COLORS.enemy;
    ctx.fillRect(
      toPxX(enemy.x) - TILE_PX * 0.375,
      toPxY(enemy.y) - TILE_PX * 0.875,
      TILE_PX * 0.75,
      TILE_PX * 0.875,
    );
    counts.enemies += 1;
  }

  for (const p of state.projectiles) {
    ctx.fillStyle = COLORS.projectile;
    ctx.fillRect(toPxX(p.x) - 3, toPxY(p.y) - 3, 6, 6);
    counts.projectiles += 1;
  }

  const agent = state.agent;
  const tall = agent.size === "tall";
  const hPx = (tall ? 480 : 224) / FP * TILE_PX;
  ctx.fillStyle = tall ? COLORS.agent : COLORS.agentSmall;
  ctx.fillRect(
    toPxX(agent.x) - TILE_PX * 0.375,
    toPxY(agent.y) - hPx,
    TILE_PX * 0.75,
    hPx,
  );

  if (opts.showObservationGrid) {
    // 6x6 window around the agent's tile, offsets dx,dy in [-3, 2]
    const atx = Math.floor(agent.x / FP);
    const aty = Math.floor((agent.y - (tall ? 240 : 112)) / FP);
    ctx.strokeStyle = COLORS.overlay;
    for (let dx = -3; dx <= 2; dx++) {
      for (let dy = -3; dy <= 2; dy++) {
        ctx.strokeRect(
          (atx + dx - vp.x0) * TILE_PX,
          (aty + dy) * TILE_PX,
          TILE_PX,
          TILE_PX,
        );
        counts.overlayCells += 1;
      }
    }
  }

  const flags = decodeBits(bits);
  const pressed = (Object.keys(flags) as (keyof typeof flags)[])
    .filter((k) => flags[k])
    .join("+") || "none";
  ctx.fillStyle = COLORS.hud;
  ctx.font = "14px monospace";
  ctx.fillText(
    `score ${state.score}   frames left ${state.framesLeft}   input ${pressed}`,
    8,
    18,
  );
  return counts;
}
