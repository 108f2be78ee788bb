// Rendering is stateless given one state message; a stub context counts the
// primitives drawn.

import { describe, expect, it } from "vitest";

import { COLORS, Ctx2D, RenderCounts, renderFrame } from "../src/render.js";
import { StateMessage } from "../src/protocol.js";

class StubCtx implements Ctx2D {
  fillStyle = "";
  strokeStyle = "";
  font = "";
  globalAlpha = 1;
  fills: { color: string }[] = [];
  strokes = 0;
  texts: string[] = [];
  fillRect() {
    this.fills.push({ color: this.fillStyle });
  }
  strokeRect() {
    this.strokes += 1;
  }
  fillText(text: string) {
    this.texts.push(text);
  }
}

function state(overrides: Partial<StateMessage> = {}): StateMessage {
  return {
    type: "state",
    frame: 10,
    agent: { x: 640, y: 3328, size: "tall", onGround: true, alive: true },
    enemies: [],
    projectiles: [],
    score: 300,
    framesLeft: 1990,
    events: [],
    viewport: {
      x0: 0,
      width: 8,
      rows: [
        "........",
        "...c....",
        "........",
        "########",
      ],
    },
    ...overrides,
  };
}

describe("renderFrame", () => {
  it("draws one coin sprite for one coin tile", () => {
    const ctx = new StubCtx();
    const counts = renderFrame(ctx, state(), 0);
    expect(counts.coins).toBe(1);
    expect(ctx.fills.filter((f) => f.color === COLORS.coin)).toHaveLength(1);
  });

  it("draws solid tiles, enemies and projectiles", () => {
    const ctx = new StubCtx();
    const counts = renderFrame(
      ctx,
      state({
        enemies: [{ x: 1200, y: 3328, dir: -1 }],
        projectiles: [{ x: 900, y: 3216 }],
      }),
      0,
    );
    expect(counts.tiles).toBe(8);
    expect(counts.enemies).toBe(1);
    expect(counts.projectiles).toBe(1);
  });

  it("observation overlay shows exactly 36 cells", () => {
    const ctx = new StubCtx();
    const counts = renderFrame(ctx, state(), 0, {
      showObservationGrid: true,
    });
    expect(counts.overlayCells).toBe(36);
    expect(ctx.strokes).toBe(36);
  });

  it("HUD shows score, frames left, and the held input bits", () => {
    const ctx = new StubCtx();
    renderFrame(ctx, state(), 0b010010);
    expect(ctx.texts).toHaveLength(1);
    expect(ctx.texts[0]).toContain("score 300");
    expect(ctx.texts[0]).toContain("frames left 1990");
    expect(ctx.texts[0]).toContain("right+jump");
  });

  it("is stateless: same message renders identical primitives", () => {
    const a = new StubCtx();
    const b = new StubCtx();
    renderFrame(a, state(), 18, { showObservationGrid: true });
    renderFrame(b, state(), 18, { showObservationGrid: true });
    expect(a.fills).toEqual(b.fills);
    expect(a.strokes).toBe(b.strokes);
    expect(a.texts).toEqual(b.texts);
  });

  it("rejects malformed input bits", () => {
    const ctx = new StubCtx();
    expect(() => renderFrame(ctx, state(), 99)).toThrow(/0\.\.63/);
  });
});
