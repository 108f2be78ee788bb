// Keyboard capture: held key codes -> the canonical 6-bit control encoding.
// Bit layout (must match the server): 0 left, 1 right, 2 up, 3 down,
// 4 jump, 5 shoot|run.

export const BIT_LEFT = 1;
export const BIT_RIGHT = 2;
export const BIT_UP = 4;
export const BIT_DOWN = 8;
export const BIT_JUMP = 16;
export const BIT_FIRE = 32;

export type KeyMap = Record<string, number>;

// arrows move, Space is the primary action (jump), X the secondary (shoot|run)
export const DEFAULT_KEY_MAP: KeyMap = {
  ArrowLeft: BIT_LEFT,
  ArrowRight: BIT_RIGHT,
  ArrowUp: BIT_UP,
  ArrowDown: BIT_DOWN,
  Space: BIT_JUMP,
  KeyX: BIT_FIRE,
};

export function captureBits(
  held: Iterable<string>,
  keyMap: KeyMap = DEFAULT_KEY_MAP,
): number {
  let bits = 0;
  for (const code of held) {
    bits |= keyMap[code] ?? 0;
  }
  return bits & 63;
}

export interface ControlFlags {
  left: boolean;
  right: boolean;
  up: boolean;
  down: boolean;
  jump: boolean;
  fire: boolean;
}

export function decodeBits(bits: number): ControlFlags {
  if (bits < 0 || bits > 63 || !Number.isInteger(bits)) {
    throw new Error(`control encoding out of range 0..63: ${bits}`);
  }
  return {
    left: (bits & BIT_LEFT) !== 0,
    right: (bits & BIT_RIGHT) !== 0,
    up: (bits & BIT_UP) !== 0,
    down: (bits & BIT_DOWN) !== 0,
    jump: (bits & BIT_JUMP) !== 0,
    fire: (bits & BIT_FIRE) !== 0,
  };
}

export function encodeFlags(flags: ControlFlags): number {
  return (
    (flags.left ? BIT_LEFT : 0) |
    (flags.right ? BIT_RIGHT : 0) |
    (flags.up ? BIT_UP : 0) |
    (flags.down ? BIT_DOWN : 0) |
    (flags.jump ? BIT_JUMP : 0) |
    (flags.fire ? BIT_FIRE : 0)
  );
}

/** Tracks held keys from DOM keyboard events; game keys are swallowed. */
export class KeyTracker {
  private held = new Set<string>();

  constructor(private keyMap: KeyMap = DEFAULT_KEY_MAP) {}

  attach(target: {
    addEventListener(type: string, cb: (ev: KeyboardEvent) => void): void;
  }): void {
    target.addEventListener("keydown", (ev) => {
      if (this.keyMap[ev.code] !== undefined) {
        ev.preventDefault?.();
        this.held.add(ev.code);
      }
    });
    target.addEventListener("keyup", (ev) => {
      this.held.delete(ev.code);
    });
  }

  bits(): number {
    return captureBits(this.held, this.keyMap);
  }

  clear(): void {
    this.held.clear();
  }
}
