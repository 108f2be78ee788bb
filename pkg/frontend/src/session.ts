// Client session state machine: hello/start handshake, then lockstep play.
// The client never has more than one unanswered input outstanding; the
// simulation only advances when we send an input, so pacing (the ~30 fps
// tick) lives entirely on this side.
//
// The WebSocket is injected so the same class runs in the browser (native
// WebSocket) and under node tests (the `ws` package, same API surface).

import {
  ErrorMessage,
  FinishedMessage,
  PROTOCOL_VERSION,
  ServerMessage,
  StartMessage,
  StateMessage,
  WelcomeMessage,
  parseServerMessage,
} from "./protocol.js";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
}

export class SessionClosed extends Error {}

export class ServerError extends Error {
  constructor(public code: string, message: string) {
    super(`${code}: ${message}`);
  }
}

type Pending = {
  resolve: (msg: ServerMessage) => void;
  reject: (err: Error) => void;
};

export class ClientSession {
  frame = 0;
  finished: FinishedMessage | null = null;
  lastState: StateMessage | null = null;
  private queue: ServerMessage[] = [];
  private pending: Pending | null = null;
  private closed = false;
  private inFlight = false;

  constructor(private socket: SocketLike) {
    socket.onmessage = (ev) => this.onMessage(String(ev.data));
    socket.onclose = () => this.onClose();
    socket.onerror = () => this.onClose();
  }

  private onMessage(text: string): void {
    let msg: ServerMessage;
    try {
      msg = parseServerMessage(text);
    } catch (err) {
      this.fail(err as Error);
      return;
    }
    if (msg.type === "finished") {
      this.finished = msg;
    }
    if (this.pending) {
      const waiter = this.pending;
      this.pending = null;
      waiter.resolve(msg);
    } else {
      this.queue.push(msg);
    }
  }

  private onClose(): void {
    this.closed = true;
    this.fail(new SessionClosed("connection closed"));
  }

  private fail(err: Error): void {
    if (this.pending) {
      const waiter = this.pending;
      this.pending = null;
      waiter.reject(err);
    }
  }

  private nextMessage(): Promise<ServerMessage> {
    const queued = this.queue.shift();
    if (queued) return Promise.resolve(queued);
    if (this.closed) return Promise.reject(new SessionClosed("connection closed"));
    if (this.pending) {
      return Promise.reject(new Error("lockstep violation: already awaiting"));
    }
    return new Promise((resolve, reject) => {
      this.pending = { resolve, reject };
    });
  }

  private expect<T extends ServerMessage["type"]>(
    msg: ServerMessage,
    type: T,
  ): Extract<ServerMessage, { type: T }> {
    if (msg.type === "error") {
      const err = msg as ErrorMessage;
      throw new ServerError(err.code, err.message);
    }
    if (msg.type !== type) {
      throw new Error(`expected ${type}, got ${msg.type}`);
    }
    return msg as Extract<ServerMessage, { type: T }>;
  }

  async hello(): Promise<WelcomeMessage> {
    this.socket.send(
      JSON.stringify({ type: "hello", protocolVersion: PROTOCOL_VERSION }),
    );
    return this.expect(await this.nextMessage(), "welcome");
  }

  start(params: Omit<StartMessage, "type">): void {
    this.frame = 0;
    this.finished = null;
    this.socket.send(JSON.stringify({ type: "start", ...params }));
  }

  /** Send one input and await its state (strict lockstep). A terminal state
   * is followed by a finished message, which is also consumed here. */
  async sendInput(bits: number): Promise<StateMessage> {
    if (this.inFlight) {
      throw new Error("lockstep violation: input already in flight");
    }
    if (this.finished) {
      throw new Error("session already finished");
    }
    this.inFlight = true;
    try {
      this.socket.send(
        JSON.stringify({ type: "input", frame: this.frame, bits }),
      );
      const state = this.expect(await this.nextMessage(), "state");
      this.frame = state.frame;
      this.lastState = state;
      const terminal = state.events.some(
        (e) => e.k === "Win" || e.k === "Death",
      );
      if (terminal || state.framesLeft <= 0) {
        this.expect(await this.nextMessage(), "finished");
      }
      return state;
    } finally {
      this.inFlight = false;
    }
  }

  async end(): Promise<FinishedMessage> {
    if (this.finished) return this.finished;
    this.socket.send(JSON.stringify({ type: "end" }));
    return this.expect(await this.nextMessage(), "finished");
  }

  close(): void {
    this.socket.close();
  }
}

export interface LoopOptions {
  tickMs?: number; // ~33 for 30 fps; 0 = as fast as possible (tests)
  maxFrames?: number;
  onState?: (state: StateMessage) => void;
}

const sleep = (ms: number) => new Promise((r) => setTimeout(r, ms));

/** Drive a play session from a key source until it finishes (or maxFrames).
 * Returns the finished message when the episode ended, else null. */
export async function sessionLoop(
  session: ClientSession,
  keySource: () => number,
  opts: LoopOptions = {},
): Promise<FinishedMessage | null> {
  const tickMs = opts.tickMs ?? 33;
  const maxFrames = opts.maxFrames ?? Infinity;
  let frames = 0;
  while (frames < maxFrames && !session.finished) {
    const state = await session.sendInput(keySource());
    opts.onState?.(state);
    frames += 1;
    if (session.finished) break;
    if (tickMs > 0) await sleep(tickMs);
  }
  return session.finished;
}
