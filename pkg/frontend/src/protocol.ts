// Session protocol pgp/1: JSON text messages over one WebSocket, strict
// lockstep (exactly one state reply per accepted input).

export const PROTOCOL_VERSION = "pgp/1";

export interface HelloMessage {
  type: "hello";
  protocolVersion: string;
}

export interface StartMessage {
  type: "start";
  levelSeed: number;
  difficulty: number;
  mode: "play" | "watch";
  agentId?: string;
  width?: number;
}

export interface InputMessage {
  type: "input";
  frame: number;
  bits: number;
}

export interface WelcomeMessage {
  type: "welcome";
  protocolVersion: string;
  tileLegend: Record<string, string>;
}

export interface AgentView {
  x: number;
  y: number;
  size: "small" | "tall";
  onGround: boolean;
  alive: boolean;
}

export interface EventView {
  k: string;
  f: number;
  p: number;
}

export interface StateMessage {
  type: "state";
  frame: number;
  agent: AgentView;
  enemies: { x: number; y: number; dir: number }[];
  projectiles: { x: number; y: number }[];
  score: number;
  framesLeft: number;
  events: EventView[];
  viewport: { x0: number; width: number; rows: string[] };
}

export interface FinishedMessage {
  type: "finished";
  outcome: "Win" | "Death" | "Timeout";
  traceId: string | null;
}

export interface ErrorMessage {
  type: "error";
  code: string;
  message: string;
}

export type ServerMessage =
  | WelcomeMessage
  | StateMessage
  | FinishedMessage
  | ErrorMessage;

export function parseServerMessage(text: string): ServerMessage {
  const msg = JSON.parse(text);
  if (
    !msg ||
    typeof msg !== "object" ||
    !["welcome", "state", "finished", "error"].includes(msg.type)
  ) {
    throw new Error(`malformed server message: ${text.slice(0, 120)}`);
  }
  return msg as ServerMessage;
}

// fixed-point: world coordinates are in 1/256-tile units
export const FP = 256;
