// Wire protocol: one JSON object per WebSocket text frame, discriminated
// by `type`.  Mirrors docs/wire_protocol.md in the host repository.

export const FRAME_WIDTH = 80;
export const FRAME_HEIGHT = 60;

export interface FrameMsg {
  type: "frame";
  tick: number;
  data: string; // base64 of raw 80x60x3 bytes
}

export interface HandStateMsg {
  type: "hand_state";
  tick: number;
  angles: number[];
  setpoints: number[];
  duties: number[];
  joints: Record<string, number[]>;
  contacts: Record<string, boolean>;
}

export interface FeedbackMsg {
  type: "feedback";
  tick: number;
  text: string;
}

export interface ControllerMsg {
  type: "controller";
  state: string;
}

export interface ErrorMsg {
  type: "error";
  text: string;
}

export type ServerMsg =
  | FrameMsg
  | HandStateMsg
  | FeedbackMsg
  | ControllerMsg
  | ErrorMsg;

export type ClientMsg =
  | { type: "grasp_button"; grasp: string }
  | { type: "text_command"; text: string }
  | { type: "stop" }
  | { type: "power_down" }
  | { type: "retrain" };

export const GRASPS = [
  "cylindrical",
  "spherical",
  "hook",
  "lateral",
  "pinch",
  "tripod",
] as const;

export function parseServerMsg(raw: string): ServerMsg {
  let obj: unknown;
  try {
    obj = JSON.parse(raw);
  } catch {
    throw new Error(`unparseable server message: ${raw.slice(0, 80)}`);
  }
  if (typeof obj !== "object" || obj === null || !("type" in obj)) {
    throw new Error("server message lacks a type field");
  }
  const msg = obj as ServerMsg;
  switch (msg.type) {
    case "frame":
    case "hand_state":
    case "feedback":
    case "controller":
    case "error":
      return msg;
    default:
      throw new Error(`unknown server message type ${(msg as { type: string }).type}`);
  }
}

/** Decode a base64 RGB frame into RGBA pixels ready for an ImageData. */
export function decodeFrame(data: string): Uint8ClampedArray<ArrayBuffer> {
  const raw = atob(data);
  const expected = FRAME_WIDTH * FRAME_HEIGHT * 3;
  if (raw.length !== expected) {
    throw new Error(`frame payload has ${raw.length} bytes, want ${expected}`);
  }
  const rgba = new Uint8ClampedArray(
    new ArrayBuffer(FRAME_WIDTH * FRAME_HEIGHT * 4));
  for (let p = 0; p < FRAME_WIDTH * FRAME_HEIGHT; p++) {
    rgba[4 * p] = raw.charCodeAt(3 * p);
    rgba[4 * p + 1] = raw.charCodeAt(3 * p + 1);
    rgba[4 * p + 2] = raw.charCodeAt(3 * p + 2);
    rgba[4 * p + 3] = 255;
  }
  return rgba;
}
