import { beforeEach, describe, expect, it } from "vitest";
import { BUTTON_GATE_MS, ButtonGate, pressGrasp, pressStop,
         sendText } from "../src/controls.js";
import { SocketLike, UiSession } from "../src/session.js";

class MockSocket implements SocketLike {
  sent: string[] = [];
  readyState = 1;
  onopen: ((ev?: unknown) => void) | null = null;
  onclose: ((ev?: unknown) => void) | null = null;
  onmessage: ((ev: { data: string }) => void) | null = null;
  onerror: ((ev?: unknown) => void) | null = null;
  send(data: string): void { this.sent.push(data); }
  close(): void {}
}

let socket: MockSocket;
let clock: number;
let deps: { session: UiSession; gate: ButtonGate; notify: (t: string) => void };
let notices: string[];

beforeEach(() => {
  socket = new MockSocket();
  clock = 10_000;
  const session = new UiSession("ws://t/ws", () => socket, {}, () => clock);
  session.connect();
  socket.onopen?.();
  notices = [];
  deps = { session, gate: new ButtonGate(() => clock),
           notify: (t) => notices.push(t) };
});

describe("grasp buttons", () => {
  it("sends exactly one message per press", () => {
    expect(pressGrasp(deps, "tripod")).toBe(true);
    expect(socket.sent).toEqual(['{"type":"grasp_button","grasp":"tripod"}']);
    expect(deps.session.sentCount).toBe(1);
  });

  it("a double press inside the gate window sends once", () => {
    pressGrasp(deps, "tripod");
    clock += BUTTON_GATE_MS - 1;
    expect(pressGrasp(deps, "tripod")).toBe(false);
    expect(socket.sent.length).toBe(1);
    clock += 1;
    expect(pressGrasp(deps, "tripod")).toBe(true);
    expect(socket.sent.length).toBe(2);
  });

  it("different grasps gate independently", () => {
    pressGrasp(deps, "tripod");
    expect(pressGrasp(deps, "pinch")).toBe(true);
    expect(socket.sent.length).toBe(2);
  });

  it("rejects unknown grasp names client-side", () => {
    expect(pressGrasp(deps, "sideways")).toBe(false);
    expect(socket.sent).toEqual([]);
    expect(notices[0]).toContain("unknown grasp");
  });
});

describe("text commands", () => {
  it("sends trimmed text", () => {
    expect(sendText(deps, "  perform a lateral grasp  ")).toBe(true);
    expect(JSON.parse(socket.sent[0])).toEqual(
      { type: "text_command", text: "perform a lateral grasp" });
  });

  it("rejects empty input client-side", () => {
    expect(sendText(deps, "   ")).toBe(false);
    expect(socket.sent).toEqual([]);
    expect(notices[0]).toContain("empty");
  });
});

describe("stop", () => {
  it("audits one message per gesture", () => {
    let clicks = 0;
    clicks += 1; pressStop(deps);
    clock += 1000;
    clicks += 1; pressStop(deps);
    expect(deps.session.sentCount).toBe(clicks);
  });
});
