import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";
import { FEEDBACK_CAPACITY, SocketLike, UiSession } from "../src/session.js";

class MockSocket implements SocketLike {
  static instances: MockSocket[] = [];
  sent: string[] = [];
  readyState = 0;
  onopen: ((ev?: unknown) => void) | null = null;
  onclose: ((ev?: unknown) => void) | null = null;
  onmessage: ((ev: { data: string }) => void) | null = null;
  onerror: ((ev?: unknown) => void) | null = null;

  constructor(public url: string) {
    MockSocket.instances.push(this);
  }

  open(): void {
    this.readyState = 1;
    this.onopen?.();
  }

  serverSend(obj: unknown): void {
    this.onmessage?.({ data: JSON.stringify(obj) });
  }

  send(data: string): void {
    if (this.readyState !== 1) throw new Error("send on closed socket");
    this.sent.push(data);
  }

  close(): void {
    this.readyState = 3;
    this.onclose?.();
  }
}

function makeSession(events = {}) {
  const session = new UiSession("ws://test/ws", (url) => new MockSocket(url),
                                events);
  session.connect();
  const socket = MockSocket.instances[MockSocket.instances.length - 1];
  return { session, socket };
}

beforeEach(() => {
  MockSocket.instances = [];
  vi.useFakeTimers();
});

afterEach(() => {
  vi.useRealTimers();
});

describe("UiSession", () => {
  it("never sends while disconnected", () => {
    const { session, socket } = makeSession();
    expect(session.send({ type: "stop" })).toBe(false);
    expect(socket.sent).toEqual([]);
    socket.open();
    expect(session.send({ type: "stop" })).toBe(true);
    expect(socket.sent).toEqual(['{"type":"stop"}']);
    expect(session.sentCount).toBe(1);
  });

  it("keeps feedback in arrival order, capped at the ring size", () => {
    const { session, socket } = makeSession();
    socket.open();
    for (let i = 0; i < FEEDBACK_CAPACITY + 25; i++) {
      socket.serverSend({ type: "feedback", tick: i, text: `line ${i}` });
    }
    expect(session.feedback.length).toBe(FEEDBACK_CAPACITY);
    expect(session.feedback[0].text).toBe("line 25");
    expect(session.feedback.at(-1)?.text)
      .toBe(`line ${FEEDBACK_CAPACITY + 24}`);
    const ticks = session.feedback.map((f) => f.tick);
    expect(ticks).toEqual([...ticks].sort((a, b) => a - b));
  });

  it("tracks controller state and hand state", () => {
    const { session, socket } = makeSession();
    socket.open();
    socket.serverSend({ type: "controller", state: "holding" });
    expect(session.controllerState).toBe("holding");
    socket.serverSend({ type: "hand_state", tick: 5, angles: [0, 0, 0, 0, 0, 0],
                        setpoints: [], duties: [], joints: {}, contacts: {} });
    expect(session.lastHandState).not.toBeNull();
  });

  it("reconnects with doubling backoff after close", () => {
    const { socket } = makeSession();
    socket.open();
    socket.close();
    expect(MockSocket.instances.length).toBe(1);
    vi.advanceTimersByTime(500);
    expect(MockSocket.instances.length).toBe(2);
    MockSocket.instances[1].close();
    vi.advanceTimersByTime(999);
    expect(MockSocket.instances.length).toBe(2);
    vi.advanceTimersByTime(1);
    expect(MockSocket.instances.length).toBe(3);
  });

  it("does not reconnect after a user close", () => {
    const { session, socket } = makeSession();
    socket.open();
    session.close();
    vi.advanceTimersByTime(60_000);
    expect(MockSocket.instances.length).toBe(1);
  });

  it("reports frame staleness from arrival time", () => {
    let clock = 1000;
    const session = new UiSession("ws://t/ws", (u) => new MockSocket(u), {},
                                  () => clock);
    session.connect();
    const socket = MockSocket.instances.at(-1)!;
    socket.open();
    expect(session.frameAgeMs()).toBe(Infinity);
    socket.serverSend({ type: "frame", tick: 1, data: "" });
    clock = 1400;
    expect(session.frameAgeMs()).toBe(400);
    clock = 2600;
    expect(session.frameAgeMs()).toBe(1600);
  });

  it("surfaces server errors into the feedback log", () => {
    const { session, socket } = makeSession();
    socket.open();
    socket.serverSend({ type: "error", text: "unknown grasp" });
    expect(session.feedback.at(-1)?.text).toContain("unknown grasp");
  });
});
