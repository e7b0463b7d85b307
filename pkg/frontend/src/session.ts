// Connection/session state for the touch UI.  The session owns the
// WebSocket, reconnects with backoff, keeps the feedback ring buffer and
// the latest frame/hand-state, and refuses to send while disconnected, so
// a reload can never change controller state by itself.

import { ClientMsg, ServerMsg, parseServerMsg } from "./protocol.js";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  // eslint-disable-next-line @typescript-eslint/no-explicit-any
  onopen: ((ev?: any) => void) | null;
  onclose: ((ev?: any) => void) | null;
  onmessage: ((ev: { data: any }) => void) | null;
  onerror: ((ev?: any) => void) | null;
  readyState: number;
}

export type SocketFactory = (url: string) => SocketLike;

const OPEN = 1;
const BACKOFF_START_MS = 500;
const BACKOFF_MAX_MS = 8000;
export const FEEDBACK_CAPACITY = 200;

export interface SessionEvents {
  onMessage?: (msg: ServerMsg) => void;
  onStatus?: (connected: boolean) => void;
}

export class UiSession {
  url: string;
  connected = false;
  sentCount = 0;
  feedback: { tick: number; text: string }[] = [];
  controllerState = "unknown";
  lastFrame: { tick: number; data: string; receivedAt: number } | null = null;
  lastHandState: ServerMsg | null = null;

  private factory: SocketFactory;
  private events: SessionEvents;
  private socket: SocketLike | null = null;
  private backoffMs = BACKOFF_START_MS;
  private reconnectTimer: ReturnType<typeof setTimeout> | null = null;
  private closedByUser = false;
  private now: () => number;

  constructor(url: string, factory: SocketFactory, events: SessionEvents = {},
              now: () => number = () => Date.now()) {
    this.url = url;
    this.factory = factory;
    this.events = events;
    this.now = now;
  }

  connect(): void {
    this.closedByUser = false;
    const socket = this.factory(this.url);
    this.socket = socket;
    socket.onopen = () => {
      this.connected = true;
      this.backoffMs = BACKOFF_START_MS;
      this.events.onStatus?.(true);
    };
    socket.onclose = () => {
      this.connected = false;
      this.events.onStatus?.(false);
      if (!this.closedByUser) {
        this.scheduleReconnect();
      }
    };
    socket.onerror = () => {
      // the close handler owns reconnection
    };
    socket.onmessage = (ev) => this.handleRaw(String(ev.data));
  }

  close(): void {
    this.closedByUser = true;
    if (this.reconnectTimer !== null) {
      clearTimeout(this.reconnectTimer);
      this.reconnectTimer = null;
    }
    this.socket?.close();
  }

  private scheduleReconnect(): void {
    if (this.reconnectTimer !== null) return;
    this.reconnectTimer = setTimeout(() => {
      this.reconnectTimer = null;
      this.connect();
    }, this.backoffMs);
    this.backoffMs = Math.min(this.backoffMs * 2, BACKOFF_MAX_MS);
  }

  private handleRaw(raw: string): void {
    let msg: ServerMsg;
    try {
      msg = parseServerMsg(raw);
    } catch (err) {
      console.error(err);
      return;
    }
    switch (msg.type) {
      case "feedback":
        this.feedback.push({ tick: msg.tick, text: msg.text });
        if (this.feedback.length > FEEDBACK_CAPACITY) {
          this.feedback.splice(0, this.feedback.length - FEEDBACK_CAPACITY);
        }
        break;
      case "frame":
        this.lastFrame = { tick: msg.tick, data: msg.data,
                           receivedAt: this.now() };
        break;
      case "hand_state":
        this.lastHandState = msg;
        break;
      case "controller":
        this.controllerState = msg.state;
        break;
      case "error":
        this.feedback.push({ tick: -1, text: `server error: ${msg.text}` });
        break;
    }
    this.events.onMessage?.(msg);
  }

  /** Send one command; returns false (and sends nothing) while disconnected. */
  send(msg: ClientMsg): boolean {
    if (!this.connected || !this.socket || this.socket.readyState !== OPEN) {
      return false;
    }
    this.socket.send(JSON.stringify(msg));
    this.sentCount += 1;
    return true;
  }

  /** Milliseconds since the last frame arrived; Infinity before the first. */
  frameAgeMs(): number {
    if (!this.lastFrame) return Infinity;
    return this.now() - this.lastFrame.receivedAt;
  }
}
