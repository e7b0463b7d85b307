// Touch-UI assembly: live feed, six grasp buttons, stop / power down /
// retrain, text command box, feedback log, hand schematic.  All server
// traffic funnels through one UiSession dispatcher.

import { ButtonGate, pressGrasp, pressPowerDown, pressRetrain, pressStop,
         sendText } from "./controls.js";
import { GRASPS, ServerMsg } from "./protocol.js";
import { SocketLike, UiSession } from "./session.js";
import { FeedView, HandView, STALE_AFTER_MS } from "./views.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function wsUrl(): string {
  const params = new URLSearchParams(window.location.search);
  const override = params.get("endpoint");
  if (override) return override;
  const proto = window.location.protocol === "https:" ? "wss:" : "ws:";
  return `${proto}//${window.location.host}/ws`;
}

function main(): void {
  const feed = new FeedView(el<HTMLCanvasElement>("feed"), el("stale-badge"));
  const hand = new HandView(el<HTMLCanvasElement>("handview"));
  const log = el<HTMLDivElement>("feedback");
  const status = el<HTMLSpanElement>("status");
  const stateLabel = el<HTMLSpanElement>("controller-state");

  const notify = (text: string) => {
    const line = document.createElement("div");
    line.textContent = `(ui) ${text}`;
    log.appendChild(line);
    log.scrollTop = log.scrollHeight;
  };

  const onMessage = (msg: ServerMsg) => {
    switch (msg.type) {
      case "frame":
        feed.paint(msg.data);
        break;
      case "hand_state":
        hand.paint(msg);
        break;
      case "feedback": {
        const line = document.createElement("div");
        line.textContent = msg.text;
        log.appendChild(line);
        while (log.childElementCount > 200) {
          log.removeChild(log.firstChild as Node);
        }
        log.scrollTop = log.scrollHeight;
        break;
      }
      case "controller":
        stateLabel.textContent = msg.state;
        break;
      case "error":
        notify(`server: ${msg.text}`);
        break;
    }
  };

  // the browser socket is runtime-compatible with SocketLike; the handler
  // signatures differ only in the event detail we never touch
  const makeSocket = (url: string): SocketLike =>
    new WebSocket(url) as unknown as SocketLike;
  const session = new UiSession(wsUrl(), makeSocket, {
    onMessage,
    onStatus: (connected) => {
      status.textContent = connected ? "connected" : "reconnecting...";
      status.className = connected ? "ok" : "bad";
    },
  });
  const gate = new ButtonGate();
  const deps = { session, gate, notify };

  const buttons = el<HTMLDivElement>("grasp-buttons");
  for (const grasp of GRASPS) {
    const button = document.createElement("button");
    button.textContent = grasp;
    button.addEventListener("click", () => {
      if (pressGrasp(deps, grasp)) {
        button.disabled = true;
        setTimeout(() => (button.disabled = false), 500);
      }
    });
    buttons.appendChild(button);
  }

  el<HTMLButtonElement>("stop").addEventListener("click",
    () => pressStop(deps));
  el<HTMLButtonElement>("power-down").addEventListener("click",
    () => pressPowerDown(deps));
  el<HTMLButtonElement>("retrain").addEventListener("click",
    () => pressRetrain(deps));

  const input = el<HTMLInputElement>("command");
  const submit = () => {
    if (sendText(deps, input.value)) {
      input.value = "";
    }
  };
  el<HTMLButtonElement>("send").addEventListener("click", submit);
  input.addEventListener("keydown", (ev) => {
    if (ev.key === "Enter") submit();
  });

  setInterval(() => feed.setStale(session.frameAgeMs() > STALE_AFTER_MS), 250);
  session.connect();
}

main();
