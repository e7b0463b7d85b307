// Command widgets: six grasp buttons, stop, power down, retrain, and the
// text box.  Every user gesture maps to exactly one outbound message; a
// 500 ms gate per button mirrors the controller-side debounce.

import { GRASPS } from "./protocol.js";
import { UiSession } from "./session.js";

export const BUTTON_GATE_MS = 500;

export class ButtonGate {
  private lastFired = new Map<string, number>();
  private now: () => number;

  constructor(now: () => number = () => Date.now()) {
    this.now = now;
  }

  /** True when the press may fire; arms the gate when it does. */
  tryFire(key: string): boolean {
    const t = this.now();
    const last = this.lastFired.get(key);
    if (last !== undefined && t - last < BUTTON_GATE_MS) {
      return false;
    }
    this.lastFired.set(key, t);
    return true;
  }
}

export interface ControlDeps {
  session: UiSession;
  gate: ButtonGate;
  notify: (text: string) => void;
}

export function pressGrasp(deps: ControlDeps, grasp: string): boolean {
  if (!(GRASPS as readonly string[]).includes(grasp)) {
    deps.notify(`unknown grasp ${grasp}`);
    return false;
  }
  if (!deps.gate.tryFire(`grasp:${grasp}`)) {
    return false;
  }
  if (!deps.session.send({ type: "grasp_button", grasp })) {
    deps.notify("not connected; button ignored");
    return false;
  }
  return true;
}

export function sendText(deps: ControlDeps, text: string): boolean {
  const trimmed = text.trim();
  if (!trimmed) {
    deps.notify("empty command ignored");
    return false;
  }
  if (!deps.session.send({ type: "text_command", text: trimmed })) {
    deps.notify("not connected; command ignored");
    return false;
  }
  return true;
}

export function pressStop(deps: ControlDeps): boolean {
  if (!deps.gate.tryFire("stop")) return false;
  return deps.session.send({ type: "stop" });
}

export function pressPowerDown(deps: ControlDeps): boolean {
  if (!deps.gate.tryFire("power_down")) return false;
  return deps.session.send({ type: "power_down" });
}

export function pressRetrain(deps: ControlDeps): boolean {
  if (!deps.gate.tryFire("retrain")) return false;
  return deps.session.send({ type: "retrain" });
}
