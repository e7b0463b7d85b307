// Canvas painters: the live feed (nearest-neighbor upscale of the 80x60
// frame) and the hand schematic (per-finger flexion bars plus a thumb
// direction dial).

import { FRAME_HEIGHT, FRAME_WIDTH, HandStateMsg, decodeFrame } from "./protocol.js";

export const STALE_AFTER_MS = 1000;

export class FeedView {
  private canvas: HTMLCanvasElement;
  private buffer: HTMLCanvasElement;
  private badge: HTMLElement;

  constructor(canvas: HTMLCanvasElement, badge: HTMLElement) {
    this.canvas = canvas;
    this.badge = badge;
    this.buffer = document.createElement("canvas");
    this.buffer.width = FRAME_WIDTH;
    this.buffer.height = FRAME_HEIGHT;
  }

  paint(data: string): void {
    const ctx = this.buffer.getContext("2d");
    if (!ctx) return;
    const image = new ImageData(decodeFrame(data), FRAME_WIDTH, FRAME_HEIGHT);
    ctx.putImageData(image, 0, 0);
    const out = this.canvas.getContext("2d");
    if (!out) return;
    out.imageSmoothingEnabled = false; // nearest-neighbor upscale
    out.drawImage(this.buffer, 0, 0, this.canvas.width, this.canvas.height);
  }

  setStale(stale: boolean): void {
    this.badge.style.display = stale ? "block" : "none";
  }
}

const DIGITS = ["index", "middle", "ring", "pinky", "thumb"] as const;

export class HandView {
  private canvas: HTMLCanvasElement;

  constructor(canvas: HTMLCanvasElement) {
    this.canvas = canvas;
  }

  paint(state: HandStateMsg): void {
    const ctx = this.canvas.getContext("2d");
    if (!ctx) return;
    const w = this.canvas.width;
    const h = this.canvas.height;
    ctx.clearRect(0, 0, w, h);
    ctx.font = "11px sans-serif";

    const barW = w / 9;
    DIGITS.forEach((digit, i) => {
      const joints = state.joints[digit] ?? [0, 0, 0];
      const total = joints.reduce((a, b) => a + b, 0);
      const frac = Math.min(total / 2.4, 1.0);
      const x = barW * (0.5 + 1.4 * i);
      const barH = (h - 40) * frac;
      ctx.fillStyle = state.contacts[digit] ? "#2e8b57" : "#4a6fa5";
      ctx.fillRect(x, h - 24 - barH, barW * 0.9, barH);
      ctx.strokeStyle = "#555";
      ctx.strokeRect(x, 16, barW * 0.9, h - 40);
      ctx.fillStyle = "#ddd";
      ctx.fillText(digit.slice(0, 3), x, h - 8);
    });

    // thumb direction dial, driven by the sixth motor
    const dial = { x: w - 46, y: 44, r: 28 };
    const angle = (state.angles[5] ?? 0) * 0.25; // direction gain
    ctx.strokeStyle = "#888";
    ctx.beginPath();
    ctx.arc(dial.x, dial.y, dial.r, Math.PI, 2 * Math.PI);
    ctx.stroke();
    ctx.strokeStyle = "#e8a33d";
    ctx.beginPath();
    ctx.moveTo(dial.x, dial.y);
    ctx.lineTo(dial.x + dial.r * Math.cos(Math.PI + angle),
               dial.y + dial.r * Math.sin(Math.PI + angle));
    ctx.stroke();
    ctx.fillStyle = "#ddd";
    ctx.fillText("thumb dir", dial.x - 24, dial.y + 16);
  }
}
