import { describe, expect, it } from "vitest";
import { decodeFrame, parseServerMsg, FRAME_WIDTH, FRAME_HEIGHT } from "../src/protocol.js";

describe("parseServerMsg", () => {
  it("accepts every outbound message type", () => {
    expect(parseServerMsg('{"type":"feedback","tick":3,"text":"hi"}').type)
      .toBe("feedback");
    expect(parseServerMsg('{"type":"controller","state":"idle"}').type)
      .toBe("controller");
    expect(parseServerMsg('{"type":"error","text":"x"}').type).toBe("error");
  });

  it("rejects junk", () => {
    expect(() => parseServerMsg("not json")).toThrow(/unparseable/);
    expect(() => parseServerMsg('{"fields":1}')).toThrow(/type/);
    expect(() => parseServerMsg('{"type":"telemetry2"}')).toThrow(/unknown/);
  });
});

describe("decodeFrame", () => {
  it("expands RGB bytes to opaque RGBA", () => {
    const n = FRAME_WIDTH * FRAME_HEIGHT;
    const rgb = new Uint8Array(n * 3);
    rgb[0] = 10; rgb[1] = 20; rgb[2] = 30;          // first pixel
    rgb[n * 3 - 3] = 200; rgb[n * 3 - 1] = 250;     // last pixel R and B
    const b64 = Buffer.from(rgb).toString("base64");
    const rgba = decodeFrame(b64);
    expect(rgba.length).toBe(n * 4);
    expect([rgba[0], rgba[1], rgba[2], rgba[3]]).toEqual([10, 20, 30, 255]);
    expect(rgba[(n - 1) * 4]).toBe(200);
    expect(rgba[(n - 1) * 4 + 2]).toBe(250);
    expect(rgba[(n - 1) * 4 + 3]).toBe(255);
  });

  it("rejects frames of the wrong size", () => {
    const b64 = Buffer.from(new Uint8Array(10)).toString("base64");
    expect(() => decodeFrame(b64)).toThrow(/bytes/);
  });
});
