import { describe, expect, it } from "vitest";
import {
  FRAME_HEADER_BYTES,
  PROTOCOL_VERSION,
  byeMessage,
  decodePerceptFrame,
  encodePerceptFrame,
  helloMessage,
  inputMessage,
  parseServerMessage,
  ratingMessage,
} from "../src/protocol";

describe("percept frame codec", () => {
  it("round-trips a frame", () => {
    const pixels = new Uint8Array(4 * 3).map((_, i) => i * 7);
    const buf = encodePerceptFrame(9, 4, 3, pixels);
    const frame = decodePerceptFrame(buf);
    expect(frame.width).toBe(4);
    expect(frame.height).toBe(3);
    expect(frame.index).toBe(9);
    expect(Array.from(frame.pixels)).toEqual(Array.from(pixels));
  });

  it("writes the exact little-endian header layout", () => {
    const buf = encodePerceptFrame(0x01020304, 300, 2, new Uint8Array(600));
    const head = Array.from(new Uint8Array(buf, 0, FRAME_HEADER_BYTES));
    // u8 type, u8 version, u16 width, u16 height, u32 index, all LE
    expect(head).toEqual([0x01, PROTOCOL_VERSION,
                          0x2c, 0x01, 0x02, 0x00,
                          0x04, 0x03, 0x02, 0x01]);
  });

  it("rejects a wrong frame type or version", () => {
    const buf = encodePerceptFrame(0, 2, 2, new Uint8Array(4));
    const bad = new Uint8Array(buf.slice(0));
    bad[0] = 0x02;
    expect(() => decodePerceptFrame(bad.buffer)).toThrow(/unexpected frame header/);
    const worse = new Uint8Array(buf.slice(0));
    worse[1] = 99;
    expect(() => decodePerceptFrame(worse.buffer)).toThrow(/unexpected frame header/);
  });

  it("rejects truncated payloads", () => {
    const buf = encodePerceptFrame(0, 4, 4, new Uint8Array(16));
    expect(() => decodePerceptFrame(buf.slice(0, 20))).toThrow(/size mismatch/);
    expect(() => decodePerceptFrame(buf.slice(0, 5))).toThrow(/too short/);
  });

  it("decodes from a byte view with an offset", () => {
    const buf = encodePerceptFrame(3, 2, 2, new Uint8Array([1, 2, 3, 4]));
    const padded = new Uint8Array(buf.byteLength + 8);
    padded.set(new Uint8Array(buf), 8);
    const view = new Uint8Array(padded.buffer, 8);
    const frame = decodePerceptFrame(view);
    expect(frame.index).toBe(3);
    expect(Array.from(frame.pixels)).toEqual([1, 2, 3, 4]);
  });
});

describe("client messages", () => {
  it("hello carries the protocol version and options", () => {
    expect(JSON.parse(helloMessage({ mode: "practice", seed: 9, layout: "empty" })))
      .toEqual({ type: "hello", protocol: 1, mode: "practice",
                 seed: 9, layout: "empty" });
    // optional fields are omitted, not sent as null
    expect(JSON.parse(helloMessage({ mode: "session" })))
      .toEqual({ type: "hello", protocol: 1, mode: "session" });
  });

  it("input carries both axes and gaze", () => {
    expect(JSON.parse(inputMessage(1, -1, [3.5, -2])))
      .toEqual({ type: "input", move: 1, turn: -1, gaze: [3.5, -2] });
  });

  it("rating must be an integer", () => {
    expect(JSON.parse(ratingMessage(7))).toEqual({ type: "rating", value: 7 });
    expect(() => ratingMessage(3.5)).toThrow(/integer/);
  });

  it("bye is bare", () => {
    expect(JSON.parse(byeMessage())).toEqual({ type: "bye" });
  });
});

describe("server message parsing", () => {
  it("accepts any object with a type", () => {
    const msg = parseServerMessage(
      '{"type": "trial_end", "block": 0, "trial": 1, "outcome": "success", "metrics": {}}');
    expect(msg.type).toBe("trial_end");
  });

  it("rejects non-objects and missing types", () => {
    expect(() => parseServerMessage("[1, 2]")).toThrow(/objects with a 'type'/);
    expect(() => parseServerMessage('{"kind": "x"}')).toThrow(/objects with a 'type'/);
    expect(() => parseServerMessage("not json")).toThrow(/invalid JSON/);
  });
});
