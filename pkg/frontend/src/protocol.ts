/** Wire protocol (version 1) spoken by the spvsim websocket service.
 *
 * Text messages are JSON objects with a "type" field.  Percept frames are
 * little-endian binary: u8 frame type (0x01), u8 protocol version, u16
 * width, u16 height, u32 frame index, then width*height u8 pixels in
 * row-major order.  This module is the single place that knows the byte
 * layout and the message shapes; everything else works with typed values.
 */

export const PROTOCOL_VERSION = 1;
export const FRAME_TYPE_PERCEPT = 0x01;
export const FRAME_HEADER_BYTES = 10;

export interface PerceptFrame {
  width: number;
  height: number;
  index: number;
  /** Row-major grayscale pixels, length width*height.  A view into the
   * message buffer, not a copy; consume before reusing the buffer. */
  pixels: Uint8Array;
}

export function decodePerceptFrame(data: ArrayBuffer | ArrayBufferView): PerceptFrame {
  const view = ArrayBuffer.isView(data)
    ? new DataView(data.buffer, data.byteOffset, data.byteLength)
    : new DataView(data);
  if (view.byteLength < FRAME_HEADER_BYTES) {
    throw new Error(`frame too short: ${view.byteLength} bytes`);
  }
  const kind = view.getUint8(0);
  const version = view.getUint8(1);
  if (kind !== FRAME_TYPE_PERCEPT || version !== PROTOCOL_VERSION) {
    throw new Error(`unexpected frame header ${kind}/${version}`);
  }
  const width = view.getUint16(2, true);
  const height = view.getUint16(4, true);
  const index = view.getUint32(6, true);
  const pixels = new Uint8Array(view.buffer, view.byteOffset + FRAME_HEADER_BYTES,
                                view.byteLength - FRAME_HEADER_BYTES);
  if (pixels.length !== width * height) {
    throw new Error("frame payload size mismatch");
  }
  return { width, height, index, pixels };
}

/** Inverse of decodePerceptFrame, for tests and loopback servers. */
export function encodePerceptFrame(index: number, width: number, height: number,
                                   pixels: Uint8Array): ArrayBuffer {
  if (pixels.length !== width * height) {
    throw new Error("pixel count must equal width*height");
  }
  const buf = new ArrayBuffer(FRAME_HEADER_BYTES + pixels.length);
  const view = new DataView(buf);
  view.setUint8(0, FRAME_TYPE_PERCEPT);
  view.setUint8(1, PROTOCOL_VERSION);
  view.setUint16(2, width, true);
  view.setUint16(4, height, true);
  view.setUint32(6, index >>> 0, true);
  new Uint8Array(buf, FRAME_HEADER_BYTES).set(pixels);
  return buf;
}

// -- server -> client messages ----------------------------------------------

export interface ConfigMsg {
  type: "config";
  protocol: number;
  mode: string;
  percept: { width: number; height: number; display_scale: number };
  trial: { duration_s: number; countdown_s: number; fps: number };
  blocks: { strategy: string; trials: number }[];
}

export interface TrialStartMsg {
  type: "trial_start";
  block: number;
  trial: number;
  strategy: string;
  layout: string;
  goal_side: string;
  duration_s: number;
}

export interface CollisionHud {
  name: string;
  class: string;
  moving: boolean;
  message: string;
  direction: [number, number];
}

export interface HudMsg {
  type: "hud";
  collision?: CollisionHud;
  countdown?: number;
}

export interface TrialEndMsg {
  type: "trial_end";
  block: number;
  trial: number;
  outcome: string;
  metrics: Record<string, number | string>;
}

export interface RatingRequestMsg {
  type: "rating_request";
  block: number;
  strategy: string;
  scale: [number, number];
}

export interface SessionEndMsg {
  type: "session_end";
  summary: { trials: number; successes: number };
}

export interface ErrorMsg {
  type: "error";
  code: string;
  message?: string;
}

export type ServerMessage =
  | ConfigMsg
  | TrialStartMsg
  | HudMsg
  | TrialEndMsg
  | RatingRequestMsg
  | SessionEndMsg
  | ErrorMsg;

export function parseServerMessage(text: string): ServerMessage {
  let data: unknown;
  try {
    data = JSON.parse(text);
  } catch (exc) {
    throw new Error(`invalid JSON from server: ${exc}`);
  }
  if (typeof data !== "object" || data === null
      || typeof (data as { type?: unknown }).type !== "string") {
    throw new Error("server messages must be objects with a 'type'");
  }
  return data as ServerMessage;
}

// -- client -> server messages ----------------------------------------------

export interface HelloOptions {
  mode: "session" | "practice";
  seed?: number;
  layout?: string;
}

export function helloMessage(opts: HelloOptions): string {
  const msg: Record<string, unknown> = {
    type: "hello",
    protocol: PROTOCOL_VERSION,
    mode: opts.mode,
  };
  if (opts.seed !== undefined) msg.seed = opts.seed;
  if (opts.layout !== undefined && opts.layout !== "") msg.layout = opts.layout;
  return JSON.stringify(msg);
}

export function inputMessage(move: number, turn: number,
                             gaze: [number, number]): string {
  return JSON.stringify({ type: "input", move, turn, gaze });
}

export function ratingMessage(value: number): string {
  if (!Number.isInteger(value)) {
    throw new Error(`rating must be an integer, got ${value}`);
  }
  return JSON.stringify({ type: "rating", value });
}

export function byeMessage(): string {
  return JSON.stringify({ type: "bye" });
}
