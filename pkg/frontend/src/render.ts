/** Percept drawing.  Phosphenes must reach the screen unsmoothed, so frames
 * are blown up with nearest-neighbor scaling only: the grayscale pixels go
 * into an offscreen canvas at native resolution and are copied to the
 * display canvas with image smoothing disabled.
 */

import { PerceptFrame } from "./protocol";

/** Expand grayscale bytes to RGBA (opaque, R=G=B). */
export function grayToRgba(pixels: Uint8Array,
                           out?: Uint8ClampedArray): Uint8ClampedArray {
  const rgba = out ?? new Uint8ClampedArray(pixels.length * 4);
  if (rgba.length !== pixels.length * 4) {
    throw new Error("output buffer size mismatch");
  }
  for (let i = 0; i < pixels.length; i++) {
    const v = pixels[i];
    const j = i * 4;
    rgba[j] = v;
    rgba[j + 1] = v;
    rgba[j + 2] = v;
    rgba[j + 3] = 255;
  }
  return rgba;
}

/** Largest integer upscale that keeps the frame within maxPx, at least 1. */
export function fitScale(width: number, height: number, maxPx: number): number {
  return Math.max(1, Math.floor(maxPx / Math.max(width, height)));
}

export class PerceptRenderer {
  readonly scale: number;
  private readonly ctx: CanvasRenderingContext2D;
  private readonly off: HTMLCanvasElement;
  private readonly offCtx: CanvasRenderingContext2D;
  private readonly image: ImageData;

  constructor(canvas: HTMLCanvasElement, width: number, height: number,
              scale: number) {
    this.scale = scale;
    canvas.width = width * scale;
    canvas.height = height * scale;
    this.off = canvas.ownerDocument.createElement("canvas");
    this.off.width = width;
    this.off.height = height;
    const ctx = canvas.getContext("2d");
    const offCtx = this.off.getContext("2d");
    if (ctx === null || offCtx === null) {
      throw new Error("canvas 2d context unavailable");
    }
    this.ctx = ctx;
    this.offCtx = offCtx;
    this.ctx.imageSmoothingEnabled = false;
    this.image = offCtx.createImageData(width, height);
  }

  draw(frame: PerceptFrame): void {
    grayToRgba(frame.pixels, this.image.data);
    this.offCtx.putImageData(this.image, 0, 0);
    this.ctx.drawImage(this.off, 0, 0,
                       this.off.width * this.scale,
                       this.off.height * this.scale);
  }
}
