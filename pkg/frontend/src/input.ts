/** Keyboard and pointer handling.
 *
 * Keys map to the two input axes the engine knows about: W/S (or up/down)
 * walk forward and back, A/D (or left/right) turn, with left positive to
 * match the server convention.  Opposing keys cancel.  The pointer position
 * over the percept canvas doubles as gaze: the canvas spans the gaze window,
 * so canvas coordinates map linearly to eye-in-head degrees, x right and
 * y up positive.
 */

const MOVE_KEYS: Record<string, number> = {
  KeyW: 1, ArrowUp: 1,
  KeyS: -1, ArrowDown: -1,
};

const TURN_KEYS: Record<string, number> = {
  KeyA: 1, ArrowLeft: 1,
  KeyD: -1, ArrowRight: -1,
};

export interface Axes {
  move: number;
  turn: number;
}

export class KeyboardInput {
  private pressed = new Set<string>();

  /** Returns true when the axes changed, so callers can forward eagerly. */
  keydown(code: string): boolean {
    if (!(code in MOVE_KEYS) && !(code in TURN_KEYS)) return false;
    if (this.pressed.has(code)) return false; // key repeat
    const before = this.axes();
    this.pressed.add(code);
    return !axesEqual(before, this.axes());
  }

  keyup(code: string): boolean {
    const before = this.axes();
    if (!this.pressed.delete(code)) return false;
    return !axesEqual(before, this.axes());
  }

  release(): void {
    this.pressed.clear();
  }

  axes(): Axes {
    let move = 0;
    let turn = 0;
    for (const code of this.pressed) {
      move += MOVE_KEYS[code] ?? 0;
      turn += TURN_KEYS[code] ?? 0;
    }
    return { move: clampAxis(move), turn: clampAxis(turn) };
  }
}

function clampAxis(v: number): number {
  return Math.max(-1, Math.min(1, v));
}

function axesEqual(a: Axes, b: Axes): boolean {
  return a.move === b.move && a.turn === b.turn;
}

export interface Rect {
  left: number;
  top: number;
  width: number;
  height: number;
}

/** Map a pointer position over the canvas to gaze angles in degrees.
 * The canvas covers extentDeg of visual field in both axes; positions
 * outside the rect clamp to the window edge. */
export function gazeFromPointer(px: number, py: number, rect: Rect,
                                extentDeg: number): [number, number] {
  const fx = clamp01((px - rect.left) / rect.width);
  const fy = clamp01((py - rect.top) / rect.height);
  const yaw = (fx - 0.5) * extentDeg;
  const pitch = (0.5 - fy) * extentDeg; // screen y grows downward
  return [yaw, pitch];
}

function clamp01(v: number): number {
  return Math.max(0, Math.min(1, v));
}
