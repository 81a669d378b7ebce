/** HUD overlays driven by server events: the collision banner with its
 * back-up direction arrow, the end-of-trial countdown, the between-trial
 * outcome splash, and the end-of-block difficulty prompt.
 *
 * The banner text is always the server's message plus the object name; the
 * client adds nothing of its own.  The difficulty prompt accepts exactly one
 * answer per request, every later click on the same prompt is ignored.
 */

import { CollisionHud, RatingRequestMsg, TrialEndMsg } from "./protocol";

export function collisionText(c: CollisionHud): string {
  return `${c.message} (${c.name})`;
}

/** Compass-style arrow for the back-up direction.  The vector arrives in
 * world coordinates (the client cannot know the player heading without
 * simulating), so it is shown with world +y up, matching the layout maps. */
export function arrowAngleDeg(direction: [number, number]): number {
  return Math.atan2(direction[0], direction[1]) * 180 / Math.PI;
}

const OUTCOME_TEXT: Record<string, string> = {
  success: "Goal reached!",
  bike_crash: "Run over by a bicycle",
  timeout: "Time is up",
};

export interface HudElements {
  banner: HTMLElement;
  arrow: HTMLElement;
  countdown: HTMLElement;
  overlay: HTMLElement;
}

export class Hud {
  private readonly els: HudElements;
  private readonly bannerMs: number;
  private bannerTimer: ReturnType<typeof setTimeout> | null = null;

  constructor(els: HudElements, bannerMs = 2000) {
    this.els = els;
    this.bannerMs = bannerMs;
  }

  showCollision(c: CollisionHud): void {
    this.els.banner.textContent = collisionText(c);
    this.els.banner.hidden = false;
    this.els.arrow.hidden = false;
    this.els.arrow.style.transform = `rotate(${arrowAngleDeg(c.direction)}deg)`;
    if (this.bannerTimer !== null) clearTimeout(this.bannerTimer);
    this.bannerTimer = setTimeout(() => this.hideBanner(), this.bannerMs);
  }

  showCountdown(remaining: number): void {
    this.els.countdown.textContent = String(remaining);
    this.els.countdown.hidden = false;
  }

  trialStart(): void {
    this.reset();
    this.els.overlay.hidden = true;
    this.els.overlay.textContent = "";
  }

  trialEnd(msg: TrialEndMsg): void {
    this.reset();
    const label = OUTCOME_TEXT[msg.outcome] ?? msg.outcome;
    this.els.overlay.textContent = label;
    this.els.overlay.hidden = false;
  }

  sessionEnd(trials: number, successes: number): void {
    this.reset();
    this.els.overlay.textContent =
      `Session complete: ${successes}/${trials} trials reached the goal`;
    this.els.overlay.hidden = false;
  }

  private hideBanner(): void {
    this.els.banner.hidden = true;
    this.els.arrow.hidden = true;
    this.bannerTimer = null;
  }

  private reset(): void {
    if (this.bannerTimer !== null) {
      clearTimeout(this.bannerTimer);
      this.bannerTimer = null;
    }
    this.els.banner.hidden = true;
    this.els.arrow.hidden = true;
    this.els.countdown.hidden = true;
  }
}

/** Modal difficulty prompt.  open() builds one button per scale step; the
 * first click submits and closes, anything after that is a no-op. */
export class RatingPrompt {
  openCount = 0;
  private readonly root: HTMLElement;
  private submitted = false;

  constructor(root: HTMLElement) {
    this.root = root;
  }

  get isOpen(): boolean {
    return !this.root.hidden;
  }

  open(msg: RatingRequestMsg, submit: (value: number) => void): void {
    this.openCount += 1;
    this.submitted = false;
    const doc = this.root.ownerDocument;
    this.root.textContent = "";
    const label = doc.createElement("p");
    label.textContent =
      `How difficult was the last block (${msg.strategy})? ` +
      `${msg.scale[0]} = very easy, ${msg.scale[1]} = very hard`;
    this.root.appendChild(label);
    const row = doc.createElement("div");
    row.className = "rating-row";
    for (let v = msg.scale[0]; v <= msg.scale[1]; v++) {
      const btn = doc.createElement("button");
      btn.textContent = String(v);
      btn.dataset.value = String(v);
      btn.addEventListener("click", () => {
        if (this.submitted) return;
        this.submitted = true;
        this.root.hidden = true;
        submit(v);
      });
      row.appendChild(btn);
    }
    this.root.appendChild(row);
    this.root.hidden = false;
  }
}
