/** Browser entry point: connect form, canvas, HUD and input wiring.
 *
 * Everything protocol-shaped lives in the tested modules; this file only
 * glues them to the DOM.  Frames are drawn latest-wins from a
 * requestAnimationFrame loop, and the current input (keys plus gaze) is
 * sampled and sent once per display frame while a trial runs, so a dropped
 * render never drops an input.
 */

import { ConfigMsg, PerceptFrame } from "./protocol";
import { SessionClient, SocketLike } from "./session";
import { PerceptRenderer, fitScale } from "./render";
import { KeyboardInput, gazeFromPointer } from "./input";
import { Hud, RatingPrompt } from "./hud";

const GAZE_WINDOW_DEG = 14.6; // matches the server's percept extent
const MAX_CANVAS_PX = 512;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing element #${id}`);
  return node as T;
}

const canvas = el<HTMLCanvasElement>("percept");
const statusLine = el<HTMLElement>("status");
const eventPanel = el<HTMLElement>("events");
const connectForm = el<HTMLElement>("connect");
const errorScreen = el<HTMLElement>("error-screen");
const reconnectPrompt = el<HTMLElement>("reconnect");
const exportBtn = el<HTMLButtonElement>("export-log");
const continueBtn = el<HTMLButtonElement>("dismiss-overlay");
const centerGaze = el<HTMLInputElement>("center-gaze");

const hud = new Hud({
  banner: el("banner"),
  arrow: el("arrow"),
  countdown: el("countdown"),
  overlay: el("overlay"),
});
const prompt = new RatingPrompt(el("rating"));

let client: SessionClient | null = null;
let renderer: PerceptRenderer | null = null;
let latestFrame: PerceptFrame | null = null;
let drawnIndex = -1;
const keyboard = new KeyboardInput();
let gaze: [number, number] = [0, 0];
let blockLabel = "";

function setStatus(text: string): void {
  statusLine.textContent = text;
}

function refreshEvents(): void {
  if (client !== null) {
    eventPanel.textContent = client.log.tail(14).join("\n");
  }
}

function connect(): void {
  const mode = el<HTMLSelectElement>("mode").value === "practice"
    ? "practice" as const : "session" as const;
  const seedRaw = el<HTMLInputElement>("seed").value.trim();
  const layout = el<HTMLInputElement>("layout").value.trim();
  const proto = location.protocol === "https:" ? "wss:" : "ws:";
  const socket = new WebSocket(`${proto}//${location.host}/ws`);
  errorScreen.hidden = true;
  reconnectPrompt.hidden = true;
  connectForm.hidden = true;
  setStatus("connecting...");

  client = new SessionClient(socket as unknown as SocketLike, {
    mode,
    seed: seedRaw === "" ? undefined : Number(seedRaw),
    layout: layout === "" ? undefined : layout,
  }, {
    onConfig: (msg: ConfigMsg) => {
      const scale = fitScale(msg.percept.width, msg.percept.height,
                             MAX_CANVAS_PX);
      renderer = new PerceptRenderer(canvas, msg.percept.width,
                                     msg.percept.height, scale);
      const blocks = msg.blocks
        .map((b) => `${b.strategy} x${b.trials}`).join(", ");
      setStatus(`connected (${msg.mode}): ${blocks}`);
      refreshEvents();
    },
    onTrialStart: (msg) => {
      hud.trialStart();
      latestFrame = null;
      drawnIndex = -1;
      blockLabel = `block ${msg.block} trial ${msg.trial} ` +
        `(${msg.strategy}, ${msg.layout}, goal ${msg.goal_side})`;
      setStatus(blockLabel);
      refreshEvents();
    },
    onFrame: (frame) => {
      latestFrame = frame;
    },
    onCollision: (c) => {
      hud.showCollision(c);
      refreshEvents();
    },
    onCountdown: (remaining) => hud.showCountdown(remaining),
    onTrialEnd: (msg) => {
      hud.trialEnd(msg);
      keyboard.release();
      setStatus(`${blockLabel}: ${msg.outcome}`);
      refreshEvents();
    },
    onRatingRequest: (msg) => {
      prompt.open(msg, (value) => client?.sendRating(value));
    },
    onSessionEnd: (msg) => {
      hud.sessionEnd(msg.summary.trials, msg.summary.successes);
      setStatus("session complete");
      exportBtn.disabled = false;
      refreshEvents();
    },
    onServerError: (msg) => {
      showError(`server refused the session: ${msg.code}`
        + (msg.message ? ` (${msg.message})` : ""));
    },
    onClose: (code) => {
      if (code === 4400) {
        showError("protocol violation, the server closed the connection; "
          + "this client speaks protocol version 1");
      } else if (client?.sessionEnd === null) {
        reconnectPrompt.hidden = false;
        setStatus("disconnected");
      } else {
        connectForm.hidden = false; // clean end, offer another session
      }
      exportBtn.disabled = false;
    },
    onProtocolError: (err) => showError(`cannot decode server data: ${err.message}`),
  });
}

function showError(text: string): void {
  errorScreen.textContent = text;
  errorScreen.hidden = false;
  setStatus("error");
}

// -- input ------------------------------------------------------------------

function typingInForm(ev: KeyboardEvent): boolean {
  const target = ev.target as HTMLElement | null;
  return target !== null && (target.tagName === "INPUT"
    || target.tagName === "SELECT" || target.tagName === "BUTTON");
}

window.addEventListener("keydown", (ev) => {
  if (typingInForm(ev) || prompt.isOpen) return;
  if (keyboard.keydown(ev.code)) {
    client?.setInput(keyboard.axes()); // eager, the next frame should see it
    ev.preventDefault();
  }
});

window.addEventListener("keyup", (ev) => {
  if (keyboard.keyup(ev.code)) {
    client?.setInput(keyboard.axes());
  }
});

window.addEventListener("blur", () => keyboard.release());

canvas.addEventListener("mousemove", (ev) => {
  if (centerGaze.checked) return;
  const rect = canvas.getBoundingClientRect();
  gaze = gazeFromPointer(ev.clientX, ev.clientY, rect, GAZE_WINDOW_DEG);
});

centerGaze.addEventListener("change", () => {
  if (centerGaze.checked) gaze = [0, 0];
});

// -- render loop --------------------------------------------------------------

function tick(): void {
  if (client !== null && client.inTrial) {
    const axes = keyboard.axes();
    client.setInput({ move: axes.move, turn: axes.turn, gaze });
  }
  if (renderer !== null && latestFrame !== null
      && latestFrame.index !== drawnIndex) {
    renderer.draw(latestFrame);
    drawnIndex = latestFrame.index;
  }
  requestAnimationFrame(tick);
}
requestAnimationFrame(tick);

// -- buttons ------------------------------------------------------------------

el<HTMLButtonElement>("connect-btn").addEventListener("click", connect);
el<HTMLButtonElement>("reconnect-btn").addEventListener("click", connect);

continueBtn.addEventListener("click", () => {
  el("overlay").hidden = true; // the server paces trials; this just unblocks the view
});

exportBtn.addEventListener("click", () => {
  if (client === null) return;
  const blob = new Blob([client.exportLog()], { type: "application/json" });
  const url = URL.createObjectURL(blob);
  const a = document.createElement("a");
  a.href = url;
  a.download = "session-log.json";
  a.click();
  URL.revokeObjectURL(url);
});

window.addEventListener("beforeunload", () => client?.bye());
