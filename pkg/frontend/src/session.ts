/** Client side of the websocket session protocol.
 *
 * The client is a pure view/controller: it never advances simulation state,
 * it only renders what the server sends and forwards user input.  Two rules
 * matter for correctness and are enforced here rather than in the UI:
 *
 * * input is only sent between trial_start and trial_end (newest wins
 *   server-side, applied at the next frame boundary), and
 * * a rating is only sent while a rating_request is outstanding, at most
 *   once per request.
 */

import {
  ConfigMsg,
  CollisionHud,
  ErrorMsg,
  HelloOptions,
  HudMsg,
  PerceptFrame,
  RatingRequestMsg,
  ServerMessage,
  parseServerMessage,
  SessionEndMsg,
  TrialEndMsg,
  TrialStartMsg,
  byeMessage,
  decodePerceptFrame,
  helloMessage,
  inputMessage,
  ratingMessage,
} from "./protocol";
import { SessionLog } from "./log";

/** Structural subset of both the browser WebSocket and the `ws` client, so
 * tests can drive the session over a real loopback socket in node. */
export interface SocketLike {
  binaryType: string;
  readyState: number;
  send(data: string): void;
  close(code?: number, reason?: string): void;
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: ((ev: { code: number; reason?: unknown }) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
}

const SOCKET_OPEN = 1; // WebSocket.OPEN, identical in browser and ws

export interface SessionHandlers {
  onConfig?(msg: ConfigMsg): void;
  onTrialStart?(msg: TrialStartMsg): void;
  onFrame?(frame: PerceptFrame): void;
  onHud?(msg: HudMsg): void;
  onCollision?(c: CollisionHud): void;
  onCountdown?(remaining: number): void;
  onTrialEnd?(msg: TrialEndMsg): void;
  onRatingRequest?(msg: RatingRequestMsg): void;
  onSessionEnd?(msg: SessionEndMsg): void;
  onServerError?(msg: ErrorMsg): void;
  onClose?(code: number): void;
  /** Called when the server sends something this client cannot decode. */
  onProtocolError?(err: Error): void;
}

export interface InputState {
  move: number;
  turn: number;
  gaze: [number, number];
}

export class SessionClient {
  readonly log: SessionLog;
  config: ConfigMsg | null = null;
  trial: TrialStartMsg | null = null;
  lastTrialEnd: TrialEndMsg | null = null;
  sessionEnd: SessionEndMsg | null = null;
  ratingPending: RatingRequestMsg | null = null;
  framesReceived = 0;
  closedCode: number | null = null;

  private readonly socket: SocketLike;
  private readonly handlers: SessionHandlers;
  private readonly hello: HelloOptions;
  private inTrialFlag = false;
  private input: InputState = { move: 0, turn: 0, gaze: [0, 0] };

  constructor(socket: SocketLike, hello: HelloOptions,
              handlers: SessionHandlers = {}, log?: SessionLog) {
    this.socket = socket;
    this.hello = hello;
    this.handlers = handlers;
    this.log = log ?? new SessionLog();
    socket.binaryType = "arraybuffer";
    socket.onmessage = (ev) => this.dispatch(ev.data);
    socket.onclose = (ev) => {
      this.closedCode = ev.code;
      this.inTrialFlag = false;
      this.log.record("note", { type: "close", code: ev.code });
      this.handlers.onClose?.(ev.code);
    };
    socket.onerror = () => {
      // the close event that follows carries the useful information
    };
    if (socket.readyState === SOCKET_OPEN) {
      this.sendHello();
    } else {
      socket.onopen = () => this.sendHello();
    }
  }

  get inTrial(): boolean {
    return this.inTrialFlag;
  }

  get currentInput(): InputState {
    return { ...this.input, gaze: [...this.input.gaze] };
  }

  private sendHello(): void {
    const text = helloMessage(this.hello);
    this.socket.send(text);
    this.log.record("tx", JSON.parse(text));
  }

  /** Merge a partial input and forward it if a trial is running.  Returns
   * whether anything went on the wire. */
  setInput(partial: Partial<InputState>): boolean {
    if (partial.move !== undefined) this.input.move = partial.move;
    if (partial.turn !== undefined) this.input.turn = partial.turn;
    if (partial.gaze !== undefined) this.input.gaze = [...partial.gaze];
    return this.sendInput();
  }

  /** Send the current input state; used once per display frame so the
   * server always holds a fresh sample. */
  sendInput(): boolean {
    if (!this.inTrialFlag || this.socket.readyState !== SOCKET_OPEN) {
      return false;
    }
    const text = inputMessage(this.input.move, this.input.turn,
                              this.input.gaze);
    this.socket.send(text);
    this.log.record("tx", JSON.parse(text));
    return true;
  }

  /** Answer the outstanding rating request.  Out-of-range and repeated
   * answers are dropped here so the server never sees a violation. */
  sendRating(value: number): boolean {
    const req = this.ratingPending;
    if (req === null || !Number.isInteger(value)
        || value < req.scale[0] || value > req.scale[1]
        || this.socket.readyState !== SOCKET_OPEN) {
      return false;
    }
    this.ratingPending = null;
    const text = ratingMessage(value);
    this.socket.send(text);
    this.log.record("tx", JSON.parse(text));
    return true;
  }

  bye(): void {
    if (this.socket.readyState === SOCKET_OPEN) {
      this.socket.send(byeMessage());
      this.log.record("tx", { type: "bye" });
    }
    this.socket.close(1000);
  }

  exportLog(): string {
    return this.log.serialize();
  }

  // -- inbound ------------------------------------------------------------

  private dispatch(data: unknown): void {
    try {
      if (typeof data === "string") {
        this.dispatchText(data);
      } else {
        const frame = decodePerceptFrame(data as ArrayBuffer);
        this.framesReceived += 1;
        this.log.record("rx", { type: "frame", index: frame.index,
                                width: frame.width, height: frame.height });
        this.handlers.onFrame?.(frame);
      }
    } catch (exc) {
      this.handlers.onProtocolError?.(
        exc instanceof Error ? exc : new Error(String(exc)));
    }
  }

  private dispatchText(text: string): void {
    const msg: ServerMessage = parseServerMessage(text);
    this.log.record("rx", msg);
    switch (msg.type) {
      case "config":
        this.config = msg;
        this.handlers.onConfig?.(msg);
        break;
      case "trial_start":
        this.trial = msg;
        this.inTrialFlag = true;
        this.input = { move: 0, turn: 0, gaze: [0, 0] };
        this.handlers.onTrialStart?.(msg);
        break;
      case "hud":
        this.handlers.onHud?.(msg);
        if (msg.collision !== undefined) {
          this.handlers.onCollision?.(msg.collision);
        }
        if (msg.countdown !== undefined) {
          this.handlers.onCountdown?.(msg.countdown);
        }
        break;
      case "trial_end":
        this.inTrialFlag = false;
        this.lastTrialEnd = msg;
        this.handlers.onTrialEnd?.(msg);
        break;
      case "rating_request":
        this.ratingPending = msg;
        this.handlers.onRatingRequest?.(msg);
        break;
      case "session_end":
        this.sessionEnd = msg;
        this.handlers.onSessionEnd?.(msg);
        break;
      case "error":
        this.handlers.onServerError?.(msg);
        break;
      default:
        throw new Error(
          `unknown server message type '${(msg as { type: string }).type}'`);
    }
  }
}
