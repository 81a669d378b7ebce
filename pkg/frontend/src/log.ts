/** Structured session log: every message the client sent or received, in
 * order, timestamped.  Binary frames are logged as their header only (the
 * pixel payload is deterministic server output and would dwarf the log);
 * together with the tx input records that is enough to replay a session.
 */

export type LogDirection = "rx" | "tx" | "note";

export interface LogEvent {
  t: number;
  dir: LogDirection;
  data: unknown;
}

export class SessionLog {
  events: LogEvent[] = [];
  private readonly clock: () => number;

  constructor(clock: () => number = Date.now) {
    this.clock = clock;
  }

  record(dir: LogDirection, data: unknown): void {
    this.events.push({ t: this.clock(), dir, data });
  }

  /** One structured object, ready to save and feed back through a replay. */
  serialize(): string {
    return JSON.stringify({ protocol: 1, exported_at: this.clock(),
                            events: this.events });
  }

  /** Last n human-readable lines for the on-page event panel.  Frames and
   * per-frame input samples are skipped, they arrive at display rate. */
  tail(n: number): string[] {
    const interesting = this.events.filter((e) => {
      const kind = (e.data as { type?: string }).type;
      return kind !== "frame" && kind !== "input";
    });
    return interesting.slice(-n).map((e) => {
      const kind = (e.data as { type?: string }).type;
      return `${e.dir} ${kind ?? JSON.stringify(e.data)}`;
    });
  }
}
