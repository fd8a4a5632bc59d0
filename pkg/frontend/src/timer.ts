// Session timer driven by server phase frames. The server owns the truth;
// between frames the display extrapolates locally. The close control is
// enabled only once the minimum duration has elapsed (the server enforces
// it anyway and a too_early error is surfaced as a toast).

import { ServerFrame } from "./protocol.js";

type PhaseFrame = Extract<ServerFrame, { type: "phase" }>;

export class TimerModel {
  phase: PhaseFrame["value"] | null = null;
  private elapsedAtSync = 0;
  private minRemainingAtSync = 0;
  private syncedAtMs: number | null = null;

  constructor(private readonly now: () => number = () => Date.now()) {}

  applyPhase(frame: PhaseFrame): void {
    this.phase = frame.value;
    this.elapsedAtSync = frame.elapsed_seconds ?? 0;
    this.minRemainingAtSync = frame.min_remaining_seconds ?? 0;
    this.syncedAtMs = this.now();
  }

  private sinceSync(): number {
    if (this.syncedAtMs === null) return 0;
    return (this.now() - this.syncedAtMs) / 1000;
  }

  elapsedSeconds(): number {
    if (this.phase === "closed" || this.phase === "post_done") return this.elapsedAtSync;
    return this.elapsedAtSync + this.sinceSync();
  }

  minRemainingSeconds(): number {
    return Math.max(0, this.minRemainingAtSync - this.sinceSync());
  }

  closeEnabled(): boolean {
    return this.phase === "chatting" && this.minRemainingSeconds() <= 0;
  }

  display(): string {
    const total = Math.floor(this.elapsedSeconds());
    const minutes = String(Math.floor(total / 60)).padStart(2, "0");
    const seconds = String(total % 60).padStart(2, "0");
    return `${minutes}:${seconds}`;
  }
}
