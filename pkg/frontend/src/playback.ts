/**
 * Slide-show playback: advances the simulation one forward step per
 * tick and pauses itself the moment a step reports a pending decision
 * or the run finishes.  The timer is injected so tests can drive ticks
 * synchronously.
 */

import type { StateView } from "./types.js";

export interface Scheduler {
  schedule(callback: () => void, intervalMs: number): unknown;
  cancel(handle: unknown): void;
}

export const realTimers: Scheduler = {
  schedule: (cb, ms) => setTimeout(cb, ms),
  cancel: (handle) => clearTimeout(handle as ReturnType<typeof setTimeout>),
};

export class Playback {
  playing = false;
  intervalMs = 800;
  private handle: unknown = null;

  constructor(
    private readonly stepForward: () => Promise<StateView>,
    private readonly timers: Scheduler = realTimers,
    private readonly onChange: (playing: boolean) => void = () => undefined,
  ) {}

  start(): void {
    if (this.playing) return;
    this.playing = true;
    this.onChange(true);
    void this.tick();
  }

  pause(): void {
    if (this.handle !== null) {
      this.timers.cancel(this.handle);
      this.handle = null;
    }
    if (this.playing) {
      this.playing = false;
      this.onChange(false);
    }
  }

  /** One playback beat; exposed for tests. */
  async tick(): Promise<void> {
    if (!this.playing) return;
    this.handle = null;
    let view: StateView;
    try {
      view = await this.stepForward();
    } catch {
      this.pause();
      return;
    }
    if (view.pendingDecision !== null || view.finished) {
      this.pause();
      return;
    }
    if (this.playing) {
      this.handle = this.timers.schedule(() => void this.tick(), this.intervalMs);
    }
  }
}
