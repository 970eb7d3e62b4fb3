/**
 * UI-side session state.
 *
 * The displayed view is always the last service response, stored as
 * received; nothing mutates it locally.  Mutating requests (step,
 * decision) are funnelled through a queue so at most one is in flight
 * per session, and listeners fire after every accepted response.
 */

import type { CreatePayload, SessionClient } from "./api.js";
import type { StateView, StepAction, StepSide } from "./types.js";

export type ViewListener = (view: StateView) => void;

export class UiSession {
  private sessionId: string | null = null;
  private view: StateView | null = null;
  private queue: Promise<unknown> = Promise.resolve();
  private listeners: ViewListener[] = [];

  constructor(private readonly client: SessionClient) {}

  get id(): string | null {
    return this.sessionId;
  }

  get current(): StateView | null {
    return this.view;
  }

  onView(listener: ViewListener): void {
    this.listeners.push(listener);
  }

  private accept(view: StateView): StateView {
    this.view = view;
    for (const listener of this.listeners) listener(view);
    return view;
  }

  /** Serialize mutating calls: one in-flight request per session. */
  private enqueue<T>(work: () => Promise<T>): Promise<T> {
    const next = this.queue.then(work, work);
    this.queue = next.catch(() => undefined);
    return next;
  }

  async open(payload: CreatePayload): Promise<StateView> {
    return this.enqueue(async () => {
      if (this.sessionId !== null) {
        await this.client.remove(this.sessionId).catch(() => undefined);
        this.sessionId = null;
      }
      const created = await this.client.create(payload);
      this.sessionId = created.sessionId;
      return this.accept(created.state);
    });
  }

  step(action: StepAction, side: StepSide = "single"): Promise<StateView> {
    return this.enqueue(async () => {
      if (this.sessionId === null) throw new Error("no active session");
      return this.accept(await this.client.step(this.sessionId, action, side));
    });
  }

  decide(outcome: 0 | 1 | "random"): Promise<StateView> {
    return this.enqueue(async () => {
      if (this.sessionId === null) throw new Error("no active session");
      return this.accept(await this.client.decide(this.sessionId, outcome));
    });
  }

  close(): Promise<void> {
    return this.enqueue(async () => {
      if (this.sessionId !== null) {
        await this.client.remove(this.sessionId).catch(() => undefined);
        this.sessionId = null;
        this.view = null;
      }
    });
  }
}
