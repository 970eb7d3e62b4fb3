import { describe, expect, it } from "vitest";

import type { SessionClient } from "../src/api.js";
import { UiSession } from "../src/session.js";
import type { StateView } from "../src/types.js";

function view(tag: number): StateView {
  return {
    snapshot: { kind: "vector", numQubits: 1, nodes: [], edges: [], rootWeight: [1, 0] },
    programCounters: { single: tag },
    pendingDecision: null,
    telemetry: { nodes: 1, maxNodes: 1, appliedGates: tag },
  };
}

interface FakeClient extends Pick<SessionClient, "create" | "step" | "decide" | "remove"> {}

describe("UiSession", () => {
  it("keeps at most one mutating request in flight", async () => {
    let inFlight = 0;
    let peak = 0;
    let counter = 0;
    const client: FakeClient = {
      create: async () => ({ sessionId: "s", state: view(0) }),
      step: async () => {
        inFlight += 1;
        peak = Math.max(peak, inFlight);
        await new Promise((resolve) => setTimeout(resolve, 5));
        inFlight -= 1;
        counter += 1;
        return view(counter);
      },
      decide: async () => view(99),
      remove: async () => undefined,
    };
    const session = new UiSession(client as SessionClient);
    await session.open({ mode: "simulate", qasm: "..." });
    await Promise.all([
      session.step("forward"),
      session.step("forward"),
      session.step("forward"),
    ]);
    expect(peak).toBe(1);
    expect(counter).toBe(3);
  });

  it("stores every displayed view exactly as the service returned it", async () => {
    const served = [view(0), view(1), view(2)];
    let index = 0;
    const client: FakeClient = {
      create: async () => ({ sessionId: "s", state: served[index] }),
      step: async () => {
        index += 1;
        return served[index];
      },
      decide: async () => view(99),
      remove: async () => undefined,
    };
    const session = new UiSession(client as SessionClient);
    const seen: StateView[] = [];
    session.onView((v) => seen.push(v));
    await session.open({ mode: "simulate", qasm: "..." });
    await session.step("forward");
    await session.step("forward");
    expect(session.current).toBe(served[2]);
    expect(seen).toEqual(served);
    seen.forEach((v, i) => expect(v).toBe(served[i]));
  });

  it("replaces the server session when reopening", async () => {
    const removed: string[] = [];
    let serial = 0;
    const client: FakeClient = {
      create: async () => ({ sessionId: `s${serial++}`, state: view(0) }),
      step: async () => view(1),
      decide: async () => view(2),
      remove: async (id: string) => {
        removed.push(id);
      },
    };
    const session = new UiSession(client as SessionClient);
    await session.open({ mode: "simulate", qasm: "a" });
    await session.open({ mode: "simulate", qasm: "b" });
    expect(session.id).toBe("s1");
    expect(removed).toEqual(["s0"]);
  });
});
