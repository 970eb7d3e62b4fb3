import { describe, expect, it } from "vitest";

import { isIdentitySnapshot } from "../src/identity.js";
import type { DDSnapshot } from "../src/types.js";

function identity(n: number): DDSnapshot {
  const nodes = [];
  const edges = [];
  for (let level = n - 1; level >= 0; level -= 1) {
    const id = level + 1;
    nodes.push({ id, level, label: `q${level}` });
    const to = level === 0 ? ("terminal" as const) : level;
    edges.push({ from: id, to, slot: 0, weight: [1, 0] as [number, number] });
    edges.push({ from: id, to, slot: 3, weight: [1, 0] as [number, number] });
  }
  return { kind: "matrix", numQubits: n, nodes, edges, rootWeight: [1, 0] };
}

describe("identity badge", () => {
  it("accepts identity chains of any size", () => {
    expect(isIdentitySnapshot(identity(1))).toBe(true);
    expect(isIdentitySnapshot(identity(3))).toBe(true);
  });

  it("accepts a pure global phase on the root", () => {
    const snap = identity(2);
    snap.rootWeight = [Math.SQRT1_2, Math.SQRT1_2];
    expect(isIdentitySnapshot(snap)).toBe(true);
  });

  it("rejects off-diagonal structure, extra nodes, and scaled roots", () => {
    const offDiagonal = identity(2);
    offDiagonal.edges[0] = { ...offDiagonal.edges[0], slot: 1 };
    expect(isIdentitySnapshot(offDiagonal)).toBe(false);

    const phased = identity(2);
    phased.edges[1] = { ...phased.edges[1], weight: [0, 1] };
    expect(isIdentitySnapshot(phased)).toBe(false);

    const scaled = identity(2);
    scaled.rootWeight = [0.5, 0];
    expect(isIdentitySnapshot(scaled)).toBe(false);

    const vector = { ...identity(2), kind: "vector" as const };
    expect(isIdentitySnapshot(vector)).toBe(false);
  });
});
