/**
 * Structural identity test on a matrix snapshot, used for the
 * verification badge: a chain of one node per level whose only edges
 * sit at slots 0 and 3 with unit weight, ending at the terminal, under
 * a root weight of magnitude one (phase counts as "identity up to
 * global phase" and still lights the badge).
 */

import type { DDSnapshot } from "./types.js";

const TOL = 1e-9;

function unit(w: [number, number]): boolean {
  return Math.abs(w[0] - 1) <= TOL && Math.abs(w[1]) <= TOL;
}

export function isIdentitySnapshot(snapshot: DDSnapshot): boolean {
  if (snapshot.kind !== "matrix") return false;
  if (snapshot.nodes.length !== snapshot.numQubits) return false;
  const mag = Math.hypot(snapshot.rootWeight[0], snapshot.rootWeight[1]);
  if (Math.abs(mag - 1) > TOL) return false;

  const outgoing = new Map<number, Map<number, { to: number | "terminal"; w: [number, number] }>>();
  for (const edge of snapshot.edges) {
    const slots = outgoing.get(edge.from) ?? new Map();
    slots.set(edge.slot, { to: edge.to, w: edge.weight });
    outgoing.set(edge.from, slots);
  }

  let at: number | "terminal" = snapshot.nodes[0].id;
  let level = snapshot.numQubits - 1;
  while (at !== "terminal") {
    const node = snapshot.nodes.find((n) => n.id === at);
    if (!node || node.level !== level) return false;
    const slots = outgoing.get(node.id);
    if (!slots || slots.size !== 2) return false;
    const keep = slots.get(0);
    const pass = slots.get(3);
    if (!keep || !pass) return false;
    if (!unit(keep.w) || !unit(pass.w)) return false;
    if (JSON.stringify(keep.to) !== JSON.stringify(pass.to)) return false;
    at = keep.to;
    level -= 1;
  }
  return level === -1;
}
