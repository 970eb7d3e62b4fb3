/**
 * Deterministic layered layout for snapshots: one row per qubit level
 * (root level on top, terminal box at the bottom), nodes ordered within
 * a row by first appearance in the node list.  Purely a function of the
 * snapshot, so identical snapshots lay out identically and stable node
 * ids land at stable coordinates, which makes transitions animatable.
 */

import type { DDSnapshot } from "./types.js";

export interface PlacedNode {
  id: number | "terminal" | "root";
  label: string;
  x: number;
  y: number;
}

export interface PlacedEdge {
  from: number | "root";
  to: number | "terminal";
  slot: number;
  weight: [number, number];
  x1: number;
  y1: number;
  x2: number;
  y2: number;
}

export interface Layout {
  width: number;
  height: number;
  nodes: PlacedNode[];
  edges: PlacedEdge[];
}

const H_GAP = 90;
const V_GAP = 80;
const MARGIN = 50;

export function layoutSnapshot(snapshot: DDSnapshot): Layout {
  const levels = [...new Set(snapshot.nodes.map((n) => n.level))].sort(
    (a, b) => b - a,
  );
  const rowOf = new Map<number, number>(); // level -> row index
  levels.forEach((level, row) => rowOf.set(level, row + 1)); // row 0 is the root stub
  const terminalRow = levels.length + 1;

  const position = new Map<number | "terminal" | "root", [number, number]>();
  const rowCounts = new Map<number, number>();
  const nodes: PlacedNode[] = [];

  const widthOfRow = (count: number) => (count - 1) * H_GAP;
  const perRow = new Map<number, number[]>();
  for (const node of snapshot.nodes) {
    const row = rowOf.get(node.level)!;
    const list = perRow.get(row) ?? [];
    list.push(node.id);
    perRow.set(row, list);
  }
  const maxInRow = Math.max(1, ...[...perRow.values()].map((l) => l.length));
  const width = widthOfRow(maxInRow) + 2 * MARGIN;
  const height = (terminalRow + 1) * V_GAP + MARGIN;

  for (const node of snapshot.nodes) {
    const row = rowOf.get(node.level)!;
    const index = rowCounts.get(row) ?? 0;
    rowCounts.set(row, index + 1);
    const rowWidth = widthOfRow(perRow.get(row)!.length);
    const x = width / 2 - rowWidth / 2 + index * H_GAP;
    const y = MARGIN + row * V_GAP;
    position.set(node.id, [x, y]);
    nodes.push({ id: node.id, label: node.label, x, y });
  }
  position.set("root", [width / 2, MARGIN]);
  position.set("terminal", [width / 2, MARGIN + terminalRow * V_GAP]);
  nodes.push({ id: "terminal", label: "1", ...pointAt(position, "terminal") });

  const edges: PlacedEdge[] = [];
  if (snapshot.nodes.length > 0) {
    const [rx, ry] = position.get("root")!;
    const [tx, ty] = position.get(snapshot.nodes[0].id)!;
    edges.push({
      from: "root",
      to: snapshot.nodes[0].id,
      slot: 0,
      weight: snapshot.rootWeight,
      x1: rx,
      y1: ry - V_GAP / 2,
      x2: tx,
      y2: ty,
    });
    for (const edge of snapshot.edges) {
      const [x1, y1] = position.get(edge.from)!;
      const [x2, y2] = position.get(edge.to)!;
      const slots = snapshot.kind === "vector" ? 2 : 4;
      const fan = (edge.slot - (slots - 1) / 2) * (slots === 2 ? 18 : 10);
      edges.push({
        from: edge.from,
        to: edge.to,
        slot: edge.slot,
        weight: edge.weight,
        x1: x1 + fan,
        y1,
        x2,
        y2,
      });
    }
  }
  return { width, height, nodes, edges };
}

function pointAt(
  map: Map<number | "terminal" | "root", [number, number]>,
  key: "terminal",
): { x: number; y: number } {
  const [x, y] = map.get(key)!;
  return { x, y };
}
