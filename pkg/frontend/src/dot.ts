/**
 * DOT text from a snapshot, mirroring the service exporter's styling
 * rules: classic mode dashes non-unit weights and labels them, colored
 * mode encodes magnitude as penwidth and phase as stroke color, and one
 * rank groups each qubit level.  Kept as the styling source of truth so
 * a diagram dropped into GraphViz matches what the SVG renderer shows.
 */

import type { DDSnapshot, StyleOptions } from "./types.js";
import { formatWeight, isUnit, penWidth, phaseColor } from "./style.js";

function weightsShown(style: StyleOptions): boolean {
  return style.showWeights ?? style.mode === "classic";
}

export function snapshotToDot(snapshot: DDSnapshot, style: StyleOptions): string {
  const lines: string[] = ["digraph dd {", "  rankdir=TB;"];
  const shape = style.mode === "colored" && style.modernNodes ? "Mrecord" : "circle";
  lines.push(`  node [shape=${shape}, fontsize=10];`);
  lines.push("  root [shape=point, width=0.05];");

  const attrs = (weight: [number, number]): string => {
    const parts: string[] = [];
    if (style.mode === "classic") {
      if (!isUnit(weight)) parts.push("style=dashed");
    } else {
      parts.push(`penwidth=${penWidth(weight).toFixed(3)}`);
      parts.push(`color="${phaseColor(weight)}"`);
    }
    if (weightsShown(style) && !isUnit(weight)) {
      parts.push(`label="${formatWeight(weight)}"`);
    }
    return parts.length ? ` [${parts.join(", ")}]` : "";
  };

  if (snapshot.nodes.length === 0) {
    lines.push('  t [shape=box, label="0"];');
    lines.push("  root -> t;");
    lines.push("}");
    return lines.join("\n") + "\n";
  }

  const byLevel = new Map<number, number[]>();
  for (const node of snapshot.nodes) {
    lines.push(`  n${node.id} [label="${node.label}"];`);
    const rank = byLevel.get(node.level) ?? [];
    rank.push(node.id);
    byLevel.set(node.level, rank);
  }
  lines.push('  t [shape=box, label="1"];');
  for (const level of [...byLevel.keys()].sort((a, b) => b - a)) {
    const ids = byLevel.get(level)!.map((id) => `n${id};`).join(" ");
    lines.push(`  { rank=same; ${ids} }`);
  }

  lines.push(`  root -> n${snapshot.nodes[0].id}${attrs(snapshot.rootWeight)};`);
  const slots = snapshot.kind === "vector" ? 2 : 4;
  let stub = 0;
  for (const node of snapshot.nodes) {
    const present = new Map(
      snapshot.edges.filter((e) => e.from === node.id).map((e) => [e.slot, e]),
    );
    for (let slot = 0; slot < slots; slot += 1) {
      const edge = present.get(slot);
      if (!edge) {
        if (!style.retractZeroStubs) {
          lines.push(`  z${stub} [shape=point, width=0.03, label=""];`);
          lines.push(`  n${node.id} -> z${stub} [style=dotted, slot=${slot}];`);
          stub += 1;
        }
        continue;
      }
      const head = edge.to === "terminal" ? "t" : `n${edge.to}`;
      const base = attrs(edge.weight);
      const withSlot = base
        ? base.slice(0, -1) + `, slot=${slot}]`
        : ` [slot=${slot}]`;
      lines.push(`  n${node.id} -> ${head}${withSlot};`);
    }
  }
  lines.push("}");
  return lines.join("\n") + "\n";
}
