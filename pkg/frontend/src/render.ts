/**
 * SVG rendering of snapshots.  Pure string construction: identical
 * (snapshot, style) inputs produce identical markup, and the node/edge
 * model the picture is drawn from is exactly the snapshot's node and
 * edge lists, untouched.  If layout ever fails, callers fall back to
 * showing the DOT text instead.
 */

import { layoutSnapshot } from "./layout.js";
import { formatWeight, isUnit, penWidth, phaseColor } from "./style.js";
import type { DDSnapshot, SnapshotEdge, SnapshotNode, StyleOptions } from "./types.js";

export interface RenderModel {
  nodes: SnapshotNode[];
  edges: SnapshotEdge[];
  svg: string;
}

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function renderSnapshot(snapshot: DDSnapshot, style: StyleOptions): RenderModel {
  const layout = layoutSnapshot(snapshot);
  const showWeights = style.showWeights ?? style.mode === "classic";
  const parts: string[] = [
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${layout.width} ${layout.height}" ` +
      `width="${layout.width}" height="${layout.height}" class="dd-graph">`,
  ];

  if (snapshot.nodes.length === 0) {
    parts.push(
      `<text x="${layout.width / 2}" y="${layout.height / 2}" text-anchor="middle">0</text>`,
    );
    parts.push("</svg>");
    return { nodes: snapshot.nodes, edges: snapshot.edges, svg: parts.join("") };
  }

  for (const edge of layout.edges) {
    let stroke = "#222222";
    let width = 1.2;
    let dash = "";
    if (style.mode === "colored") {
      stroke = phaseColor(edge.weight);
      width = penWidth(edge.weight);
    } else if (!isUnit(edge.weight)) {
      dash = ' stroke-dasharray="6 3"';
    }
    parts.push(
      `<line data-from="${edge.from}" data-to="${edge.to}" data-slot="${edge.slot}" ` +
        `x1="${edge.x1}" y1="${edge.y1}" x2="${edge.x2}" y2="${edge.y2}" ` +
        `stroke="${stroke}" stroke-width="${width}"${dash}/>`,
    );
    if (showWeights && !isUnit(edge.weight)) {
      const mx = (edge.x1 + edge.x2) / 2;
      const my = (edge.y1 + edge.y2) / 2;
      parts.push(
        `<text x="${mx + 6}" y="${my - 4}" class="weight">${esc(formatWeight(edge.weight))}</text>`,
      );
    }
  }

  for (const node of layout.nodes) {
    if (node.id === "terminal") {
      parts.push(
        `<g data-id="terminal">` +
          `<rect x="${node.x - 14}" y="${node.y - 14}" width="28" height="28" ` +
          `fill="#ffffff" stroke="#222222"/>` +
          `<text x="${node.x}" y="${node.y + 5}" text-anchor="middle">1</text></g>`,
      );
      continue;
    }
    const rounded = style.mode === "colored" && style.modernNodes;
    const shape = rounded
      ? `<rect x="${node.x - 20}" y="${node.y - 14}" width="40" height="28" ` +
        `rx="10" fill="#f4f6fb" stroke="#222222"/>`
      : `<circle cx="${node.x}" cy="${node.y}" r="16" fill="#f4f6fb" stroke="#222222"/>`;
    parts.push(
      `<g data-id="${node.id}">${shape}` +
        `<text x="${node.x}" y="${node.y + 5}" text-anchor="middle">${esc(node.label)}</text></g>`,
    );
  }
  parts.push("</svg>");
  return { nodes: snapshot.nodes, edges: snapshot.edges, svg: parts.join("") };
}
