"""Serialization of decision diagrams: GraphViz DOT text and JSON snapshots.

DOT output is layered top-down with one rank per qubit level.  The
"classic" style labels edges with their weights and draws non-unit
weights dashed, like diagrams drawn by hand.  The "colored" style drops
labels: magnitude becomes line thickness, phase becomes the stroke hue
on the HLS wheel with phase 0 at red.

Snapshots are lossless: the dense vector or matrix can be rebuilt from
the listed edges, absent successor slots standing for zero stubs.  Node
ids are engine serial numbers, stable for the engine's lifetime, which
lets a UI animate transitions between consecutive snapshots.
"""

from __future__ import annotations

import colorsys
import math
from dataclasses import dataclass, field
from typing import Union

from .engine import Engine, MatrixDD, VectorDD, ZERO, Edge, Node

__all__ = ["StyleOptions", "DDSnapshot", "to_dot", "to_snapshot", "snapshot_to_dense"]


@dataclass(frozen=True)
class StyleOptions:
    mode: str = "classic"  # classic | colored
    show_weights: bool | None = None  # default: on for classic, off for colored
    retract_zero_stubs: bool = True
    modern_nodes: bool = False  # rounded node glyphs in colored mode

    def __post_init__(self) -> None:
        if self.mode not in ("classic", "colored"):
            raise ValueError(f"unknown style mode {self.mode!r}")

    @property
    def weights_shown(self) -> bool:
        if self.show_weights is None:
            return self.mode == "classic"
        return self.show_weights


def phase_hue_degrees(w: complex) -> float:
    """Hue in [0, 360): phase 0 maps to 0 (red), increasing with phase."""
    angle = math.atan2(w.imag, w.real)
    return (angle % (2 * math.pi)) / (2 * math.pi) * 360.0


def phase_color(w: complex) -> str:
    """Stroke color for a weight: HLS wheel hue, lightness .5, saturation .7."""
    h = phase_hue_degrees(w) / 360.0
    r, g, b = colorsys.hls_to_rgb(h, 0.5, 0.7)
    return f"#{round(r * 255):02x}{round(g * 255):02x}{round(b * 255):02x}"


def pen_width(w: complex) -> float:
    """Line thickness, linear in magnitude with a 0.5pt floor."""
    return max(0.5, 3.0 * abs(w))


def format_weight(w: complex) -> str:
    """Compact complex literal with four significant digits."""
    def fmt(x: float) -> str:
        if x == int(x) and abs(x) < 1e6:
            return str(int(x))
        return f"{x:.4g}"

    re, im = w.real, w.imag
    if im == 0:
        return fmt(re)
    if re == 0:
        return "i" if im == 1 else ("-i" if im == -1 else f"{fmt(im)}i")
    sign = "+" if im > 0 else "-"
    mag = abs(im)
    imag = "i" if mag == 1 else f"{fmt(mag)}i"
    return f"{fmt(re)}{sign}{imag}"


def _iter_nodes(engine: Engine, root: Edge) -> list[Node]:
    """Reachable non-terminal nodes in depth-first preorder from the root."""
    if root.w == ZERO or root.node is engine.terminal:
        return []
    order: list[Node] = []
    seen: set[int] = set()
    stack = [root.node]
    while stack:
        node = stack.pop()
        if node is engine.terminal or node.serial in seen:
            continue
        seen.add(node.serial)
        order.append(node)
        for e in reversed(node.edges):
            if e.w != ZERO:
                stack.append(e.node)
    return order


def to_dot(engine: Engine, dd: Union[VectorDD, MatrixDD], style: StyleOptions | None = None) -> str:
    """Render a diagram as a GraphViz digraph."""
    style = style or StyleOptions()
    lines = ["digraph dd {", "  rankdir=TB;"]
    nodes = _iter_nodes(engine, dd.root)
    node_shape = "circle"
    if style.mode == "colored" and style.modern_nodes:
        node_shape = "Mrecord"
    lines.append(f"  node [shape={node_shape}, fontsize=10];")
    lines.append('  root [shape=point, width=0.05];')

    def edge_attrs(w: complex) -> str:
        attrs = []
        if style.mode == "classic":
            if abs(w - 1) > engine.tol:
                attrs.append("style=dashed")
        else:
            attrs.append(f'penwidth={pen_width(w):.3f}')
            attrs.append(f'color="{phase_color(w)}"')
        if style.weights_shown and abs(w - 1) > engine.tol:
            attrs.append(f'label="{format_weight(w)}"')
        return f' [{", ".join(attrs)}]' if attrs else ""

    if dd.root.w == ZERO:
        lines.append('  t [shape=box, label="0"];')
        lines.append("  root -> t;")
        lines.append("}")
        return "\n".join(lines) + "\n"

    by_level: dict[int, list[Node]] = {}
    for node in nodes:
        by_level.setdefault(node.level, []).append(node)
        lines.append(f'  n{node.serial} [label="q{node.level}"];')
    lines.append('  t [shape=box, label="1"];')
    for level in sorted(by_level, reverse=True):
        ids = " ".join(f"n{n.serial};" for n in by_level[level])
        lines.append(f"  {{ rank=same; {ids} }}")

    lines.append(f"  root -> n{dd.root.node.serial}{edge_attrs(engine.value(dd.root.w))};")
    stub = 0
    for node in nodes:
        for slot, e in enumerate(node.edges):
            slot_attr = f"slot={slot}"
            if e.w == ZERO:
                if not style.retract_zero_stubs:
                    lines.append(
                        f'  z{stub} [shape=point, width=0.03, label=""];'
                    )
                    lines.append(
                        f"  n{node.serial} -> z{stub} [style=dotted, {slot_attr}];"
                    )
                    stub += 1
                continue
            head = "t" if e.node is engine.terminal else f"n{e.node.serial}"
            attrs = edge_attrs(engine.value(e.w))
            if attrs:
                attrs = attrs[:-1] + f", {slot_attr}]"
            else:
                attrs = f" [{slot_attr}]"
            lines.append(f"  n{node.serial} -> {head}{attrs};")
    lines.append("}")
    return "\n".join(lines) + "\n"


@dataclass
class DDSnapshot:
    """Wire-format view of a diagram; node ids are engine serials."""

    kind: str  # vector | matrix
    num_qubits: int
    nodes: list[dict]  # {id, level, label}; nodes[0] is the root
    edges: list[dict]  # {from, to: id | "terminal", slot, weight: [re, im]}
    root_weight: tuple[float, float]

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "numQubits": self.num_qubits,
            "nodes": self.nodes,
            "edges": self.edges,
            "rootWeight": list(self.root_weight),
        }


def to_snapshot(engine: Engine, dd: Union[VectorDD, MatrixDD]) -> DDSnapshot:
    """Lossless JSON-ready view; absent successor slots are zero stubs."""
    kind = "vector" if isinstance(dd, VectorDD) else "matrix"
    w = engine.value(dd.root.w)
    nodes = _iter_nodes(engine, dd.root)
    node_dicts = [
        {"id": n.serial, "level": n.level, "label": f"q{n.level}"} for n in nodes
    ]
    edge_dicts = []
    for node in nodes:
        for slot, e in enumerate(node.edges):
            if e.w == ZERO:
                continue
            ew = engine.value(e.w)
            edge_dicts.append(
                {
                    "from": node.serial,
                    "to": "terminal" if e.node is engine.terminal else e.node.serial,
                    "slot": slot,
                    "weight": [ew.real, ew.imag],
                }
            )
    return DDSnapshot(
        kind=kind,
        num_qubits=dd.num_qubits,
        nodes=node_dicts,
        edges=edge_dicts,
        root_weight=(w.real, w.imag),
    )


def snapshot_to_dense(snapshot: DDSnapshot) -> list[complex]:
    """Rebuild the dense vector of a vector snapshot (for checks and UIs)."""
    if snapshot.kind != "vector":
        raise ValueError("dense reconstruction implemented for vector snapshots")
    n = snapshot.num_qubits
    out = [0j] * (1 << n)
    if not snapshot.nodes:
        return out
    children: dict[int, dict[int, tuple[object, complex]]] = {}
    for e in snapshot.edges:
        children.setdefault(e["from"], {})[e["slot"]] = (
            e["to"],
            complex(e["weight"][0], e["weight"][1]),
        )
    levels = {node["id"]: node["level"] for node in snapshot.nodes}
    root = snapshot.nodes[0]["id"]

    def walk(node_id, level: int, amp: complex, index: int) -> None:
        if node_id == "terminal":
            out[index] = amp
            return
        for slot, (target, w) in children.get(node_id, {}).items():
            walk(target, level - 1, amp * w, index | (slot << level))

    walk(root, levels[root], complex(*snapshot.root_weight), 0)
    return out
