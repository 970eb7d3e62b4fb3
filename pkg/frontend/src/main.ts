/** DOM wiring for the interactive decision-diagram explorer. */

import { ApiError, SessionClient } from "./api.js";
import { snapshotToDot } from "./dot.js";
import { isIdentitySnapshot } from "./identity.js";
import { Playback } from "./playback.js";
import { renderSnapshot } from "./render.js";
import { UiSession } from "./session.js";
import { TEMPLATES } from "./templates.js";
import { DEFAULT_STYLE, type StateView, type StepSide, type StyleOptions } from "./types.js";

const BASE = (window as { QCDD_BASE?: string }).QCDD_BASE ?? "";
const client = new SessionClient(BASE);
const session = new UiSession(client);

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

let mode: "simulate" | "verify" = "simulate";
let style: StyleOptions = { ...DEFAULT_STYLE };

const editor = $<HTMLTextAreaElement>("editor");
const editor2 = $<HTMLTextAreaElement>("editor2");
const graphBox = $<HTMLDivElement>("graph");
const vectorBox = $<HTMLDivElement>("vector");
const statusBox = $<HTMLDivElement>("status");
const dialog = $<HTMLDivElement>("decision-dialog");
const badge = $<HTMLSpanElement>("identity-badge");

function toast(message: string): void {
  statusBox.textContent = message;
  statusBox.classList.add("visible");
  setTimeout(() => statusBox.classList.remove("visible"), 4000);
}

function describeError(error: unknown): string {
  if (error instanceof ApiError) {
    const detail = error.detail as { message?: string } | string;
    if (typeof detail === "object" && detail?.message) return detail.message;
    return String(typeof detail === "string" ? detail : error.message);
  }
  return String(error);
}

const playback = new Playback(
  () => session.step("forward", mode === "verify" ? "left" : "single"),
  undefined,
  (playing) => {
    $("btn-play").classList.toggle("hidden", playing);
    $("btn-pause").classList.toggle("hidden", !playing);
  },
);

/** Screen positions of rendered shapes, keyed by stable node id. */
function capturePositions(root: HTMLElement): Map<string, { x: number; y: number }> {
  const positions = new Map<string, { x: number; y: number }>();
  for (const el of root.querySelectorAll<SVGGraphicsElement>("[data-id]")) {
    const box = el.getBoundingClientRect();
    positions.set(el.getAttribute("data-id")!, { x: box.x, y: box.y });
  }
  return positions;
}

/** FLIP transition: nodes shared between snapshots glide to their new spot. */
function animateFrom(root: HTMLElement, before: Map<string, { x: number; y: number }>): void {
  for (const el of root.querySelectorAll<SVGGraphicsElement>("[data-id]")) {
    const old = before.get(el.getAttribute("data-id")!);
    if (!old) continue;
    const now = el.getBoundingClientRect();
    const dx = old.x - now.x;
    const dy = old.y - now.y;
    if (dx === 0 && dy === 0) continue;
    el.style.transition = "none";
    el.style.transform = `translate(${dx}px, ${dy}px)`;
    void el.getBoundingClientRect(); // flush so the transition starts from the offset
    el.style.transition = "transform 300ms ease";
    el.style.transform = "";
  }
}

function showView(view: StateView): void {
  try {
    const model = renderSnapshot(view.snapshot, style);
    const before = capturePositions(graphBox);
    graphBox.innerHTML = model.svg;
    animateFrom(graphBox, before);
  } catch (error) {
    // layout fallback: show the DOT source instead of a picture
    const pre = document.createElement("pre");
    pre.textContent = snapshotToDot(view.snapshot, style);
    graphBox.replaceChildren(pre);
    toast(`layout failed, showing DOT (${describeError(error)})`);
  }

  if (view.denseVector) {
    const n = view.snapshot.numQubits;
    const rows = view.denseVector.map(([re, im], index) => {
      const bits = index.toString(2).padStart(n, "0");
      const amp = `${re.toFixed(4)}${im < 0 ? "-" : "+"}${Math.abs(im).toFixed(4)}i`;
      return `<tr><td>|${bits}⟩</td><td>${amp}</td></tr>`;
    });
    vectorBox.innerHTML = `<table>${rows.join("")}</table>`;
    vectorBox.classList.remove("hidden");
  } else {
    vectorBox.classList.add("hidden");
  }

  const counters = view.programCounters;
  $("counters").textContent =
    mode === "simulate"
      ? `step ${counters.single ?? 0}`
      : `left ${counters.left ?? 0} / right ${counters.right ?? 0}`;
  $("telemetry").textContent =
    `${view.telemetry.nodes} nodes (peak ${view.telemetry.maxNodes}), ` +
    `${view.telemetry.appliedGates} gates applied`;

  if (mode === "verify") {
    const identical = isIdentitySnapshot(view.snapshot);
    badge.textContent = identical ? "identity" : "not identity";
    badge.className = identical ? "badge ok" : "badge off";
  }

  if (view.pendingDecision) {
    const { p0, p1, qubit, kind } = view.pendingDecision;
    $("dialog-title").textContent =
      `${kind === "measure" ? "Measuring" : "Resetting"} qubit q${qubit}`;
    $("dialog-p0").textContent = `|0⟩: ${(p0 * 100).toFixed(1)}%`;
    $("dialog-p1").textContent = `|1⟩: ${(p1 * 100).toFixed(1)}%`;
    dialog.classList.remove("hidden");
  } else {
    dialog.classList.add("hidden");
  }
}

session.onView(showView);

async function openFromEditors(): Promise<void> {
  playback.pause();
  try {
    if (mode === "simulate") {
      await session.open({ mode, qasm: editor.value });
    } else {
      await session.open({ mode, qasm1: editor.value, qasm2: editor2.value });
    }
    statusBox.classList.remove("visible");
  } catch (error) {
    toast(describeError(error));
  }
}

function stepButton(id: string, action: Parameters<UiSession["step"]>[0]): void {
  $(id).addEventListener("click", () => {
    playback.pause();
    const side: StepSide =
      mode === "verify" ? (($("side-right") as HTMLInputElement).checked ? "right" : "left") : "single";
    session.step(action, side).catch((error) => toast(describeError(error)));
  });
}

function wireControls(): void {
  stepButton("btn-forward", "forward");
  stepButton("btn-backward", "backward");
  stepButton("btn-to-breakpoint", "to-breakpoint");
  stepButton("btn-to-start", "start");
  stepButton("btn-to-end", "to-end");
  $("btn-play").addEventListener("click", () => playback.start());
  $("btn-pause").addEventListener("click", () => playback.pause());

  for (const outcome of [0, 1] as const) {
    $(`btn-outcome-${outcome}`).addEventListener("click", () => {
      session.decide(outcome).catch((error) => toast(describeError(error)));
    });
  }
  $("btn-outcome-random").addEventListener("click", () => {
    session.decide("random").catch((error) => toast(describeError(error)));
  });

  $("btn-load").addEventListener("click", () => void openFromEditors());

  const picker = $<HTMLSelectElement>("templates");
  for (const [index, template] of TEMPLATES.entries()) {
    const option = document.createElement("option");
    option.value = String(index);
    option.textContent = template.name;
    picker.appendChild(option);
  }
  picker.addEventListener("change", () => {
    const template = TEMPLATES[Number(picker.value)];
    if (!template) return;
    setMode(template.mode);
    editor.value = template.qasm;
    if (template.qasm2) editor2.value = template.qasm2;
    void openFromEditors();
  });

  for (const [box, which] of [
    [editor, 1],
    [editor2, 2],
  ] as const) {
    box.addEventListener("dragover", (event) => event.preventDefault());
    box.addEventListener("drop", (event) => {
      event.preventDefault();
      const file = event.dataTransfer?.files?.[0];
      if (!file) return;
      if (!file.name.toLowerCase().endsWith(".qasm")) {
        toast(`unsupported file ${file.name}; provide OpenQASM 2.0 (.qasm)`);
        return;
      }
      void file.text().then((text) => {
        if (which === 1) editor.value = text;
        else editor2.value = text;
        void openFromEditors();
      });
    });
  }

  $("mode-simulate").addEventListener("click", () => setMode("simulate"));
  $("mode-verify").addEventListener("click", () => setMode("verify"));

  const styleMode = $<HTMLSelectElement>("style-mode");
  styleMode.addEventListener("change", () => {
    style = { ...style, mode: styleMode.value as StyleOptions["mode"] };
    refresh();
  });
  const weightToggle = $<HTMLInputElement>("style-weights");
  weightToggle.addEventListener("change", () => {
    style = { ...style, showWeights: weightToggle.checked };
    refresh();
  });
  const stubToggle = $<HTMLInputElement>("style-stubs");
  stubToggle.addEventListener("change", () => {
    style = { ...style, retractZeroStubs: !stubToggle.checked };
    refresh();
  });
  const modernToggle = $<HTMLInputElement>("style-modern");
  modernToggle.addEventListener("change", () => {
    style = { ...style, modernNodes: modernToggle.checked };
    refresh();
  });
  const interval = $<HTMLInputElement>("play-interval");
  interval.addEventListener("change", () => {
    playback.intervalMs = Math.max(100, Number(interval.value) || 800);
  });
}

function refresh(): void {
  if (session.current) showView(session.current);
}

function setMode(next: "simulate" | "verify"): void {
  mode = next;
  playback.pause();
  document.body.classList.toggle("verify-mode", next === "verify");
  $("mode-simulate").classList.toggle("active", next === "simulate");
  $("mode-verify").classList.toggle("active", next === "verify");
}

wireControls();
setMode("simulate");
editor.value = TEMPLATES[0].qasm;
void openFromEditors();
