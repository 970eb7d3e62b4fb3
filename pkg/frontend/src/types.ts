/**
 * Wire types for the session service. These mirror the JSON bodies
 * exactly; the UI never reshapes them before rendering.
 */

export interface SnapshotNode {
  id: number;
  level: number;
  label: string;
}

export interface SnapshotEdge {
  from: number;
  to: number | "terminal";
  slot: number;
  weight: [number, number];
}

export interface DDSnapshot {
  kind: "vector" | "matrix";
  numQubits: number;
  /** nodes[0] is the root; absent edge slots are zero stubs. */
  nodes: SnapshotNode[];
  edges: SnapshotEdge[];
  rootWeight: [number, number];
}

export interface PendingDecision {
  qubit: number;
  p0: number;
  p1: number;
  kind: "measure" | "reset";
}

export interface Telemetry {
  nodes: number;
  maxNodes: number;
  appliedGates: number;
}

export interface StateView {
  snapshot: DDSnapshot;
  denseVector?: [number, number][];
  programCounters: { single?: number; left?: number; right?: number };
  pendingDecision: PendingDecision | null;
  telemetry: Telemetry;
  finished?: boolean;
  identity?: boolean;
}

export type SessionMode = "simulate" | "verify";
export type StepSide = "left" | "right" | "single";
export type StepAction =
  | "forward"
  | "backward"
  | "to-breakpoint"
  | "to-end"
  | "start";

export interface CreateResponse {
  sessionId: string;
  state: StateView;
}

export interface StyleOptions {
  mode: "classic" | "colored";
  showWeights?: boolean;
  retractZeroStubs: boolean;
  modernNodes: boolean;
}

export const DEFAULT_STYLE: StyleOptions = {
  mode: "classic",
  retractZeroStubs: true,
  modernNodes: false,
};
