/** Typed client for the session service. */

import type {
  CreateResponse,
  SessionMode,
  StateView,
  StepAction,
  StepSide,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly detail: unknown,
  ) {
    super(typeof detail === "string" ? detail : JSON.stringify(detail));
  }
}

export interface CreatePayload {
  mode: SessionMode;
  qasm?: string;
  qasm1?: string;
  qasm2?: string;
  filename?: string;
  filename1?: string;
  filename2?: string;
  seed?: number;
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const response = await fetch(url, {
    headers: { "content-type": "application/json" },
    ...init,
  });
  if (!response.ok) {
    let detail: unknown = response.statusText;
    try {
      detail = ((await response.json()) as { detail?: unknown }).detail ?? detail;
    } catch {
      /* non-JSON error body */
    }
    throw new ApiError(response.status, detail);
  }
  if (response.status === 204) return undefined as T;
  return (await response.json()) as T;
}

export class SessionClient {
  constructor(private readonly baseUrl: string) {}

  create(payload: CreatePayload): Promise<CreateResponse> {
    return request(`${this.baseUrl}/sessions`, {
      method: "POST",
      body: JSON.stringify(payload),
    });
  }

  step(sessionId: string, action: StepAction, side: StepSide = "single"): Promise<StateView> {
    return request(`${this.baseUrl}/sessions/${sessionId}/step`, {
      method: "POST",
      body: JSON.stringify({ action, side }),
    });
  }

  decide(sessionId: string, outcome: 0 | 1 | "random"): Promise<StateView> {
    return request(`${this.baseUrl}/sessions/${sessionId}/decision`, {
      method: "POST",
      body: JSON.stringify({ outcome }),
    });
  }

  state(sessionId: string): Promise<StateView> {
    return request(`${this.baseUrl}/sessions/${sessionId}/state`);
  }

  remove(sessionId: string): Promise<void> {
    return request(`${this.baseUrl}/sessions/${sessionId}`, { method: "DELETE" });
  }
}
