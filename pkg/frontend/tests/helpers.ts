/**
 * Test doubles: a recording fetch with canned routes, a manually resolved
 * fetch for abort/race tests, and canned service payloads.
 */

import type {
  EquationJson,
  FetchLike,
  ModelsResponse,
  PredictResponse,
  SweepResponse,
} from "../src/api.js";

export interface RecordedCall {
  url: string;
  method: string;
  body: unknown;
}

export function jsonResponse(payload: unknown, status = 200): Response {
  return new Response(JSON.stringify(payload), {
    status,
    headers: { "content-type": "application/json" },
  });
}

/** Routes keyed as "METHOD path"; a handler gets the parsed body. */
export function routedFetch(
  routes: Record<string, (body: unknown) => unknown>,
  calls: RecordedCall[] = [],
): { fetch: FetchLike; calls: RecordedCall[] } {
  const fetchFn: FetchLike = async (url, init) => {
    const method = init?.method ?? "GET";
    const body = init?.body ? JSON.parse(String(init.body)) : undefined;
    calls.push({ url, method, body });
    const key = `${method} ${url}`;
    const handler = routes[key];
    if (!handler) {
      return jsonResponse({ error: { code: "unknown_route", message: key } }, 404);
    }
    try {
      return jsonResponse(handler(body));
    } catch (error) {
      const e = error as { status?: number; code?: string; message?: string };
      return jsonResponse(
        { error: { code: e.code ?? "error", message: e.message ?? "boom" } },
        e.status ?? 400,
      );
    }
  };
  return { fetch: fetchFn, calls };
}

interface Deferred {
  url: string;
  init?: RequestInit;
  resolve: (response: Response) => void;
  reject: (error: unknown) => void;
}

/** Fetch whose responses are released by the test, with abort support. */
export class ManualFetch {
  pending: Deferred[] = [];
  calls: { url: string; method: string; body: unknown }[] = [];

  fetch: FetchLike = (url, init) => {
    this.calls.push({
      url,
      method: init?.method ?? "GET",
      body: init?.body ? JSON.parse(String(init.body)) : undefined,
    });
    return new Promise<Response>((resolve, reject) => {
      const entry: Deferred = { url, init, resolve, reject };
      init?.signal?.addEventListener("abort", () =>
        reject(new DOMException("request aborted", "AbortError")),
      );
      this.pending.push(entry);
    });
  };

  resolve(index: number, payload: unknown): void {
    this.pending[index].resolve(jsonResponse(payload));
  }

  rejectWith(index: number, error: unknown): void {
    this.pending[index].reject(error);
  }
}

export const ENVELOPE: { power: [number, number]; velocity: [number, number] } = {
  power: [50, 500],
  velocity: [100, 2000],
};

export const OUTPUT_IDS = [
  "length_pv",
  "width_pv",
  "depth_pv",
  "area_pv",
  "volume_pv",
  "spatter_pv",
];

const TARGETS: Record<string, string> = {
  length_pv: "length",
  width_pv: "width",
  depth_pv: "depth",
  area_pv: "cross_section",
  volume_pv: "volume",
  spatter_pv: "spatter",
};

export function modelsPayload(): ModelsResponse {
  return {
    models: OUTPUT_IDS.map((id) => ({
      id,
      target: TARGETS[id],
      inputs: ["Power", "Velocity"],
      base_fields: ["power", "velocity"],
      degree: 2,
      reported_degree: 2,
      reported_r2_train: 0.99,
      reported_r2_test: 0.99,
      notes: "",
    })),
    envelope: ENVELOPE,
  };
}

/** Deterministic fake predictions; the UI must echo whatever it is served. */
export function predictPayload(inputs: Record<string, number>): PredictResponse {
  const predictions: PredictResponse["predictions"] = {};
  OUTPUT_IDS.forEach((id, i) => {
    predictions[id] = {
      target: TARGETS[id],
      value: 1000 * (i + 1) + inputs.power + inputs.velocity / 1000,
    };
  });
  return {
    inputs,
    predictions,
    out_of_envelope:
      inputs.power < ENVELOPE.power[0] ||
      inputs.power > ENVELOPE.power[1] ||
      inputs.velocity < ENVELOPE.velocity[0] ||
      inputs.velocity > ENVELOPE.velocity[1],
  };
}

export function sweepPayload(models: string[], nP = 3, nV = 2): SweepResponse {
  const powerAxis = Array.from({ length: nP }, (_, i) => 50 + i * 100);
  const velocityAxis = Array.from({ length: nV }, (_, i) => 100 + i * 500);
  const cells = [];
  for (let row = 0; row < nV; row += 1) {
    for (let col = 0; col < nP; col += 1) {
      cells.push({
        out_of_envelope: false,
        values: models.map((_, k) => 100 * k + 10 * row + col + 0.5),
      });
    }
  }
  return {
    power_axis: powerAxis,
    velocity_axis: velocityAxis,
    cell_order: "velocity-major rows, power varies fastest",
    models: models.map((id) => ({ id, target: TARGETS[id] ?? "spatter" })),
    cells,
  };
}

/** The bundled depth equation, as GET /equations/depth_pv serves it. */
export function depthEquationPayload(): EquationJson {
  return {
    target: "depth",
    base_features: ["Power", "Velocity"],
    degree: 2,
    intercept: 53.7694,
    terms: [
      { exponents: [1, 0], coefficient: 1.5055 },
      { exponents: [0, 1], coefficient: -0.3504 },
      { exponents: [2, 0], coefficient: -2.92e-4 },
      { exponents: [1, 1], coefficient: -7.54e-4 },
      { exponents: [0, 2], coefficient: 2.12e-4 },
    ],
    train_r2: 0.99,
  };
}
