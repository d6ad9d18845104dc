/**
 * Typed client for the meltmap JSON service.
 *
 * The fetch function is injectable so tests can intercept every request and
 * assert that rendered numbers match the service responses verbatim. The
 * client never computes predictions itself.
 */

export interface ModelMeta {
  id: string;
  target: string;
  inputs: string[];
  base_fields: string[];
  degree: number;
  reported_degree: number;
  reported_r2_train: number;
  reported_r2_test: number;
  notes: string;
}

export interface Envelope {
  power: [number, number];
  velocity: [number, number];
}

export interface ModelsResponse {
  models: ModelMeta[];
  envelope: Envelope;
}

export interface PredictionEntry {
  target: string;
  value: number;
}

export interface PredictResponse {
  inputs: Record<string, number>;
  predictions: Record<string, PredictionEntry>;
  out_of_envelope: boolean;
  target?: string;
  value?: number;
}

export interface SweepModel {
  id: string;
  target: string;
}

export interface SweepCell {
  out_of_envelope: boolean;
  values: number[];
}

export interface SweepResponse {
  power_axis: number[];
  velocity_axis: number[];
  cell_order: string;
  models: SweepModel[];
  cells: SweepCell[];
}

export interface SweepRequest {
  power_range: [number, number];
  velocity_range: [number, number];
  resolution: number | [number, number];
  models?: string[];
}

export interface EquationTerm {
  exponents: number[];
  coefficient: number;
}

export interface EquationJson {
  target: string;
  base_features: string[];
  degree: number;
  intercept: number;
  terms: EquationTerm[];
  train_r2: number | null;
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function parseResponse<T>(response: Response): Promise<T> {
  if (response.ok) {
    return (await response.json()) as T;
  }
  let code = "http_error";
  let message = `${response.status}`;
  try {
    const body = (await response.json()) as { error?: { code?: string; message?: string } };
    code = body.error?.code ?? code;
    message = body.error?.message ?? message;
  } catch {
    // non-JSON error body; keep the defaults
  }
  throw new ApiError(response.status, code, message);
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  async getModels(): Promise<ModelsResponse> {
    const response = await this.fetchFn(`${this.baseUrl}/models`);
    return parseResponse<ModelsResponse>(response);
  }

  async predict(
    inputs: Record<string, number>,
    modelIds: string[],
  ): Promise<PredictResponse> {
    const response = await this.fetchFn(`${this.baseUrl}/predict`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ model_ids: modelIds, inputs }),
    });
    return parseResponse<PredictResponse>(response);
  }

  async sweep(request: SweepRequest, signal?: AbortSignal): Promise<SweepResponse> {
    const response = await this.fetchFn(`${this.baseUrl}/sweep`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(request),
      signal,
    });
    return parseResponse<SweepResponse>(response);
  }

  async getEquation(id: string): Promise<EquationJson> {
    const response = await this.fetchFn(`${this.baseUrl}/equations/${id}`);
    return parseResponse<EquationJson>(response);
  }
}
