import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";
import { modelsPayload, predictPayload, routedFetch, sweepPayload } from "./helpers.js";

describe("ApiClient", () => {
  it("hits the expected endpoints with the expected shapes", async () => {
    const { fetch, calls } = routedFetch({
      "GET /models": () => modelsPayload(),
      "POST /predict": (body) =>
        predictPayload((body as { inputs: Record<string, number> }).inputs),
      "POST /sweep": (body) => sweepPayload((body as { models: string[] }).models),
      "GET /equations/depth_pv": () => ({
        target: "depth",
        base_features: ["Power", "Velocity"],
        degree: 2,
        intercept: 53.7694,
        terms: [],
        train_r2: 0.99,
      }),
    });
    const api = new ApiClient("", fetch);

    const models = await api.getModels();
    expect(models.models).toHaveLength(6);
    expect(models.envelope.power).toEqual([50, 500]);

    const prediction = await api.predict({ power: 200, velocity: 800 }, ["depth_pv"]);
    expect(prediction.predictions.depth_pv.target).toBe("depth");
    expect(calls[1]).toMatchObject({
      url: "/predict",
      method: "POST",
      body: { model_ids: ["depth_pv"], inputs: { power: 200, velocity: 800 } },
    });

    const sweep = await api.sweep({
      power_range: [50, 500],
      velocity_range: [100, 2000],
      resolution: 3,
      models: ["depth_pv"],
    });
    expect(sweep.cells).toHaveLength(6);

    const equation = await api.getEquation("depth_pv");
    expect(equation.intercept).toBe(53.7694);
  });

  it("propagates machine-readable error codes", async () => {
    const { fetch } = routedFetch({});
    const api = new ApiClient("", fetch);
    await expect(api.getEquation("missing")).rejects.toMatchObject({
      name: "ApiError",
      status: 404,
      code: "unknown_route",
    });
    try {
      await api.getModels();
    } catch (error) {
      expect(error).toBeInstanceOf(ApiError);
    }
  });
});
