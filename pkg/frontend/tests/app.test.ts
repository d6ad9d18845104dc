import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { startApp, whatIfModelIds } from "../src/app.js";
import {
  OUTPUT_IDS,
  depthEquationPayload,
  modelsPayload,
  predictPayload,
  routedFetch,
  sweepPayload,
} from "./helpers.js";

class MemoryStorage {
  private data = new Map<string, string>();
  getItem(key: string): string | null {
    return this.data.get(key) ?? null;
  }
  setItem(key: string, value: string): void {
    this.data.set(key, value);
  }
  removeItem(key: string): void {
    this.data.delete(key);
  }
  clear(): void {
    this.data.clear();
  }
  key(): string | null {
    return null;
  }
  get length(): number {
    return this.data.size;
  }
}

function routes() {
  return routedFetch({
    "GET /models": () => modelsPayload(),
    "POST /predict": (body) =>
      predictPayload((body as { inputs: Record<string, number> }).inputs),
    "POST /sweep": (body) => sweepPayload((body as { models: string[] }).models),
    "GET /equations/depth_pv": () => depthEquationPayload(),
    "GET /equations/spatter_pv": () => depthEquationPayload(),
  });
}

describe("startApp", () => {
  beforeEach(() => {
    document.body.innerHTML = `
      <select id="output-select"></select>
      <section id="whatif"></section>
      <section id="heatmap"></section>
      <section id="compare"></section>
    `;
  });

  it("selects the power/velocity models for the what-if panel", () => {
    expect(whatIfModelIds(modelsPayload())).toEqual(OUTPUT_IDS);
  });

  it("boots, loads a grid, and restores pinned points by re-fetching", async () => {
    const { fetch, calls } = routes();
    const storage = new MemoryStorage();
    storage.setItem(
      "meltmap-explorer",
      JSON.stringify({
        pinned: [{ label: "point 1", power: 200, velocity: 800 }],
        selectedOutput: "depth_pv",
      }),
    );

    const app = await startApp(document, new ApiClient("", fetch), storage as unknown as Storage);
    expect(app.heatmap.grid).not.toBeNull();
    expect(app.heatmap.selectedOutput).toBe("depth_pv");
    expect(app.tray.points.map((p) => p.label)).toEqual(["point 1"]);

    // the restored pin's predictions came from a fresh POST /predict
    const predictCalls = calls.filter((c) => c.url === "/predict");
    expect(predictCalls.length).toBeGreaterThan(0);
    expect(app.tray.points[0].predictions.depth_pv.value).toBe(
      predictPayload({ power: 200, velocity: 800 }).predictions.depth_pv.value,
    );

    // new labels continue after the restored ones
    expect(app.tray.nextLabel()).toBe("point 2");
  });

  it("persists the selected output on change", async () => {
    const { fetch } = routes();
    const storage = new MemoryStorage();
    await startApp(document, new ApiClient("", fetch), storage as unknown as Storage);

    const selector = document.getElementById("output-select") as HTMLSelectElement;
    selector.value = "depth_pv";
    selector.dispatchEvent(new Event("change", { bubbles: true }));
    await Promise.resolve();

    const persisted = JSON.parse(storage.getItem("meltmap-explorer")!);
    expect(persisted.selectedOutput).toBe("depth_pv");
  });
});
