import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { ApiClient } from "../src/api.js";
import { formatValue } from "../src/format.js";
import { WhatIfPanel } from "../src/whatif.js";
import {
  ENVELOPE,
  OUTPUT_IDS,
  ManualFetch,
  predictPayload,
  routedFetch,
} from "./helpers.js";

function makePanel(fetchImpl: Parameters<typeof ApiClient.prototype.predict> extends never ? never : ConstructorParameters<typeof ApiClient>[1]) {
  const root = document.createElement("section");
  document.body.appendChild(root);
  const api = new ApiClient("", fetchImpl);
  return new WhatIfPanel(root, api, ENVELOPE, OUTPUT_IDS, { debounceMs: 150 });
}

describe("WhatIfPanel", () => {
  beforeEach(() => {
    document.body.innerHTML = "";
    vi.useFakeTimers();
  });

  afterEach(() => {
    vi.useRealTimers();
  });

  it("bounds both sliders to the calibration envelope", () => {
    const { fetch } = routedFetch({});
    const panel = makePanel(fetch);
    const sliders = panel.root.querySelectorAll<HTMLInputElement>("input[type=range]");
    expect(sliders).toHaveLength(2);
    expect([sliders[0].min, sliders[0].max]).toEqual(["50", "500"]);
    expect([sliders[1].min, sliders[1].max]).toEqual(["100", "2000"]);
  });

  it("collapses rapid slider motion into exactly one debounced request", async () => {
    const { fetch, calls } = routedFetch({
      "POST /predict": (body) =>
        predictPayload((body as { inputs: Record<string, number> }).inputs),
    });
    const panel = makePanel(fetch);
    const slider = panel.root.querySelector<HTMLInputElement>("input[type=range]")!;

    for (const value of ["60", "80", "120", "50"]) {
      slider.value = value;
      slider.dispatchEvent(new Event("input", { bubbles: true }));
      await vi.advanceTimersByTimeAsync(50); // below the 150 ms debounce
    }
    expect(calls).toHaveLength(0);
    await vi.advanceTimersByTimeAsync(200);
    expect(calls).toHaveLength(1);
    expect((calls[0].body as { inputs: { power: number } }).inputs.power).toBe(50);
  });

  it("renders every number verbatim from the /predict response", async () => {
    const { fetch } = routedFetch({
      "POST /predict": (body) =>
        predictPayload((body as { inputs: Record<string, number> }).inputs),
    });
    const panel = makePanel(fetch);
    panel.setPoint(200, 800);
    await vi.advanceTimersByTimeAsync(200);

    const response = panel.lastResponse!;
    const rendered = panel.root.querySelectorAll<HTMLElement>("dd[data-model-id]");
    expect(rendered).toHaveLength(OUTPUT_IDS.length);
    for (const dd of rendered) {
      const served = response.predictions[dd.dataset.modelId!];
      expect(dd.dataset.value).toBe(String(served.value));
      expect(dd.textContent).toContain(formatValue(served.value));
    }
  });

  it("shows the envelope badge exactly when the response flags the point", async () => {
    let outside = false;
    const { fetch } = routedFetch({
      "POST /predict": (body) => ({
        ...predictPayload((body as { inputs: Record<string, number> }).inputs),
        out_of_envelope: outside,
      }),
    });
    const panel = makePanel(fetch);
    const badge = panel.root.querySelector(".badge")!;

    panel.setPoint(200, 800);
    await vi.advanceTimersByTimeAsync(200);
    expect(badge.classList.contains("hidden")).toBe(true);

    outside = true;
    panel.setPoint(50, 100);
    await vi.advanceTimersByTimeAsync(200);
    expect(badge.classList.contains("hidden")).toBe(false);
  });

  it("sliders cannot leave the envelope", () => {
    const { fetch } = routedFetch({});
    const panel = makePanel(fetch);
    const slider = panel.root.querySelector<HTMLInputElement>("input[type=range]")!;
    slider.value = "20"; // below min clamps
    expect(Number(slider.value)).toBeGreaterThanOrEqual(50);
  });

  it("shows an error banner and greys stale values when the service is down", async () => {
    const manual = new ManualFetch();
    const panel = makePanel(manual.fetch);

    panel.setPoint(200, 800);
    await vi.advanceTimersByTimeAsync(200);
    manual.resolve(0, predictPayload({ power: 200, velocity: 800 }));
    await vi.advanceTimersByTimeAsync(10);
    expect(panel.root.querySelector(".error-banner")!.classList.contains("hidden")).toBe(true);

    panel.setPoint(300, 900);
    await vi.advanceTimersByTimeAsync(200);
    manual.rejectWith(1, new TypeError("fetch failed"));
    await vi.advanceTimersByTimeAsync(10);

    const banner = panel.root.querySelector(".error-banner")!;
    expect(banner.classList.contains("hidden")).toBe(false);
    expect(banner.textContent).toContain("service unreachable");
    expect(panel.root.querySelector(".outputs")!.classList.contains("stale")).toBe(true);

    // recovery clears the banner and the stale styling
    panel.setPoint(250, 850);
    await vi.advanceTimersByTimeAsync(200);
    manual.resolve(2, predictPayload({ power: 250, velocity: 850 }));
    await vi.advanceTimersByTimeAsync(10);
    expect(banner.classList.contains("hidden")).toBe(true);
    expect(panel.root.querySelector(".outputs")!.classList.contains("stale")).toBe(false);
  });
});
