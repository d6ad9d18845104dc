/**
 * Explorer bootstrap: fetches model metadata, wires the what-if panel, the
 * heatmap, and the compare tray together, and persists pinned points and the
 * selected output across reloads (predictions are re-fetched, not restored).
 */

import { ApiClient } from "./api.js";
import type { Envelope, ModelsResponse } from "./api.js";
import { CompareTray } from "./compare.js";
import { HeatmapView } from "./heatmap.js";
import { ExplorerState } from "./state.js";
import { WhatIfPanel } from "./whatif.js";

/** Outputs shown in the what-if panel: the five melt-pool models + spatter. */
export function whatIfModelIds(models: ModelsResponse): string[] {
  const pvModels = models.models.filter((m) =>
    m.base_fields.every((f) => f === "power" || f === "velocity"),
  );
  const ordered = ["length_pv", "width_pv", "depth_pv", "area_pv", "volume_pv", "spatter_pv"];
  return ordered.filter((id) => pvModels.some((m) => m.id === id));
}

export async function startApp(
  doc: Document,
  api: ApiClient,
  storage: Storage,
): Promise<{ whatif: WhatIfPanel; heatmap: HeatmapView; tray: CompareTray }> {
  const metadata = await api.getModels();
  const envelope: Envelope = metadata.envelope;
  const outputs = whatIfModelIds(metadata);

  const state = new ExplorerState(storage);
  const persisted = state.load();

  const trayRoot = doc.getElementById("compare")!;
  const whatifRoot = doc.getElementById("whatif")!;
  const heatmapRoot = doc.getElementById("heatmap")!;

  const tray = new CompareTray(trayRoot, api, outputs, {
    onChange: (points) =>
      state.save({
        pinned: points.map((p) => ({ label: p.label, power: p.power, velocity: p.velocity })),
        selectedOutput: heatmap.selectedOutput,
      }),
  });

  const heatmap = new HeatmapView(heatmapRoot, api, envelope, {
    resolution: 64,
    onPin: (pin) => {
      void tray.addPoint(tray.nextLabel(), pin.power, pin.velocity);
    },
  });

  const whatif = new WhatIfPanel(whatifRoot, api, envelope, outputs, {
    onPin: (point) => {
      void tray.addPoint(tray.nextLabel(), point.power, point.velocity);
    },
  });

  // output selector drives both the heatmap coloring and the inspector
  const selector = doc.getElementById("output-select") as HTMLSelectElement;
  for (const id of outputs) {
    const option = doc.createElement("option");
    option.value = id;
    option.textContent = id;
    selector.appendChild(option);
  }
  const initialOutput = outputs.includes(persisted.selectedOutput)
    ? persisted.selectedOutput
    : outputs[outputs.length - 1];
  selector.value = initialOutput;
  selector.addEventListener("change", () => {
    void heatmap.setOutput(selector.value, outputs);
    void tray.showEquation(selector.value);
    state.save({
      pinned: tray.points.map((p) => ({ label: p.label, power: p.power, velocity: p.velocity })),
      selectedOutput: selector.value,
    });
  });

  // restore pinned points: coordinates from storage, predictions re-fetched
  for (const pin of persisted.pinned) {
    await tray.addPoint(pin.label, pin.power, pin.velocity);
    const n = Number(pin.label.replace(/\D+/g, ""));
    if (Number.isFinite(n)) tray.bumpCounter(n);
  }

  heatmap.selectedOutput = initialOutput;
  await heatmap.load(outputs);
  await tray.showEquation(initialOutput);
  void whatif.refresh();
  return { whatif, heatmap, tray };
}

export function main(): void {
  // the API is mounted at the origin root; the page itself lives under /ui/
  const api = new ApiClient("");
  void startApp(document, api, window.localStorage).catch((error) => {
    const banner = document.createElement("div");
    banner.className = "error-banner";
    banner.textContent = `failed to start: ${String(error)}`;
    document.body.prepend(banner);
  });
}
