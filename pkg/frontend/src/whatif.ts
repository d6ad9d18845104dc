/**
 * What-if panel: two sliders bounded to the calibration envelope. Slider
 * motion is debounced (150 ms by default); each settled position issues one
 * POST /predict and the six outputs are rendered straight from the response
 * body. When the service is unreachable the panel shows an error banner and
 * greys the stale values.
 */

import type { ApiClient, Envelope, PredictResponse } from "./api.js";
import { OUTPUT_LABELS, OUTPUT_UNITS, formatValue } from "./format.js";

export const DEFAULT_DEBOUNCE_MS = 150;

export interface WhatIfOptions {
  debounceMs?: number;
  onPrediction?: (response: PredictResponse) => void;
  onPin?: (point: { power: number; velocity: number }) => void;
}

export class WhatIfPanel {
  readonly root: HTMLElement;
  private readonly api: ApiClient;
  private readonly modelIds: string[];
  private readonly debounceMs: number;
  private readonly options: WhatIfOptions;

  private powerSlider!: HTMLInputElement;
  private velocitySlider!: HTMLInputElement;
  private powerReadout!: HTMLElement;
  private velocityReadout!: HTMLElement;
  private valuesList!: HTMLElement;
  private badge!: HTMLElement;
  private banner!: HTMLElement;
  private pinButton!: HTMLButtonElement;

  private timer: ReturnType<typeof setTimeout> | null = null;
  private requestToken = 0;
  lastResponse: PredictResponse | null = null;

  constructor(
    root: HTMLElement,
    api: ApiClient,
    envelope: Envelope,
    modelIds: string[],
    options: WhatIfOptions = {},
  ) {
    this.root = root;
    this.api = api;
    this.modelIds = modelIds;
    this.debounceMs = options.debounceMs ?? DEFAULT_DEBOUNCE_MS;
    this.options = options;
    this.build(envelope);
  }

  private build(envelope: Envelope): void {
    const doc = this.root.ownerDocument;
    this.root.classList.add("whatif");
    this.root.innerHTML = "";

    const title = doc.createElement("h2");
    title.textContent = "What-if";
    this.root.appendChild(title);

    const makeSlider = (
      label: string,
      unit: string,
      [lo, hi]: [number, number],
    ): [HTMLInputElement, HTMLElement] => {
      const row = doc.createElement("label");
      row.className = "slider-row";
      const caption = doc.createElement("span");
      caption.textContent = `${label} (${unit})`;
      const readout = doc.createElement("output");
      const slider = doc.createElement("input");
      slider.type = "range";
      slider.min = String(lo);
      slider.max = String(hi);
      slider.step = "1";
      slider.value = String((lo + hi) / 2);
      readout.textContent = slider.value;
      row.append(caption, slider, readout);
      this.root.appendChild(row);
      return [slider, readout];
    };

    [this.powerSlider, this.powerReadout] = makeSlider("Power", "W", envelope.power);
    [this.velocitySlider, this.velocityReadout] = makeSlider(
      "Velocity",
      "mm/s",
      envelope.velocity,
    );

    this.badge = doc.createElement("span");
    this.badge.className = "badge hidden";
    this.badge.textContent = "outside calibration envelope";
    this.root.appendChild(this.badge);

    this.banner = doc.createElement("div");
    this.banner.className = "error-banner hidden";
    this.banner.setAttribute("role", "alert");
    this.root.appendChild(this.banner);

    this.valuesList = doc.createElement("dl");
    this.valuesList.className = "outputs";
    this.root.appendChild(this.valuesList);

    this.pinButton = doc.createElement("button");
    this.pinButton.textContent = "Pin this point";
    this.pinButton.addEventListener("click", () => {
      this.options.onPin?.(this.currentPoint());
    });
    this.root.appendChild(this.pinButton);

    const onInput = () => {
      this.powerReadout.textContent = this.powerSlider.value;
      this.velocityReadout.textContent = this.velocitySlider.value;
      this.schedule();
    };
    this.powerSlider.addEventListener("input", onInput);
    this.velocitySlider.addEventListener("input", onInput);
  }

  currentPoint(): { power: number; velocity: number } {
    return {
      power: Number(this.powerSlider.value),
      velocity: Number(this.velocitySlider.value),
    };
  }

  setPoint(power: number, velocity: number): void {
    this.powerSlider.value = String(power);
    this.velocitySlider.value = String(velocity);
    this.powerReadout.textContent = this.powerSlider.value;
    this.velocityReadout.textContent = this.velocitySlider.value;
    this.schedule();
  }

  /** Debounce: repeated slider motion collapses into one request. */
  private schedule(): void {
    if (this.timer !== null) clearTimeout(this.timer);
    this.timer = setTimeout(() => {
      this.timer = null;
      void this.refresh();
    }, this.debounceMs);
  }

  async refresh(): Promise<void> {
    const token = ++this.requestToken;
    const point = this.currentPoint();
    try {
      const response = await this.api.predict(
        { power: point.power, velocity: point.velocity },
        this.modelIds,
      );
      if (token !== this.requestToken) return; // a newer request superseded this one
      this.lastResponse = response;
      this.renderValues(response);
      this.banner.classList.add("hidden");
      this.valuesList.classList.remove("stale");
      this.options.onPrediction?.(response);
    } catch (error) {
      if (token !== this.requestToken) return;
      this.banner.textContent = `service unreachable: ${String(
        error instanceof Error ? error.message : error,
      )}`;
      this.banner.classList.remove("hidden");
      this.valuesList.classList.add("stale");
    }
  }

  private renderValues(response: PredictResponse): void {
    const doc = this.root.ownerDocument;
    this.valuesList.innerHTML = "";
    for (const modelId of this.modelIds) {
      const entry = response.predictions[modelId];
      if (!entry) continue;
      const dt = doc.createElement("dt");
      dt.textContent = `${OUTPUT_LABELS[entry.target] ?? entry.target}`;
      const dd = doc.createElement("dd");
      dd.dataset.modelId = modelId;
      // data-value keeps the service's number verbatim; the text is a
      // formatted view of the same number
      dd.dataset.value = String(entry.value);
      dd.textContent = `${formatValue(entry.value)} ${OUTPUT_UNITS[entry.target] ?? ""}`;
      this.valuesList.append(dt, dd);
    }
    this.badge.classList.toggle("hidden", !response.out_of_envelope);
  }
}
