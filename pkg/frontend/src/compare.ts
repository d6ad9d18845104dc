/**
 * Compare tray: pinned operating points side by side with per-field deltas
 * against the first pinned point, plus an equation inspector that shows the
 * served equation text and importance bars.
 *
 * A pinned point's predictions are always fetched from the service when the
 * point is added (or re-added after a reload); nothing is computed locally.
 */

import type { ApiClient, PredictionEntry } from "./api.js";
import { OUTPUT_LABELS, OUTPUT_UNITS, equationText, formatValue, importanceShares } from "./format.js";

export interface OperatingPoint {
  label: string;
  power: number;
  velocity: number;
  predictions: Record<string, PredictionEntry>;
}

export interface CompareOptions {
  onChange?: (points: OperatingPoint[]) => void;
  onError?: (message: string) => void;
}

export class CompareTray {
  readonly root: HTMLElement;
  private readonly api: ApiClient;
  private readonly modelIds: string[];
  private readonly options: CompareOptions;

  points: OperatingPoint[] = [];
  private table!: HTMLElement;
  private inspector!: HTMLElement;
  private counter = 0;

  constructor(
    root: HTMLElement,
    api: ApiClient,
    modelIds: string[],
    options: CompareOptions = {},
  ) {
    this.root = root;
    this.api = api;
    this.modelIds = modelIds;
    this.options = options;
    const doc = root.ownerDocument;
    root.classList.add("compare");
    root.innerHTML = "";
    const title = doc.createElement("h2");
    title.textContent = "Pinned points";
    root.appendChild(title);
    this.table = doc.createElement("div");
    this.table.className = "compare-table";
    root.appendChild(this.table);
    this.inspector = doc.createElement("div");
    this.inspector.className = "inspector";
    root.appendChild(this.inspector);
  }

  nextLabel(): string {
    this.counter += 1;
    return `point ${this.counter}`;
  }

  /** Keep generated labels unique after restoring persisted points. */
  bumpCounter(n: number): void {
    this.counter = Math.max(this.counter, n);
  }

  /** Pin a point; its predictions come from one POST /predict. */
  async addPoint(label: string, power: number, velocity: number): Promise<OperatingPoint | null> {
    try {
      const response = await this.api.predict({ power, velocity }, this.modelIds);
      const point: OperatingPoint = {
        label,
        power,
        velocity,
        predictions: response.predictions,
      };
      this.points.push(point);
      this.render();
      this.options.onChange?.(this.points);
      return point;
    } catch (error) {
      this.options.onError?.(String(error instanceof Error ? error.message : error));
      return null;
    }
  }

  removePoint(label: string): void {
    this.points = this.points.filter((p) => p.label !== label);
    this.render();
    this.options.onChange?.(this.points);
  }

  render(): void {
    const doc = this.root.ownerDocument;
    this.table.innerHTML = "";
    if (this.points.length === 0) {
      this.table.textContent = "nothing pinned yet; click the map or pin the what-if point";
      return;
    }
    const baseline = this.points[0];
    const table = doc.createElement("table");
    const head = doc.createElement("tr");
    head.appendChild(doc.createElement("th"));
    for (const point of this.points) {
      const th = doc.createElement("th");
      const name = doc.createElement("div");
      name.textContent = `${point.label} (P=${point.power.toFixed(0)}, V=${point.velocity.toFixed(0)})`;
      const remove = doc.createElement("button");
      remove.textContent = "unpin";
      remove.addEventListener("click", () => this.removePoint(point.label));
      th.append(name, remove);
      head.appendChild(th);
    }
    table.appendChild(head);

    for (const modelId of this.modelIds) {
      const baseEntry = baseline.predictions[modelId];
      if (!baseEntry) continue;
      const tr = doc.createElement("tr");
      const th = doc.createElement("th");
      th.textContent = `${OUTPUT_LABELS[baseEntry.target] ?? baseEntry.target} (${
        OUTPUT_UNITS[baseEntry.target] ?? ""
      })`;
      tr.appendChild(th);
      for (const point of this.points) {
        const entry = point.predictions[modelId];
        const td = doc.createElement("td");
        if (entry) {
          const delta = entry.value - baseEntry.value;
          td.dataset.modelId = modelId;
          td.dataset.value = String(entry.value);
          td.dataset.delta = String(delta);
          const value = doc.createElement("div");
          value.textContent = formatValue(entry.value);
          const deltaEl = doc.createElement("div");
          deltaEl.className = "delta";
          deltaEl.textContent =
            point === baseline ? "baseline" : `${delta >= 0 ? "+" : ""}${formatValue(delta)}`;
          td.append(value, deltaEl);
        }
        tr.appendChild(td);
      }
      table.appendChild(tr);
    }
    this.table.appendChild(table);
  }

  /** Fetch and render one equation's text plus its importance bars. */
  async showEquation(modelId: string): Promise<void> {
    const doc = this.root.ownerDocument;
    this.inspector.innerHTML = "";
    try {
      const eq = await this.api.getEquation(modelId);
      const title = doc.createElement("h3");
      title.textContent = `${modelId}: ${eq.target}, degree ${eq.degree}`;
      const text = doc.createElement("code");
      text.className = "equation-text";
      text.textContent = equationText(eq);
      const bars = doc.createElement("div");
      bars.className = "importance-bars";
      for (const share of importanceShares(eq)) {
        const row = doc.createElement("div");
        row.className = "bar-row";
        const label = doc.createElement("span");
        label.textContent = share.label;
        const bar = doc.createElement("div");
        bar.className = "bar";
        bar.style.width = `${share.share}%`;
        bar.dataset.share = String(share.share);
        const pct = doc.createElement("span");
        pct.textContent = `${share.share.toFixed(1)}%`;
        row.append(label, bar, pct);
        bars.appendChild(row);
      }
      this.inspector.append(title, text, bars);
    } catch (error) {
      const banner = doc.createElement("div");
      banner.className = "error-banner";
      banner.textContent = String(error instanceof Error ? error.message : error);
      this.inspector.appendChild(banner);
    }
  }
}
