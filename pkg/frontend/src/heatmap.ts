/**
 * Sweep heatmap over the (power, velocity) window.
 *
 * One grid request covers every selectable output, so switching outputs only
 * re-colors from the cached grid; a fresh fetch happens only when the cached
 * grid lacks the requested output. At most one sweep request is in flight:
 * starting a new one aborts the previous (latest wins). Clicking a cell pins
 * it as an operating point.
 */

import type { ApiClient, Envelope, SweepResponse } from "./api.js";

export interface HeatmapPin {
  power: number;
  velocity: number;
  modelId: string;
  value: number;
}

export interface HeatmapOptions {
  resolution?: number;
  onPin?: (pin: HeatmapPin) => void;
  onError?: (message: string) => void;
}

/** Blue (low) to red (high) color scale; presentation only. */
export function colorFor(value: number, lo: number, hi: number): string {
  const t = hi > lo ? Math.min(1, Math.max(0, (value - lo) / (hi - lo))) : 0.5;
  const r = Math.round(40 + 215 * t);
  const b = Math.round(255 - 215 * t);
  const g = Math.round(64 + 96 * (1 - Math.abs(2 * t - 1)));
  return `rgb(${r},${g},${b})`;
}

export class HeatmapView {
  readonly root: HTMLElement;
  private readonly api: ApiClient;
  private readonly envelope: Envelope;
  private readonly resolution: number;
  private readonly options: HeatmapOptions;

  private canvas!: HTMLCanvasElement;
  private tooltip!: HTMLElement;
  private legend!: HTMLElement;

  grid: SweepResponse | null = null;
  selectedOutput = "";
  fetchCount = 0;
  private controller: AbortController | null = null;
  private requestToken = 0;

  constructor(
    root: HTMLElement,
    api: ApiClient,
    envelope: Envelope,
    options: HeatmapOptions = {},
  ) {
    this.root = root;
    this.api = api;
    this.envelope = envelope;
    this.resolution = options.resolution ?? 64;
    this.options = options;
    this.build();
  }

  private build(): void {
    const doc = this.root.ownerDocument;
    this.root.classList.add("heatmap");
    this.root.innerHTML = "";
    const title = doc.createElement("h2");
    title.textContent = "Process map";
    this.root.appendChild(title);

    this.canvas = doc.createElement("canvas");
    this.canvas.width = 512;
    this.canvas.height = 512;
    this.canvas.addEventListener("click", (event) => {
      const rect = this.canvas.getBoundingClientRect();
      const width = rect.width || this.canvas.width;
      const height = rect.height || this.canvas.height;
      this.pickCell((event.clientX - rect.left) / width, (event.clientY - rect.top) / height);
    });
    this.canvas.addEventListener("mousemove", (event) => {
      const rect = this.canvas.getBoundingClientRect();
      const width = rect.width || this.canvas.width;
      const height = rect.height || this.canvas.height;
      const cell = this.cellFromFractions(
        (event.clientX - rect.left) / width,
        (event.clientY - rect.top) / height,
      );
      this.tooltip.textContent = cell ? this.tooltipText(cell.col, cell.row) : "";
    });
    this.root.appendChild(this.canvas);

    this.tooltip = doc.createElement("div");
    this.tooltip.className = "tooltip";
    this.root.appendChild(this.tooltip);

    this.legend = doc.createElement("div");
    this.legend.className = "legend";
    this.root.appendChild(this.legend);
  }

  /** Index into grid.models for the currently selected output. */
  private outputIndex(grid: SweepResponse, modelId: string): number {
    return grid.models.findIndex((m) => m.id === modelId);
  }

  hasOutput(modelId: string): boolean {
    return this.grid !== null && this.outputIndex(this.grid, modelId) >= 0;
  }

  /**
   * Select which output colors the map. Re-colors from the cached grid when
   * it already contains the output; otherwise fetches a grid that does.
   */
  async setOutput(modelId: string, allOutputs: string[]): Promise<void> {
    this.selectedOutput = modelId;
    if (this.hasOutput(modelId)) {
      this.render();
      return;
    }
    await this.load(allOutputs.includes(modelId) ? allOutputs : [...allOutputs, modelId]);
  }

  /** Fetch a sweep grid; a newer call aborts this one (latest wins). */
  async load(modelIds: string[]): Promise<void> {
    this.controller?.abort();
    const controller = new AbortController();
    this.controller = controller;
    const token = ++this.requestToken;
    this.fetchCount += 1;
    try {
      const grid = await this.api.sweep(
        {
          power_range: this.envelope.power,
          velocity_range: this.envelope.velocity,
          resolution: this.resolution,
          models: modelIds,
        },
        controller.signal,
      );
      if (token !== this.requestToken) return; // superseded
      this.grid = grid;
      this.render();
    } catch (error) {
      if (token !== this.requestToken) return; // aborted by a newer request
      if (error instanceof DOMException && error.name === "AbortError") return;
      this.options.onError?.(String(error instanceof Error ? error.message : error));
    }
  }

  /** Grid value for one cell of the selected output, straight from the sweep body. */
  valueAt(col: number, row: number): number | null {
    if (!this.grid) return null;
    const k = this.outputIndex(this.grid, this.selectedOutput);
    if (k < 0) return null;
    const nP = this.grid.power_axis.length;
    return this.grid.cells[row * nP + col].values[k];
  }

  tooltipText(col: number, row: number): string {
    if (!this.grid) return "";
    const value = this.valueAt(col, row);
    if (value === null) return "";
    const p = this.grid.power_axis[col];
    const v = this.grid.velocity_axis[row];
    return `P=${p.toFixed(0)} W, V=${v.toFixed(0)} mm/s: ${String(value)}`;
  }

  /** Map canvas-relative fractions (x right, y down) onto a grid cell. */
  cellFromFractions(xFrac: number, yFrac: number): { col: number; row: number } | null {
    if (!this.grid) return null;
    if (xFrac < 0 || xFrac >= 1 || yFrac < 0 || yFrac >= 1) return null;
    const nP = this.grid.power_axis.length;
    const nV = this.grid.velocity_axis.length;
    const col = Math.floor(xFrac * nP);
    // canvas y grows downward; velocity grows upward
    const row = nV - 1 - Math.floor(yFrac * nV);
    return { col, row };
  }

  /** Click handler core: pin the cell under the given canvas fractions. */
  pickCell(xFrac: number, yFrac: number): HeatmapPin | null {
    const cell = this.cellFromFractions(xFrac, yFrac);
    if (!cell || !this.grid) return null;
    const value = this.valueAt(cell.col, cell.row);
    if (value === null) return null;
    const pin: HeatmapPin = {
      power: this.grid.power_axis[cell.col],
      velocity: this.grid.velocity_axis[cell.row],
      modelId: this.selectedOutput,
      value,
    };
    this.options.onPin?.(pin);
    return pin;
  }

  render(): void {
    if (!this.grid) return;
    const k = this.outputIndex(this.grid, this.selectedOutput);
    if (k < 0) return;
    const values = this.grid.cells.map((c) => c.values[k]);
    const lo = Math.min(...values);
    const hi = Math.max(...values);
    this.legend.textContent = `${this.selectedOutput}: ${String(lo)} … ${String(hi)}`;

    const ctx = this.canvas.getContext("2d");
    if (!ctx) return; // headless test environments have no 2d context
    const nP = this.grid.power_axis.length;
    const nV = this.grid.velocity_axis.length;
    const cw = this.canvas.width / nP;
    const ch = this.canvas.height / nV;
    for (let row = 0; row < nV; row += 1) {
      for (let col = 0; col < nP; col += 1) {
        ctx.fillStyle = colorFor(values[row * nP + col], lo, hi);
        const y = this.canvas.height - (row + 1) * ch;
        ctx.fillRect(col * cw, y, Math.ceil(cw), Math.ceil(ch));
      }
    }
  }
}
