/**
 * Persistence for pinned operating points and the selected heatmap output.
 *
 * Only coordinates and labels are stored; predictions are always re-fetched
 * from the service after a reload, never restored from storage.
 */

export interface PinnedPoint {
  label: string;
  power: number;
  velocity: number;
}

export interface PersistedState {
  pinned: PinnedPoint[];
  selectedOutput: string;
}

export interface StorageLike {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
}

const DEFAULT_STATE: PersistedState = { pinned: [], selectedOutput: "spatter_pv" };

export class ExplorerState {
  constructor(
    private readonly storage: StorageLike,
    private readonly key: string = "meltmap-explorer",
  ) {}

  load(): PersistedState {
    const raw = this.storage.getItem(this.key);
    if (!raw) return { ...DEFAULT_STATE, pinned: [] };
    try {
      const parsed = JSON.parse(raw) as Partial<PersistedState>;
      const pinned = Array.isArray(parsed.pinned)
        ? parsed.pinned
            .filter(
              (p): p is PinnedPoint =>
                typeof p === "object" &&
                p !== null &&
                typeof (p as PinnedPoint).label === "string" &&
                Number.isFinite((p as PinnedPoint).power) &&
                Number.isFinite((p as PinnedPoint).velocity),
            )
            .map((p) => ({ label: p.label, power: p.power, velocity: p.velocity }))
        : [];
      return {
        pinned,
        selectedOutput:
          typeof parsed.selectedOutput === "string"
            ? parsed.selectedOutput
            : DEFAULT_STATE.selectedOutput,
      };
    } catch {
      return { ...DEFAULT_STATE, pinned: [] };
    }
  }

  save(state: PersistedState): void {
    this.storage.setItem(
      this.key,
      JSON.stringify({
        pinned: state.pinned.map((p) => ({
          label: p.label,
          power: p.power,
          velocity: p.velocity,
        })),
        selectedOutput: state.selectedOutput,
      }),
    );
  }
}
