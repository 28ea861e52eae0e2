/** Per-cluster line filter: chips select a cluster, its member lines
are drawn in the cluster hue with a line-count caption.

Line geometry arrives in data coordinates (y up); drawing fits the
returned bundle into the canvas with a uniform scale and a y flip.
*/

import type { ServiceClient } from "./api.js";
import { clusterSwatch, cssColor } from "./color.js";
import type { ClusterSelector, LineGeometry, StateSummary } from "./types.js";

export interface Bounds {
  minX: number;
  minY: number;
  maxX: number;
  maxY: number;
}

export function computeBounds(lines: LineGeometry[]): Bounds | null {
  let minX = Infinity, minY = Infinity, maxX = -Infinity, maxY = -Infinity;
  for (const line of lines) {
    for (const [x, y] of line.points) {
      if (x < minX) minX = x;
      if (x > maxX) maxX = x;
      if (y < minY) minY = y;
      if (y > maxY) maxY = y;
    }
  }
  if (minX > maxX) return null;
  return { minX, minY, maxX, maxY };
}

/** Map a data point into canvas pixels, y flipped, aspect preserved. */
export function projectPoint(
  x: number, y: number, b: Bounds,
  width: number, height: number, pad: number,
): [number, number] {
  const spanX = b.maxX - b.minX || 1;
  const spanY = b.maxY - b.minY || 1;
  const s = Math.min((width - 2 * pad) / spanX, (height - 2 * pad) / spanY);
  const offX = (width - s * spanX) / 2;
  const offY = (height - s * spanY) / 2;
  return [offX + (x - b.minX) * s, height - offY - (y - b.minY) * s];
}

const UNASSIGNED_STROKE = "#9a9a9a";
const PAD_PX = 12;

export interface LineViewHooks {
  onSelect(selection: ClusterSelector | null): void;
  onError(err: unknown): void;
}

export class LineView {
  private readonly chips: HTMLDivElement;
  private readonly canvas: HTMLCanvasElement;
  private readonly caption: HTMLDivElement;
  private summary: StateSummary | null = null;
  private selected: ClusterSelector | null = null;
  private fetchSeq = 0;

  constructor(
    root: HTMLElement,
    private readonly client: ServiceClient,
    private readonly hooks: LineViewHooks,
  ) {
    this.chips = document.createElement("div");
    this.chips.className = "chip-row";
    this.canvas = document.createElement("canvas");
    this.canvas.width = 768;
    this.canvas.height = 384;
    this.canvas.className = "line-canvas";
    this.canvas.hidden = true;
    this.caption = document.createElement("div");
    this.caption.className = "line-caption";
    root.append(this.chips, this.canvas, this.caption);
  }

  get selection(): ClusterSelector | null {
    return this.selected;
  }

  update(summary: StateSummary): void {
    this.summary = summary;
    this.rebuildChips(summary);
    if (this.selected !== null) {
      const known =
        this.selected === "unassigned" ||
        summary.clusters.some((c) => c.id === this.selected);
      if (known) {
        void this.refresh();
      } else {
        this.select(null); // the selected cluster no longer exists
      }
    }
  }

  select(selection: ClusterSelector | null): void {
    this.selected = selection;
    this.hooks.onSelect(selection);
    if (this.summary) this.rebuildChips(this.summary);
    if (selection === null) {
      this.canvas.hidden = true;
      this.caption.textContent = "";
      return;
    }
    this.canvas.hidden = false;
    void this.refresh();
  }

  private rebuildChips(summary: StateSummary): void {
    this.chips.textContent = "";
    const addChip = (
      label: string, sel: ClusterSelector | null, color: string | null,
    ) => {
      const chip = document.createElement("button");
      chip.type = "button";
      chip.className = "chip";
      chip.textContent = label;
      if (color) chip.style.borderColor = color;
      if (sel === this.selected) chip.classList.add("chip-active");
      chip.addEventListener("click", () => {
        this.select(this.selected === sel ? null : sel);
      });
      this.chips.append(chip);
    };
    addChip("density plot", null, null);
    for (const c of summary.clusters) {
      const color = cssColor(clusterSwatch(c.hue_deg));
      addChip(`cluster ${c.id} (${c.line_count})`, c.id, color);
    }
    addChip(`unassigned (${summary.n_unassigned})`, "unassigned", null);
  }

  private async refresh(): Promise<void> {
    const summary = this.summary;
    const selection = this.selected;
    if (!summary || selection === null) return;
    const seq = ++this.fetchSeq;
    try {
      const payload = await this.client.getLines(summary.session, selection);
      if (seq !== this.fetchSeq || this.selected !== selection) return;
      const hue =
        selection === "unassigned"
          ? null
          : summary.clusters.find((c) => c.id === selection)?.hue_deg ?? null;
      this.draw(payload.lines, hue);
      this.caption.textContent =
        payload.count === 1 ? "1 line" : `${payload.count} lines`;
    } catch (err) {
      if (seq === this.fetchSeq) this.hooks.onError(err);
    }
  }

  private draw(lines: LineGeometry[], hueDeg: number | null): void {
    const ctx = this.canvas.getContext("2d");
    if (!ctx) return; // no raster backend under test
    const { width, height } = this.canvas;
    ctx.clearRect(0, 0, width, height);
    ctx.fillStyle = "#fff";
    ctx.fillRect(0, 0, width, height);
    const bounds = computeBounds(lines);
    if (!bounds) return;
    ctx.lineWidth = 1;
    ctx.globalAlpha = 0.85;
    ctx.strokeStyle =
      hueDeg === null ? UNASSIGNED_STROKE : cssColor(clusterSwatch(hueDeg));
    for (const line of lines) {
      if (line.points.length < 2) continue;
      ctx.beginPath();
      line.points.forEach(([x, y], i) => {
        const [cx, cy] = projectPoint(x, y, bounds, width, height, PAD_PX);
        if (i === 0) ctx.moveTo(cx, cy);
        else ctx.lineTo(cx, cy);
      });
      ctx.stroke();
    }
    ctx.globalAlpha = 1;
  }
}
