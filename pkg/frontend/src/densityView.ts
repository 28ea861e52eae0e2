/** Density panel: rendered PNG, threshold slider, click-to-split.

The render endpoint upscales bins to scale-by-scale pixel blocks and
draws grid row 0 at the bottom edge, so the click mapping flips y. A
click samples the clicked pixel's color from an offscreen canvas and
matches it against the cluster hues; gray pixels mean a hidden or
unassigned bin.
*/

import type { ServiceClient } from "./api.js";
import { matchCluster } from "./color.js";
import { debounce } from "./debounce.js";
import type { StateSummary } from "./types.js";

export interface BinHit {
  col: number;
  row: number; // grid row, 0 at the bottom
  px: number; // pixel in the PNG's own coordinates, y down
  py: number;
}

export function binFromClick(
  clickX: number,
  clickY: number,
  clientW: number,
  clientH: number,
  grid: { width: number; height: number },
  scale: number,
): BinHit | null {
  if (clientW <= 0 || clientH <= 0) return null;
  const naturalW = grid.width * scale;
  const naturalH = grid.height * scale;
  const px = Math.floor((clickX / clientW) * naturalW);
  const py = Math.floor((clickY / clientH) * naturalH);
  if (px < 0 || py < 0 || px >= naturalW || py >= naturalH) return null;
  const col = Math.floor(px / scale);
  const row = grid.height - 1 - Math.floor(py / scale);
  return { col, row, px, py };
}

/** Pixels per bin so the panel lands near a comfortable width. */
export function scaleForGrid(gridWidth: number): number {
  return Math.max(1, Math.min(16, Math.round(768 / gridWidth)));
}

export const SLIDER_DEBOUNCE_MS = 300;

export interface DensityViewHooks {
  onThreshold(minDensity: number): void;
  onSplit(clusterId: number): void;
  onMiss(): void;
}

export class DensityView {
  readonly img: HTMLImageElement;
  readonly slider: HTMLInputElement;
  private readonly sliderLabel: HTMLSpanElement;
  private summary: StateSummary | null = null;
  private shownRevision = -1;
  private readonly pushThreshold: (value: number) => void;

  constructor(
    root: HTMLElement,
    private readonly client: ServiceClient,
    private readonly hooks: DensityViewHooks,
  ) {
    const bar = document.createElement("div");
    bar.className = "density-bar";
    this.slider = document.createElement("input");
    this.slider.type = "range";
    this.slider.min = "1";
    this.slider.max = "50";
    this.slider.step = "1";
    this.sliderLabel = document.createElement("span");
    bar.append("min density ", this.slider, this.sliderLabel);

    this.img = document.createElement("img");
    this.img.className = "density-img";
    this.img.alt = "colorized density plot";
    root.append(bar, this.img);

    this.pushThreshold = debounce(
      (value: number) => this.hooks.onThreshold(value),
      SLIDER_DEBOUNCE_MS,
    );
    this.slider.addEventListener("input", () => {
      this.sliderLabel.textContent = this.slider.value;
      this.pushThreshold(Number(this.slider.value));
    });
    this.img.addEventListener("click", (ev) => this.onClick(ev));
  }

  update(summary: StateSummary): void {
    this.summary = summary;
    if (document.activeElement !== this.slider) {
      this.slider.value = String(summary.params.min_density);
      this.sliderLabel.textContent = this.slider.value;
    }
    if (summary.revision !== this.shownRevision) {
      this.shownRevision = summary.revision;
      const scale = scaleForGrid(summary.grid.width);
      this.img.src = this.client.renderUrl(
        summary.session, scale, summary.revision,
      );
    }
  }

  private onClick(ev: MouseEvent): void {
    const summary = this.summary;
    if (!summary) return;
    const rect = this.img.getBoundingClientRect();
    const scale = scaleForGrid(summary.grid.width);
    const hit = binFromClick(
      ev.clientX - rect.left, ev.clientY - rect.top,
      rect.width, rect.height, summary.grid, scale,
    );
    if (!hit) return;
    const rgb = this.samplePixel(hit.px, hit.py, summary, scale);
    if (!rgb) return;
    const cluster = matchCluster(rgb, summary.clusters);
    if (cluster === null) {
      this.hooks.onMiss();
    } else {
      this.hooks.onSplit(cluster);
    }
  }

  private samplePixel(
    px: number, py: number, summary: StateSummary, scale: number,
  ): [number, number, number] | null {
    const canvas = document.createElement("canvas");
    canvas.width = summary.grid.width * scale;
    canvas.height = summary.grid.height * scale;
    const ctx = canvas.getContext("2d");
    if (!ctx) return null; // no raster backend under test
    try {
      ctx.drawImage(this.img, 0, 0);
      const data = ctx.getImageData(px, py, 1, 1).data;
      return [data[0]!, data[1]!, data[2]!];
    } catch {
      return null; // image not loaded yet or canvas tainted
    }
  }
}
