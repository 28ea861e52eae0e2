/** Hue wheel: one draggable dot per cluster at its assigned angle.

Angles follow the plot's convention: 0 degrees at +x, counterclockwise,
so canvas y is flipped. Dots whose angles nearly coincide are stepped
inward radially so none of them disappears behind another. Dragging a
dot and releasing it pins the cluster at the released angle;
double-clicking a pinned dot releases the pin.
*/

import { clusterSwatch, cssColor } from "./color.js";
import type { ClusterSummary } from "./types.js";

export interface Dot {
  id: number;
  angle: number; // degrees, [0, 360)
  radius: number; // px from wheel center
  x: number;
  y: number;
  pinned: boolean;
  hueDeg: number;
}

const COINCIDENT_GAP_DEG = 8;
const RADIAL_STEP_PX = 15;
export const DOT_RADIUS_PX = 9;

export function pointFromAngle(
  cx: number, cy: number, angleDeg: number, radius: number,
): { x: number; y: number } {
  const a = (angleDeg * Math.PI) / 180;
  return { x: cx + radius * Math.cos(a), y: cy - radius * Math.sin(a) };
}

export function angleFromPoint(
  cx: number, cy: number, x: number, y: number,
): number {
  const deg = (Math.atan2(cy - y, x - cx) * 180) / Math.PI;
  return (deg + 360) % 360;
}

/** Place every cluster's dot; near-coincident angles nest inward. */
export function layoutDots(
  clusters: ClusterSummary[], cx: number, cy: number, baseRadius: number,
): Dot[] {
  const order = [...clusters].sort((a, b) => a.hue_deg - b.hue_deg);
  const dots: Dot[] = [];
  let groupStart = 0;
  for (let i = 0; i <= order.length; i++) {
    const prev = order[i - 1];
    const gap =
      i === 0 || i === order.length || !prev
        ? Infinity
        : Math.abs(order[i]!.hue_deg - prev.hue_deg);
    if (gap > COINCIDENT_GAP_DEG) {
      for (let j = groupStart; j < i; j++) {
        const c = order[j]!;
        const radius = baseRadius - (j - groupStart) * RADIAL_STEP_PX;
        const angle = ((c.hue_deg % 360) + 360) % 360;
        const { x, y } = pointFromAngle(cx, cy, angle, radius);
        dots.push({ id: c.id, angle, radius, x, y, pinned: c.pinned,
                    hueDeg: c.hue_deg });
      }
      groupStart = i;
    }
  }
  // the wheel wraps: a trailing group adjacent to the leading one across
  // 0 degrees still reads fine because both keep their own radii
  return dots.sort((a, b) => a.id - b.id);
}

export function hitTest(dots: Dot[], x: number, y: number): Dot | null {
  let best: Dot | null = null;
  let bestDist = (DOT_RADIUS_PX * 1.8) ** 2;
  for (const dot of dots) {
    const d = (dot.x - x) ** 2 + (dot.y - y) ** 2;
    if (d <= bestDist) {
      best = dot;
      bestDist = d;
    }
  }
  return best;
}

export interface HueWheelHooks {
  onPin(clusterId: number, degrees: number): void;
  onUnpin(clusterId: number): void;
}

export class HueWheel {
  private dots: Dot[] = [];
  private drag: { pointerId: number; dot: Dot; angle: number } | null = null;
  private readonly cx: number;
  private readonly cy: number;
  private readonly ringRadius: number;

  constructor(
    private readonly canvas: HTMLCanvasElement,
    private readonly hooks: HueWheelHooks,
  ) {
    this.cx = canvas.width / 2;
    this.cy = canvas.height / 2;
    this.ringRadius = Math.min(this.cx, this.cy) - 18;
    canvas.style.touchAction = "none";
    canvas.addEventListener("pointerdown", this.onPointerDown);
    canvas.addEventListener("pointermove", this.onPointerMove);
    canvas.addEventListener("pointerup", this.onPointerUp);
    canvas.addEventListener("pointercancel", this.onPointerUp);
    canvas.addEventListener("dblclick", this.onDoubleClick);
  }

  update(clusters: ClusterSummary[]): void {
    this.dots = layoutDots(clusters, this.cx, this.cy, this.ringRadius);
    this.draw();
  }

  private localPoint(ev: MouseEvent): { x: number; y: number } {
    const rect = this.canvas.getBoundingClientRect();
    const scaleX = rect.width ? this.canvas.width / rect.width : 1;
    const scaleY = rect.height ? this.canvas.height / rect.height : 1;
    return {
      x: (ev.clientX - rect.left) * scaleX,
      y: (ev.clientY - rect.top) * scaleY,
    };
  }

  private onPointerDown = (ev: PointerEvent): void => {
    if (this.drag) return;
    const { x, y } = this.localPoint(ev);
    const dot = hitTest(this.dots, x, y);
    if (!dot) return;
    this.drag = { pointerId: ev.pointerId, dot, angle: dot.angle };
    this.canvas.setPointerCapture(ev.pointerId);
  };

  private onPointerMove = (ev: PointerEvent): void => {
    if (!this.drag || this.drag.pointerId !== ev.pointerId) return;
    const { x, y } = this.localPoint(ev);
    this.drag.angle = angleFromPoint(this.cx, this.cy, x, y);
    this.draw();
  };

  private onPointerUp = (ev: PointerEvent): void => {
    if (!this.drag || this.drag.pointerId !== ev.pointerId) return;
    const { dot, angle } = this.drag;
    this.drag = null;
    if (angle !== dot.angle) {
      this.hooks.onPin(dot.id, angle);
    }
    this.draw();
  };

  private onDoubleClick = (ev: MouseEvent): void => {
    const { x, y } = this.localPoint(ev);
    const dot = hitTest(this.dots, x, y);
    if (dot?.pinned) this.hooks.onUnpin(dot.id);
  };

  private draw(): void {
    const ctx = this.canvas.getContext("2d");
    if (!ctx) return; // test environments have no 2d backend
    const { width, height } = this.canvas;
    ctx.clearRect(0, 0, width, height);

    ctx.lineWidth = 10;
    for (let deg = 0; deg < 360; deg += 2) {
      const a0 = (-deg * Math.PI) / 180;
      const a1 = (-(deg + 2.5) * Math.PI) / 180;
      ctx.beginPath();
      ctx.arc(this.cx, this.cy, this.ringRadius, a1, a0);
      ctx.strokeStyle = cssColor(clusterSwatch(deg));
      ctx.stroke();
    }

    for (const dot of this.dots) {
      const dragging = this.drag?.dot.id === dot.id;
      const angle = dragging ? this.drag!.angle : dot.angle;
      const { x, y } = pointFromAngle(this.cx, this.cy, angle, dot.radius);
      ctx.beginPath();
      ctx.arc(x, y, DOT_RADIUS_PX, 0, 2 * Math.PI);
      ctx.fillStyle = cssColor(clusterSwatch(dragging ? angle : dot.hueDeg));
      ctx.fill();
      ctx.lineWidth = dot.pinned || dragging ? 3 : 1.5;
      ctx.strokeStyle = dot.pinned || dragging ? "#111" : "#fff";
      ctx.stroke();
      ctx.fillStyle = "#111";
      ctx.font = "11px sans-serif";
      ctx.textAlign = "center";
      ctx.fillText(String(dot.id), x, y - DOT_RADIUS_PX - 3);
    }
  }
}
