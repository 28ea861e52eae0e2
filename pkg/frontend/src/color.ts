/** Display-side HCL -> sRGB plus cluster hit-testing by pixel color.

The service renders bins in HCL (hue per cluster, density driving
luminance/chroma). The UI needs the same conversion for two display
jobs: coloring the hue-wheel dots to match the plot, and mapping a
clicked pixel back to its cluster. No pipeline math happens here.
*/

export type Rgb = [number, number, number];

// sRGB / D65, matching the service's rendering constants
const M_XYZ_TO_RGB = [
  [3.2406, -1.5372, -0.4986],
  [-0.9689, 1.8758, 0.0415],
  [0.0557, -0.204, 1.057],
];
const REF_U = 0.19784;
const REF_V = 0.46834;
const LAB_E = 0.008856;
const LAB_K = 903.3;

function invert3(m: number[][]): number[][] {
  const [a, b, c] = m[0]!;
  const [d, e, f] = m[1]!;
  const [g, h, i] = m[2]!;
  const det =
    a! * (e! * i! - f! * h!) - b! * (d! * i! - f! * g!) + c! * (d! * h! - e! * g!);
  return [
    [(e! * i! - f! * h!) / det, (c! * h! - b! * i!) / det, (b! * f! - c! * e!) / det],
    [(f! * g! - d! * i!) / det, (a! * i! - c! * g!) / det, (c! * d! - a! * f!) / det],
    [(d! * h! - e! * g!) / det, (b! * g! - a! * h!) / det, (a! * e! - b! * d!) / det],
  ];
}

const M_RGB_TO_XYZ = invert3(M_XYZ_TO_RGB);

// density ramp endpoints used by the default renderer
const L_HI = 95.0;
const L_LO = 30.0;
const C_LO = 8.0;
const C_HI = 70.0;

function gammaEncode(linear: number): number {
  const v = Math.min(1, Math.max(0, linear));
  return v <= 0.0031308 ? 12.92 * v : 1.055 * Math.pow(v, 1 / 2.4) - 0.055;
}

function hclToLinear(
  hueDeg: number, chroma: number, luminance: number,
): [number, number, number] {
  if (luminance <= 0) return [0, 0, 0];
  const h = (hueDeg * Math.PI) / 180;
  const u = chroma * Math.cos(h);
  const v = chroma * Math.sin(h);

  const varY = (luminance + 16) / 116;
  const y = varY ** 3 > LAB_E ? varY ** 3 : (116 * varY - 16) / LAB_K;
  const varU = u / (13 * luminance) + REF_U;
  const varV = v / (13 * luminance) + REF_V;
  const x = -(9 * y * varU) / ((varU - 4) * varV - varU * varV);
  const z = (9 * y - 15 * varV * y - varV * x) / (3 * varV);

  return [
    M_XYZ_TO_RGB[0]![0]! * x + M_XYZ_TO_RGB[0]![1]! * y + M_XYZ_TO_RGB[0]![2]! * z,
    M_XYZ_TO_RGB[1]![0]! * x + M_XYZ_TO_RGB[1]![1]! * y + M_XYZ_TO_RGB[1]![2]! * z,
    M_XYZ_TO_RGB[2]![0]! * x + M_XYZ_TO_RGB[2]![1]! * y + M_XYZ_TO_RGB[2]![2]! * z,
  ];
}

const GAMUT_TOL = 1e-9;

function inGamut(linear: [number, number, number]): boolean {
  return linear.every((v) => v >= -GAMUT_TOL && v <= 1 + GAMUT_TOL);
}

/** Largest chroma <= c inside the sRGB gamut; bisection as the renderer does. */
export function clampChroma(
  hueDeg: number, chroma: number, luminance: number, iterations = 40,
): number {
  if (inGamut(hclToLinear(hueDeg, chroma, luminance))) return chroma;
  let lo = 0;
  let hi = chroma;
  for (let i = 0; i < iterations; i++) {
    const mid = (lo + hi) / 2;
    if (inGamut(hclToLinear(hueDeg, mid, luminance))) lo = mid;
    else hi = mid;
  }
  return lo;
}

export function hclToRgb(hueDeg: number, chroma: number, luminance: number): Rgb {
  const fit = clampChroma(hueDeg, chroma, luminance);
  const linear = hclToLinear(hueDeg, fit, luminance);
  return [
    Math.round(gammaEncode(linear[0]) * 255),
    Math.round(gammaEncode(linear[1]) * 255),
    Math.round(gammaEncode(linear[2]) * 255),
  ] as Rgb;
}

/** The plot's color for one cluster hue at ramp position t in [0, 1]. */
export function rampColor(hueDeg: number, t: number): Rgb {
  return hclToRgb(hueDeg, C_LO + t * (C_HI - C_LO), L_HI - t * (L_HI - L_LO));
}

/** A saturated mid-ramp swatch; used for dots, chips, and line strokes. */
export function clusterSwatch(hueDeg: number): Rgb {
  return rampColor(hueDeg, 0.5);
}

export function cssColor(rgb: Rgb): string {
  return `rgb(${rgb[0]}, ${rgb[1]}, ${rgb[2]})`;
}

function gammaDecode(encoded: number): number {
  return encoded > 0.04045
    ? Math.pow((encoded + 0.055) / 1.055, 2.4)
    : encoded / 12.92;
}

/** 8-bit sRGB back to HCL; the inverse of hclToRgb before clamping. */
export function rgbToHcl(rgb: Rgb): { h: number; c: number; l: number } {
  const lin = [
    gammaDecode(rgb[0] / 255),
    gammaDecode(rgb[1] / 255),
    gammaDecode(rgb[2] / 255),
  ];
  const dot = (row: number[]): number =>
    row[0]! * lin[0]! + row[1]! * lin[1]! + row[2]! * lin[2]!;
  const x = dot(M_RGB_TO_XYZ[0]!);
  const y = dot(M_RGB_TO_XYZ[1]!);
  const z = dot(M_RGB_TO_XYZ[2]!);
  if (x === 0 && y === 0 && z === 0) return { h: 0, c: 0, l: 0 };
  const denom = x + 15 * y + 3 * z;
  const varU = (4 * x) / denom;
  const varV = (9 * y) / denom;
  const l = y > LAB_E ? 116 * Math.cbrt(y) - 16 : LAB_K * y;
  if (l <= 0) return { h: 0, c: 0, l: 0 };
  const u = 13 * l * (varU - REF_U);
  const v = 13 * l * (varV - REF_V);
  const h = ((Math.atan2(v, u) * 180) / Math.PI + 360) % 360;
  return { h, c: Math.hypot(u, v), l: Math.min(l, 100) };
}

// below-threshold/unassigned bins render with chroma 0; rounding to
// 8 bits leaves grays under ~4 while the palest ramp colors stay >10
const CHROMA_GATE = 6;
const HUE_GATE_DEG = 30;

/** Below-threshold bins render achromatic; treat near-gray as no cluster. */
export function isAchromatic(rgb: Rgb): boolean {
  return rgbToHcl(rgb).c < CHROMA_GATE;
}

function hueDistance(a: number, b: number): number {
  return Math.abs(((a - b + 180) % 360 + 360) % 360 - 180);
}

/** Nearest cluster to a sampled pixel, or null for gray/background bins.

The density ramp varies chroma and luminance but holds hue fixed, so a
pixel's recovered hue angle identifies its cluster at any density. Gray
pixels (hidden or unassigned bins, margins) carry no hue and match
nothing; so do hues far from every cluster.
*/
export function matchCluster(
  pixel: Rgb,
  hues: { id: number; hue_deg: number }[],
): number | null {
  const { h, c } = rgbToHcl(pixel);
  if (!hues.length || c < CHROMA_GATE) return null;
  let bestId: number | null = null;
  let bestDist = Infinity;
  for (const { id, hue_deg } of hues) {
    const d = hueDistance(h, hue_deg);
    if (d < bestDist) {
      bestDist = d;
      bestId = id;
    }
  }
  return bestDist <= HUE_GATE_DEG ? bestId : null;
}
