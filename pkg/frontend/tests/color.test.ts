import { describe, expect, it } from "vitest";

import {
  clampChroma,
  clusterSwatch,
  cssColor,
  hclToRgb,
  isAchromatic,
  matchCluster,
  rampColor,
  rgbToHcl,
} from "../src/color.js";

// fixtures generated by the service's own colorspace conversion
const FIXTURES: [[number, number, number], [number, number, number]][] = [
  [[0, 39, 62.5], [196, 134, 146]],
  [[130, 39, 62.5], [113, 163, 116]],
  [[250, 39, 62.5], [129, 152, 193]],
  [[300, 39, 62.5], [178, 137, 187]],
  [[0, 0, 100], [255, 255, 255]],
  [[180, 70, 30], [0, 80, 74]], // out of gamut: chroma must shrink, not clip
  [[250, 70, 30], [0, 72, 128]],
  [[35, 8, 95], [249, 239, 234]],
];

describe("hclToRgb", () => {
  it("matches the renderer's conversion on reference colors", () => {
    for (const [[h, c, l], expected] of FIXTURES) {
      const got = hclToRgb(h, c, l);
      for (let ch = 0; ch < 3; ch++) {
        expect(Math.abs(got[ch]! - expected[ch]!)).toBeLessThanOrEqual(1);
      }
    }
  });

  it("returns black at zero luminance", () => {
    expect(hclToRgb(123, 50, 0)).toEqual([0, 0, 0]);
  });

  it("clamps chroma only when the color is out of gamut", () => {
    expect(clampChroma(0, 39, 62.5)).toBe(39);
    const fit = clampChroma(250, 70, 30);
    expect(fit).toBeGreaterThan(0);
    expect(fit).toBeLessThan(70);
  });

  it("round-trips hue through 8-bit rgb", () => {
    for (const hue of [10, 95, 187, 224, 310]) {
      const back = rgbToHcl(hclToRgb(hue, 39, 62.5));
      const dist = Math.abs(((back.h - hue + 180) % 360) - 180);
      expect(dist).toBeLessThan(3);
      expect(back.c).toBeGreaterThan(30);
      expect(back.l).toBeCloseTo(62.5, 0);
    }
  });
});

describe("ramp and swatch", () => {
  it("swatch equals the mid-ramp color", () => {
    expect(clusterSwatch(130)).toEqual(rampColor(130, 0.5));
  });

  it("formats css colors", () => {
    expect(cssColor([1, 2, 3])).toBe("rgb(1, 2, 3)");
  });

  it("ramp start is light, ramp end is dark", () => {
    const [r0, g0, b0] = rampColor(200, 0);
    const [r1, g1, b1] = rampColor(200, 1);
    expect(r0 + g0 + b0).toBeGreaterThan(r1 + g1 + b1);
  });
});

describe("matchCluster", () => {
  const clusters = [
    { id: 0, hue_deg: 0 },
    { id: 1, hue_deg: 130 },
    { id: 2, hue_deg: 250 },
  ];

  it("maps a cluster's own swatch back to its id", () => {
    for (const c of clusters) {
      expect(matchCluster(clusterSwatch(c.hue_deg), clusters)).toBe(c.id);
    }
  });

  it("maps every ramp position back, palest to deepest", () => {
    for (const t of [0.05, 0.2, 0.5, 0.8, 1.0]) {
      expect(matchCluster(rampColor(250, t), clusters)).toBe(2);
    }
  });

  it("rejects achromatic pixels (hidden or unassigned bins)", () => {
    expect(isAchromatic([128, 128, 128])).toBe(true);
    expect(isAchromatic(clusterSwatch(130))).toBe(false);
    expect(matchCluster([128, 128, 128], clusters)).toBeNull();
    expect(matchCluster([255, 255, 255], clusters)).toBeNull();
    expect(matchCluster([240, 240, 235], clusters)).toBeNull();
  });

  it("rejects hues far from every cluster", () => {
    const pair = [
      { id: 0, hue_deg: 0 },
      { id: 1, hue_deg: 180 },
    ];
    expect(matchCluster(clusterSwatch(90), pair)).toBeNull();
  });

  it("handles the empty cluster list", () => {
    expect(matchCluster([196, 134, 146], [])).toBeNull();
  });
});
