/** Page wiring: upload form, parameter controls, and the three views
(density panel, hue wheel, line filter) bound to one UiStore.
*/

import { ApiError, ServiceClient } from "./api.js";
import { DensityView } from "./densityView.js";
import { HueWheel } from "./hueWheel.js";
import { LineView } from "./lineView.js";
import { UiStore } from "./store.js";
import { toast } from "./toast.js";
import type { StateSummary } from "./types.js";

const TEMPLATES = ["i", "V", "L", "I", "T", "Y", "X", "N"] as const;
const METRICS = ["overlap", "jaccard"] as const;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K, parent: ParentNode, cls?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (cls) node.className = cls;
  parent.append(node);
  return node;
}

function main(): void {
  const app = document.getElementById("app");
  const toasts = document.getElementById("toasts");
  if (!app || !toasts) return;

  const report = (err: unknown): void => {
    if (err instanceof ApiError) {
      toast(toasts, `${err.status}: ${err.message}`);
    } else {
      toast(toasts, String(err));
    }
  };

  // --- connection / upload bar ---------------------------------------
  const uploadBar = el("form", app, "bar");
  uploadBar.addEventListener("submit", (ev) => ev.preventDefault());

  el("label", uploadBar).textContent = "service";
  const baseInput = el("input", uploadBar);
  baseInput.type = "text";
  baseInput.size = 24;
  baseInput.value = location.protocol.startsWith("http")
    ? ""
    : "http://127.0.0.1:8000";
  baseInput.placeholder = "base URL (blank = same origin)";

  el("label", uploadBar).textContent = "dataset";
  const synthSelect = el("select", uploadBar);
  for (const kind of ["illusory", "continuation", "disconnected"]) {
    const opt = el("option", synthSelect);
    opt.value = kind;
    opt.textContent = `synth: ${kind}`;
  }
  const fileOpt = el("option", synthSelect);
  fileOpt.value = "file";
  fileOpt.textContent = "CSV file...";

  const fileInput = el("input", uploadBar);
  fileInput.type = "file";
  fileInput.accept = ".csv,text/csv";
  fileInput.hidden = true;
  synthSelect.addEventListener("change", () => {
    fileInput.hidden = synthSelect.value !== "file";
  });

  el("label", uploadBar).textContent = "seed";
  const seedInput = el("input", uploadBar);
  seedInput.type = "number";
  seedInput.value = "0";
  seedInput.style.width = "4.5em";

  const loadBtn = el("button", uploadBar);
  loadBtn.type = "submit";
  loadBtn.textContent = "Load";

  const status = el("span", uploadBar, "status");

  // --- layout ---------------------------------------------------------
  const columns = el("div", app, "columns");
  const left = el("div", columns, "col-left");
  const right = el("div", columns, "col-right");

  const controls = el("div", left, "bar");
  el("label", controls).textContent = "clusters k";
  const kInput = el("input", controls);
  kInput.type = "number";
  kInput.min = "1";
  kInput.value = "3";
  kInput.style.width = "4em";

  el("label", controls).textContent = "metric";
  const metricSelect = el("select", controls);
  for (const m of METRICS) {
    const opt = el("option", metricSelect);
    opt.value = m;
    opt.textContent = m;
  }

  const logLabel = el("label", controls);
  const logCheck = el("input", logLabel);
  logCheck.type = "checkbox";
  logLabel.append(" log ramp");

  el("label", controls).textContent = "template";
  const templateSelect = el("select", controls);
  for (const t of TEMPLATES) {
    const opt = el("option", templateSelect);
    opt.value = t;
    opt.textContent = t === "N" ? "N (free)" : t;
  }
  templateSelect.value = "N";

  const densityRoot = el("div", left, "density-root");
  const lineRoot = el("div", left, "line-root");

  el("h3", right).textContent = "hue wheel";
  const wheelCanvas = el("canvas", right);
  wheelCanvas.width = 320;
  wheelCanvas.height = 320;
  el("p", right, "hint").textContent =
    "drag a dot to pin its cluster hue; double-click a pinned dot to release";

  // --- store + views ---------------------------------------------------
  const client = new ServiceClient(baseInput.value);
  const store = new UiStore(client);

  const mutate = (
    fn: (c: ServiceClient, id: string) => Promise<StateSummary>,
  ): void => {
    store.mutate(fn).catch((err) => {
      if (err instanceof ApiError && err.status === 409 && err.action) {
        toast(toasts, err.message, {
          label: "Re-preprocess",
          run: () =>
            mutate((c, id) =>
              c.preprocess(id, Number(densityView.slider.value))),
        });
      } else {
        report(err);
      }
    });
  };

  const densityView = new DensityView(densityRoot, client, {
    onThreshold: (minDensity) =>
      mutate((c, id) => c.setParams(id, { min_density: minDensity })),
    onSplit: (clusterId) => mutate((c, id) => c.split(id, clusterId)),
    onMiss: () =>
      toast(toasts, "that bin is hidden or unassigned; nothing to split"),
  });

  const wheel = new HueWheel(wheelCanvas, {
    onPin: (clusterId, degrees) =>
      mutate((c, id) => c.setHue(id, clusterId, degrees, true)),
    onUnpin: (clusterId) =>
      mutate((c, id) => c.setHue(id, clusterId, 0, false)),
  });

  const lineView = new LineView(lineRoot, client, {
    onSelect: (selection) => {
      densityRoot.hidden = selection !== null;
    },
    onError: report,
  });

  const render = (summary: StateSummary): void => {
    status.textContent =
      `rev ${summary.revision} | ${summary.n_lines} lines | ` +
      `${summary.clusters.length} clusters` +
      (store.isPending ? " | working..." : "");
    if (document.activeElement !== kInput) {
      kInput.value = String(summary.params.k);
    }
    metricSelect.value = summary.params.metric;
    logCheck.checked = summary.params.log_scale;
    templateSelect.value = summary.params.template;
    densityView.update(summary);
    wheel.update(summary.clusters);
    lineView.update(summary);
  };
  store.subscribe(render);

  kInput.addEventListener("change", () => {
    const k = Number(kInput.value);
    if (Number.isInteger(k) && k >= 1) {
      mutate((c, id) => c.setParams(id, { k }));
    }
  });
  metricSelect.addEventListener("change", () =>
    mutate((c, id) => c.setParams(id, { metric: metricSelect.value })));
  logCheck.addEventListener("change", () =>
    mutate((c, id) => c.setParams(id, { log_scale: logCheck.checked })));
  templateSelect.addEventListener("change", () =>
    mutate((c, id) => c.setTemplate(id, templateSelect.value)));

  uploadBar.addEventListener("submit", () => {
    void (async () => {
      client.baseUrl = baseInput.value;
      loadBtn.disabled = true;
      status.textContent = "loading...";
      try {
        let summary: StateSummary;
        if (synthSelect.value === "file") {
          const file = fileInput.files?.[0];
          if (!file) {
            toast(toasts, "choose a CSV file first");
            return;
          }
          summary = await client.createSession({ csv: await file.text() });
        } else {
          summary = await client.createSession({
            synth: { kind: synthSelect.value, seed: Number(seedInput.value) },
          });
        }
        store.apply(summary);
        lineView.select(null);
      } catch (err) {
        status.textContent = "no session";
        report(err);
      } finally {
        loadBtn.disabled = false;
      }
    })();
  });

  status.textContent = "no session";
}

main();
