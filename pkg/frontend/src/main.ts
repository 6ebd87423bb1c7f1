/**
 * Application wiring: toolbar, panes, playback timer, file loading, and
 * snapshot saving around the pure state machine.
 */

import { Bundle, BundleFormatError, parseBundle } from "./bundle.js";
import { DEFAULT_TILE_TEMPLATE } from "./geom.js";
import { renderLegend, renderPane, resetPaneView } from "./dom.js";
import { buildSnapshot } from "./snapshot.js";
import {
  DEFAULT_INTERVAL_MS,
  ViewState,
  addBundle,
  createState,
  paneBundle,
  play,
  setPaneBundle,
  setView,
  setWindow,
  singleView,
  splitView,
  step,
  stop,
  tick,
} from "./state.js";

interface Settings {
  tileTemplate: string;
  intervalMs: number;
}

const settings: Settings = {
  tileTemplate: DEFAULT_TILE_TEMPLATE,
  intervalMs: DEFAULT_INTERVAL_MS,
};

let state: ViewState | null = null;
let bundleNames: string[] = [];
let timer: number | null = null;
const ipcLevels: ("3" | "4")[] = ["3", "3"];

function $(id: string): HTMLElement {
  return document.getElementById(id)!;
}

function banner(message: string): void {
  const el = $("banner");
  el.textContent = message;
  el.style.display = message ? "block" : "none";
}

function stopTimer(): void {
  if (timer !== null) {
    window.clearInterval(timer);
    timer = null;
  }
}

function update(next: ViewState | null): void {
  state = next;
  render();
}

function render(): void {
  const panesHost = $("panes");
  if (state === null) {
    panesHost.classList.add("empty");
    return;
  }
  panesHost.classList.remove("empty");
  panesHost.classList.toggle("split", state.layout === "split");
  const paneEls = Array.from(panesHost.querySelectorAll<HTMLElement>(".pane"));
  paneEls[1].style.display = state.layout === "split" ? "flex" : "none";

  state.panes.forEach((paneState, i) => {
    const paneEl = paneEls[i];
    const bundle = paneBundle(state!, i);
    syncPaneToolbar(paneEl, i, bundle);
    renderPane(paneEl, bundle, paneState, ipcLevels[i], settings);
  });

  const pane0 = state.panes[0];
  const bundle0 = paneBundle(state, 0);
  $("window-label").textContent = bundle0.windows[pane0.windowIndex];
  const slider = $("window-slider") as HTMLInputElement;
  slider.max = String(bundle0.windows.length - 1);
  slider.value = String(pane0.windowIndex);
  ($("play") as HTMLButtonElement).disabled = state.playing;
  ($("stop") as HTMLButtonElement).disabled = !state.playing;
  if (state.playing && timer === null) {
    timer = window.setInterval(() => {
      if (state === null) return;
      update(tick(state));
      if (state !== null && !state.playing) stopTimer();
    }, state.intervalMs);
  }
  if (!state.playing) stopTimer();
}

function syncPaneToolbar(paneEl: HTMLElement, index: number, bundle: Bundle): void {
  const bundleSel = paneEl.querySelector<HTMLSelectElement>(".bundle-select")!;
  if (bundleSel.options.length !== bundleNames.length) {
    bundleSel.replaceChildren(...bundleNames.map((name, i) => {
      const opt = document.createElement("option");
      opt.value = String(i);
      opt.textContent = name;
      return opt;
    }));
  }
  bundleSel.value = String(state!.panes[index].bundleIndex);
  const viewSel = paneEl.querySelector<HTMLSelectElement>(".view-select")!;
  viewSel.value = state!.panes[index].view;
  const levelSel = paneEl.querySelector<HTMLSelectElement>(".level-select")!;
  levelSel.value = ipcLevels[index];
  levelSel.style.display = state!.panes[index].view === "ipc-map" ? "" : "none";
  const stepBox = paneEl.querySelector<HTMLElement>(".pane-step")!;
  stepBox.style.display = state!.layout === "split" ? "" : "none";
}

function loadBundleText(text: string, name: string): void {
  let bundle: Bundle;
  try {
    bundle = parseBundle(text);
  } catch (err) {
    if (err instanceof BundleFormatError) {
      banner(`cannot load ${name}: ${err.message}`);
      return;
    }
    throw err;
  }
  banner("");
  bundleNames.push(name);
  update(state === null ? createState(bundle, settings.intervalMs)
                        : addBundle(state, bundle));
}

function wirePane(paneEl: HTMLElement, index: number): void {
  paneEl.querySelector<HTMLSelectElement>(".bundle-select")!
    .addEventListener("change", (ev) => {
      if (state === null) return;
      const value = Number((ev.target as HTMLSelectElement).value);
      resetPaneView(paneEl);
      update(setPaneBundle(state, index, value));
    });
  paneEl.querySelector<HTMLSelectElement>(".view-select")!
    .addEventListener("change", (ev) => {
      if (state === null) return;
      update(setView(state, index, (ev.target as HTMLSelectElement).value as never));
    });
  paneEl.querySelector<HTMLSelectElement>(".level-select")!
    .addEventListener("change", (ev) => {
      ipcLevels[index] = (ev.target as HTMLSelectElement).value as "3" | "4";
      render();
    });
  paneEl.querySelector<HTMLElement>(".pane-prev")!
    .addEventListener("click", () => state && update(step(state, index, -1)));
  paneEl.querySelector<HTMLElement>(".pane-next")!
    .addEventListener("click", () => state && update(step(state, index, 1)));
  for (const [cls, delta] of [[".zoom-in", 1], [".zoom-out", -1]] as const) {
    paneEl.querySelector<HTMLElement>(cls)!.addEventListener("click", () => {
      paneEl.dataset.zoomDelta = String(Number(paneEl.dataset.zoomDelta ?? "0") + delta);
      render();
    });
  }
  const surface = paneEl.querySelector<HTMLElement>(".surface")!;
  let dragging: [number, number] | null = null;
  surface.addEventListener("mousedown", (ev) => {
    dragging = [ev.clientX, ev.clientY];
  });
  window.addEventListener("mouseup", () => { dragging = null; });
  window.addEventListener("mousemove", (ev) => {
    if (dragging === null) return;
    paneEl.dataset.panX = String(Number(paneEl.dataset.panX ?? "0") - (ev.clientX - dragging[0]));
    paneEl.dataset.panY = String(Number(paneEl.dataset.panY ?? "0") - (ev.clientY - dragging[1]));
    dragging = [ev.clientX, ev.clientY];
    render();
  });
  surface.addEventListener("click", () => {
    paneEl.querySelector<HTMLElement>(".popup")!.style.display = "none";
  });
}

function wireToolbar(): void {
  $("file-input").addEventListener("change", async (ev) => {
    const input = ev.target as HTMLInputElement;
    for (const file of Array.from(input.files ?? [])) {
      loadBundleText(await file.text(), file.name);
    }
    input.value = "";
  });
  $("demo").addEventListener("click", async () => {
    try {
      const resp = await fetch("demo/bundle.json");
      loadBundleText(await resp.text(), "demo bundle");
    } catch {
      banner("demo bundle not found; run the analysis pipeline first");
    }
  });
  $("prev").addEventListener("click", () => state && update(step(state, 0, -1)));
  $("next").addEventListener("click", () => state && update(step(state, 0, 1)));
  $("play").addEventListener("click", () => state && update(play(state)));
  $("stop").addEventListener("click", () => state && update(stop(state)));
  $("split").addEventListener("click", () => {
    if (state === null) return;
    update(state.layout === "single" ? splitView(state) : singleView(state));
  });
  $("legend-btn").addEventListener("click", () => {
    if (state === null) return;
    const box = $("legend");
    if (box.style.display === "block") {
      box.style.display = "none";
    } else {
      renderLegend(box, paneBundle(state, 0));
      box.style.display = "block";
    }
  });
  $("save").addEventListener("click", () => {
    if (state === null) return;
    const bundle = paneBundle(state, 0);
    const html = buildSnapshot(
      JSON.stringify(bundle),
      { windowIndex: state.panes[0].windowIndex, view: state.panes[0].view },
      { tileTemplate: settings.tileTemplate,
        title: `patmaps ${bundle.windows[state.panes[0].windowIndex]}` });
    const blob = new Blob([html], { type: "text/html" });
    const anchor = document.createElement("a");
    anchor.href = URL.createObjectURL(blob);
    anchor.download = "patmaps-snapshot.html";
    anchor.click();
    URL.revokeObjectURL(anchor.href);
  });
  const tiles = $("tile-endpoint") as HTMLInputElement;
  tiles.value = settings.tileTemplate;
  tiles.addEventListener("change", () => {
    settings.tileTemplate = tiles.value || DEFAULT_TILE_TEMPLATE;
    render();
  });
  const interval = $("interval") as HTMLInputElement;
  interval.value = String(settings.intervalMs);
  interval.addEventListener("change", () => {
    settings.intervalMs = Math.max(200, Number(interval.value) || DEFAULT_INTERVAL_MS);
    if (state !== null) {
      stopTimer();
      update({ ...state, intervalMs: settings.intervalMs });
    }
  });
  const slider = $("window-slider") as HTMLInputElement;
  slider.addEventListener("input", () => {
    if (state === null) return;
    update(setWindow(state, 0, Number(slider.value)));
  });
}

export function start(): void {
  wireToolbar();
  document.querySelectorAll<HTMLElement>("#panes .pane")
    .forEach((paneEl, i) => wirePane(paneEl, i));
}

if (typeof document !== "undefined" && document.readyState !== "loading") {
  start();
} else if (typeof document !== "undefined") {
  document.addEventListener("DOMContentLoaded", start);
}
