/**
 * Browser rendering: a small slippy-map pane for geographic views and a
 * scatter pane for classification views, driven entirely by the pure view
 * models. Pane-local pan/zoom lives in dataset attributes so a re-render
 * from the same state restores the same picture.
 */

import { Bundle, Extent } from "./bundle.js";
import {
  TILE_SIZE,
  fitView,
  latToWorldY,
  lonToWorldX,
  tileUrl,
} from "./geom.js";
import { IpcMarkerVM, MarkerVM, paneRender, windowTitle } from "./render.js";
import { PaneState } from "./state.js";

export interface RenderSettings {
  tileTemplate: string;
}

function clearChildren(el: HTMLElement): void {
  while (el.firstChild) el.removeChild(el.firstChild);
}

function showPopup(pane: HTMLElement, lines: string[], title: string,
                   x: number, y: number): void {
  const popup = pane.querySelector(".popup") as HTMLElement;
  clearChildren(popup);
  const head = document.createElement("b");
  head.textContent = title;
  popup.appendChild(head);
  for (const line of lines) {
    popup.appendChild(document.createElement("br"));
    popup.appendChild(document.createTextNode(line));
  }
  popup.style.left = `${x + 12}px`;
  popup.style.top = `${y + 12}px`;
  popup.style.display = "block";
}

function paneZoomDelta(pane: HTMLElement): number {
  return Number(pane.dataset.zoomDelta ?? "0");
}

function panePan(pane: HTMLElement): [number, number] {
  return [Number(pane.dataset.panX ?? "0"), Number(pane.dataset.panY ?? "0")];
}

export function resetPaneView(pane: HTMLElement): void {
  pane.dataset.zoomDelta = "0";
  pane.dataset.panX = "0";
  pane.dataset.panY = "0";
}

function renderGeo(surface: HTMLElement, pane: HTMLElement, bundle: Bundle,
                   markers: MarkerVM[], links: [string, string, number][],
                   settings: RenderSettings): void {
  const width = surface.clientWidth || 600;
  const height = surface.clientHeight || 400;
  const extent: Extent | null = markers.length === 0 ? null : {
    minLat: Math.min(...markers.map((m) => m.lat)),
    maxLat: Math.max(...markers.map((m) => m.lat)),
    minLon: Math.min(...markers.map((m) => m.lon)),
    maxLon: Math.max(...markers.map((m) => m.lon)),
  };
  const view = fitView(extent, width, height);
  const zoom = Math.max(1, Math.min(18, view.zoom + paneZoomDelta(pane)));
  const [panX, panY] = panePan(pane);
  const originX = lonToWorldX(view.centerLon, zoom) - width / 2 + panX;
  const originY = latToWorldY(view.centerLat, zoom) - height / 2 + panY;

  const maxTile = (1 << zoom) - 1;
  const firstX = Math.floor(originX / TILE_SIZE);
  const firstY = Math.max(0, Math.floor(originY / TILE_SIZE));
  const lastX = Math.floor((originX + width) / TILE_SIZE);
  const lastY = Math.min(maxTile, Math.floor((originY + height) / TILE_SIZE));
  for (let tx = firstX; tx <= lastX; tx++) {
    for (let ty = firstY; ty <= lastY; ty++) {
      const img = document.createElement("img");
      img.className = "tile";
      img.src = tileUrl(settings.tileTemplate, zoom, tx, ty);
      img.style.left = `${tx * TILE_SIZE - originX}px`;
      img.style.top = `${ty * TILE_SIZE - originY}px`;
      surface.appendChild(img);
    }
  }

  const place = new Map<string, [number, number]>();
  for (const m of markers) {
    place.set(m.name, [lonToWorldX(m.lon, zoom) - originX,
                       latToWorldY(m.lat, zoom) - originY]);
  }
  const svg = document.createElementNS("http://www.w3.org/2000/svg", "svg");
  svg.setAttribute("class", "links");
  for (const [a, b, w] of links) {
    const pa = place.get(a);
    const pb = place.get(b);
    if (!pa || !pb) continue;
    const line = document.createElementNS("http://www.w3.org/2000/svg", "line");
    line.setAttribute("x1", String(pa[0]));
    line.setAttribute("y1", String(pa[1]));
    line.setAttribute("x2", String(pb[0]));
    line.setAttribute("y2", String(pb[1]));
    line.setAttribute("stroke", "#33425b");
    line.setAttribute("stroke-width", String(Math.min(1 + w, 6)));
    line.setAttribute("stroke-opacity", "0.55");
    svg.appendChild(line);
  }
  surface.appendChild(svg);

  for (const m of markers) {
    const el = document.createElement("div");
    el.className = "node";
    const [x, y] = place.get(m.name)!;
    el.style.width = `${2 * m.radius}px`;
    el.style.height = `${2 * m.radius}px`;
    el.style.left = `${x}px`;
    el.style.top = `${y}px`;
    el.style.background = m.color;
    el.title = m.name;
    el.addEventListener("click", (ev) => {
      showPopup(pane, m.popupLines, m.name,
                (ev as MouseEvent).offsetX + x, (ev as MouseEvent).offsetY + y);
      ev.stopPropagation();
    });
    surface.appendChild(el);
  }
}

function renderIpc(surface: HTMLElement, pane: HTMLElement,
                   markers: IpcMarkerVM[]): void {
  const width = surface.clientWidth || 600;
  const height = surface.clientHeight || 400;
  if (markers.length === 0) {
    const empty = document.createElement("div");
    empty.className = "empty-note";
    empty.textContent = "no classification overlay for this window";
    surface.appendChild(empty);
    return;
  }
  const xs = markers.map((m) => m.x);
  const ys = markers.map((m) => m.y);
  const minX = Math.min(...xs), maxX = Math.max(...xs);
  const minY = Math.min(...ys), maxY = Math.max(...ys);
  const spanX = maxX - minX || 1;
  const spanY = maxY - minY || 1;
  const pad = 50;
  for (const m of markers) {
    const el = document.createElement("div");
    el.className = "node ipc-node";
    const x = pad + ((m.x - minX) / spanX) * (width - 2 * pad);
    const y = pad + ((m.y - minY) / spanY) * (height - 2 * pad);
    el.style.width = `${2 * m.radius}px`;
    el.style.height = `${2 * m.radius}px`;
    el.style.left = `${x}px`;
    el.style.top = `${y}px`;
    const tag = document.createElement("span");
    tag.className = "ipc-label";
    tag.textContent = m.label;
    el.appendChild(tag);
    surface.appendChild(el);
  }
}

/** Redraw one pane from the current state; pure inputs, DOM output. */
export function renderPane(pane: HTMLElement, bundle: Bundle, paneState: PaneState,
                           ipcLevel: "3" | "4", settings: RenderSettings): void {
  const model = paneRender(bundle, paneState.windowIndex, paneState.view);
  const entry = bundle.entries[paneState.windowIndex];
  const surface = pane.querySelector(".surface") as HTMLElement;
  const label = pane.querySelector(".pane-title") as HTMLElement;
  label.textContent = windowTitle(bundle, entry);
  clearChildren(surface);
  (pane.querySelector(".popup") as HTMLElement).style.display = "none";
  if (paneState.view === "geo") {
    renderGeo(surface, pane, bundle, model.markers, entry.links, settings);
  } else {
    renderIpc(surface, pane, ipcLevel === "3" ? model.ipc3 : model.ipc4);
  }
}

export function renderLegend(container: HTMLElement, bundle: Bundle): void {
  clearChildren(container);
  const head = document.createElement("b");
  head.textContent = `${bundle.scheme} legend`;
  container.appendChild(head);
  for (const entry of bundle.legend) {
    container.appendChild(document.createElement("br"));
    const swatch = document.createElement("span");
    swatch.className = "swatch";
    swatch.style.background = entry.color;
    container.appendChild(swatch);
    container.appendChild(
      document.createTextNode(`${entry.class} - ${entry.meaning}`));
  }
}
