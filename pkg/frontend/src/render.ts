/**
 * View models: the exact, testable content the DOM layer draws. Marker
 * radii are an affine function of the bundle's precomputed scale field
 * (never recomputed from patent counts) and colors come verbatim from the
 * bundle legend.
 */

import {
  Bundle,
  CityRow,
  IpcRow,
  LegendEntry,
  WindowEntry,
  linkWeights,
} from "./bundle.js";

export const RADIUS_BASE = 4;
export const RADIUS_SLOPE = 9;

/** Affine radius from the bundle scale field. */
export function markerRadius(scale: number, base = RADIUS_BASE, slope = RADIUS_SLOPE): number {
  return base + slope * scale;
}

export function colorForClass(legend: LegendEntry[], cls: string): string {
  const hit = legend.find((entry) => entry.class === cls);
  return hit ? hit.color : "#888888";
}

export interface MarkerVM {
  name: string;
  lat: number;
  lon: number;
  radius: number;
  colorClass: string;
  color: string;
  popupLines: string[];
}

/** Popup payload: the bundle's description fields plus link weights. */
export function popupLines(entry: WindowEntry, city: CityRow): string[] {
  const lines = city.desc.split("; ");
  for (const [other, weight] of linkWeights(entry, city.name)) {
    lines.push(`link ${other} (${weight})`);
  }
  return lines;
}

export function cityMarkers(bundle: Bundle, entry: WindowEntry): MarkerVM[] {
  return entry.cities.map((city) => ({
    name: city.name,
    lat: city.lat,
    lon: city.lon,
    radius: markerRadius(city.scale),
    colorClass: city.color,
    color: colorForClass(bundle.legend, city.color),
    popupLines: popupLines(entry, city),
  }));
}

export interface IpcMarkerVM {
  label: string;
  x: number;
  y: number;
  radius: number;
}

export function ipcMarkers(entry: WindowEntry, level: "3" | "4"): IpcMarkerVM[] {
  const rows: IpcRow[] = entry.ipc[level] ?? [];
  return rows.map((row) => ({
    label: row.label,
    x: row.x,
    y: row.y,
    radius: markerRadius(Math.log10(row.weight + 1)),
  }));
}

/** The legend shown by the Legend button: exactly the bundle's own. */
export function legendModel(bundle: Bundle): LegendEntry[] {
  return bundle.legend;
}

export function windowTitle(bundle: Bundle, entry: WindowEntry): string {
  const net = entry.network;
  return `${entry.window} | ${entry.cities.length} cities | ` +
    `density ${net.density.toFixed(4)} | ${net.communities} communities`;
}

export interface PaneRender {
  window: string;
  view: string;
  markers: MarkerVM[];
  ipc3: IpcMarkerVM[];
  ipc4: IpcMarkerVM[];
  title: string;
}

/** Everything a pane draws, as plain data; used by tests for equality. */
export function paneRender(bundle: Bundle, windowIndex: number, view: string): PaneRender {
  const entry = bundle.entries[windowIndex];
  return {
    window: entry.window,
    view,
    markers: cityMarkers(bundle, entry),
    ipc3: ipcMarkers(entry, "3"),
    ipc4: ipcMarkers(entry, "4"),
    title: windowTitle(bundle, entry),
  };
}
