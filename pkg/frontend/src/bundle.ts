/**
 * Bundle file contract: parsing and validation of the analysis export that
 * drives the viewer. The viewer computes no statistics of its own; every
 * number and color comes from this file.
 */

export const BUNDLE_SCHEMA = "patmaps-bundle/1";

export interface LegendEntry {
  class: string;
  color: string;
  meaning: string;
}

export interface CityRow {
  name: string;
  desc: string;
  lat: number;
  lon: number;
  color: string;
  scale: number;
}

export interface IpcRow {
  label: string;
  x: number;
  y: number;
  weight: number;
}

export interface NetworkSummary {
  nodes: number;
  edges: number;
  density: number;
  component_sizes: number[];
  communities: number;
  isolates: number;
  modularity: number;
}

export interface DiversitySummary {
  ipc3: number | null;
  ipc4: number | null;
  patents: number;
}

export type Link = [string, string, number];

export interface WindowEntry {
  window: string;
  first_year: number;
  cities: CityRow[];
  links: Link[];
  ipc: Record<string, IpcRow[]>;
  network: NetworkSummary;
  diversity: DiversitySummary | null;
}

export interface Bundle {
  schema: string;
  scheme: "ztest" | "percentile";
  dimension: string;
  counting: string;
  seed: number;
  legend: LegendEntry[];
  windows: string[];
  entries: WindowEntry[];
}

export class BundleFormatError extends Error {}

/** Parse and validate bundle text; unknown schema tags are rejected. */
export function parseBundle(text: string): Bundle {
  let data: unknown;
  try {
    data = JSON.parse(text);
  } catch (err) {
    throw new BundleFormatError(`not valid JSON: ${String(err)}`);
  }
  const bundle = data as Bundle;
  if (typeof bundle !== "object" || bundle === null || bundle.schema !== BUNDLE_SCHEMA) {
    throw new BundleFormatError(
      `unknown bundle schema tag (expected ${BUNDLE_SCHEMA})`,
    );
  }
  if (!Array.isArray(bundle.entries) || !Array.isArray(bundle.windows)) {
    throw new BundleFormatError("bundle lacks windows/entries arrays");
  }
  const labels = bundle.entries.map((e) => e.window);
  if (labels.length !== bundle.windows.length ||
      labels.some((label, i) => label !== bundle.windows[i])) {
    throw new BundleFormatError("entries do not match the window list");
  }
  if (!Array.isArray(bundle.legend) || bundle.legend.length === 0) {
    throw new BundleFormatError("bundle lacks a legend");
  }
  return bundle;
}

export interface Extent {
  minLat: number;
  maxLat: number;
  minLon: number;
  maxLon: number;
}

/** Bounding box of a window's cities; null when nothing is mapped. */
export function dataExtent(entry: WindowEntry): Extent | null {
  if (entry.cities.length === 0) return null;
  const lats = entry.cities.map((c) => c.lat);
  const lons = entry.cities.map((c) => c.lon);
  return {
    minLat: Math.min(...lats),
    maxLat: Math.max(...lats),
    minLon: Math.min(...lons),
    maxLon: Math.max(...lons),
  };
}

/** Co-occurrence link weights touching one city, heaviest first. */
export function linkWeights(entry: WindowEntry, city: string): [string, number][] {
  const touching: [string, number][] = [];
  for (const [a, b, w] of entry.links) {
    if (a === city) touching.push([b, w]);
    else if (b === city) touching.push([a, w]);
  }
  touching.sort((p, q) => q[1] - p[1] || (p[0] < q[0] ? -1 : 1));
  return touching;
}
