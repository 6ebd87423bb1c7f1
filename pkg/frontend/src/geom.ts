/**
 * Web Mercator tile math for the slippy map: world pixel coordinates at a
 * zoom level, tile URLs from a configurable endpoint template, and view
 * fitting for a data extent.
 */

import { Extent } from "./bundle.js";

export const TILE_SIZE = 256;
export const DEFAULT_TILE_TEMPLATE = "https://tile.openstreetmap.org/{z}/{x}/{y}.png";

export function worldSize(zoom: number): number {
  return TILE_SIZE * Math.pow(2, zoom);
}

export function lonToWorldX(lon: number, zoom: number): number {
  return ((lon + 180) / 360) * worldSize(zoom);
}

export function latToWorldY(lat: number, zoom: number): number {
  const clamped = Math.max(-85.0511, Math.min(85.0511, lat));
  const rad = (clamped * Math.PI) / 180;
  const merc = Math.log(Math.tan(Math.PI / 4 + rad / 2));
  return ((1 - merc / Math.PI) / 2) * worldSize(zoom);
}

export function tileUrl(template: string, z: number, x: number, y: number): string {
  const wrapped = ((x % (1 << z)) + (1 << z)) % (1 << z); // wrap around the date line
  return template
    .replace("{z}", String(z))
    .replace("{x}", String(wrapped))
    .replace("{y}", String(y));
}

export interface MapView {
  centerLat: number;
  centerLon: number;
  zoom: number;
}

/** Center and zoom so the extent fits a pane of the given pixel size. */
export function fitView(extent: Extent | null, widthPx: number, heightPx: number,
                        maxZoom = 12): MapView {
  if (extent === null) {
    return { centerLat: 30, centerLon: 0, zoom: 2 };
  }
  const centerLat = (extent.minLat + extent.maxLat) / 2;
  const centerLon = (extent.minLon + extent.maxLon) / 2;
  for (let zoom = maxZoom; zoom >= 1; zoom--) {
    const width = Math.abs(
      lonToWorldX(extent.maxLon, zoom) - lonToWorldX(extent.minLon, zoom));
    const height = Math.abs(
      latToWorldY(extent.minLat, zoom) - latToWorldY(extent.maxLat, zoom));
    if (width <= widthPx * 0.8 && height <= heightPx * 0.8) {
      return { centerLat, centerLon, zoom };
    }
  }
  return { centerLat, centerLon, zoom: 1 };
}
