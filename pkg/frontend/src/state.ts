/**
 * View state machine. All transitions are pure: they take a state and
 * return a new one, so stepping forward and back provably restores the
 * previous view. Each pane owns its window index, which is what makes
 * split-screen comparison at the analyst's own pace possible.
 */

import { Bundle } from "./bundle.js";

export type ViewKind = "geo" | "ipc-map";
export type PaneLayout = "single" | "split";

export interface PaneState {
  bundleIndex: number;
  view: ViewKind;
  windowIndex: number;
}

export interface ViewState {
  bundles: Bundle[];
  layout: PaneLayout;
  panes: PaneState[];
  playing: boolean;
  intervalMs: number;
}

export const DEFAULT_INTERVAL_MS = 1500;

export function createState(bundle: Bundle, intervalMs = DEFAULT_INTERVAL_MS): ViewState {
  return {
    bundles: [bundle],
    layout: "single",
    panes: [{ bundleIndex: 0, view: "geo", windowIndex: 0 }],
    playing: false,
    intervalMs,
  };
}

export function addBundle(state: ViewState, bundle: Bundle): ViewState {
  return { ...state, bundles: [...state.bundles, bundle] };
}

export function paneBundle(state: ViewState, paneIndex: number): Bundle {
  return state.bundles[state.panes[paneIndex].bundleIndex];
}

function clampIndex(state: ViewState, pane: PaneState, index: number): number {
  const last = state.bundles[pane.bundleIndex].entries.length - 1;
  return Math.max(0, Math.min(index, last));
}

function withPane(state: ViewState, paneIndex: number,
                  update: Partial<PaneState>): ViewState {
  const panes = state.panes.map((p, i) =>
    i === paneIndex ? { ...p, ...update } : p);
  const pane = panes[paneIndex];
  pane.windowIndex = clampIndex(state, pane, pane.windowIndex);
  return { ...state, panes };
}

/** Move one pane exactly one window; clamped at both ends. */
export function step(state: ViewState, paneIndex: number, direction: 1 | -1): ViewState {
  const pane = state.panes[paneIndex];
  return withPane(state, paneIndex,
                  { windowIndex: clampIndex(state, pane, pane.windowIndex + direction) });
}

export function setWindow(state: ViewState, paneIndex: number, index: number): ViewState {
  return withPane(state, paneIndex, { windowIndex: index });
}

export function setView(state: ViewState, paneIndex: number, view: ViewKind): ViewState {
  return withPane(state, paneIndex, { view });
}

export function setPaneBundle(state: ViewState, paneIndex: number,
                              bundleIndex: number): ViewState {
  if (bundleIndex < 0 || bundleIndex >= state.bundles.length) return state;
  return withPane(state, paneIndex, { bundleIndex, windowIndex: 0 });
}

/** Split into two panes; the new pane starts as a copy of the first. */
export function splitView(state: ViewState): ViewState {
  if (state.layout === "split") return state;
  return { ...state, layout: "split", panes: [state.panes[0], { ...state.panes[0] }] };
}

export function singleView(state: ViewState): ViewState {
  if (state.layout === "single") return state;
  return { ...state, layout: "single", panes: [state.panes[0]] };
}

export function play(state: ViewState): ViewState {
  return { ...state, playing: true };
}

export function stop(state: ViewState): ViewState {
  return { ...state, playing: false };
}

/**
 * One animation tick: every playing pane advances one window; playback
 * stops by itself once every pane sits at its final window.
 */
export function tick(state: ViewState): ViewState {
  if (!state.playing) return state;
  let next = state;
  let anyMoved = false;
  for (let i = 0; i < state.panes.length; i++) {
    const before = next.panes[i].windowIndex;
    next = step(next, i, 1);
    if (next.panes[i].windowIndex !== before) anyMoved = true;
  }
  return anyMoved ? next : { ...next, playing: false };
}
