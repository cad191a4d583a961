// Session view state.  Everything shown on screen derives from server
// snapshots; there is no client-side rewrite logic.

import type { Snapshot, D3Doc } from "./types.js";

export interface SessionView {
  sessionId: string | null;
  chem: string;
  stepCounter: number;
  running: boolean;
  terminated: string | null;
  doc: D3Doc | null;
  mol: string;
  counts: Record<string, number>;
  sparkline: [number, number][];
  matches: string[];
  appliedLast: string[];
  weights: Record<string, number>;
}

export function emptyView(): SessionView {
  return {
    sessionId: null,
    chem: "",
    stepCounter: 0,
    running: false,
    terminated: null,
    doc: null,
    mol: "",
    counts: {},
    sparkline: [],
    matches: [],
    appliedLast: [],
    weights: {},
  };
}

type Listener = (view: SessionView) => void;

export class SessionStore {
  private view: SessionView = emptyView();
  private listeners: Listener[] = [];

  get current(): SessionView {
    return this.view;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  // Snapshots may arrive over HTTP replies and the push stream in any
  // interleaving; never step backwards.
  apply(snap: Snapshot): void {
    if (this.view.sessionId === snap.session && snap.step < this.view.stepCounter) {
      return;
    }
    this.view = {
      sessionId: snap.session,
      chem: snap.chem,
      stepCounter: snap.step,
      running: snap.running,
      terminated: snap.terminated,
      doc: snap.d3 ?? this.view.doc,
      mol: snap.mol,
      counts: snap.counts,
      sparkline: snap.history,
      matches: snap.matches,
      appliedLast: snap.applied_last,
      weights: snap.weights,
    };
    for (const listener of this.listeners) listener(this.view);
  }

  reset(): void {
    this.view = emptyView();
    for (const listener of this.listeners) listener(this.view);
  }
}
