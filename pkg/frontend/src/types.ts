// Wire types of the lab server.  Field names follow the server exactly;
// the d3 document field names are fixed by the interchange format.

export interface D3Node {
  id: number;
  type: string;
  x: number;
  y: number;
  vx: number;
  vy: number;
  links: unknown[];
  age: number;
}

export interface D3Link {
  source: number;
  target: number;
  value: number;
  age: number;
}

export interface D3Doc {
  nodes: D3Node[];
  links: D3Link[];
}

export interface Snapshot {
  session: string;
  chem: string;
  step: number;
  running: boolean;
  terminated: string | null;
  nodes: number;
  edges: number;
  counts: Record<string, number>;
  mol: string;
  d3: D3Doc | null;
  matches: string[];
  applied_last: string[];
  history: [number, number][];
  weights: Record<string, number>;
}

export interface LibraryEntry {
  id: string;
  chemistry: string;
  comment: string;
  mol?: string;
}

export interface QuineVerdict {
  status: "quine" | "not_quine" | "inconclusive";
  collections_examined: number;
  limit: number;
  witness: string[] | null;
}

export interface QuineProfile {
  trials: number;
  horizon: number;
  outcomes: { died: number; survived_horizon: number; grew_beyond_bound: number };
  lifespans: number[];
  series: [number, number, number, number][];
}

export interface CreateSessionRequest {
  mol?: string;
  term?: string;
  lib?: string;
  chem?: string;
  seed?: number;
  steps?: number;
  policy?: string;
  weights?: Record<string, number>;
  fanout?: string;
}

export interface StreamEvent extends Partial<Snapshot> {
  event: "hello" | "snapshot" | "reply" | "error";
  op?: string;
  code?: string;
  message?: string;
}
