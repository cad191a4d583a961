// Pure client-state logic: snapshot application and the force layout.

import { test } from "node:test";
import assert from "node:assert/strict";

import { SessionStore } from "../src/state.js";
import { ForceSim } from "../src/force.js";
import { colorOf, isCenter } from "../src/render.js";
import type { Snapshot, D3Doc } from "../src/types.js";

function snap(partial: Partial<Snapshot>): Snapshot {
  return {
    session: "s1",
    chem: "chemlambda-v2",
    step: 0,
    running: false,
    terminated: null,
    nodes: 0,
    edges: 0,
    counts: {},
    mol: "",
    d3: { nodes: [], links: [] },
    matches: [],
    applied_last: [],
    history: [[0, 0]],
    weights: {},
    ...partial,
  };
}

test("store applies snapshots and notifies subscribers", () => {
  const store = new SessionStore();
  let seen = 0;
  store.subscribe(() => seen++);
  store.apply(snap({ step: 1, matches: ["L-A@0+1"] }));
  assert.equal(store.current.stepCounter, 1);
  assert.deepEqual(store.current.matches, ["L-A@0+1"]);
  assert.equal(seen, 1);
});

test("stale out-of-order snapshots for the same session are dropped", () => {
  const store = new SessionStore();
  store.apply(snap({ step: 5 }));
  store.apply(snap({ step: 3 }));
  assert.equal(store.current.stepCounter, 5);
  // a new session resets the counter even if lower
  store.apply(snap({ session: "s2", step: 1 }));
  assert.equal(store.current.stepCounter, 1);
});

test("force layout settles and keeps distinct positions", () => {
  const doc: D3Doc = {
    nodes: Array.from({ length: 8 }, (_, k) => ({
      id: k,
      type: k < 2 ? "L" : "in",
      x: Math.cos(k),
      y: Math.sin(k),
      vx: 0,
      vy: 0,
      links: [],
      age: 0,
    })),
    links: [
      { source: 0, target: 2, value: 2, age: 0 },
      { source: 0, target: 3, value: 2, age: 0 },
      { source: 1, target: 4, value: 2, age: 0 },
      { source: 2, target: 4, value: 1, age: 0 },
      { source: 3, target: 5, value: 1, age: 0 },
    ],
  };
  const sim = new ForceSim(800, 600);
  sim.load(doc);
  for (let k = 0; k < 400; k++) sim.tick();
  const energyLate = sim.energy();
  assert.ok(energyLate < 5, `layout did not settle: energy ${energyLate}`);
  const positions = new Set(sim.bodies.map((b) => `${b.x.toFixed(1)},${b.y.toFixed(1)}`));
  assert.equal(positions.size, sim.bodies.length);
});

test("reloading a document keeps surviving node positions", () => {
  const doc: D3Doc = {
    nodes: [
      { id: 0, type: "L", x: 0, y: 0, vx: 0, vy: 0, links: [], age: 0 },
      { id: 1, type: "in", x: 1, y: 0, vx: 0, vy: 0, links: [], age: 0 },
    ],
    links: [{ source: 0, target: 1, value: 2, age: 0 }],
  };
  const sim = new ForceSim(400, 300);
  sim.load(doc);
  for (let k = 0; k < 50; k++) sim.tick();
  const before = sim.bodies.map((b) => [b.x, b.y]);
  sim.load(doc);
  const after = sim.bodies.map((b) => [b.x, b.y]);
  assert.deepEqual(after, before);
});

test("node colors key off the type, not one-to-one", () => {
  assert.equal(typeof colorOf("L"), "string");
  assert.equal(colorOf("UNKNOWN-1"), colorOf("UNKNOWN-2"));
  assert.ok(isCenter("GAMMA"));
  assert.ok(!isCenter("in") && !isCenter("middle") && !isCenter("out"));
});
