// The typed client against a live server: sessions, steering, streaming.
import { test, before, after } from "node:test";
import assert from "node:assert/strict";
import { LabClient } from "../src/protocol.js";
import { SessionStore } from "../src/state.js";
import { nodeSocketFactory } from "./wsclient.js";
import { startServer } from "./harness.js";
let server;
before(async () => {
    server = await startServer();
});
after(() => server.stop());
function client() {
    return new LabClient(server.url, nodeSocketFactory);
}
test("library lists the packaged graphs", async () => {
    const entries = await client().library();
    const ids = entries.map((e) => e.id);
    assert.ok(ids.includes("ouroboros"));
    const one = await client().libraryEntry("ouroboros");
    assert.ok(one.mol && one.mol.includes("FOE"));
});
test("load a library entry and render state derives from snapshots", async () => {
    const c = client();
    const store = new SessionStore();
    store.apply(await c.createSession({ lib: "ouroboros", seed: 11 }));
    const view = store.current;
    assert.equal(view.stepCounter, 0);
    assert.equal(view.sparkline.length, 1);
    assert.ok(view.doc && view.doc.nodes.length > 0);
    for (const node of view.doc.nodes) {
        assert.deepEqual(Object.keys(node), [
            "id", "type", "x", "y", "vx", "vy", "links", "age",
        ]);
    }
    store.apply(await c.step(2));
    assert.equal(store.current.stepCounter, 2);
    assert.ok(store.current.sparkline.length >= 3);
});
test("bad mol text surfaces the server error verbatim", async () => {
    await assert.rejects(() => client().createSession({ mol: "L a a a" }), /TagOveruse/);
});
test("lambda input routes through the compiler", async () => {
    const c = client();
    const snap = await c.createSession({ term: "(\\x.x \\y.y)", seed: 0 });
    assert.equal(snap.nodes, 4);
    assert.deepEqual(snap.matches, ["L-A@0+2"]);
    const mol = await c.lambda2mol("\\x.(x x)", "FOE");
    assert.ok(mol.includes("FOE"));
});
test("weight slider to zero removes DIST from the applied log", async () => {
    const c = client();
    await c.createSession({ mol: "A 1 2 a^FO a 4 5", seed: 0 });
    await c.setWeights({ DIST: 0 });
    let snap = await c.step(4);
    assert.equal(snap.step, 4);
    assert.deepEqual(snap.applied_last, []);
    await c.setWeights({ DIST: 1 });
    snap = await c.step(1);
    assert.deepEqual(snap.applied_last, ["A-FO@0+1"]);
});
test("fire a chosen match changes node count by that rule's delta", async () => {
    const c = client();
    const snap = await c.createSession({ mol: "L 1 2 a^A a 4 c^FO c 5 6", seed: 0 });
    assert.deepEqual([...snap.matches].sort(), ["A-FO@1+2", "L-A@0+1"]);
    const before = snap.nodes;
    const after = await c.fire("A-FO@1+2");
    // DIST: two nodes replaced by four
    assert.equal(after.nodes - before, 2);
    assert.deepEqual(after.applied_last, ["A-FO@1+2"]);
});
test("pause freezes the step counter", async () => {
    const c = client();
    await c.createSession({ lib: "pred-4", seed: 3, steps: 100000 });
    await c.run(undefined, 0.01);
    await new Promise((r) => setTimeout(r, 120));
    const paused = await c.pause();
    const frozen = paused.step;
    await new Promise((r) => setTimeout(r, 120));
    assert.equal((await c.snapshot()).step, frozen);
});
test("the step stream pushes one snapshot per step", async () => {
    const c = client();
    await c.createSession({ lib: "ouroboros", seed: 4 });
    const events = [];
    const stream = await c.openStream((e) => events.push(e));
    await new Promise((r) => setTimeout(r, 100));
    stream.send({ op: "step", n: 3 });
    await new Promise((r) => setTimeout(r, 400));
    stream.close();
    const kinds = events.map((e) => e.event);
    assert.equal(kinds[0], "hello");
    assert.ok(kinds.filter((k) => k === "snapshot").length >= 3);
    assert.ok(kinds.includes("reply"));
});
test("quine panel verdict matches the CLI detector", async () => {
    const c = client();
    const verdict = await c.quineExact({ lib: "ouroboros" });
    assert.equal(verdict.status, "quine");
    assert.ok(verdict.witness && verdict.witness.length === 3);
    const profile = await c.quineEmpirical({
        lib: "ouroboros",
        trials: 20,
        steps: 100,
        seed: 5,
    });
    assert.equal(profile.outcomes.died +
        profile.outcomes.survived_horizon +
        profile.outcomes.grew_beyond_bound, 20);
    assert.equal(profile.lifespans.length, 20);
});
test("inconclusive verdicts carry the enumeration bound", async () => {
    const c = client();
    const eggs = await c.egg(["GAMMA", "GAMMA", "DELTA", "DELTA", "GAMMA", "GAMMA", "DELTA", "DELTA"], "ic", 12, 20);
    for (const mol of eggs) {
        const verdict = await c.quineExact({ mol, chem: "ic", limit: 1 });
        if (verdict.status === "inconclusive") {
            assert.equal(verdict.limit, 1);
            return;
        }
    }
    assert.fail("no egg produced a truncated enumeration");
});
