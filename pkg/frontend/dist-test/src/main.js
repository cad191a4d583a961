// Lab page wiring: every control issues one server command and all render
// state comes back as snapshots, pushed over the step stream or returned
// by the command itself.
import { LabClient } from "./protocol.js";
import { SessionStore } from "./state.js";
import { ForceSim } from "./force.js";
import { draw, drawHistogram, drawSparkline } from "./render.js";
function el(id) {
    const found = document.getElementById(id);
    if (!found)
        throw new Error(`missing element #${id}`);
    return found;
}
const store = new SessionStore();
let client = new LabClient(inferBaseUrl());
let stream = null;
const canvas = el("graph");
const sparkline = el("sparkline");
const histogram = el("histogram");
const sim = new ForceSim(canvas.width, canvas.height);
function inferBaseUrl() {
    const fromQuery = new URLSearchParams(location.search).get("server");
    return fromQuery ?? `http://${location.hostname || "127.0.0.1"}:8753`;
}
function status(text) {
    el("status").textContent = text;
}
function logLine(text) {
    const log = el("log");
    const line = document.createElement("div");
    line.textContent = text;
    log.prepend(line);
    while (log.childElementCount > 200)
        log.lastElementChild?.remove();
}
// -- rendering loop ----------------------------------------------------------
store.subscribe((view) => {
    el("step-counter").textContent = String(view.stepCounter);
    el("node-count").textContent = String(Object.values(view.counts).reduce((a, b) => a + b, 0));
    el("counts").textContent = Object.entries(view.counts)
        .sort()
        .map(([t, n]) => `${t}:${n}`)
        .join("  ");
    el("termination").textContent = view.terminated ?? (view.running ? "running" : "ready");
    el("mol-current").value = view.mol.replace(/\^/g, "\n");
    if (view.doc)
        sim.load(view.doc);
    const spark = sparkline.getContext("2d");
    if (spark)
        drawSparkline(spark, sparkline.width, sparkline.height, view.sparkline);
    if (view.appliedLast.length) {
        logLine(`step ${view.stepCounter}: ${view.appliedLast.join(", ")}`);
    }
    renderMatches(view.matches);
    renderWeights(view.weights);
});
function animate() {
    sim.tick();
    const ctx = canvas.getContext("2d");
    if (ctx)
        draw(ctx, sim);
    requestAnimationFrame(animate);
}
requestAnimationFrame(animate);
// -- matches and weights -------------------------------------------------------
function renderMatches(matches) {
    const box = el("matches");
    box.textContent = "";
    for (const match of matches) {
        const button = document.createElement("button");
        button.textContent = match;
        button.title = "fire this match";
        button.onclick = () => command(() => client.fire(match), `fire ${match}`);
        box.appendChild(button);
    }
    if (!matches.length)
        box.textContent = "(no pending matches)";
}
let weightsRendered = "";
function renderWeights(weights) {
    const key = Object.keys(weights).sort().join(",");
    const box = el("weights");
    if (key !== weightsRendered) {
        weightsRendered = key;
        box.textContent = "";
        for (const group of Object.keys(weights).sort()) {
            const label = document.createElement("label");
            label.textContent = group;
            const slider = document.createElement("input");
            slider.type = "range";
            slider.min = "0";
            slider.max = "1";
            slider.step = "0.05";
            slider.dataset.group = group;
            slider.onchange = () => command(() => client.setWeights({ [group]: Number(slider.value) }), `weight ${group}=${slider.value}`);
            const value = document.createElement("span");
            value.dataset.valueFor = group;
            label.appendChild(slider);
            label.appendChild(value);
            box.appendChild(label);
        }
    }
    for (const slider of box.querySelectorAll("input[type=range]")) {
        const group = slider.dataset.group;
        slider.value = String(weights[group]);
        const value = box.querySelector(`[data-value-for="${group}"]`);
        if (value)
            value.textContent = Number(weights[group]).toFixed(2);
    }
}
// -- commands ------------------------------------------------------------------
async function command(run, label) {
    try {
        const result = await run();
        if (result && typeof result === "object" && "session" in result) {
            store.apply(result);
        }
    }
    catch (err) {
        status(String(err));
        logLine(`error (${label}): ${String(err)}`);
    }
}
async function loadSession() {
    const sourceKind = el("source-kind").value;
    const chem = el("chem").value;
    const seed = Number(el("seed").value) || 0;
    const text = el("source-text").value;
    const body = { chem, seed, steps: 100000 };
    if (sourceKind === "library")
        body.lib = el("library").value;
    else if (sourceKind === "mol")
        body.mol = text;
    else
        body.term = text;
    stream?.close();
    stream = null;
    await command(async () => {
        const snap = await client.createSession(body);
        store.apply(snap);
        stream = await client.openStream((event) => {
            if (event.event === "snapshot" || event.event === "hello") {
                store.apply(event);
            }
            else if (event.event === "error") {
                status(`${event.code}: ${event.message}`);
            }
        });
        status(`session ${snap.session} on ${chem}`);
        return snap;
    }, "load");
}
async function refreshLibrary() {
    const select = el("library");
    select.textContent = "";
    for (const entry of await client.library()) {
        const option = document.createElement("option");
        option.value = entry.id;
        option.textContent = `${entry.id} (${entry.chemistry})`;
        select.appendChild(option);
    }
}
async function quinePanel(exact) {
    const view = store.current;
    if (!view.mol) {
        status("load a graph first");
        return;
    }
    const verdictBox = el("quine-verdict");
    verdictBox.textContent = "...";
    try {
        if (exact) {
            const verdict = await client.quineExact({ mol: view.mol, chem: view.chem });
            verdictBox.textContent =
                `status=${verdict.status} collections_examined=${verdict.collections_examined}` +
                    (verdict.status === "inconclusive" ? ` limit=${verdict.limit}` : "") +
                    (verdict.witness ? ` witness=${verdict.witness.join(",")}` : "");
        }
        else {
            const profile = await client.quineEmpirical({
                mol: view.mol,
                chem: view.chem,
                trials: 100,
                seed: Number(el("seed").value) || 0,
            });
            verdictBox.textContent =
                `trials=${profile.trials} died=${profile.outcomes.died} ` +
                    `survived=${profile.outcomes.survived_horizon} ` +
                    `grew=${profile.outcomes.grew_beyond_bound}`;
            const ctx = histogram.getContext("2d");
            if (ctx)
                drawHistogram(ctx, histogram.width, histogram.height, profile.lifespans);
        }
    }
    catch (err) {
        verdictBox.textContent = String(err);
    }
}
// -- boot ------------------------------------------------------------------------
function bind() {
    el("connect").onclick = async () => {
        client = new LabClient(el("server").value.replace(/\/$/, ""));
        await refreshLibrary();
        status("connected");
    };
    el("load").onclick = () => void loadSession();
    el("step").onclick = () => command(() => client.step(1), "step");
    el("run").onclick = () => command(() => client.run(undefined, 0.05), "run");
    el("pause").onclick = () => command(() => client.pause(), "pause");
    el("quine-exact").onclick = () => void quinePanel(true);
    el("quine-empirical").onclick = () => void quinePanel(false);
    el("server").value = client.baseUrl;
    void refreshLibrary().then(() => status("connected")).catch(() => {
        status("server unreachable; set the URL and press connect");
    });
}
bind();
