// Typed client for the lab server.  All rewriting happens server-side;
// this module only moves JSON.  The WebSocket constructor is injectable
// so tests can run outside a browser.
const browserSocketFactory = (url) => new Promise((resolve, reject) => {
    const ws = new WebSocket(url);
    const like = {
        send: (data) => ws.send(data),
        close: () => ws.close(),
        onmessage: null,
        onclose: null,
    };
    ws.onmessage = (ev) => like.onmessage?.(String(ev.data));
    ws.onclose = () => like.onclose?.();
    ws.onopen = () => resolve(like);
    ws.onerror = () => reject(new Error(`websocket failed: ${url}`));
});
export class ServerError extends Error {
    code;
    constructor(code, message) {
        super(`${code}: ${message}`);
        this.code = code;
    }
}
export class LabClient {
    baseUrl;
    socketFactory;
    session = null;
    constructor(baseUrl, socketFactory = browserSocketFactory) {
        this.baseUrl = baseUrl;
        this.socketFactory = socketFactory;
    }
    async request(method, path, body) {
        const response = await fetch(this.baseUrl + path, {
            method,
            headers: body === undefined ? {} : { "Content-Type": "application/json" },
            body: body === undefined ? undefined : JSON.stringify(body),
        });
        const text = await response.text();
        if (!response.ok) {
            try {
                const payload = JSON.parse(text);
                throw new ServerError(payload.error.code, payload.error.message);
            }
            catch (err) {
                if (err instanceof ServerError)
                    throw err;
                throw new ServerError("Http" + response.status, text.slice(0, 200));
            }
        }
        const kind = response.headers.get("content-type") ?? "";
        return (kind.includes("application/json") ? JSON.parse(text) : text);
    }
    // -- library -------------------------------------------------------------
    async library() {
        const out = await this.request("GET", "/api/library");
        return out.entries;
    }
    libraryEntry(id) {
        return this.request("GET", `/api/library/${id}`);
    }
    // -- sessions ------------------------------------------------------------
    async createSession(body) {
        const snap = await this.request("POST", "/api/session", body);
        this.session = snap.session;
        return snap;
    }
    sessionPath(op) {
        if (!this.session)
            throw new ServerError("NoSession", "create a session first");
        return `/api/session/${this.session}/${op}`;
    }
    step(n = 1) {
        return this.request("POST", this.sessionPath("step"), { n });
    }
    run(steps, delay = 0.02) {
        return this.request("POST", this.sessionPath("run"), { steps, delay });
    }
    pause() {
        return this.request("POST", this.sessionPath("pause"), {});
    }
    setWeights(weights) {
        return this.request("POST", this.sessionPath("weights"), { weights });
    }
    fire(match) {
        return this.request("POST", this.sessionPath("fire"), { match });
    }
    snapshot() {
        return this.request("GET", this.sessionPath("snapshot"));
    }
    trace() {
        return this.request("GET", this.sessionPath("trace"));
    }
    async waitStopped(timeoutMs = 30000) {
        const deadline = Date.now() + timeoutMs;
        for (;;) {
            const snap = await this.snapshot();
            if (!snap.running)
                return snap;
            if (Date.now() > deadline)
                throw new ServerError("Timeout", "still running");
            await new Promise((r) => setTimeout(r, 20));
        }
    }
    // -- one-shot tools --------------------------------------------------------
    quineExact(body) {
        return this.request("POST", "/api/quine", { ...body, exact: true });
    }
    quineEmpirical(body) {
        return this.request("POST", "/api/quine", { ...body, exact: false });
    }
    async egg(types, chem, seed, count = 1) {
        const out = await this.request("POST", "/api/egg", {
            types,
            chem,
            seed,
            count,
        });
        return out.mols;
    }
    async lambda2mol(term, fanout = "FO") {
        const out = await this.request("POST", "/api/lambda2mol", {
            term,
            fanout,
        });
        return out.mol;
    }
    // -- streaming -------------------------------------------------------------
    async openStream(onEvent) {
        if (!this.session)
            throw new ServerError("NoSession", "create a session first");
        const wsUrl = this.baseUrl.replace(/^http/, "ws") + `/ws/session/${this.session}`;
        const socket = await this.socketFactory(wsUrl);
        socket.onmessage = (data) => onEvent(JSON.parse(data));
        return {
            send: (command) => socket.send(JSON.stringify(command)),
            close: () => socket.close(),
        };
    }
}
export async function runScript(client, commands) {
    for (const command of commands) {
        if (command.op === "create") {
            const { op, ...body } = command;
            await client.createSession(body);
        }
        else if (command.op === "step") {
            await client.step(command.n ?? 1);
        }
        else if (command.op === "run") {
            await client.run(command.steps, command.delay ?? 0.02);
            await client.waitStopped();
        }
        else if (command.op === "pause") {
            await client.pause();
        }
        else if (command.op === "weights") {
            await client.setWeights(command.weights);
        }
        else {
            await client.fire(command.match);
        }
    }
    return client.trace();
}
