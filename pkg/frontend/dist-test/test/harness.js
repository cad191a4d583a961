// Spawns the python lab server for the duration of a test file.
import { spawn, execFileSync } from "node:child_process";
export async function startServer() {
    const port = 21000 + Math.floor(Math.random() * 30000);
    const child = spawn("python3", ["-m", "chemgraph.cli", "serve", "--host", "127.0.0.1", "--port", String(port)], { stdio: ["ignore", "pipe", "pipe"] });
    const url = `http://127.0.0.1:${port}`;
    const deadline = Date.now() + 15000;
    for (;;) {
        try {
            const response = await fetch(url + "/api/library");
            if (response.ok)
                break;
        }
        catch {
            // not up yet
        }
        if (Date.now() > deadline) {
            child.kill();
            throw new Error("lab server did not come up");
        }
        await new Promise((r) => setTimeout(r, 100));
    }
    return {
        url,
        stop() {
            child.kill();
        },
    };
}
export function cliScript(url, scriptPath) {
    return execFileSync("python3", ["-m", "chemgraph.cli", "script", scriptPath, "--url", url], { encoding: "utf8" });
}
