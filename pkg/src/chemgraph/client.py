"""Tiny HTTP client for driving a running lab server from a command
script.  Scripts are JSON-lines; each line is one command:

    {"op": "create", "mol": "...", "chem": "...", "seed": 0, ...}
    {"op": "step", "n": 3}
    {"op": "weights", "weights": {"DIST": 0}}
    {"op": "fire", "match": "L-A@0+1"}
    {"op": "run", "steps": 5, "delay": 0}
    {"op": "pause"}

The session trace is fetched after the last command and returned.
"""

from __future__ import annotations

import json
import time
import urllib.error
import urllib.request

from .errors import ChemGraphError


class ServeClient:
    def __init__(self, base_url: str):
        self.base = base_url.rstrip("/")
        self.session: str | None = None

    def _request(self, method: str, path: str, body: dict | None = None):
        data = json.dumps(body).encode() if body is not None else None
        req = urllib.request.Request(
            self.base + path,
            data=data,
            method=method,
            headers={"Content-Type": "application/json"} if data else {},
        )
        try:
            with urllib.request.urlopen(req, timeout=60) as resp:
                raw = resp.read().decode()
        except urllib.error.HTTPError as err:
            raw = err.read().decode()
            try:
                payload = json.loads(raw)["error"]
                raise ChemGraphError(
                    f"{payload['code']}: {payload['message']}"
                ) from None
            except (ValueError, KeyError):
                raise ChemGraphError(f"HTTP {err.code}: {raw[:200]}") from None
        except urllib.error.URLError as err:
            raise ChemGraphError(f"cannot reach {self.base}: {err}") from None
        if resp.headers.get("Content-Type", "").startswith("application/json"):
            return json.loads(raw)
        return raw

    def _session_path(self, op: str) -> str:
        if self.session is None:
            raise ChemGraphError("no session created yet")
        return f"/api/session/{self.session}/{op}"

    def create(self, **body) -> dict:
        snap = self._request("POST", "/api/session", body)
        self.session = snap["session"]
        return snap

    def command(self, op: str, body: dict) -> dict:
        return self._request("POST", self._session_path(op), body)

    def snapshot(self) -> dict:
        return self._request("GET", self._session_path("snapshot"))

    def trace(self) -> str:
        return self._request("GET", self._session_path("trace"))

    def wait_stopped(self, timeout: float = 30.0) -> dict:
        deadline = time.monotonic() + timeout
        while time.monotonic() < deadline:
            snap = self.snapshot()
            if not snap["running"]:
                return snap
            time.sleep(0.02)
        raise ChemGraphError("session still running after timeout")


def run_script(base_url: str, commands: list[dict]) -> str:
    """Execute the commands in order against a running server; return the
    session's trace text."""
    client = ServeClient(base_url)
    for command in commands:
        op = command.get("op")
        body = {k: v for k, v in command.items() if k != "op"}
        if op == "create":
            client.create(**body)
        elif op in ("step", "run", "pause", "weights", "fire"):
            client.command(op, body)
            if op == "run":
                client.wait_stopped()
        elif op == "wait":
            client.wait_stopped(float(body.get("timeout", 30)))
        else:
            raise ChemGraphError(f"unknown script op {op!r}")
    return client.trace()
