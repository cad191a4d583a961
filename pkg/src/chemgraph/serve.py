"""The lab server: HTTP request/response API plus a WebSocket step stream.

Sessions are server-owned reductions.  Every mutation goes through the
session lock, so interleaved clients see a single serialized command
stream; snapshots are pure reads of immutable pattern values.  The
WebSocket (RFC 6455, text frames, JSON bodies) pushes one snapshot per
engine step and accepts the same commands as the HTTP API.
"""

from __future__ import annotations

import base64
import hashlib
import itertools
import json
import random
import struct
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from . import engine, quines
from .chemistry import BUILTIN_NAMES, builtin
from .d3 import d3_document
from .errors import ChemGraphError
from .lambda_terms import parse_lambda, term_to_mol
from .library import load_library
from .molcore import cap, parse_mol, serialize_mol

WS_GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"


class ApiError(ChemGraphError):
    def __init__(self, code: str, message: str, status: int = 400):
        self.code = code
        self.status = status
        super().__init__(message)


class Session:
    """One reduction owned by the server."""

    def __init__(self, session_id: str, pattern, chem, config):
        self.id = session_id
        self.chem = chem
        self.lock = threading.Lock()
        self.state = engine.EngineState.start(pattern, chem, config)
        self.initial_code = None  # computed lazily for the trace
        self.initial = pattern
        self.history = [(0, len(pattern))]
        self.running = False
        self._stop = threading.Event()
        self._runner: threading.Thread | None = None
        self.subscribers: list = []  # per-connection push queues

    # -- queries ----------------------------------------------------------

    def snapshot(self) -> dict:
        state = self.state
        pattern = state.pattern
        last = state.records[-1] if state.records else None
        return {
            "session": self.id,
            "chem": self.chem.name,
            "step": state.step_no,
            "running": self.running,
            "terminated": state.terminated,
            "nodes": len(pattern),
            "edges": len(pattern.bound_tags()),
            "counts": pattern.type_counts(),
            "mol": serialize_mol(pattern, "caret"),
            "d3": d3_document(pattern) if pattern.is_molecule() else None,
            "matches": [m.describe() for m in engine.find_matches(pattern, self.chem)],
            "applied_last": list(last.applied) if last else [],
            "history": self.history[-500:],
            "weights": {
                g: self.state.config.weight_of(g)
                for g in sorted({rw.weight_group for rw in self.chem.rewrites})
            },
        }

    def trace_text(self) -> str:
        from .molcore import canonical_code

        if self.initial_code is None:
            self.initial_code = canonical_code(self.initial)
        trace = engine.ReductionTrace(
            chemistry=self.chem.name,
            config=self.state.config,
            initial_code=self.initial_code,
            records=tuple(self.state.records),
            final=self.state.pattern,
            termination=self.state.terminated or "running",
        )
        return trace.render(self.chem)

    # -- mutations (caller holds no lock; these take it) -------------------

    def step(self, n: int = 1) -> dict:
        snap = self.snapshot()
        for _ in range(n):
            with self.lock:
                engine.step(self.state)
                self.history.append((self.state.step_no, len(self.state.pattern)))
                snap = self.snapshot()
                stop = self.state.terminated
            self._publish(snap)
            if stop:
                break
        return snap

    def set_weights(self, weights: dict[str, float]) -> dict:
        with self.lock:
            self.state.config = self.state.config.with_weights(
                {str(k): float(v) for k, v in weights.items()}
            )
            snap = self.snapshot()
        self._publish(snap)
        return snap

    def fire(self, match_id: str) -> dict:
        """Apply one chosen pending match, then a COMB pass."""
        with self.lock:
            state = self.state
            matches = engine.find_matches(state.pattern, self.chem)
            chosen = [m for m in matches if m.describe() == match_id]
            if not chosen:
                raise ApiError("UnknownMatch", f"no pending match {match_id!r}")
            state.step_no += 1
            before_nodes = len(state.pattern)
            before_edges = len(state.pattern.bound_tags())
            pattern = engine.apply_matches(
                state.pattern, chosen[:1], state.tags, self.chem
            )
            pattern = engine.comb_pass(pattern)
            state.pattern = pattern
            state.records.append(
                engine.StepRecord(
                    step=state.step_no,
                    applied=(chosen[0].describe(),),
                    nodes_before=before_nodes,
                    edges_before=before_edges,
                    nodes_after=len(pattern),
                    edges_after=len(pattern.bound_tags()),
                    counts=tuple(sorted(pattern.type_counts().items())),
                )
            )
            self.history.append((state.step_no, len(pattern)))
            snap = self.snapshot()
        self._publish(snap)
        return snap

    def run(self, steps: int | None, delay: float) -> dict:
        with self.lock:
            if self.running:
                return self.snapshot()
            self.running = True
            self._stop.clear()

        def loop():
            done = 0
            while not self._stop.is_set():
                if steps is not None and done >= steps:
                    break
                with self.lock:
                    if (
                        self.state.terminated
                        or self.state.step_no >= self.state.config.max_steps
                    ):
                        break
                    engine.step(self.state)
                    self.history.append(
                        (self.state.step_no, len(self.state.pattern))
                    )
                    snap = self.snapshot()
                self._publish(snap)
                done += 1
                if delay:
                    time.sleep(delay)
            self.running = False
            self._publish(self.snapshot())

        self._runner = threading.Thread(target=loop, daemon=True)
        self._runner.start()
        return self.snapshot()

    def pause(self) -> dict:
        self._stop.set()
        if self._runner is not None:
            self._runner.join(timeout=5)
        self.running = False
        return self.snapshot()

    def _publish(self, snap: dict) -> None:
        for queue in list(self.subscribers):
            queue.put(snap)


class LabServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, address, libdir: str | None = None):
        super().__init__(address, Handler)
        self.sessions: dict[str, Session] = {}
        self.sessions_lock = threading.Lock()
        self.libdir = libdir
        self._ids = itertools.count(1)

    def new_session(self, pattern, chem, config) -> Session:
        with self.sessions_lock:
            sid = f"s{next(self._ids)}"
            session = Session(sid, pattern, chem, config)
            self.sessions[sid] = session
            return session

    def session(self, sid: str) -> Session:
        with self.sessions_lock:
            if sid not in self.sessions:
                raise ApiError("UnknownSession", f"no session {sid!r}", 404)
            return self.sessions[sid]


def _chem_from(body: dict):
    name = body.get("chem", "chemlambda-v2")
    if name not in BUILTIN_NAMES:
        raise ApiError("UnknownChemistry", f"unknown chemistry {name!r}")
    return builtin(name)


def _pattern_from(body: dict, chem, libdir):
    if "mol" in body:
        pattern = parse_mol(body["mol"], chem)
    elif "term" in body:
        pattern = term_to_mol(parse_lambda(body["term"]), chem,
                              body.get("fanout", "FO"))
    elif "lib" in body:
        entries = load_library(libdir)
        if body["lib"] not in entries:
            raise ApiError("UnknownEntry", f"no library entry {body['lib']!r}", 404)
        pattern = parse_mol(entries[body["lib"]].mol_text, chem)
    else:
        raise ApiError("BadRequest", "need one of mol, term, lib")
    if pattern.free_tags():
        pattern = cap(pattern, chem)
    return pattern


def _config_from(body: dict) -> engine.ReductionConfig:
    weights = tuple(
        sorted((str(k), float(v)) for k, v in body.get("weights", {}).items())
    )
    return engine.ReductionConfig(
        seed=int(body.get("seed", 0)),
        max_steps=int(body.get("steps", 1000)),
        policy=body.get("policy", engine.RANDOM_POLICY),
        weights=weights,
        hapax=bool(body.get("hapax", False)),
    )


class Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    server: LabServer

    def log_message(self, *args):  # quiet
        pass

    # -- plumbing ----------------------------------------------------------

    def _json(self, payload, status: int = 200):
        body = json.dumps(payload).encode()
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def _text(self, text: str, status: int = 200):
        body = text.encode()
        self.send_response(status)
        self.send_header("Content-Type", "text/plain; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def _body(self) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        if not length:
            return {}
        try:
            return json.loads(self.rfile.read(length))
        except json.JSONDecodeError as err:
            raise ApiError("BadJson", str(err)) from None

    def _error(self, err: Exception):
        if isinstance(err, ApiError):
            self._json({"error": {"code": err.code, "message": str(err)}}, err.status)
        elif isinstance(err, ChemGraphError):
            self._json(
                {"error": {"code": type(err).__name__, "message": str(err)}}, 400
            )
        else:
            self._json({"error": {"code": "Internal", "message": str(err)}}, 500)

    # -- routing -----------------------------------------------------------

    def do_GET(self):
        try:
            parts = [p for p in self.path.split("?")[0].split("/") if p]
            if parts[:2] == ["ws", "session"] and len(parts) == 3:
                return self._websocket(parts[2])
            if parts == ["api", "library"]:
                entries = load_library(self.server.libdir)
                return self._json(
                    {
                        "entries": [
                            {
                                "id": e.id,
                                "chemistry": e.chemistry,
                                "comment": e.comment,
                            }
                            for e in entries.values()
                        ]
                    }
                )
            if parts[:2] == ["api", "library"] and len(parts) == 3:
                entries = load_library(self.server.libdir)
                if parts[2] not in entries:
                    raise ApiError("UnknownEntry", f"no entry {parts[2]!r}", 404)
                e = entries[parts[2]]
                return self._json(
                    {
                        "id": e.id,
                        "chemistry": e.chemistry,
                        "comment": e.comment,
                        "mol": e.mol_text,
                    }
                )
            if parts[:2] == ["api", "session"] and len(parts) == 4:
                session = self.server.session(parts[2])
                if parts[3] == "snapshot":
                    return self._json(session.snapshot())
                if parts[3] == "trace":
                    return self._text(session.trace_text())
            raise ApiError("NotFound", f"no route {self.path!r}", 404)
        except Exception as err:  # noqa: BLE001 - reported to the client
            self._error(err)

    def do_POST(self):
        try:
            parts = [p for p in self.path.split("?")[0].split("/") if p]
            body = self._body()
            if parts == ["api", "session"]:
                chem = _chem_from(body)
                pattern = _pattern_from(body, chem, self.server.libdir)
                config = _config_from(body)
                session = self.server.new_session(pattern, chem, config)
                return self._json(session.snapshot())
            if parts[:2] == ["api", "session"] and len(parts) == 4:
                session = self.server.session(parts[2])
                op = parts[3]
                if op == "step":
                    return self._json(session.step(int(body.get("n", 1))))
                if op == "run":
                    steps = body.get("steps")
                    return self._json(
                        session.run(
                            int(steps) if steps is not None else None,
                            float(body.get("delay", 0.02)),
                        )
                    )
                if op == "pause":
                    return self._json(session.pause())
                if op == "weights":
                    return self._json(session.set_weights(body.get("weights", {})))
                if op == "fire":
                    return self._json(session.fire(str(body.get("match", ""))))
                raise ApiError("NotFound", f"no session op {op!r}", 404)
            if parts == ["api", "quine"]:
                return self._json(self._quine(body))
            if parts == ["api", "egg"]:
                chem = _chem_from(body)
                rng = random.Random(int(body.get("seed", 0)))
                mols = [
                    serialize_mol(
                        quines.random_egg(list(body.get("types", [])), chem, rng),
                        "caret",
                    )
                    for _ in range(int(body.get("count", 1)))
                ]
                return self._json({"mols": mols})
            if parts == ["api", "lambda2mol"]:
                chem = builtin("chemlambda-v2")
                mol = term_to_mol(
                    parse_lambda(body.get("term", "")), chem,
                    body.get("fanout", "FO"),
                )
                return self._json({"mol": serialize_mol(mol, "caret")})
            raise ApiError("NotFound", f"no route {self.path!r}", 404)
        except Exception as err:  # noqa: BLE001
            self._error(err)

    def _quine(self, body: dict) -> dict:
        chem = _chem_from(body)
        mol = _pattern_from(body, chem, self.server.libdir)
        if body.get("exact", True):
            verdict = quines.is_quine(mol, chem, limit=int(body.get("limit", 100_000)))
            return {
                "status": verdict.status,
                "collections_examined": verdict.collections_examined,
                "limit": verdict.limit,
                "witness": [m.describe() for m in verdict.witness]
                if verdict.witness
                else None,
            }
        config = engine.ReductionConfig(
            seed=int(body.get("seed", 0)), max_steps=int(body.get("steps", 1000))
        )
        profile = quines.empirical_profile(
            mol, chem, config, int(body.get("trials", 100))
        )
        return {
            "trials": profile.trials,
            "horizon": profile.horizon,
            "outcomes": profile.outcomes,
            "lifespans": list(profile.lifespans),
            "series": [list(row) for row in profile.series],
        }

    # -- websocket ---------------------------------------------------------

    def _websocket(self, sid: str):
        import queue as queue_mod

        session = self.server.session(sid)
        key = self.headers.get("Sec-WebSocket-Key")
        if not key or self.headers.get("Upgrade", "").lower() != "websocket":
            raise ApiError("BadUpgrade", "expected a WebSocket upgrade")
        accept = base64.b64encode(
            hashlib.sha1((key + WS_GUID).encode()).digest()
        ).decode()
        self.send_response(101, "Switching Protocols")
        self.send_header("Upgrade", "websocket")
        self.send_header("Connection", "Upgrade")
        self.send_header("Sec-WebSocket-Accept", accept)
        self.end_headers()
        self.close_connection = True

        sock = self.connection
        out: "queue_mod.Queue[dict | None]" = queue_mod.Queue()
        session.subscribers.append(out)
        send_lock = threading.Lock()

        def send_json(payload: dict):
            with send_lock:
                sock.sendall(_ws_frame(json.dumps(payload).encode()))

        def writer():
            while True:
                item = out.get()
                if item is None:
                    return
                try:
                    send_json({"event": "snapshot", **item})
                except OSError:
                    return

        writer_thread = threading.Thread(target=writer, daemon=True)
        writer_thread.start()
        try:
            send_json({"event": "hello", **session.snapshot()})
            while True:
                message = _ws_read(self.rfile, sock, send_lock)
                if message is None:
                    break
                try:
                    command = json.loads(message)
                    reply = self._ws_command(session, command)
                    send_json({"event": "reply", "op": command.get("op"), **reply})
                except ApiError as err:
                    send_json(
                        {"event": "error", "code": err.code, "message": str(err)}
                    )
                except (ValueError, ChemGraphError) as err:
                    send_json(
                        {
                            "event": "error",
                            "code": type(err).__name__,
                            "message": str(err),
                        }
                    )
        except OSError:
            pass
        finally:
            if out in session.subscribers:
                session.subscribers.remove(out)
            out.put(None)

    def _ws_command(self, session: Session, command: dict) -> dict:
        op = command.get("op")
        if op == "step":
            return session.step(int(command.get("n", 1)))
        if op == "run":
            steps = command.get("steps")
            return session.run(
                int(steps) if steps is not None else None,
                float(command.get("delay", 0.02)),
            )
        if op == "pause":
            return session.pause()
        if op == "weights":
            return session.set_weights(command.get("weights", {}))
        if op == "fire":
            return session.fire(str(command.get("match", "")))
        if op == "snapshot":
            return session.snapshot()
        raise ApiError("UnknownOp", f"no websocket op {op!r}")


def _ws_frame(payload: bytes, opcode: int = 1) -> bytes:
    head = bytes([0x80 | opcode])
    n = len(payload)
    if n < 126:
        head += bytes([n])
    elif n < 1 << 16:
        head += bytes([126]) + struct.pack(">H", n)
    else:
        head += bytes([127]) + struct.pack(">Q", n)
    return head + payload


def _ws_read(rfile, sock, send_lock) -> str | None:
    """One text message from the client (handles ping and close)."""
    while True:
        header = rfile.read(2)
        if len(header) < 2:
            return None
        fin_opcode, mask_len = header
        opcode = fin_opcode & 0x0F
        masked = mask_len & 0x80
        length = mask_len & 0x7F
        if length == 126:
            length = struct.unpack(">H", rfile.read(2))[0]
        elif length == 127:
            length = struct.unpack(">Q", rfile.read(8))[0]
        mask = rfile.read(4) if masked else b"\x00" * 4
        payload = bytearray(rfile.read(length))
        for i in range(length):
            payload[i] ^= mask[i % 4]
        if opcode == 8:  # close
            with send_lock:
                try:
                    sock.sendall(_ws_frame(bytes(payload[:2]), opcode=8))
                except OSError:
                    pass
            return None
        if opcode == 9:  # ping
            with send_lock:
                sock.sendall(_ws_frame(bytes(payload), opcode=10))
            continue
        if opcode in (1, 2):
            return payload.decode()


def run_server(host: str, port: int, libdir: str | None = None) -> None:
    server = LabServer((host, port), libdir)
    print(f"chemgraph lab listening on http://{host}:{port}")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
