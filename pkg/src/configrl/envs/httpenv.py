"""Live loopback environment: a real HTTP server with synthetic work.

Each catalog entry induces the server's per-request behavior: an
artificial service delay, optional busy computation standing in for
compression effort, and a cache-hit probability that lets a request
skip the delay entirely. A sequential client measures mean response
time over a wall-clock window; the agent sees that mean normalized by
the scenario's ``t_max_seconds`` and clamped to [0, 1]. Cost stays a
declared per-configuration value, exactly as in the simulator.

The server handles requests one at a time (single worker), so a
configuration switch posted between requests never interleaves with an
in-flight request.
"""

from __future__ import annotations

import json
import random
import threading
import time
from dataclasses import dataclass
from http.client import HTTPConnection
from http.server import BaseHTTPRequestHandler, HTTPServer

import numpy as np

from configrl.errors import ContractError, EnvironmentFailure
from configrl.envs.sim import N_CONFIGS, Observation, Scenario, run_permutation

_BODY = bytes(range(256)) * 4  # fixed 1 KiB payload


@dataclass(frozen=True)
class LiveConfig:
    """Synthetic behavior of one configuration on the live server."""

    id: int
    base_delay: float  # seconds of artificial service delay
    compression_work: int  # busy-loop iterations per request
    cache_hit_ratio: float  # probability a request skips the delay

    def __post_init__(self):
        if self.base_delay < 0:
            raise ContractError(f"config {self.id}: negative base_delay")
        if not 0.0 <= self.cache_hit_ratio <= 1.0:
            raise ContractError(f"config {self.id}: cache_hit_ratio outside [0, 1]")


def live_catalog(scenario: Scenario) -> list[LiveConfig]:
    """Derive per-configuration live behavior from a scenario.

    The artificial delay is the configuration's normalized latency mean
    scaled by ``t_max_seconds``, so measured means normalize back to
    roughly the simulator's values.
    """
    return [
        LiveConfig(
            id=cfg.id,
            base_delay=cfg.latency_mean * scenario.t_max_seconds,
            compression_work=0,
            cache_hit_ratio=0.0,
        )
        for cfg in scenario.configs
    ]


class LiveServer:
    """Handle for a running loopback server; shut down when done."""

    def __init__(self, httpd: HTTPServer, thread: threading.Thread):
        self._httpd = httpd
        self._thread = thread
        self.port = httpd.server_address[1]

    def shutdown(self) -> None:
        self._httpd.shutdown()
        self._thread.join(timeout=5.0)
        self._httpd.server_close()


def serve(catalog: list[LiveConfig], port: int = 0, seed: int = 0) -> LiveServer:
    """Start the loopback server; port 0 picks a free ephemeral port.

    Raises OSError when the requested port is already bound.
    """
    configs = {cfg.id: cfg for cfg in catalog}
    state = {"active": catalog[0].id, "rng": random.Random(seed)}

    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, *args):
            pass

        def send_response(self, *args, **kwargs):
            # One connection per request: a kept-alive connection would
            # monopolize the single-threaded server and block every
            # other client (health checks, a second env) forever.
            super().send_response(*args, **kwargs)
            self.send_header("Connection", "close")
            self.close_connection = True

        def do_GET(self):
            if self.path == "/health":
                self._send_json(200, {"id": state["active"]})
                return
            if self.path != "/":
                self._send_json(404, {"error": "not found"})
                return
            cfg = configs[state["active"]]
            if state["rng"].random() >= cfg.cache_hit_ratio:
                if cfg.base_delay > 0:
                    time.sleep(cfg.base_delay)
            if cfg.compression_work > 0:
                acc = 0
                for i in range(cfg.compression_work):
                    acc += i * i
            self.send_response(200)
            self.send_header("Content-Type", "application/octet-stream")
            self.send_header("Content-Length", str(len(_BODY)))
            self.end_headers()
            self.wfile.write(_BODY)

        def do_POST(self):
            if self.path != "/config":
                self._send_json(404, {"error": "not found"})
                return
            length = int(self.headers.get("Content-Length", 0))
            try:
                payload = json.loads(self.rfile.read(length) or b"{}")
                requested = int(payload["id"])
            except (ValueError, KeyError, json.JSONDecodeError):
                self._send_json(400, {"error": "body must be {\"id\": n}"})
                return
            if requested not in configs:
                self._send_json(400, {"error": f"unknown config id {requested}"})
                return
            state["active"] = requested
            self._send_json(200, {"id": requested})

        def _send_json(self, code: int, obj) -> None:
            body = json.dumps(obj).encode()
            self.send_response(code)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

    httpd = HTTPServer(("127.0.0.1", port), Handler)
    thread = threading.Thread(target=httpd.serve_forever, daemon=True)
    thread.start()
    return LiveServer(httpd, thread)


class LoopbackClient:
    """Sequential HTTP client; one request in flight at a time.

    The server closes each connection after responding, so every
    exchange reopens the connection (http.client does this lazily).
    """

    def __init__(self, port: int, host: str = "127.0.0.1", timeout: float = 10.0):
        self.host = host
        self.port = port
        self.timeout = timeout
        self._conn = HTTPConnection(host, port, timeout=timeout)

    def _exchange(self, method: str, path: str, body: bytes | None = None):
        try:
            self._conn.request(
                method,
                path,
                body=body,
                headers={"Content-Type": "application/json"} if body else {},
            )
            resp = self._conn.getresponse()
            data = resp.read()
            if resp.will_close:
                self._conn.close()
            return resp.status, data
        except (OSError, ConnectionError) as e:
            self._conn.close()
            raise EnvironmentFailure(
                f"{method} {path} to {self.host}:{self.port} failed: {e}"
            ) from e

    def request_once(self) -> float:
        """One GET /; returns the measured latency in seconds."""
        start = time.perf_counter()
        status, _ = self._exchange("GET", "/")
        elapsed = time.perf_counter() - start
        if status != 200:
            raise EnvironmentFailure(f"GET / returned {status}")
        return elapsed

    def set_config(self, config_id: int) -> None:
        body = json.dumps({"id": int(config_id)}).encode()
        status, data = self._exchange("POST", "/config", body)
        if status != 200:
            raise EnvironmentFailure(f"config switch rejected: {status} {data!r}")

    def health(self) -> int:
        status, data = self._exchange("GET", "/health")
        if status != 200:
            raise EnvironmentFailure(f"health check returned {status}")
        return int(json.loads(data)["id"])

    def close(self) -> None:
        self._conn.close()


def measure_window(client: LoopbackClient, window_secs: float) -> tuple[float, int]:
    """Send sequential requests for one wall-clock window.

    Returns (mean response seconds, request count); always issues at
    least one request.
    """
    deadline = time.monotonic() + window_secs
    total = 0.0
    count = 0
    while True:
        total += client.request_once()
        count += 1
        if time.monotonic() >= deadline:
            break
    return total / count, count


class HttpEnv:
    """Live environment with the same reset/step contract as the simulator."""

    def __init__(
        self,
        scenario: Scenario,
        port: int = 0,
        window_secs: float = 3.0,
        server: LiveServer | None = None,
    ):
        self.scenario = scenario
        self.window_secs = window_secs
        self.n_actions = N_CONFIGS
        self.state_dim = N_CONFIGS
        self._owns_server = server is None
        self._server = server or serve(live_catalog(scenario), port=port)
        self._client = LoopbackClient(self._server.port)
        self._perm: np.ndarray | None = None
        self._slot = 0

    def reset(self, run_seed: int) -> Observation:
        self._perm = run_permutation(self.scenario, run_seed)
        self._slot = 0
        return self._observe()

    def step(self, action: int) -> Observation:
        if self._perm is None:
            raise ContractError("environment not reset")
        action = int(action)
        if not 0 <= action < N_CONFIGS:
            raise ContractError(f"action {action} outside 0..{N_CONFIGS - 1}")
        self._slot = action
        return self._observe()

    def close(self) -> None:
        self._client.close()
        if self._owns_server:
            self._server.shutdown()

    def _observe(self) -> Observation:
        cfg = self.scenario.configs[int(self._perm[self._slot])]
        self._client.set_config(cfg.id)
        t_raw, _ = measure_window(self._client, self.window_secs)
        t = float(np.clip(t_raw / self.scenario.t_max_seconds, 0.0, 1.0))
        state = np.zeros(N_CONFIGS)
        state[self._slot] = 1.0
        return Observation(state=state, T=t, C=cfg.cost)
