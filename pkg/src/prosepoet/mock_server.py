"""Protocol-conformant mock fill-mask server for tests and offline runs.

Responses are deterministic: candidates rotate through the configured
vocabulary by mask position and carry strictly decreasing log-probs. The
constructor can force error statuses or invalid payload shapes so client
error handling can be exercised.
"""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from .corpus import MASK

DEFAULT_VOCAB = (
    "gol", "del", "jan", "mey", "bahar", "negar", "asman", "zamin", "sahar", "yar",
)


class MockPredictorServer:
    def __init__(
        self,
        port: int = 0,
        vocab=DEFAULT_VOCAB,
        model_name: str = "mock",
        loaded: bool = True,
        force_status: int | None = None,
        payload_defect: str | None = None,
    ):
        self.vocab = list(vocab)
        self.model_name = model_name
        self.loaded = loaded
        self.force_status = force_status
        self.payload_defect = payload_defect
        self.requests_served = 0

        server = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):
                pass

            def _reply(self, status, obj):
                raw = json.dumps(obj, ensure_ascii=False).encode("utf-8")
                self.send_response(status)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(raw)))
                self.end_headers()
                self.wfile.write(raw)

            def do_GET(self):
                if self.path == "/v1/health":
                    self._reply(200, {"status": "ok", "model": server.model_name})
                else:
                    self._reply(404, {"error": "not found"})

            def do_POST(self):
                if self.path != "/v1/fill-mask":
                    self._reply(404, {"error": "not found"})
                    return
                server.requests_served += 1
                if server.force_status is not None:
                    self._reply(server.force_status, {"error": f"forced {server.force_status}"})
                    return
                if not server.loaded:
                    self._reply(503, {"error": "model not loaded"})
                    return
                length = int(self.headers.get("Content-Length", 0))
                try:
                    body = json.loads(self.rfile.read(length))
                    tokens = body["tokens"]
                    mask_token = body.get("mask_token", MASK)
                    top_k = body.get("top_k", 10)
                    if not isinstance(tokens, list) or not all(isinstance(t, str) for t in tokens):
                        raise ValueError("tokens must be a list of strings")
                    if not isinstance(top_k, int) or top_k < 1:
                        raise ValueError("top_k must be a positive integer")
                except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                    self._reply(400, {"error": str(exc)})
                    return
                positions = [i for i, t in enumerate(tokens) if t == mask_token]
                if not positions:
                    self._reply(422, {"error": "no mask token present"})
                    return
                self._reply(200, {"predictions": server._predict(positions, top_k)})

        self._httpd = ThreadingHTTPServer(("127.0.0.1", port), Handler)
        self._thread = threading.Thread(target=self._httpd.serve_forever, daemon=True)

    def _predict(self, positions, top_k):
        predictions = []
        for pos in positions:
            rotated = self.vocab[pos % len(self.vocab) :] + self.vocab[: pos % len(self.vocab)]
            take = min(top_k, len(rotated))
            candidates = [
                {"token": tok, "log_prob": -0.5 * (rank + 1)}
                for rank, tok in enumerate(rotated[:take])
            ]
            if self.payload_defect == "unsorted" and len(candidates) >= 2:
                candidates[0], candidates[-1] = candidates[-1], candidates[0]
            elif self.payload_defect == "duplicate" and len(candidates) >= 2:
                candidates[1]["token"] = candidates[0]["token"]
            elif self.payload_defect == "positive":
                candidates[0]["log_prob"] = 0.5
            elif self.payload_defect == "wrong-positions":
                pos = pos + 1
            predictions.append({"position": pos, "candidates": candidates})
        return predictions

    @property
    def port(self) -> int:
        return self._httpd.server_address[1]

    @property
    def endpoint(self) -> str:
        return f"http://127.0.0.1:{self.port}"

    def start(self):
        self._thread.start()
        return self

    def stop(self):
        self._httpd.shutdown()
        self._httpd.server_close()

    def __enter__(self):
        return self.start()

    def __exit__(self, *exc):
        self.stop()


def run_mock_server(port: int, vocab=DEFAULT_VOCAB) -> None:
    """Blocking entry point for the serve-mock CLI command."""
    server = MockPredictorServer(port=port, vocab=vocab)
    print(f"mock fill-mask server listening on {server.endpoint}", flush=True)
    try:
        server._httpd.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server._httpd.server_close()
