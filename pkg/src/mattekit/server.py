"""Review service: a small threaded HTTP server over one manifest.

Endpoints (all JSON responses UTF-8; errors are {"error": message}):

    GET  /api/samples?status=S&offset=N&limit=N   list sample records
    GET  /api/samples/{id}/image?kind=K           PNG bytes (rgb, alpha,
                                                  inverse, refined)
    POST /api/samples/{id}/decision               {"decision": "accept"|"reject"}
    GET  /api/stats                               counts per status

Static assets for the review console are served from a UI directory when
present. Every decision is persisted atomically before the response goes
out, so an acknowledged decision survives any crash; a lock file keeps
the manifest single-writer.
"""

from __future__ import annotations

import json
import signal
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

from .errors import ManifestError, StateTransitionError
from .manifest import DatasetManifest, ManifestLock

IMAGE_KINDS = ("rgb", "alpha", "inverse", "refined")

_FALLBACK_PAGE = """<!doctype html>
<html><head><meta charset="utf-8"><title>mattekit review</title></head>
<body><h1>mattekit review service</h1>
<p>No review console assets are installed. The JSON API is live under
<code>/api/</code>; see <a href="/api/stats">/api/stats</a>.</p>
</body></html>
"""

_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".png": "image/png",
    ".svg": "image/svg+xml",
    ".ico": "image/x-icon",
    ".map": "application/json",
}


def default_ui_dir() -> Path | None:
    bundled = Path(__file__).parent / "_webui"
    return bundled if (bundled / "index.html").is_file() else None


class ReviewApp:
    """Shared state behind the HTTP handlers; serializes manifest writes."""

    def __init__(self, manifest_path, ui_dir=None):
        self.manifest_path = Path(manifest_path)
        self.manifest_dir = self.manifest_path.parent
        self.manifest = DatasetManifest.load(self.manifest_path)
        self.ui_dir = Path(ui_dir) if ui_dir else default_ui_dir()
        self.write_lock = threading.Lock()

    def list_samples(self, status: str | None, offset: int, limit: int) -> list[dict]:
        records = sorted(self.manifest.samples.values(), key=lambda r: r.id)
        if status:
            records = [r for r in records if r.status == status]
        return [r.to_dict() for r in records[offset : offset + limit]]

    def image_path(self, sample_id: str, kind: str) -> Path:
        record = self.manifest.get(sample_id)
        if kind not in IMAGE_KINDS:
            raise ManifestError(f"unknown image kind {kind!r}")
        rel = record.paths.get(kind)
        if not rel:
            raise ManifestError(f"sample {sample_id} has no {kind} image")
        return (self.manifest_dir / rel).resolve()

    def decide(self, sample_id: str, decision: str) -> dict:
        if decision not in ("accept", "reject"):
            raise ValueError(f"decision must be accept or reject, got {decision!r}")
        with self.write_lock:
            record = self.manifest.get(sample_id)
            record.transition("accepted" if decision == "accept" else "rejected", "human")
            self.manifest.save(self.manifest_path)
            return record.to_dict()

    def stats(self) -> dict:
        counts = self.manifest.status_counts()
        return {"counts": counts, "total": sum(counts.values())}


class ReviewHandler(BaseHTTPRequestHandler):
    server_version = "mattekit"

    @property
    def app(self) -> ReviewApp:
        return self.server.app  # type: ignore[attr-defined]

    def log_message(self, fmt, *args):  # quiet by default
        if getattr(self.server, "verbose", False):
            super().log_message(fmt, *args)

    def _send_json(self, payload, status: int = 200) -> None:
        body = json.dumps(payload, sort_keys=True).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _send_error_json(self, message: str, status: int) -> None:
        self._send_json({"error": message}, status)

    def _send_bytes(self, data: bytes, content_type: str, status: int = 200) -> None:
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def do_GET(self):
        url = urlparse(self.path)
        parts = [p for p in url.path.split("/") if p]
        try:
            if url.path == "/api/stats":
                self._send_json(self.app.stats())
            elif url.path == "/api/samples":
                q = parse_qs(url.query)
                self._send_json(
                    self.app.list_samples(
                        status=q.get("status", [None])[0],
                        offset=int(q.get("offset", ["0"])[0]),
                        limit=int(q.get("limit", ["100"])[0]),
                    )
                )
            elif (
                len(parts) == 4
                and parts[:2] == ["api", "samples"]
                and parts[3] == "image"
            ):
                kind = parse_qs(url.query).get("kind", ["alpha"])[0]
                path = self.app.image_path(parts[2], kind)
                self._send_bytes(path.read_bytes(), "image/png")
            elif parts[:1] == ["api"]:
                self._send_error_json("not found", 404)
            else:
                self._serve_static(url.path)
        except ManifestError as exc:
            self._send_error_json(str(exc), 404)
        except FileNotFoundError:
            self._send_error_json("image file missing", 404)
        except ValueError as exc:
            self._send_error_json(str(exc), 400)

    def do_POST(self):
        url = urlparse(self.path)
        parts = [p for p in url.path.split("/") if p]
        if not (len(parts) == 4 and parts[:2] == ["api", "samples"] and parts[3] == "decision"):
            self._send_error_json("not found", 404)
            return
        try:
            length = int(self.headers.get("Content-Length", "0"))
            body = json.loads(self.rfile.read(length) or b"{}")
            result = self.app.decide(parts[2], body.get("decision", ""))
            self._send_json(result)
        except json.JSONDecodeError:
            self._send_error_json("request body is not valid JSON", 400)
        except ValueError as exc:
            self._send_error_json(str(exc), 400)
        except StateTransitionError as exc:
            self._send_error_json(str(exc), 409)
        except ManifestError as exc:
            self._send_error_json(str(exc), 404)

    def _serve_static(self, path: str) -> None:
        ui_dir = self.app.ui_dir
        if ui_dir is None:
            if path in ("/", "/index.html"):
                self._send_bytes(_FALLBACK_PAGE.encode("utf-8"), "text/html; charset=utf-8")
            else:
                self._send_error_json("not found", 404)
            return
        name = path.lstrip("/") or "index.html"
        target = (ui_dir / name).resolve()
        root = ui_dir.resolve()
        if (root not in target.parents) or not target.is_file():
            self._send_error_json("not found", 404)
            return
        ctype = _CONTENT_TYPES.get(target.suffix, "application/octet-stream")
        self._send_bytes(target.read_bytes(), ctype)


def make_server(manifest_path, host: str = "127.0.0.1", port: int = 0,
                ui_dir=None) -> tuple[ThreadingHTTPServer, ManifestLock]:
    """Build a ready-to-run server holding the manifest lock."""
    lock = ManifestLock(manifest_path).acquire()
    try:
        app = ReviewApp(manifest_path, ui_dir=ui_dir)
        server = ThreadingHTTPServer((host, port), ReviewHandler)
        server.app = app  # type: ignore[attr-defined]
    except Exception:
        lock.release()
        raise
    return server, lock


def serve(manifest_path, bind: str = "127.0.0.1:8765", ui_dir=None,
          verbose: bool = False) -> None:
    """Run the review service until SIGINT/SIGTERM; never loses an
    acknowledged decision (each one is saved before the response)."""
    host, _, port_text = bind.partition(":")
    server, lock = make_server(manifest_path, host or "127.0.0.1",
                               int(port_text or "8765"), ui_dir=ui_dir)
    server.verbose = verbose  # type: ignore[attr-defined]

    def stop(signum, frame):
        threading.Thread(target=server.shutdown, daemon=True).start()

    signal.signal(signal.SIGTERM, stop)
    signal.signal(signal.SIGINT, stop)
    try:
        host_out, port_out = server.server_address[:2]
        print(f"review service on http://{host_out}:{port_out}/ "
              f"(manifest {manifest_path})", flush=True)
        server.serve_forever()
    finally:
        server.server_close()
        lock.release()
