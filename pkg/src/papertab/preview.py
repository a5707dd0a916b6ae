"""Read-only MJPEG preview of the rendered canvas over HTTP.

Serves ``multipart/x-mixed-replace`` with one JPEG per part on /stream,
plus a minimal HTML page on /. The pipeline publishes frames with
``publish``; a slow client simply skips to the latest frame, it can never
hold the pipeline back.
"""

import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from io import BytesIO

from PIL import Image

_BOUNDARY = "papertabframe"

_INDEX_HTML = (
    b"<html><head><title>papertab preview</title></head>"
    b"<body><img src=\"/stream\"/></body></html>"
)


class PreviewServer:
    """Background HTTP server streaming the latest published frame."""

    def __init__(self, port: int = 0, host: str = "127.0.0.1"):
        self._lock = threading.Condition()
        self._jpeg: bytes | None = None
        self._seq = 0
        self._closed = False
        server = self

        class Handler(BaseHTTPRequestHandler):
            protocol_version = "HTTP/1.1"

            def log_message(self, *args):  # quiet by design
                pass

            def do_GET(self):
                if self.path in ("/", "/index.html"):
                    self.send_response(200)
                    self.send_header("Content-Type", "text/html")
                    self.send_header("Content-Length", str(len(_INDEX_HTML)))
                    self.end_headers()
                    self.wfile.write(_INDEX_HTML)
                    return
                if self.path != "/stream":
                    self.send_error(404)
                    return
                self.send_response(200)
                self.send_header(
                    "Content-Type",
                    f"multipart/x-mixed-replace; boundary={_BOUNDARY}")
                self.end_headers()
                last = -1
                try:
                    while True:
                        jpeg, last = server._wait_frame(last)
                        if jpeg is None:
                            return
                        self.wfile.write(
                            f"--{_BOUNDARY}\r\n"
                            f"Content-Type: image/jpeg\r\n"
                            f"Content-Length: {len(jpeg)}\r\n\r\n"
                            .encode("ascii"))
                        self.wfile.write(jpeg)
                        self.wfile.write(b"\r\n")
                except (BrokenPipeError, ConnectionResetError):
                    return

        self._httpd = ThreadingHTTPServer((host, port), Handler)
        self._httpd.daemon_threads = True
        self._thread = threading.Thread(
            target=self._httpd.serve_forever, daemon=True)
        self._thread.start()

    @property
    def port(self) -> int:
        return self._httpd.server_address[1]

    def publish(self, raster) -> None:
        """Replace the streamed frame; older unsent frames are dropped."""
        buf = BytesIO()
        Image.fromarray(raster).save(buf, format="JPEG", quality=85)
        with self._lock:
            self._jpeg = buf.getvalue()
            self._seq += 1
            self._lock.notify_all()

    def _wait_frame(self, seen: int):
        with self._lock:
            while not self._closed and self._seq == seen:
                self._lock.wait(timeout=1.0)
            if self._closed:
                return None, seen
            return self._jpeg, self._seq

    def close(self):
        with self._lock:
            self._closed = True
            self._lock.notify_all()
        self._httpd.shutdown()
        self._httpd.server_close()
