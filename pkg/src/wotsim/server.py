"""HTTP binding: one servient serving N virtual Things with JSON payloads.

Routes follow the convention ``/<thing>/{properties|actions|events}/<name>``;
the rewritten TD of each Thing is served at ``/<thing>``. Event subscription
uses Server-Sent Events: each emission is one ``data: <compact JSON>``
message. JSON is the only payload format on this binding.
"""

from __future__ import annotations

import json
import logging
import queue
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import unquote, urlsplit

from .config import ServientConfig
from .errors import (
    BindFailure,
    DuplicateThingName,
    InvalidInput,
    InvalidValue,
    MalformedJson,
    MissingInput,
    ReadOnlyProperty,
    UnknownAction,
    UnknownEvent,
    UnknownProperty,
)
from .model import is_present
from .runtime import VirtualThing
from .td import _loads, serialize_td

logger = logging.getLogger(__name__)

TD_CONTENT_TYPE = "application/td+json"
SSE_POLL_SECONDS = 0.25


class _ServientServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, address: tuple[str, int], things: dict[str, VirtualThing]):
        self.things = things  # keyed by (decoded) Thing title
        self.stopping = threading.Event()
        super().__init__(address, _RequestHandler)


class _RequestHandler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    server_version = "wotsim/0.1"
    server: _ServientServer

    def log_message(self, fmt, *args):
        logger.debug("%s %s", self.address_string(), fmt % args)

    # --- response helpers ----------------------------------------------

    def _respond_body(self, status: int, body: bytes, content_type: str,
                      extra_headers: dict | None = None) -> None:
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        for name, value in (extra_headers or {}).items():
            self.send_header(name, value)
        self.send_header("Connection", "close")
        self.end_headers()
        self.wfile.write(body)

    def _respond_json(self, status: int, payload, content_type="application/json") -> None:
        body = json.dumps(payload, ensure_ascii=False, allow_nan=False).encode("utf-8")
        self._respond_body(status, body, content_type)

    def _respond_no_content(self) -> None:
        self.send_response(204)
        self.send_header("Connection", "close")
        self.end_headers()

    def _respond_error(self, status: int, message: str, violations=None,
                       extra_headers: dict | None = None) -> None:
        doc: dict = {"error": message}
        if violations is not None:
            doc["violations"] = [v.as_dict() for v in violations]
        body = json.dumps(doc, ensure_ascii=False).encode("utf-8")
        self._respond_body(status, body, "application/json", extra_headers)

    def _not_found(self) -> None:
        self._respond_error(404, "not found")

    # --- request plumbing ----------------------------------------------

    def _segments(self) -> list[str]:
        path = urlsplit(self.path).path
        return [unquote(part) for part in path.split("/") if part]

    def _thing(self, segment: str) -> VirtualThing | None:
        return self.server.things.get(segment)

    def _read_body(self) -> bytes:
        length = int(self.headers.get("Content-Length") or 0)
        return self.rfile.read(length) if length > 0 else b""

    def _parse_json_body(self):
        return _loads(self._read_body().decode("utf-8"))

    def _wrong_media_type(self) -> bool:
        """True when an explicit Content-Type is anything but JSON."""
        content_type = self.headers.get("Content-Type")
        if content_type is None:
            return False
        media = content_type.split(";", 1)[0].strip().lower()
        return media != "application/json"

    # --- verbs ----------------------------------------------------------

    def do_GET(self):
        try:
            self._handle_get()
        except (BrokenPipeError, ConnectionResetError):
            pass
        except Exception as exc:  # never let a handler thread die silently
            logger.exception("GET %s failed", self.path)
            self._respond_error(500, str(exc))

    def do_PUT(self):
        try:
            self._handle_put()
        except (BrokenPipeError, ConnectionResetError):
            pass
        except Exception as exc:
            logger.exception("PUT %s failed", self.path)
            self._respond_error(500, str(exc))

    def do_POST(self):
        try:
            self._handle_post()
        except (BrokenPipeError, ConnectionResetError):
            pass
        except Exception as exc:
            logger.exception("POST %s failed", self.path)
            self._respond_error(500, str(exc))

    def _handle_get(self):
        segments = self._segments()
        if len(segments) == 1:
            thing = self._thing(segments[0])
            if thing is None:
                return self._not_found()
            body = serialize_td(thing.exposed_td, indent=2).encode("utf-8")
            return self._respond_body(200, body, TD_CONTENT_TYPE)
        if len(segments) == 2 and segments[1] == "properties":
            thing = self._thing(segments[0])
            if thing is None:
                return self._not_found()
            return self._respond_json(200, thing.read_all_properties())
        if len(segments) == 3 and segments[1] == "properties":
            thing = self._thing(segments[0])
            if thing is None:
                return self._not_found()
            try:
                value = thing.read_property(segments[2])
            except UnknownProperty as exc:
                return self._respond_error(404, str(exc))
            return self._respond_json(200, value)
        if len(segments) == 3 and segments[1] == "events":
            return self._handle_event_stream(segments[0], segments[2])
        return self._not_found()

    def _handle_put(self):
        segments = self._segments()
        if len(segments) != 3 or segments[1] != "properties":
            return self._not_found()
        thing = self._thing(segments[0])
        if thing is None:
            return self._not_found()
        if self._wrong_media_type():
            return self._respond_error(415, "request body must be application/json")
        try:
            value = self._parse_json_body()
        except (MalformedJson, UnicodeDecodeError) as exc:
            return self._respond_error(400, f"malformed JSON body: {exc}")
        try:
            thing.write_property(segments[2], value)
        except UnknownProperty as exc:
            return self._respond_error(404, str(exc))
        except ReadOnlyProperty as exc:
            return self._respond_error(405, str(exc), extra_headers={"Allow": "GET"})
        except InvalidValue as exc:
            return self._respond_error(400, str(exc), violations=exc.violations)
        return self._respond_no_content()

    def _handle_post(self):
        segments = self._segments()
        if len(segments) != 3 or segments[1] != "actions":
            return self._not_found()
        thing = self._thing(segments[0])
        if thing is None:
            return self._not_found()
        if self._wrong_media_type():
            return self._respond_error(415, "request body must be application/json")
        body = self._read_body()
        if body.strip():
            try:
                input_value = _loads(body.decode("utf-8"))
            except (MalformedJson, UnicodeDecodeError) as exc:
                return self._respond_error(400, f"malformed JSON body: {exc}")
            have_input = True
        else:
            have_input = False
        try:
            if have_input:
                output = thing.invoke_action(segments[2], input_value)
            else:
                output = thing.invoke_action(segments[2])
        except UnknownAction as exc:
            return self._respond_error(404, str(exc))
        except (MissingInput, InvalidInput) as exc:
            return self._respond_error(400, str(exc), violations=exc.violations)
        if is_present(output):
            return self._respond_json(200, output)
        return self._respond_no_content()

    # --- SSE -------------------------------------------------------------

    def _handle_event_stream(self, thing_segment: str, event_name: str):
        thing = self._thing(thing_segment)
        if thing is None:
            return self._not_found()
        accept = self.headers.get("Accept")
        if accept is not None and "text/event-stream" not in accept and "*/*" not in accept:
            return self._respond_error(406, "event streams are served as text/event-stream")
        try:
            subscription = thing.subscribe_event(event_name)
        except UnknownEvent as exc:
            return self._respond_error(404, str(exc))
        self.send_response(200)
        self.send_header("Content-Type", "text/event-stream")
        self.send_header("Cache-Control", "no-cache")
        # Chunked framing so clients see each message as soon as it is sent;
        # a plain read-to-close body would sit in their buffers.
        self.send_header("Transfer-Encoding", "chunked")
        self.send_header("Connection", "close")
        self.end_headers()
        try:
            while not self.server.stopping.is_set():
                try:
                    payload = subscription.get(timeout=SSE_POLL_SECONDS)
                except queue.Empty:
                    continue
                data = json.dumps(payload, separators=(",", ":"), allow_nan=False)
                self._write_chunk(f"data: {data}\n\n".encode("utf-8"))
            self._write_chunk(b"")
        except (BrokenPipeError, ConnectionResetError):
            pass
        finally:
            subscription.close()

    def _write_chunk(self, data: bytes) -> None:
        self.wfile.write(f"{len(data):X}\r\n".encode("ascii") + data + b"\r\n")
        self.wfile.flush()


class ServerHandle:
    """A running servient; supports graceful shutdown."""

    def __init__(self, server: _ServientServer, things: list[VirtualThing],
                 config: ServientConfig):
        self._server = server
        self.things = things
        self.config = config
        self._thread = threading.Thread(
            target=server.serve_forever, daemon=True, name="wotsim-http"
        )

    def start(self) -> None:
        for thing in self.things:
            thing.start_events()
        self._thread.start()
        logger.info("servient listening on %s", self.base_url)

    @property
    def address(self) -> str:
        return self.config.address

    @property
    def port(self) -> int:
        return self._server.server_address[1]

    @property
    def base_url(self) -> str:
        return f"http://{self.address}:{self.port}"

    def stop(self) -> None:
        """Stop schedulers, close event streams, finish in-flight requests."""
        for thing in self.things:
            thing.stop_events()
        self._server.stopping.set()
        self._server.shutdown()
        self._server.server_close()
        self._thread.join(timeout=5.0)


def serve(things: list[VirtualThing], config: ServientConfig) -> ServerHandle:
    """Bind the configured address/port and start serving the Things.

    Raises DuplicateThingName when two Things collide on a URL segment and
    BindFailure when the address/port cannot be bound.
    """
    registry: dict[str, VirtualThing] = {}
    for thing in things:
        if thing.title in registry:
            raise DuplicateThingName(
                f"a Thing is already attached at /{thing.url_segment}"
            )
        registry[thing.title] = thing
    try:
        server = _ServientServer((config.address, config.port), registry)
    except OSError as exc:
        raise BindFailure(f"cannot bind {config.address}:{config.port}: {exc}") from exc
    handle = ServerHandle(server, things, config)
    handle.start()
    return handle
