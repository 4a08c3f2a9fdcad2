"""Command line front end.

Two subcommands:

* ``run``: virtualize one or more Thing Descriptions and serve them on an
  embedded HTTP servient until interrupted.
* ``probe``: exercise every affordance of a served Thing and print a
  PASS/FAIL line for each.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import signal
import sys
import time

import requests

from .config import LOG_LEVELS, EventMode, build_config, load_config_file
from .errors import BindFailure, DuplicateThingName, Unsatisfiable, WotSimError
from .generator import RandomSource, generate
from .model import DataSchema, is_present
from .runtime import VirtualThing, url_segment
from .server import serve
from .td import parse_td
from .validator import json_equal, validate

logger = logging.getLogger(__name__)

HTTP_TIMEOUT = 10.0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wotsim",
        description="Virtualize Web of Things devices from their Thing Descriptions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser(
        "run", help="serve one or more Thing Descriptions over HTTP"
    )
    run_p.add_argument("td_files", nargs="+", metavar="TD_FILE",
                       help="Thing Description JSON files to virtualize")
    run_p.add_argument("--address", help="bind address (default 127.0.0.1)")
    run_p.add_argument("--port", type=int, help="bind port (default 8080)")
    run_p.add_argument("--event-mode", metavar="none|random|fixed:SECONDS",
                       help="default emission mode for all events (default random)")
    run_p.add_argument("--event-interval", action="append", default=[],
                       metavar="EVENT=SECONDS",
                       help="fixed interval for one event; may be repeated")
    run_p.add_argument("--seed", type=int, help="seed for reproducible values")
    run_p.add_argument("--config", metavar="FILE", help="JSON settings file")
    run_p.add_argument("--log-level", choices=sorted(LOG_LEVELS))

    probe_p = sub.add_parser(
        "probe", help="exercise every affordance of a Thing and report PASS/FAIL"
    )
    probe_p.add_argument("target", metavar="URL_OR_FILE",
                         help="Thing Description URL or local file")
    probe_p.add_argument("--duration", type=float, default=10.0,
                         help="seconds to watch each event stream (default 10)")
    probe_p.add_argument("--seed", type=int, help="seed for generated test values")
    probe_p.add_argument("--json", action="store_true", dest="as_json",
                         help="emit the report as JSON instead of a table")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "run":
        return cmd_run(args)
    return cmd_probe(args)


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return 1


# --- run ----------------------------------------------------------------


def _parse_interval_flags(entries: list[str]) -> dict[str, EventMode]:
    overrides: dict[str, EventMode] = {}
    for entry in entries:
        name, sep, seconds_text = entry.rpartition("=")
        if not sep or not name:
            raise ValueError(f"--event-interval expects EVENT=SECONDS, got {entry!r}")
        if name in overrides:
            raise ValueError(f"duplicate --event-interval for event {name!r}")
        try:
            seconds = float(seconds_text)
        except ValueError:
            raise ValueError(
                f"--event-interval {entry!r}: {seconds_text!r} is not a number"
            ) from None
        overrides[name] = EventMode.fixed(seconds)
    return overrides


def cmd_run(args: argparse.Namespace) -> int:
    try:
        file_settings = load_config_file(args.config) if args.config else None
        flag_settings = {
            "address": args.address,
            "port": args.port,
            "eventMode": EventMode.parse(args.event_mode) if args.event_mode else None,
            "eventIntervals": _parse_interval_flags(args.event_interval) or None,
            "seed": args.seed,
            "logLevel": args.log_level,
        }
        config = build_config(file_settings, flag_settings)
    except ValueError as exc:
        return _fail(str(exc))

    logging.basicConfig(
        level=LOG_LEVELS[config.log_level],
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    things = []
    for path in args.td_files:
        try:
            with open(path, "rb") as handle:
                td = parse_td(handle.read())
        except OSError as exc:
            return _fail(f"cannot read {path}: {exc}")
        except WotSimError as exc:
            return _fail(f"{path}: {exc}")
        things.append(VirtualThing(td, config))

    try:
        handle = serve(things, config)
    except (DuplicateThingName, BindFailure) as exc:
        return _fail(str(exc))

    for thing in things:
        _log_routes(thing)

    try:
        signal.signal(signal.SIGTERM, _raise_interrupt)
    except ValueError:
        pass  # not the main thread; SIGINT handling still applies
    try:
        while True:
            time.sleep(3600)
    except KeyboardInterrupt:
        logger.info("shutting down")
    finally:
        handle.stop()
    return 0


def _raise_interrupt(signum, frame):
    raise KeyboardInterrupt


def _log_routes(thing: VirtualThing) -> None:
    root = f"{thing.base_url}/{thing.url_segment}"
    td = thing.original_td
    logger.info("serving %s at %s", thing.title, root)
    logger.info("  GET  %s  (Thing Description)", root)
    if td.properties:
        logger.info("  GET  %s/properties  (all property values)", root)
    for name, prop in td.properties.items():
        verbs = "GET" if prop.read_only else "GET,PUT"
        logger.info("  %s  %s/properties/%s", verbs, root, url_segment(name))
    for name in td.actions:
        logger.info("  POST  %s/actions/%s", root, url_segment(name))
    for name in td.events:
        logger.info("  GET  %s/events/%s  (SSE)", root, url_segment(name))


# --- probe --------------------------------------------------------------


class ProbeError(Exception):
    """The target could not be fetched or its TD could not be parsed."""


@dataclasses.dataclass
class ProbeCheck:
    affordance: str
    kind: str
    result: str  # "PASS" | "FAIL"
    detail: str

    @property
    def passed(self) -> bool:
        return self.result == "PASS"


def cmd_probe(args: argparse.Namespace) -> int:
    logging.basicConfig(level=logging.WARNING)
    try:
        checks = probe_target(args.target, duration=args.duration, seed=args.seed)
    except ProbeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    if args.as_json:
        print(json.dumps([dataclasses.asdict(c) for c in checks], indent=2))
    else:
        width = max((len(c.affordance) for c in checks), default=0)
        for check in checks:
            print(f"{check.result:4} {check.kind:8} {check.affordance:{width}}  {check.detail}")
        failed = sum(1 for c in checks if not c.passed)
        print(f"{len(checks)} check(s): {len(checks) - failed} passed, {failed} failed")
    return 0 if all(c.passed for c in checks) else 1


def probe_target(target: str, *, duration: float = 10.0,
                 seed: int | None = None) -> list[ProbeCheck]:
    """Fetch a TD (HTTP URL or local file) and exercise every affordance."""
    session = requests.Session()
    rng = RandomSource(seed)
    if target.startswith(("http://", "https://")):
        try:
            response = session.get(target, timeout=HTTP_TIMEOUT)
        except requests.RequestException as exc:
            raise ProbeError(f"cannot reach {target}: {exc}") from exc
        if response.status_code != 200:
            raise ProbeError(f"{target} answered {response.status_code}, expected 200")
        try:
            td = parse_td(response.content)
        except WotSimError as exc:
            raise ProbeError(f"{target}: not a usable Thing Description: {exc}") from exc
        fallback_base = target.rstrip("/")
    else:
        try:
            with open(target, "rb") as handle:
                raw = handle.read()
        except OSError as exc:
            raise ProbeError(str(exc)) from exc
        try:
            td = parse_td(raw)
        except WotSimError as exc:
            raise ProbeError(f"{target}: not a usable Thing Description: {exc}") from exc
        fallback_base = None

    base = td.base if is_present(td.base) and isinstance(td.base, str) else fallback_base

    checks: list[ProbeCheck] = []
    for name, prop in td.properties.items():
        checks.append(_check_property(session, name, prop, base, rng))
    for name, action in td.actions.items():
        checks.append(_check_action(session, name, action, base, rng))
    for name, event in td.events.items():
        checks.append(_check_event(session, name, event, base, duration))
    return checks


def _form_url(forms, base) -> str | None:
    for form in forms:
        href = form.href
        if "://" in href:
            return href
        if base:
            return base.rstrip("/") + (href if href.startswith("/") else "/" + href)
    return None


def _violation_summary(result) -> str:
    parts = [f"{v.path or '/'}: {v.detail}" for v in result.violations[:3]]
    if len(result.violations) > 3:
        parts.append(f"(+{len(result.violations) - 3} more)")
    return "; ".join(parts)


def _check_property(session, name, prop, base, rng) -> ProbeCheck:
    url = _form_url(prop.forms, base)
    if url is None:
        return ProbeCheck(name, "property", "FAIL", "no usable form URL")
    try:
        response = session.get(url, timeout=HTTP_TIMEOUT)
    except requests.RequestException as exc:
        return ProbeCheck(name, "property", "FAIL", f"GET failed: {exc}")
    if response.status_code != 200:
        return ProbeCheck(name, "property", "FAIL",
                          f"GET answered {response.status_code}")
    try:
        value = json.loads(response.content)
    except ValueError:
        return ProbeCheck(name, "property", "FAIL", "response body is not JSON")
    outcome = validate(prop.data_schema, value)
    if not outcome.valid:
        return ProbeCheck(name, "property", "FAIL",
                          f"read value violates its schema: {_violation_summary(outcome)}")
    notes = ["read conforms"]
    if not prop.read_only:
        note = _check_property_write(session, url, prop, rng)
        if note.startswith("FAIL:"):
            return ProbeCheck(name, "property", "FAIL", note[5:].strip())
        notes.append(note)
    return ProbeCheck(name, "property", "PASS", "; ".join(notes))


def _check_property_write(session, url, prop, rng) -> str:
    try:
        value = generate(prop.data_schema, rng)
    except Unsatisfiable:
        return "write skipped: no conforming value could be built"
    try:
        response = session.put(url, json=value, timeout=HTTP_TIMEOUT)
    except requests.RequestException as exc:
        return f"FAIL: PUT failed: {exc}"
    if response.status_code == 405:
        return "write rejected as read-only (405)"
    if response.status_code not in (200, 204):
        return f"FAIL: PUT answered {response.status_code}"
    try:
        back = session.get(url, timeout=HTTP_TIMEOUT)
        stored = json.loads(back.content)
    except (requests.RequestException, ValueError) as exc:
        return f"FAIL: readback after write failed: {exc}"
    if not json_equal(stored, value):
        return "FAIL: written value did not persist"
    return "write persisted"


def _check_action(session, name, action, base, rng) -> ProbeCheck:
    url = _form_url(action.forms, base)
    if url is None:
        return ProbeCheck(name, "action", "FAIL", "no usable form URL")
    if action.input is not None:
        try:
            payload = generate(action.input, rng)
        except Unsatisfiable:
            return ProbeCheck(name, "action", "FAIL",
                              "cannot build a conforming input value")
        kwargs = {"json": payload}
    else:
        kwargs = {}
    try:
        response = session.post(url, timeout=HTTP_TIMEOUT, **kwargs)
    except requests.RequestException as exc:
        return ProbeCheck(name, "action", "FAIL", f"POST failed: {exc}")
    if not 200 <= response.status_code < 300:
        return ProbeCheck(name, "action", "FAIL",
                          f"POST answered {response.status_code}")
    if action.output is not None:
        try:
            output = json.loads(response.content)
        except ValueError:
            return ProbeCheck(name, "action", "FAIL", "output body is not JSON")
        outcome = validate(action.output, output)
        if not outcome.valid:
            return ProbeCheck(name, "action", "FAIL",
                              f"output violates its schema: {_violation_summary(outcome)}")
        return ProbeCheck(name, "action", "PASS", "invoked, output conforms")
    return ProbeCheck(name, "action", "PASS",
                      f"invoked ({response.status_code})")


def _check_event(session, name, event, base, duration) -> ProbeCheck:
    url = _form_url(event.forms, base)
    if url is None:
        return ProbeCheck(name, "event", "FAIL", "no usable form URL")
    schema = event.data if event.data is not None else DataSchema()
    read_timeout = max(duration, 0.5)
    try:
        response = session.get(
            url,
            headers={"Accept": "text/event-stream"},
            stream=True,
            timeout=(HTTP_TIMEOUT, read_timeout),
        )
    except requests.RequestException as exc:
        return ProbeCheck(name, "event", "FAIL", f"subscribe failed: {exc}")
    if response.status_code != 200:
        response.close()
        return ProbeCheck(name, "event", "FAIL",
                          f"subscribe answered {response.status_code}")
    received = 0
    problem = None
    deadline = time.monotonic() + duration
    try:
        for raw in response.iter_lines():
            if raw:
                line = raw.decode("utf-8")
                if line.startswith("data:"):
                    try:
                        payload = json.loads(line[len("data:"):].strip())
                    except ValueError:
                        problem = "event payload is not JSON"
                        break
                    outcome = validate(schema, payload)
                    if not outcome.valid:
                        problem = (f"payload violates its schema: "
                                   f"{_violation_summary(outcome)}")
                        break
                    received += 1
            if time.monotonic() >= deadline:
                break
    except requests.RequestException:
        pass  # stream closed or idle past the window; whatever arrived counts
    finally:
        response.close()
    if problem:
        return ProbeCheck(name, "event", "FAIL", problem)
    if received == 0:
        return ProbeCheck(name, "event", "PASS",
                          "no events within the window (vacuously conforming)")
    return ProbeCheck(name, "event", "PASS",
                      f"{received} event(s) observed, all conforming")


if __name__ == "__main__":
    sys.exit(main())
