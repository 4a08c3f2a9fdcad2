"""The virtual Thing itself: property state, action dispatch, event emission,
and the rewritten TD it presents to consumers.

One VirtualThing may be driven by concurrent request handlers; a single
instance lock makes property reads/writes linearizable and keeps the
request-facing RandomSource single-owner. Event scheduling runs on its own
threads with per-event derived RandomSources, so background emissions never
perturb the request-visible draw sequence.
"""

from __future__ import annotations

import copy
import dataclasses
import logging
import queue
import threading
from urllib.parse import quote

from .config import RANDOM_INTERVAL_RANGE, ServientConfig
from .errors import (
    InvalidInput,
    InvalidValue,
    MissingInput,
    ReadOnlyProperty,
    UnknownAction,
    UnknownEvent,
    UnknownProperty,
)
from .generator import RandomSource, generate
from .model import MISSING, Form, Json, ThingDescription, is_present
from .validator import Violation, validate

logger = logging.getLogger(__name__)


def url_segment(name: str) -> str:
    """Percent-encoded URL path segment for a Thing title or affordance name."""
    return quote(name, safe="")


def rewrite_td(td: ThingDescription, base_url: str) -> ThingDescription:
    """Copy of the TD pointing at this servient.

    Every affordance's forms list is replaced by the single HTTP form
    ``<base_url>/<thing>/{properties|actions|events}/<name>`` and the "base"
    member is dropped; every other member is preserved unchanged. Idempotent.
    """
    thing_seg = url_segment(td.title)

    def relocate(affordances: dict, kind: str) -> dict:
        rewritten = {}
        for name, aff in affordances.items():
            href = f"{base_url}/{thing_seg}/{kind}/{url_segment(name)}"
            raw = copy.deepcopy(aff.raw)
            raw["forms"] = [{"href": href}]
            rewritten[name] = dataclasses.replace(aff, forms=(Form(href=href),), raw=raw)
        return rewritten

    return dataclasses.replace(
        td,
        base=MISSING,
        properties=relocate(td.properties, "properties"),
        actions=relocate(td.actions, "actions"),
        events=relocate(td.events, "events"),
    )


class RealClock:
    """Wall-clock waiting, interruptible through a stop event."""

    def __init__(self, stop: threading.Event):
        self._stop = stop

    def wait(self, seconds: float) -> bool:
        """Sleep for the given duration; True means "stop the loop now"."""
        return self._stop.wait(seconds)


class EventSubscription:
    """Receives every emission of one event between subscribe and close."""

    def __init__(self, thing: "VirtualThing", event_name: str):
        self._thing = thing
        self.event_name = event_name
        self._queue: queue.Queue = queue.Queue()
        self.closed = False

    def get(self, timeout: float | None = None) -> Json:
        """Next payload; raises queue.Empty when the timeout elapses."""
        return self._queue.get(timeout=timeout)

    def close(self) -> None:
        self._thing.unsubscribe(self)
        self.closed = True


class VirtualThing:
    """A live simulated Thing built from a parsed Thing Description."""

    def __init__(self, td: ThingDescription, config: ServientConfig):
        self.original_td = td
        self.config = config
        self.base_url = config.base_url
        self.title = td.title
        self.url_segment = url_segment(td.title)
        self.exposed_td = rewrite_td(td, self.base_url)
        self._lock = threading.RLock()
        self._store: dict[str, Json] = {}  # written values only; absent = never written
        self._subscribers: dict[str, set[EventSubscription]] = {
            name: set() for name in td.events
        }
        root = RandomSource(config.seed)
        self.rng = root.derive(f"thing:{td.title}")
        self._event_rngs = {
            name: root.derive(f"event:{td.title}:{name}") for name in td.events
        }
        self._stop = threading.Event()
        self._threads: list[threading.Thread] = []

    # --- properties -----------------------------------------------------

    def read_property(self, name: str) -> Json:
        """Written value if one exists, else a fresh value from the schema."""
        with self._lock:
            aff = self.original_td.properties.get(name)
            if aff is None:
                raise UnknownProperty(f"no property named {name!r}")
            if name in self._store:
                return copy.deepcopy(self._store[name])
            return generate(aff.data_schema, self.rng)

    def write_property(self, name: str, value: Json) -> None:
        with self._lock:
            aff = self.original_td.properties.get(name)
            if aff is None:
                raise UnknownProperty(f"no property named {name!r}")
            if aff.read_only:
                raise ReadOnlyProperty(f"property {name!r} is read-only")
            result = validate(aff.data_schema, value)
            if not result.valid:
                raise InvalidValue(
                    f"value does not conform to the schema of property {name!r}",
                    result.violations,
                )
            self._store[name] = copy.deepcopy(value)

    def read_all_properties(self) -> dict[str, Json]:
        return {name: self.read_property(name) for name in self.original_td.properties}

    # --- actions --------------------------------------------------------

    def invoke_action(self, name: str, input_value: Json = MISSING) -> Json:
        """Validate the input, then produce an output from the output schema.

        Returns MISSING when the action declares no output schema. Actions
        without an input schema accept and ignore any input.
        """
        with self._lock:
            aff = self.original_td.actions.get(name)
            if aff is None:
                raise UnknownAction(f"no action named {name!r}")
            if aff.input is not None:
                if not is_present(input_value):
                    raise MissingInput(
                        f"action {name!r} requires an input",
                        [Violation("", "required", f"action {name!r} requires an input")],
                    )
                result = validate(aff.input, input_value)
                if not result.valid:
                    raise InvalidInput(
                        f"input does not conform to the schema of action {name!r}",
                        result.violations,
                    )
            if aff.output is None:
                return MISSING
            return generate(aff.output, self.rng)

    # --- events ---------------------------------------------------------

    def subscribe_event(self, name: str) -> EventSubscription:
        with self._lock:
            if name not in self.original_td.events:
                raise UnknownEvent(f"no event named {name!r}")
            subscription = EventSubscription(self, name)
            self._subscribers[name].add(subscription)
            return subscription

    def unsubscribe(self, subscription: EventSubscription) -> None:
        with self._lock:
            self._subscribers[subscription.event_name].discard(subscription)

    def emit_event(self, name: str) -> Json:
        """One emission: generate a payload and fan it out to all subscribers."""
        with self._lock:
            aff = self.original_td.events.get(name)
            if aff is None:
                raise UnknownEvent(f"no event named {name!r}")
            if aff.data is not None:
                payload = generate(aff.data, self._event_rngs[name])
            else:
                payload = None
            for subscription in self._subscribers[name]:
                subscription._queue.put(copy.deepcopy(payload))
            return payload

    def run_event_loop(self, name: str, clock) -> None:
        """Emit the event forever, pacing with the clock, until the clock's
        wait reports a stop. The random interval is re-drawn per emission."""
        mode = self.config.mode_for(name)
        if mode.kind == "none":
            return
        rng = self._event_rngs[name]
        while True:
            if mode.kind == "fixed":
                interval = mode.seconds
            else:
                interval = rng.uniform(*RANDOM_INTERVAL_RANGE)
            if clock.wait(interval):
                return
            self.emit_event(name)

    def start_events(self) -> None:
        """Arm one scheduler thread per event whose mode is not none."""
        self._stop.clear()
        for name in self.original_td.events:
            if self.config.mode_for(name).kind == "none":
                continue
            thread = threading.Thread(
                target=self.run_event_loop,
                args=(name, RealClock(self._stop)),
                daemon=True,
                name=f"wotsim-events-{self.title}-{name}",
            )
            thread.start()
            self._threads.append(thread)
        if self._threads:
            logger.debug("%s: %d event scheduler(s) armed", self.title, len(self._threads))

    def stop_events(self) -> None:
        self._stop.set()
        for thread in self._threads:
            thread.join(timeout=2.0)
        self._threads.clear()
