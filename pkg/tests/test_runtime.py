import json
import queue

import pytest

from wotsim import (
    EventMode,
    InvalidValue,
    MISSING,
    MissingInput,
    InvalidInput,
    ReadOnlyProperty,
    ServientConfig,
    UnknownAction,
    UnknownEvent,
    UnknownProperty,
    VirtualThing,
    is_present,
    parse_td,
    rewrite_td,
    serialize_td,
    url_segment,
    validate,
)

from conftest import CountingClock, HorizonClock, fixture_text
from oracles import json_diff

BASE = "http://127.0.0.1:9099"


def make_thing(fixture, **config_kw) -> VirtualThing:
    config_kw.setdefault("port", 9099)
    config_kw.setdefault("event_mode", EventMode.none())
    return VirtualThing(parse_td(fixture_text(fixture)), ServientConfig(**config_kw))


class TestRewriteTd:
    def test_coffee_machine_hrefs(self, coffee_td):
        rewritten = rewrite_td(coffee_td, BASE)
        assert rewritten.properties["state"].forms[0].href == (
            f"{BASE}/Coffee-Machine/properties/state"
        )
        assert rewritten.actions["brew"].forms[0].href == (
            f"{BASE}/Coffee-Machine/actions/brew"
        )
        assert rewritten.events["error"].forms[0].href == (
            f"{BASE}/Coffee-Machine/events/error"
        )
        assert not is_present(rewritten.base)

    def test_everything_else_preserved(self, coffee_td, coffee_text):
        rewritten = rewrite_td(coffee_td, BASE)
        differing = json_diff(json.loads(coffee_text),
                              json.loads(serialize_td(rewritten)))
        assert differing
        for path in differing:
            assert path.endswith("/forms") or "/forms/" in path or path == "/base", path

    def test_idempotent(self, coffee_td):
        once = rewrite_td(coffee_td, BASE)
        twice = rewrite_td(once, BASE)
        assert once == twice

    def test_title_and_names_are_percent_encoded(self):
        td = parse_td(json.dumps({
            "title": "Sensor Hub",
            "properties": {"läge/1": {"type": "boolean",
                                      "forms": [{"href": "/x"}]}},
        }))
        rewritten = rewrite_td(td, BASE)
        href = rewritten.properties["läge/1"].forms[0].href
        assert href == f"{BASE}/Sensor%20Hub/properties/l%C3%A4ge%2F1"

    def test_url_segment(self):
        assert url_segment("Coffee-Machine") == "Coffee-Machine"
        assert url_segment("a b/c") == "a%20b%2Fc"


class TestProperties:
    def test_read_generates_enum_members(self):
        thing = make_thing("coffee-machine.td.json", seed=5)
        values = {thing.read_property("state") for _ in range(100)}
        assert values <= {"Ready", "Brewing", "Error"}
        assert len(values) >= 2

    def test_unknown_property(self):
        thing = make_thing("coffee-machine.td.json")
        with pytest.raises(UnknownProperty):
            thing.read_property("temperature")

    def test_write_persists_until_next_write(self):
        thing = make_thing("coffee-machine.td.json", seed=1)
        thing.write_property("state", "Ready")
        assert all(thing.read_property("state") == "Ready" for _ in range(10))
        thing.write_property("state", "Error")
        assert thing.read_property("state") == "Error"

    def test_written_value_is_isolated_from_caller(self):
        thing = make_thing("sensor-hub.td.json", seed=1)
        value = {"ts": 5, "values": [1.5]}
        thing.write_property("reading", value)
        value["ts"] = 99
        assert thing.read_property("reading")["ts"] == 5

    def test_invalid_write_reports_violations(self):
        thing = make_thing("coffee-machine.td.json")
        with pytest.raises(InvalidValue) as err:
            thing.write_property("state", "Espresso")
        assert err.value.violations
        assert err.value.violations[0].rule == "enum"
        with pytest.raises(InvalidValue):
            thing.write_property("state", 3)

    def test_read_only_rejected(self):
        thing = make_thing("thermostat.td.json")
        with pytest.raises(ReadOnlyProperty):
            thing.write_property("temperature", 21.0)

    def test_read_all_covers_every_property(self):
        thing = make_thing("thermostat.td.json", seed=2)
        snapshot = thing.read_all_properties()
        assert set(snapshot) == {"temperature", "setpoint", "mode"}
        schema = thing.original_td.properties["temperature"].data_schema
        assert validate(schema, snapshot["temperature"]).valid


class TestActions:
    def test_invoke_without_output_schema(self):
        thing = make_thing("coffee-machine.td.json")
        assert thing.invoke_action("brew", "espresso") is MISSING

    def test_invoke_with_output_schema(self):
        thing = make_thing("dice-box.td.json", seed=3)
        for _ in range(100):
            value = thing.invoke_action("roll")
            assert isinstance(value, int) and 1 <= value <= 6

    def test_invalid_input(self):
        thing = make_thing("coffee-machine.td.json")
        with pytest.raises(InvalidInput) as err:
            thing.invoke_action("brew", "latte")
        assert any(v.rule == "enum" for v in err.value.violations)

    def test_missing_input(self):
        thing = make_thing("coffee-machine.td.json")
        with pytest.raises(MissingInput) as err:
            thing.invoke_action("brew")
        assert err.value.violations

    def test_unknown_action(self):
        thing = make_thing("coffee-machine.td.json")
        with pytest.raises(UnknownAction):
            thing.invoke_action("grind")

    def test_no_input_schema_ignores_input(self):
        thing = make_thing("sensor-hub.td.json")
        assert thing.invoke_action("reset") is MISSING
        assert thing.invoke_action("reset", {"anything": True}) is MISSING


class TestEvents:
    def test_subscribe_receives_emissions(self):
        thing = make_thing("coffee-machine.td.json", seed=4)
        sub = thing.subscribe_event("error")
        payload = thing.emit_event("error")
        assert isinstance(payload, str)
        assert sub.get(timeout=1) == payload

    def test_fan_out_identical_payloads(self):
        thing = make_thing("coffee-machine.td.json", seed=4)
        first, second = thing.subscribe_event("error"), thing.subscribe_event("error")
        thing.emit_event("error")
        assert first.get(timeout=1) == second.get(timeout=1)

    def test_unsubscribed_handle_stays_silent(self):
        thing = make_thing("coffee-machine.td.json", seed=4)
        sub = thing.subscribe_event("error")
        sub.close()
        thing.emit_event("error")
        with pytest.raises(queue.Empty):
            sub.get(timeout=0.05)

    def test_no_replay_before_subscription(self):
        thing = make_thing("coffee-machine.td.json", seed=4)
        thing.emit_event("error")
        sub = thing.subscribe_event("error")
        with pytest.raises(queue.Empty):
            sub.get(timeout=0.05)

    def test_event_without_data_schema_sends_null(self):
        thing = make_thing("sensor-hub.td.json")
        sub = thing.subscribe_event("heartbeat")
        assert thing.emit_event("heartbeat") is None
        assert sub.get(timeout=1) is None

    def test_unknown_event(self):
        thing = make_thing("coffee-machine.td.json")
        with pytest.raises(UnknownEvent):
            thing.subscribe_event("overheat")


class TestEventLoop:
    def test_random_intervals_stay_in_range(self):
        thing = make_thing("coffee-machine.td.json", seed=6,
                           event_mode=EventMode.random_interval())
        clock = CountingClock(budget=100)
        thing.run_event_loop("error", clock)
        assert len(clock.intervals) == 100
        assert all(5.0 <= gap <= 60.0 for gap in clock.intervals)

    def test_fixed_interval_emission_count(self):
        thing = make_thing("coffee-machine.td.json", seed=6,
                           event_mode=EventMode.fixed(2.0))
        sub = thing.subscribe_event("error")
        thing.run_event_loop("error", HorizonClock(20.0))
        received = 0
        while True:
            try:
                sub.get(timeout=0)
                received += 1
            except queue.Empty:
                break
        assert abs(received - 10) <= 1

    def test_mode_none_never_emits(self):
        thing = make_thing("coffee-machine.td.json", seed=6)
        sub = thing.subscribe_event("error")
        clock = CountingClock(budget=50)
        thing.run_event_loop("error", clock)
        assert clock.intervals == []
        with pytest.raises(queue.Empty):
            sub.get(timeout=0.05)

    def test_per_event_override_beats_default(self):
        thing = make_thing(
            "coffee-machine.td.json", seed=6,
            event_mode=EventMode.random_interval(),
            event_overrides={"error": EventMode.fixed(0.25)},
        )
        clock = CountingClock(budget=5)
        thing.run_event_loop("error", clock)
        assert clock.intervals == [0.25] * 5


class TestDeterminism:
    SCRIPT = 30

    def run_script(self, thing):
        results = []
        for index in range(self.SCRIPT):
            results.append(thing.read_property("state"))
            if index % 3 == 0:
                results.append(thing.read_all_properties())
        return results

    def test_same_seed_same_request_sequence(self):
        first = make_thing("coffee-machine.td.json", seed=42)
        second = make_thing("coffee-machine.td.json", seed=42)
        assert self.run_script(first) == self.run_script(second)

    def test_event_emissions_do_not_disturb_request_draws(self):
        quiet = make_thing("coffee-machine.td.json", seed=42)
        busy = make_thing("coffee-machine.td.json", seed=42)
        for _ in range(25):
            busy.emit_event("error")
        assert self.run_script(quiet) == self.run_script(busy)

    def test_different_seeds_differ(self):
        first = make_thing("coffee-machine.td.json", seed=1)
        second = make_thing("coffee-machine.td.json", seed=2)
        assert self.run_script(first) != self.run_script(second)
