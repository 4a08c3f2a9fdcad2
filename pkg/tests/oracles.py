"""Independent reference implementations used as test oracles.

Everything here works on plain JSON dicts and deliberately avoids importing
the package under test, so agreement between the two is meaningful.
"""

import itertools
import math
import random

# --- JSON value equality (bool is never a number) -----------------------


def same(a, b) -> bool:
    if isinstance(a, bool) or isinstance(b, bool):
        return isinstance(a, bool) and isinstance(b, bool) and a == b
    if isinstance(a, (int, float)) and isinstance(b, (int, float)):
        return a == b
    if type(a) is not type(b):
        return False
    if isinstance(a, list):
        return len(a) == len(b) and all(same(x, y) for x, y in zip(a, b))
    if isinstance(a, dict):
        return a.keys() == b.keys() and all(same(v, b[k]) for k, v in a.items())
    return a == b


def _is_number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _type_ok(value, name: str) -> bool:
    if name == "null":
        return value is None
    if name == "boolean":
        return isinstance(value, bool)
    if name == "integer":
        return _is_number(value) and float(value).is_integer()
    if name == "number":
        return _is_number(value)
    if name == "string":
        return isinstance(value, str)
    if name == "array":
        return isinstance(value, list)
    if name == "object":
        return isinstance(value, dict)
    raise ValueError(f"unknown type {name!r}")


# --- reference conformance check ---------------------------------------


def conforms(schema: dict, value) -> bool:
    """Straightforward check of the supported keyword set on a raw schema dict."""
    expected = schema.get("type")
    if expected is None and ("minimum" in schema or "maximum" in schema):
        expected = "number"
    if expected is not None and not _type_ok(value, expected):
        return False
    if "enum" in schema and not any(same(value, m) for m in schema["enum"]):
        return False
    if "const" in schema and not same(value, schema["const"]):
        return False
    if "oneOf" in schema and not any(conforms(b, value) for b in schema["oneOf"]):
        return False
    if _is_number(value):
        if "minimum" in schema and value < schema["minimum"]:
            return False
        if "maximum" in schema and value > schema["maximum"]:
            return False
    if isinstance(value, list):
        if "minItems" in schema and len(value) < schema["minItems"]:
            return False
        if "maxItems" in schema and len(value) > schema["maxItems"]:
            return False
        if "items" in schema and not all(conforms(schema["items"], v) for v in value):
            return False
    if isinstance(value, dict):
        for name in schema.get("required", []):
            if name not in value:
                return False
        for name, sub in schema.get("properties", {}).items():
            if name in value and not conforms(sub, value[name]):
                return False
    return True


# --- brute-force enumeration of finite conforming sets ------------------


def _dedupe(values: list) -> list:
    kept: list = []
    for candidate in values:
        if not any(same(candidate, existing) for existing in kept):
            kept.append(candidate)
    return kept


def _candidates(schema: dict) -> list:
    """All values that could conform, before filtering through `conforms`."""
    if "const" in schema:
        return [schema["const"]]
    if "enum" in schema:
        return list(schema["enum"])
    if "oneOf" in schema:
        out = []
        for branch in schema["oneOf"]:
            out.extend(_candidates(branch))
        return out
    kind = schema.get("type")
    if kind == "null":
        return [None]
    if kind == "boolean":
        return [True, False]
    if kind == "integer":
        low = math.ceil(schema["minimum"])
        high = math.floor(schema["maximum"])
        return list(range(low, high + 1))
    if kind == "array":
        element_pool = enumerate_conforming(schema["items"])
        low = schema.get("minItems", 0)
        high = schema["maxItems"]
        out = []
        for length in range(low, high + 1):
            out.extend(list(p) for p in itertools.product(element_pool, repeat=length))
        return out
    raise ValueError(f"schema is not finitely enumerable: {schema!r}")


def enumerate_conforming(schema: dict) -> list:
    """The complete conforming set of a finitely enumerable schema."""
    return _dedupe([v for v in _candidates(schema) if conforms(schema, v)])


# --- random non-conforming mutants --------------------------------------

_JUNK = [None, True, False, 0, -1, 999999, 3.5, "", "zzz", "Espresso",
         [], [None], {"x": 1}, {}]


def _mutate_once(value, rng: random.Random):
    roll = rng.random()
    if roll < 0.3:
        return rng.choice(_JUNK)
    if isinstance(value, bool):
        return rng.choice([not value, 0, 1, "true"])
    if isinstance(value, (int, float)):
        return value + rng.choice([-1, 1]) * rng.randint(1, 50)
    if isinstance(value, str):
        return value + rng.choice("!Xq9")
    if isinstance(value, list):
        if value and roll < 0.6:
            copy = list(value)
            index = rng.randrange(len(copy))
            copy[index] = _mutate_once(copy[index], rng)
            return copy
        return list(value) + [rng.choice(_JUNK)]
    if isinstance(value, dict):
        copy = dict(value)
        if copy and roll < 0.6:
            key = rng.choice(sorted(copy))
            del copy[key]
            return copy
        copy["__junk__"] = rng.choice(_JUNK)
        return copy
    return rng.choice(_JUNK[1:])


def non_conforming_mutants(schema: dict, count: int, rng: random.Random) -> list:
    """`count` values the reference checker rejects, built by mutating
    conforming ones (falling back to plain junk when mutation keeps conforming)."""
    pool = enumerate_conforming(schema)
    out = []
    attempts = 0
    while len(out) < count and attempts < count * 200:
        attempts += 1
        seedling = rng.choice(pool) if pool else None
        mutant = _mutate_once(seedling, rng)
        if not conforms(schema, mutant):
            out.append(mutant)
    return out


# --- generic JSON diff ---------------------------------------------------


def _escape(segment: str) -> str:
    return segment.replace("~", "~0").replace("/", "~1")


def json_diff(a, b, path: str = "") -> list:
    """JSON pointer paths at which the two documents differ.

    Same-length arrays are compared per index; a length change is reported
    at the array's own path.
    """
    if isinstance(a, dict) and isinstance(b, dict):
        out = []
        for key in dict.fromkeys(list(a) + [k for k in b if k not in a]):
            child = f"{path}/{_escape(key)}"
            if key not in a or key not in b:
                out.append(child)
            else:
                out.extend(json_diff(a[key], b[key], child))
        return out
    if isinstance(a, list) and isinstance(b, list) and not (
        isinstance(a, bool) or isinstance(b, bool)
    ):
        if len(a) != len(b):
            return [path]
        out = []
        for index, (x, y) in enumerate(zip(a, b)):
            out.extend(json_diff(x, y, f"{path}/{index}"))
        return out
    return [] if same(a, b) else [path]
