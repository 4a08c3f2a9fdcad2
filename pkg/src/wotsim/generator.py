"""Generate random JSON values that conform to a DataSchema.

The contract is soundness: for any satisfiable schema, validate(schema,
generate(schema, rng)) holds. Keyword precedence when several are present is
const > enum > oneOf > type. Generation is fully deterministic for a given
(schema, seed) pair.
"""

from __future__ import annotations

import copy
import hashlib
import logging
import math
import random
import string

from .errors import Unsatisfiable
from .model import MISSING, DataSchema, Json, is_present
from .validator import validate

logger = logging.getLogger(__name__)

# Containers nested deeper than this degrade to their minimal conforming
# shape, guaranteeing termination on deeply nested schemas.
DEPTH_CAP = 8

_U64 = (1 << 64) - 1


class RandomSource:
    """Seeded pseudo-random source behind all generated data.

    Wraps ``random.Random`` (CPython's Mersenne Twister), so an identical
    64-bit seed reproduces the identical draw sequence across runs. A source
    must not be shared between threads; derive independent child sources with
    :meth:`derive` instead.
    """

    def __init__(self, seed: int | None = None):
        if seed is None:
            seed = random.SystemRandom().getrandbits(64)
        self.seed = seed & _U64
        self._random = random.Random(self.seed)

    def derive(self, label: str) -> "RandomSource":
        """Child source with a seed determined by this seed and the label."""
        material = self.seed.to_bytes(8, "big") + label.encode("utf-8")
        child_seed = int.from_bytes(hashlib.sha256(material).digest()[:8], "big")
        return RandomSource(child_seed)

    def choice(self, seq):
        return self._random.choice(seq)

    def randint(self, a: int, b: int) -> int:
        return self._random.randint(a, b)

    def randrange(self, n: int) -> int:
        return self._random.randrange(n)

    def uniform(self, a: float, b: float) -> float:
        return self._random.uniform(a, b)

    def __repr__(self) -> str:
        return f"RandomSource(seed={self.seed})"


def generate(schema: DataSchema, rng: RandomSource, depth: int = 0) -> Json:
    """Produce a random value conforming to the schema.

    Raises Unsatisfiable when no conforming value exists (e.g. const/enum
    conflicting with the declared type, or an empty integer range).
    """
    if is_present(schema.const_value):
        if not validate(schema, schema.const_value).valid:
            raise Unsatisfiable("const value conflicts with the other keywords")
        return copy.deepcopy(schema.const_value)

    if schema.enum_values is not None:
        candidates = [v for v in schema.enum_values if validate(schema, v).valid]
        if not candidates:
            raise Unsatisfiable("no enum member conforms to the other keywords")
        return copy.deepcopy(rng.choice(candidates))

    if schema.one_of is not None:
        return _generate_one_of(schema, rng, depth)

    type_name = schema.type
    if type_name is None and (schema.minimum is not None or schema.maximum is not None):
        type_name = "number"
    if type_name is None:
        logger.warning("schema has no type, enum, const or oneOf; generating null")
        return None

    if type_name == "null":
        return None
    if type_name == "boolean":
        return rng.choice((False, True))
    if type_name == "integer":
        return _generate_integer(schema, rng)
    if type_name == "number":
        return _generate_number(schema, rng)
    if type_name == "string":
        return _generate_string(rng)
    if type_name == "array":
        return _generate_array(schema, rng, depth)
    return _generate_object(schema, rng, depth)


def _resolve_bounds(minimum, maximum, default_lo, default_hi):
    """Concrete [lo, hi] range, filling absent sides with small defaults.

    A single given bound anchors a 256-wide window kept inside [-128, 127]
    where possible; when the given bound itself lies outside that window the
    window follows the bound so the range never comes out empty.
    """
    if minimum is None and maximum is None:
        return default_lo, default_hi
    if minimum is None:
        lo = max(-128, maximum - 256)
        if lo > maximum:
            lo = maximum - 256
        return lo, maximum
    if maximum is None:
        hi = min(127, minimum + 256)
        if hi < minimum:
            hi = minimum + 256
        return minimum, hi
    return minimum, maximum


def _generate_integer(schema: DataSchema, rng: RandomSource) -> int:
    lo, hi = _resolve_bounds(schema.minimum, schema.maximum, -128, 127)
    lo = int(math.ceil(lo))
    hi = int(math.floor(hi))
    if lo > hi:
        raise Unsatisfiable(f"no integer exists in [{schema.minimum}, {schema.maximum}]")
    return rng.randint(lo, hi)


def _generate_number(schema: DataSchema, rng: RandomSource) -> float:
    lo, hi = _resolve_bounds(schema.minimum, schema.maximum, -100.0, 100.0)
    draw = rng.uniform(lo, hi)
    rounded = round(draw, 6)
    # Rounding must not escape a very narrow range.
    return rounded if lo <= rounded <= hi else draw


def _generate_string(rng: RandomSource) -> str:
    length = rng.randint(4, 16)
    return "".join(rng.choice(string.ascii_lowercase) for _ in range(length))


def _generate_array(schema: DataSchema, rng: RandomSource, depth: int) -> list:
    if depth >= DEPTH_CAP:
        count = schema.min_items or 0
        if count == 0:
            return []
        element = minimal_value(schema.items or DataSchema())
        return [copy.deepcopy(element) for _ in range(count)]
    lo = schema.min_items if schema.min_items is not None else 0
    hi = schema.max_items if schema.max_items is not None else lo + 5
    count = rng.randint(lo, hi)
    items = schema.items or DataSchema()
    return [generate(items, rng, depth + 1) for _ in range(count)]


def _generate_object(schema: DataSchema, rng: RandomSource, depth: int) -> dict:
    properties = schema.properties or {}
    required = schema.required or ()
    result: dict = {}
    if depth >= DEPTH_CAP:
        for name in required:
            sub = properties.get(name)
            result[name] = minimal_value(sub) if sub is not None else None
        return result
    # Every described property is included, not only the required ones.
    for name, sub in properties.items():
        result[name] = generate(sub, rng, depth + 1)
    for name in required:
        if name not in result:
            result[name] = None  # required but never described
    return result


def _generate_one_of(schema: DataSchema, rng: RandomSource, depth: int) -> Json:
    candidates = []
    for branch in schema.one_of:
        merged = merge_branch(schema, branch)
        if merged is not None:
            candidates.append(merged)
    while candidates:
        if depth >= DEPTH_CAP:
            index = min(range(len(candidates)), key=lambda i: nesting_depth(candidates[i]))
        else:
            index = rng.randrange(len(candidates))
        try:
            return generate(candidates[index], rng, depth)
        except Unsatisfiable:
            candidates.pop(index)
    raise Unsatisfiable("every oneOf branch conflicts with the enclosing keywords")


def nesting_depth(schema: DataSchema) -> int:
    """Static container-nesting depth of a schema (oneOf adds no data depth)."""
    depths = [0]
    if schema.items is not None:
        depths.append(1 + nesting_depth(schema.items))
    if schema.properties:
        depths.append(1 + max(nesting_depth(s) for s in schema.properties.values()))
    if schema.one_of:
        depths.append(max(nesting_depth(b) for b in schema.one_of))
    return max(depths)


def merge_branch(parent: DataSchema, branch: DataSchema) -> DataSchema | None:
    """Conjunction of a oneOf branch with its enclosing schema's constraints.

    A value generated from the merge satisfies both the branch and the
    enclosing type/bounds/shape keywords; returns None for a branch whose
    constraints cannot intersect the parent's. The parent's const/enum/oneOf
    are not folded in (they take precedence before branch selection).
    """
    type_name = branch.type
    if parent.type is not None:
        if type_name is None or type_name == parent.type:
            type_name = parent.type
        elif {type_name, parent.type} == {"integer", "number"}:
            type_name = "integer"
        else:
            return None

    minimum = _pick(max, parent.minimum, branch.minimum)
    maximum = _pick(min, parent.maximum, branch.maximum)
    if minimum is not None and maximum is not None and minimum > maximum:
        return None

    min_items = _pick(max, parent.min_items, branch.min_items)
    max_items = _pick(min, parent.max_items, branch.max_items)
    if min_items is not None and max_items is not None and min_items > max_items:
        return None

    required: tuple[str, ...] | None = None
    if parent.required or branch.required:
        seen = dict.fromkeys((parent.required or ()) + (branch.required or ()))
        required = tuple(seen)

    items = branch.items if parent.items is None else parent.items
    if parent.items is not None and branch.items is not None:
        items = merge_branch(parent.items, branch.items)
        if items is None:
            # Elements are impossible; survivable only if the array may be empty.
            if (min_items or 0) > 0:
                return None
            items = None
            max_items = 0

    properties: dict[str, DataSchema] | None = None
    if parent.properties or branch.properties:
        properties = {}
        names = dict.fromkeys(
            list(parent.properties or {}) + list(branch.properties or {})
        )
        for name in names:
            in_parent = (parent.properties or {}).get(name)
            in_branch = (branch.properties or {}).get(name)
            if in_parent is not None and in_branch is not None:
                sub = merge_branch(in_parent, in_branch)
                if sub is None:
                    if required and name in required:
                        return None
                    continue  # unsatisfiable optional member: never generate it
            else:
                sub = in_parent if in_parent is not None else in_branch
            properties[name] = sub

    return DataSchema(
        type=type_name,
        enum_values=branch.enum_values,
        const_value=branch.const_value,
        one_of=branch.one_of,
        minimum=minimum,
        maximum=maximum,
        items=items,
        min_items=min_items,
        max_items=max_items,
        properties=properties,
        required=required,
    )


def _pick(fn, a, b):
    if a is None:
        return b
    if b is None:
        return a
    return fn(a, b)


def minimal_value(schema: DataSchema) -> Json:
    """Shallowest conforming value, used when the depth cap is reached."""
    if is_present(schema.const_value):
        if not validate(schema, schema.const_value).valid:
            raise Unsatisfiable("const value conflicts with the other keywords")
        return copy.deepcopy(schema.const_value)
    if schema.enum_values is not None:
        for member in schema.enum_values:
            if validate(schema, member).valid:
                return copy.deepcopy(member)
        raise Unsatisfiable("no enum member conforms to the other keywords")
    if schema.one_of is not None:
        candidates = [m for b in schema.one_of if (m := merge_branch(schema, b)) is not None]
        for merged in sorted(candidates, key=nesting_depth):
            try:
                return minimal_value(merged)
            except Unsatisfiable:
                continue
        raise Unsatisfiable("every oneOf branch conflicts with the enclosing keywords")

    type_name = schema.type
    if type_name is None and (schema.minimum is not None or schema.maximum is not None):
        type_name = "number"
    if type_name in (None, "null"):
        return None
    if type_name == "boolean":
        return False
    if type_name == "string":
        return ""
    if type_name == "integer":
        lo, hi = _resolve_bounds(schema.minimum, schema.maximum, -128, 127)
        lo = int(math.ceil(lo))
        if lo > math.floor(hi):
            raise Unsatisfiable(f"no integer exists in [{schema.minimum}, {schema.maximum}]")
        return lo
    if type_name == "number":
        lo, _ = _resolve_bounds(schema.minimum, schema.maximum, -100.0, 100.0)
        return float(lo)
    if type_name == "array":
        count = schema.min_items or 0
        if count == 0:
            return []
        element = minimal_value(schema.items or DataSchema())
        return [copy.deepcopy(element) for _ in range(count)]
    result = {}
    properties = schema.properties or {}
    for name in schema.required or ():
        sub = properties.get(name)
        result[name] = minimal_value(sub) if sub is not None else None
    return result
