"""Validate JSON values against a DataSchema.

Validation never raises: a non-conforming value yields a ValidationResult
that names every violated keyword with a JSON-pointer path. Only the recognized
keyword subset is checked; an empty schema accepts everything.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import DataSchema, Json, is_present


def json_equal(a: Json, b: Json) -> bool:
    """Deep equality on JSON values: booleans are never equal to numbers,
    but 1 and 1.0 are the same JSON number."""
    if isinstance(a, bool) or isinstance(b, bool):
        return isinstance(a, bool) and isinstance(b, bool) and a == b
    if isinstance(a, (int, float)) and isinstance(b, (int, float)):
        return a == b
    if isinstance(a, list) and isinstance(b, list):
        return len(a) == len(b) and all(json_equal(x, y) for x, y in zip(a, b))
    if isinstance(a, dict) and isinstance(b, dict):
        return a.keys() == b.keys() and all(json_equal(v, b[k]) for k, v in a.items())
    if a is None or b is None:
        return a is None and b is None
    return type(a) is type(b) and a == b


def json_type_name(value: Json) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "boolean"
    if isinstance(value, (int, float)):
        return "number"
    if isinstance(value, str):
        return "string"
    if isinstance(value, list):
        return "array"
    return "object"


def matches_type(value: Json, type_name: str) -> bool:
    if type_name == "null":
        return value is None
    if type_name == "boolean":
        return isinstance(value, bool)
    if type_name == "integer":
        if isinstance(value, bool):
            return False
        return isinstance(value, int) or (isinstance(value, float) and value.is_integer())
    if type_name == "number":
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    if type_name == "string":
        return isinstance(value, str)
    if type_name == "array":
        return isinstance(value, list)
    return isinstance(value, dict)


@dataclass(frozen=True)
class Violation:
    path: str  # JSON pointer into the checked value ("" = the value itself)
    rule: str  # name of the violated keyword
    detail: str

    def as_dict(self) -> dict:
        return {"path": self.path, "rule": self.rule, "detail": self.detail}


@dataclass
class ValidationResult:
    violations: list[Violation]

    @property
    def valid(self) -> bool:
        return not self.violations


def _escape_pointer(segment: str) -> str:
    return segment.replace("~", "~0").replace("/", "~1")


def validate(schema: DataSchema, value: Json) -> ValidationResult:
    violations: list[Violation] = []
    _check(schema, value, "", violations)
    return ValidationResult(violations)


def _check(schema: DataSchema, value: Json, path: str, out: list[Violation]) -> None:
    expected = schema.type
    if expected is None and (schema.minimum is not None or schema.maximum is not None):
        # Numeric bounds without a type imply a number.
        expected = "number"
    if expected is not None and not matches_type(value, expected):
        out.append(
            Violation(path, "type", f"expected {expected}, got {json_type_name(value)}")
        )

    if schema.enum_values is not None and not any(
        json_equal(value, member) for member in schema.enum_values
    ):
        out.append(Violation(path, "enum", "value is not one of the enumerated values"))

    if is_present(schema.const_value) and not json_equal(value, schema.const_value):
        out.append(Violation(path, "const", "value differs from the const value"))

    if schema.one_of is not None and not any(
        validate(branch, value).valid for branch in schema.one_of
    ):
        out.append(Violation(path, "oneOf", "value matches none of the oneOf branches"))

    if matches_type(value, "number"):
        if schema.minimum is not None and value < schema.minimum:
            out.append(
                Violation(path, "minimum", f"{value} is below the minimum {schema.minimum}")
            )
        if schema.maximum is not None and value > schema.maximum:
            out.append(
                Violation(path, "maximum", f"{value} is above the maximum {schema.maximum}")
            )

    if isinstance(value, list):
        if schema.min_items is not None and len(value) < schema.min_items:
            out.append(
                Violation(path, "minItems", f"{len(value)} item(s), need at least {schema.min_items}")
            )
        if schema.max_items is not None and len(value) > schema.max_items:
            out.append(
                Violation(path, "maxItems", f"{len(value)} item(s), allow at most {schema.max_items}")
            )
        if schema.items is not None:
            for index, element in enumerate(value):
                _check(schema.items, element, f"{path}/{index}", out)

    if isinstance(value, dict):
        if schema.required:
            for name in schema.required:
                if name not in value:
                    out.append(
                        Violation(path, "required", f"missing required member {name!r}")
                    )
        if schema.properties:
            for name, sub in schema.properties.items():
                if name in value:
                    _check(sub, value[name], f"{path}/{_escape_pointer(name)}", out)
