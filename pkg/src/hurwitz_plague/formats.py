"""JSON reading and writing, checked against the shipped schemas."""

from __future__ import annotations

import json
from fractions import Fraction
from importlib import resources
from pathlib import Path

import jsonschema

from .racks import InputError

SCHEMAS = ("rack", "group", "orbit", "graph", "covering", "report", "registry")


def load_schema(kind: str) -> dict:
    if kind not in SCHEMAS:
        raise InputError(f"no schema named {kind!r}")
    return json.loads(resources.files(__package__).joinpath("schemas").joinpath(f"{kind}.json").read_text())


def validate(kind: str, data) -> None:
    """Raise InputError naming the first schema violation."""
    try:
        jsonschema.validate(data, load_schema(kind))
    except jsonschema.ValidationError as exc:
        where = "/".join(map(str, exc.absolute_path)) or "<root>"
        raise InputError(f"{kind} JSON invalid at {where}: {exc.message}") from None


def read_json(path, kind: str = None):
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not JSON: {exc}") from None
    if kind is not None:
        validate(kind, data)
    return data


def _default(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    if hasattr(obj, "to_json"):
        return obj.to_json()
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(data) -> str:
    """Deterministic JSON text (sorted keys, fractions as 'p/q')."""
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False, default=_default) + "\n"


def write_json(path, data, kind: str = None) -> None:
    if kind is not None:
        validate(kind, json.loads(dumps(data)))
    Path(path).write_text(dumps(data))
