"""JSON and DOT forms of models and partitions.

Model document::

    {"schemas": [{"index": 1, "labels": ["a"], "semiring": "bool|rational"}],
     "states": ["s0", ...],
     "rows": [{"rel": 1, "state": "s0", "label": "a", "cont": {"s1": "1/2"}}]}

Rational values are ``"p/q"`` strings, booleans are JSON booleans; zero
entries are omitted.  Every ``(rel, state, label)`` triple needs its own row.
"""

from __future__ import annotations

import json

import jsonschema

from .errors import ModelError
from .model import FutsModel, Partition, RelationSchema
from .semiring import FiniteSupportFn, by_name

MODEL_SCHEMA = {
    "type": "object",
    "required": ["schemas", "states", "rows"],
    "properties": {
        "schemas": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["index", "labels", "semiring"],
                "properties": {
                    "index": {"type": "integer", "minimum": 1},
                    "labels": {"type": "array", "minItems": 1, "items": {"type": "string"}},
                    "semiring": {"type": "string"},
                },
            },
        },
        "states": {"type": "array", "items": {"type": "string"}},
        "rows": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["rel", "state", "label", "cont"],
                "properties": {
                    "rel": {"type": "integer"},
                    "state": {"type": "string"},
                    "label": {"type": "string"},
                    "cont": {
                        "type": "object",
                        "additionalProperties": {"type": ["string", "boolean", "integer"]},
                    },
                },
            },
        },
    },
}


def import_futs(document) -> FutsModel:
    """Validate a model document (dict or JSON text) and build the model."""
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ModelError("schema", f"invalid JSON: {exc}") from None
    try:
        jsonschema.validate(document, MODEL_SCHEMA)
    except jsonschema.ValidationError as exc:
        path = "/".join(map(str, exc.absolute_path))
        raise ModelError("schema", f"{exc.message} at /{path}") from None

    schemas = []
    for sd in document["schemas"]:
        try:
            sr = by_name(sd["semiring"])
        except ValueError as exc:
            raise ModelError("unknown-semiring", str(exc)) from None
        schemas.append(RelationSchema(sd["index"], tuple(sd["labels"]), sr))
    by_index = {sc.index: sc for sc in schemas}
    states = document["states"]

    table = {}
    for row in document["rows"]:
        sc = by_index.get(row["rel"])
        if sc is None:
            raise ModelError("schema", f"row refers to unknown relation {row['rel']}")
        key = (row["rel"], row["state"], row["label"])
        if key in table:
            raise ModelError("schema", f"duplicate row {key}")
        try:
            entries = {t: sc.semiring.parse(v) for t, v in row["cont"].items()}
        except ValueError as exc:
            raise ModelError("tag-mismatch", f"row {key}: {exc}") from None
        table[key] = FiniteSupportFn(sc.semiring, entries)
    return FutsModel(states, schemas, table)


def export_futs(model: FutsModel, name=str) -> dict:
    """Model document; ``name`` maps states to their string ids."""
    return {
        "schemas": [
            {"index": sc.index, "labels": [str(lb) for lb in sc.labels], "semiring": sc.semiring.name}
            for sc in model.schemas
        ],
        "states": [name(s) for s in model.states],
        "rows": [
            {"rel": sc.index, "state": name(s), "label": str(label), "cont": fn.to_json(name)}
            for sc, s, label, fn in model.rows()
        ],
    }


def export_partition(partition: Partition, name=str) -> list:
    return [[name(s) for s in b] for b in partition.blocks]


def dumps(doc) -> str:
    """Canonical JSON text: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _dot_id(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(model: FutsModel, name=str, initial=()) -> str:
    """One node per state, one edge per support entry labelled ``label/value``."""
    lines = ["digraph futs {", "  rankdir=LR;", "  node [shape=box, fontname=monospace];"]
    for s in model.states:
        attrs = ", penwidth=2" if s in initial else ""
        lines.append(f"  {_dot_id(name(s))} [label={_dot_id(name(s))}{attrs}];")
    for sc, s, label, fn in model.rows():
        style = ", style=dashed" if sc.index > 1 else ""
        for t, v in fn.items():
            value = sc.semiring.dump(v)
            text = f"{label}/{json.dumps(value) if isinstance(value, bool) else value}"
            lines.append(f"  {_dot_id(name(s))} -> {_dot_id(name(t))} [label={_dot_id(text)}{style}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
