import json
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from futs.errors import ModelError
from futs.generate import random_futs_model
from futs.model import Partition
from futs.serialize import dumps, export_futs, export_partition, import_futs, to_dot
from futs.semiring import BOOLEAN, RATIONAL


def doc(**over):
    d = {
        "schemas": [{"index": 1, "labels": ["a"], "semiring": "bool"}],
        "states": ["s", "t"],
        "rows": [
            {"rel": 1, "state": "s", "label": "a", "cont": {"t": True}},
            {"rel": 1, "state": "t", "label": "a", "cont": {}},
        ],
    }
    d.update(over)
    return d


def test_import_boolean_document():
    m = import_futs(doc())
    assert m.states == ("s", "t")
    assert m.theta(1, "s", "a")["t"] is True


def test_import_from_text():
    assert import_futs(json.dumps(doc())) == import_futs(doc())


def test_missing_row_is_totality():
    d = doc()
    d["rows"] = d["rows"][:1]
    with pytest.raises(ModelError) as e:
        import_futs(d)
    assert e.value.kind == "totality"


@pytest.mark.parametrize(
    "mutate,kind",
    [
        (lambda d: d.pop("states"), "schema"),
        (lambda d: d["schemas"][0].update(semiring="tropical"), "unknown-semiring"),
        (lambda d: d["rows"][0].update(rel=7), "schema"),
        (lambda d: d["rows"].append(dict(d["rows"][0])), "schema"),
        (lambda d: d["rows"][0]["cont"].update(t="1/2"), "tag-mismatch"),
        (lambda d: d["rows"][0]["cont"].update(zz=True), "open-model"),
        (lambda d: d["schemas"][0].update(labels=[]), "schema"),
    ],
)
def test_import_errors(mutate, kind):
    d = doc()
    mutate(d)
    with pytest.raises(ModelError) as e:
        import_futs(d)
    assert e.value.kind == kind


def test_invalid_json_text():
    with pytest.raises(ModelError):
        import_futs("{not json")


def test_rational_values_and_negative():
    d = doc(schemas=[{"index": 1, "labels": ["a"], "semiring": "rational"}])
    d["rows"][0]["cont"] = {"t": "3/6"}
    m = import_futs(d)
    assert m.theta(1, "s", "a")["t"] == F(1, 2)
    d["rows"][0]["cont"] = {"t": "-1/2"}
    with pytest.raises(ModelError):
        import_futs(d)


def test_probabilistic_document():
    # reactive probabilistic system:
    # five states, each non-zero row a distribution
    rows = {
        ("s0", "a"): {"s1": "1/2", "s2": "1/2"},
        ("s0", "b"): {"s3": "1/3", "s4": "2/3"},
        ("s1", "a"): {"s1": "1/1"},
        ("s2", "b"): {"s3": "1/4", "s4": "3/4"},
        ("s3", "a"): {"s0": "1/1"},
        ("s4", "a"): {"s0": "1/5", "s4": "4/5"},
    }
    states = ["s0", "s1", "s2", "s3", "s4"]
    d = {
        "schemas": [{"index": 1, "labels": ["a", "b"], "semiring": "rational"}],
        "states": states,
        "rows": [
            {"rel": 1, "state": s, "label": lb, "cont": rows.get((s, lb), {})} for s in states for lb in ("a", "b")
        ],
    }
    m = import_futs(d)
    totals = [fn.total() for _sc, _s, _l, fn in m.rows() if fn]
    assert len(totals) == len(rows) and all(t == 1 for t in totals)


@settings(max_examples=60, deadline=None)
@given(st.randoms(use_true_random=False), st.integers(0, 8))
def test_export_import_round_trip(rng, n):
    m = random_futs_model(rng, n)
    d = export_futs(m)
    assert import_futs(json.loads(dumps(d))) == m


def test_export_shape():
    m = import_futs(doc())
    d = export_futs(m)
    assert d["schemas"] == [{"index": 1, "labels": ["a"], "semiring": "bool"}]
    assert d["rows"][0] == {"rel": 1, "state": "s", "label": "a", "cont": {"t": True}}
    assert export_partition(Partition([["s", "t"]])) == [["s", "t"]]


def test_dumps_is_canonical():
    a = dumps({"b": 1, "a": [1, 2]})
    assert a == dumps({"a": [1, 2], "b": 1})
    assert a.endswith("\n") and a.index('"a"') < a.index('"b"')


def test_dot_one_edge_per_entry():
    d = doc(schemas=[{"index": 1, "labels": ["a"], "semiring": "bool"}, {"index": 2, "labels": ["delta"], "semiring": "rational"}])
    d["rows"] += [
        {"rel": 2, "state": "s", "label": "delta", "cont": {"s": "1/2", "t": "2/1"}},
        {"rel": 2, "state": "t", "label": "delta", "cont": {}},
    ]
    dot = to_dot(import_futs(d))
    assert dot.startswith("digraph")
    edges = [line for line in dot.splitlines() if "->" in line]
    assert len(edges) == 3
    assert '"s" -> "t" [label="a/true"]' in dot
    assert 'label="delta/1/2", style=dashed' in dot


def test_semiring_names_survive():
    m = import_futs(doc())
    assert m.schemas[0].semiring is BOOLEAN
    assert RATIONAL.name == "rational"
