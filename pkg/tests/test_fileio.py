"""Round trips and error reporting for the on-disk formats."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clsp.fileio import (
    format_instance,
    parse_instance,
    read_instance,
    read_manifest,
    read_reference,
    write_instance,
    write_manifest,
    write_reference,
)
from clsp.model import Instance

SAMPLE = """\
# demo instance
clsp v1
items 2
periods 3
K 1 2
S 30 45
h 1 2
C 50 50 50
10 0 4
 3 3 3
"""


def test_parse_sample():
    inst = parse_instance(SAMPLE, name="demo")
    assert inst.n_items == 2 and inst.n_periods == 3
    assert inst.demand.tolist() == [[10, 0, 4], [3, 3, 3]]
    assert inst.capacity_usage.tolist() == [1, 2]
    assert inst.name == "demo"


def test_format_then_parse_is_identity():
    inst = parse_instance(SAMPLE, name="demo")
    again = parse_instance(format_instance(inst), name="demo")
    assert again == inst


def test_file_round_trip(tmp_path):
    inst = parse_instance(SAMPLE, name="x")
    path = tmp_path / "demo.clsp"
    write_instance(inst, path)
    loaded = read_instance(path)
    assert loaded.name == "demo"
    assert loaded.demand.tolist() == inst.demand.tolist()


@pytest.mark.parametrize(
    "mangle, fragment",
    [
        (lambda s: s.replace("clsp v1", "clsp v2"), "v1"),
        (lambda s: s.replace("items 2", "items 3"), "bad K value"),
        (lambda s: s.replace("C 50 50 50", "C 50 50", 1), "end of file"),
        (lambda s: s.replace("K 1 2", "Q 1 2"), "K"),
        (lambda s: s.replace("10 0 4", "10 0 -4"), "negative"),
        (lambda s: s + "trailing 1\n", "trailing"),
    ],
)
def test_parse_errors_carry_context(mangle, fragment):
    with pytest.raises(ValueError) as err:
        parse_instance(mangle(SAMPLE), name="bad")
    assert fragment.lower() in str(err.value).lower()


@settings(max_examples=50, deadline=None)
@given(
    n=st.integers(1, 4),
    t=st.integers(1, 5),
    data=st.data(),
)
def test_round_trip_property(n, t, data):
    rng = np.random.default_rng(data.draw(st.integers(0, 2**32 - 1)))
    inst = Instance(
        demand=rng.integers(0, 200, (n, t)),
        capacity=rng.integers(0, 500, t),
        setup_cost=rng.integers(0, 900, n),
        holding_cost=rng.integers(0, 9, n),
        capacity_usage=rng.integers(1, 6, n),
        name="prop",
    )
    assert parse_instance(format_instance(inst), name="prop") == inst


def test_reference_round_trip(tmp_path):
    path = tmp_path / "ref.txt"
    values = {"12x12-adfhk-1": 41027.0, "12x12-adfhk-2": 39915.5}
    write_reference(values, path)
    assert read_reference(path) == values


def test_manifest_round_trip(tmp_path):
    path = tmp_path / "manifest.txt"
    rows = [
        ("12x12-adfhk-1", "adfhk", "adfhk/12x12-adfhk-1.clsp"),
        ("12x12-belij-4", "belij", "belij/12x12-belij-4.clsp"),
    ]
    write_manifest(rows, path)
    assert read_manifest(path) == rows
