"""Shared fixtures.

The `worked` fixture is a five-event, two-attribute sequence whose cover
is fully known by hand: one pattern matches the first three events with a
single missing value, a second pattern matches around a gap event, and
one slot is left to a singleton code.  Several suites assert against it.
"""

from types import SimpleNamespace

import pytest

from seqmine import (
    EMPTY,
    AttributeSchema,
    EventDataset,
    Pattern,
    length_of_data,
    new_standard_table,
)

A1_VALUES = ("m", "q", "n", "r", "t")
A2_VALUES = ("x", "z", "u", "s", "y", "d")


@pytest.fixture
def worked():
    schema = AttributeSchema(names=("a1", "a2"), values=(A1_VALUES, A2_VALUES))
    a1 = {name: i for i, name in enumerate(A1_VALUES)}
    a2 = {name: i for i, name in enumerate(A2_VALUES)}
    sequence = (
        (a1["m"], a2["x"]),
        (a1["q"], a2["z"]),
        (a1["n"], a2["u"]),
        (a1["r"], a2["s"]),
        (a1["t"], a2["y"]),
    )
    dataset = EventDataset(schema, (sequence,))
    # size 5, so one miss is tolerated; expects "d" where the sequence has "z"
    p1 = Pattern(((a1["m"], a2["x"]), (EMPTY, a2["d"]), (a1["n"], a2["u"])))
    # size 4, no miss budget; matches events 2, 4, 5 around one gap event
    p2 = Pattern(((a1["q"], EMPTY), (a1["r"], a2["s"]), (a1["t"], EMPTY)))
    ct = new_standard_table(dataset)
    ct.add_pattern(p1)
    ct.add_pattern(p2)
    length_of_data(dataset, ct)  # installs usage stats for the fixed table
    return SimpleNamespace(
        schema=schema,
        a1=a1,
        a2=a2,
        sequence=sequence,
        dataset=dataset,
        p1=p1,
        p2=p2,
        ct=ct,
    )
