import csv

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from distlearn.comm import (
    LEDGER_CSV_HEADER,
    CommLedger,
    Message,
    Network,
    Party,
    broadcast,
    check_single_coordinator,
    send,
    write_ledger_csv,
)
from distlearn.types import DimensionMismatch, LabeledPoint, LinearClassifier, WeightedDataset


def point(d):
    return LabeledPoint(np.zeros(d), 1)


def test_point_costs_d_plus_one():
    ledger = CommLedger()
    send(Message.points(1, 2, [point(50)]), ledger)
    assert ledger.total_words == 51


def test_classifier_costs_d_plus_one():
    ledger = CommLedger()
    send(Message.classifier(1, 2, LinearClassifier(np.ones(50))), ledger)
    assert ledger.total_words == 51


def test_empty_batch_is_free():
    ledger = CommLedger()
    send(Message.points(1, 2, []), ledger)
    send(Message.points(1, 2, WeightedDataset.empty(3)), ledger)
    assert ledger.total_words == 0


def test_scalars_and_stores():
    ledger = CommLedger()
    send(Message.scalars(1, 2, [3.0, 4.0], kind="data"), ledger)
    send(Message.store(1, 2, [1.0, 2.0], declared_words=10), ledger)
    assert ledger.total_words == 12
    with pytest.raises(ValueError):
        Message.store(1, 2, [0.0] * 11, declared_words=10)


def test_control_words_kept_apart():
    ledger = CommLedger()
    send(Message.scalars(2, 1, [7.0]), ledger)
    assert ledger.total_words == 0 and ledger.control_words == 1 and ledger.grand_total == 1


def test_self_send_and_dimension_mismatch():
    with pytest.raises(ValueError):
        send(Message.points(1, 1, [point(2)]), CommLedger())
    with pytest.raises(DimensionMismatch):
        send(Message.points(1, 2, [point(3)]), CommLedger(dimension=2))
    with pytest.raises(DimensionMismatch):
        Message.points(1, 2, [point(2), point(3)])


def test_broadcast_classifier_to_three():
    ledger = CommLedger()
    c = LinearClassifier(np.ones(50))
    receipts = broadcast(1, lambda r: Message.classifier(1, r, c), [2, 3, 4], ledger)
    assert len(receipts) == 3 and ledger.total_words == 153


def test_broadcast_to_one_is_a_send():
    a, b = CommLedger(), CommLedger()
    c = LinearClassifier(np.ones(4))
    broadcast(1, lambda r: Message.classifier(1, r, c), [2], a)
    send(Message.classifier(1, 2, c), b)
    assert a.same_as(b)


def test_broadcast_store():
    ledger = CommLedger()
    broadcast(1, lambda r: Message.store(1, r, [0.0], 9), [2, 3, 4, 5], ledger)
    assert ledger.total_words == 4 * 9


def test_network_delivers_in_order():
    net = Network(1)
    for v in (1.0, 2.0, 3.0):
        net.send(Message.scalars(1, 2, [v]))
    assert [net.receive(1, 2)[0] for _ in range(3)] == [1.0, 2.0, 3.0]
    with pytest.raises(LookupError):
        net.receive(1, 2)


def test_single_coordinator():
    ds = WeightedDataset.from_arrays([[0.0]], [1])
    check_single_coordinator([Party(1, ds, "coordinator"), Party(2, ds)])
    with pytest.raises(ValueError):
        check_single_coordinator([Party(1, ds), Party(2, ds)])


def test_ledger_csv(tmp_path):
    ledger = CommLedger()
    ledger.begin_round()
    send(Message.points(1, 2, [point(2)]), ledger)
    ledger.begin_round()
    send(Message.scalars(2, 1, [1.0]), ledger)
    path = tmp_path / "ledger.csv"
    write_ledger_csv(path, [("r0", "demo", ledger)])
    rows = list(csv.reader(path.open()))
    assert tuple(rows[0]) == LEDGER_CSV_HEADER
    assert rows[1:] == [["r0", "demo", "1", "1", "2", "3", "data"],
                        ["r0", "demo", "2", "2", "1", "1", "control"]]


@given(st.lists(st.tuples(st.integers(1, 4), st.integers(1, 4), st.integers(0, 20),
                          st.booleans(), st.booleans()), max_size=40))
def test_ledger_totals_agree(events):
    ledger = CommLedger(dimension=3)
    running = 0
    for s, r, n, new_round, control in events:
        if s == r:
            continue
        if new_round:
            ledger.begin_round()
        m = Message.points(s, r, [point(3)] * n, kind="control" if control else "data")
        ledger.record(m)
        assert ledger.grand_total >= running
        running = ledger.grand_total
    assert ledger.total_words == sum(ledger.per_round) == sum(ledger.per_pair.values())
    assert ledger.control_words == sum(ledger.control_per_round)
