"""Parties, messages and a word-exact communication ledger.

Word costs: a labelled point in R^d costs d+1 words, a hyperplane d+1
(normal plus offset), a scalar 1, and an opaque store whatever length it
declares.  Messages tagged ``control`` (dataset sizes, weight reports) go
to a separate column so protocol totals can be compared with the
closed-form costs, which do not include them.
"""

from __future__ import annotations

import csv
from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Any, Iterable, Literal, Sequence

import numpy as np

from .types import DimensionMismatch, LinearClassifier, WeightedDataset

Kind = Literal["data", "control"]


@dataclass(frozen=True, eq=False)
class Party:
    id: int
    data: WeightedDataset
    role: Literal["coordinator", "worker"] = "worker"


def check_single_coordinator(parties: Sequence[Party]) -> None:
    if sum(p.role == "coordinator" for p in parties) != 1:
        raise ValueError("exactly one party must be the coordinator")


@dataclass(frozen=True, eq=False)
class Message:
    sender: int
    receiver: int
    payload: Any
    payload_type: Literal["points", "classifier", "scalar", "store"]
    word_cost: int
    dimension: int | None = None
    kind: Kind = "data"

    @classmethod
    def points(cls, sender, receiver, pts, kind: Kind = "data") -> "Message":
        if isinstance(pts, WeightedDataset):
            n, d = len(pts), pts.dimension
        else:
            pts = list(pts)
            dims = {p.dimension for p in pts}
            if len(dims) > 1:
                raise DimensionMismatch("points in one message must share a dimension")
            n, d = len(pts), (dims.pop() if dims else None)
        cost = 0 if n == 0 else (d + 1) * n
        return cls(sender, receiver, pts, "points", cost, d, kind)

    @classmethod
    def classifier(cls, sender, receiver, c: LinearClassifier, kind: Kind = "data") -> "Message":
        return cls(sender, receiver, c, "classifier", c.dimension + 1, c.dimension, kind)

    @classmethod
    def scalars(cls, sender, receiver, values, kind: Kind = "control") -> "Message":
        values = tuple(float(v) for v in np.atleast_1d(values))
        return cls(sender, receiver, values, "scalar", len(values), None, kind)

    @classmethod
    def vector(cls, sender, receiver, values, kind: Kind = "data") -> "Message":
        """A plain real vector; one word per entry."""
        values = np.array(values, dtype=float).reshape(-1)
        return cls(sender, receiver, values, "scalar", values.size, None, kind)

    @classmethod
    def store(cls, sender, receiver, words: Sequence[float], declared_words: int,
              kind: Kind = "data") -> "Message":
        if len(words) > declared_words:
            raise ValueError(f"store of {len(words)} words exceeds its declared {declared_words}")
        return cls(sender, receiver, tuple(words), "store", declared_words, None, kind)


@dataclass(frozen=True)
class Receipt:
    sender: int
    receiver: int
    round: int
    sequence: int
    words: int


@dataclass
class CommLedger:
    """Running word counts, split by round and by (sender, receiver) pair.

    ``total_words`` covers data messages; control messages are tallied in
    ``control_words`` and ``control_per_round``.
    """

    dimension: int | None = None
    total_words: int = 0
    per_round: list[int] = field(default_factory=list)
    per_pair: dict[tuple[int, int], int] = field(default_factory=lambda: defaultdict(int))
    control_words: int = 0
    control_per_round: list[int] = field(default_factory=list)
    records: list[tuple[int, int, int, int, str]] = field(default_factory=list)

    @property
    def grand_total(self) -> int:
        return self.total_words + self.control_words

    @property
    def round(self) -> int:
        return len(self.per_round)

    def begin_round(self) -> int:
        self.per_round.append(0)
        self.control_per_round.append(0)
        return self.round

    def record(self, m: Message) -> Receipt:
        if m.sender == m.receiver:
            raise ValueError(f"party {m.sender} cannot send to itself")
        if self.dimension is not None and m.dimension is not None and m.dimension != self.dimension:
            raise DimensionMismatch(f"payload dimension {m.dimension}, network dimension {self.dimension}")
        if not self.per_round:
            self.begin_round()
        words = int(m.word_cost)
        if m.kind == "control":
            self.control_words += words
            self.control_per_round[-1] += words
        else:
            self.total_words += words
            self.per_round[-1] += words
            self.per_pair[(m.sender, m.receiver)] += words
        self.records.append((self.round, m.sender, m.receiver, words, m.kind))
        return Receipt(m.sender, m.receiver, self.round, len(self.records), words)

    def rows(self, run_id="", protocol="") -> list[tuple]:
        return [(run_id, protocol, *rec) for rec in self.records]

    def same_as(self, other: "CommLedger") -> bool:
        return (
            self.total_words == other.total_words
            and self.per_round == other.per_round
            and dict(self.per_pair) == dict(other.per_pair)
            and self.control_words == other.control_words
            and self.records == other.records
        )


LEDGER_CSV_HEADER = ("run_id", "protocol", "round", "sender", "receiver", "words", "kind")


def write_ledger_csv(path, ledgers: Iterable[tuple[str, str, CommLedger]]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(LEDGER_CSV_HEADER)
        for run_id, protocol, ledger in ledgers:
            w.writerows(ledger.rows(run_id, protocol))


def send(m: Message, ledger: CommLedger) -> Receipt:
    return ledger.record(m)


def broadcast(sender: int, make_message, receivers: Iterable[int], ledger: CommLedger) -> list[Receipt]:
    """Send one payload to every receiver; ``make_message(receiver)`` builds each copy."""
    return [ledger.record(make_message(r)) for r in receivers if r != sender]


class Network:
    """Reliable in-order mailboxes in front of a ledger."""

    def __init__(self, dimension: int | None = None, ledger: CommLedger | None = None):
        self.ledger = ledger if ledger is not None else CommLedger(dimension)
        self._boxes: dict[tuple[int, int], deque] = defaultdict(deque)

    def send(self, m: Message) -> Receipt:
        receipt = self.ledger.record(m)
        self._boxes[(m.sender, m.receiver)].append(m.payload)
        return receipt

    def broadcast(self, sender: int, receivers: Iterable[int], make_message) -> list[Receipt]:
        return [self.send(make_message(r)) for r in receivers if r != sender]

    def receive(self, sender: int, receiver: int):
        box = self._boxes[(sender, receiver)]
        if not box:
            raise LookupError(f"no pending message from {sender} to {receiver}")
        return box.popleft()

    def pending(self, sender: int, receiver: int) -> int:
        return len(self._boxes[(sender, receiver)])
