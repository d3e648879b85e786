"""Multipass streaming algorithms run across players, and a streaming LP.

A streaming algorithm here exposes ``init``, ``consume``, ``finish_pass``,
``extract_store`` and ``restore``.  Everything it remembers between items
must fit in the store, a flat list of at most ``store_words`` reals.  To
run it over k players, each player feeds its own items and hands the
store to the next player; the last player hands it back to the first,
which starts the next pass.  That is k hand-offs of ``store_words`` words
per pass.

``SampleAndPruneLP`` finds a point violating at most an ``eps`` fraction
of a stream of halfspaces.  Its randomness is a hash of (seed, pass, item
index), so the store alone determines its behaviour and any split of the
stream across players gives the same answer.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ..comm import CommLedger, Message, Network
from .simplex import LinearProgram, simplex_solve

MASK64 = (1 << 64) - 1
VIOLATION_TOL = 1e-9
ACTIVE_TOL = 1e-7


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def hash_uniform(*keys: int) -> float:
    """A uniform draw in [0, 1) determined by the integer keys."""
    h = 0
    for k in keys:
        h = splitmix64(h ^ (int(k) & MASK64))
    return (h >> 11) / float(1 << 53)


class StreamingAlgorithm(ABC):
    store_words: int

    @abstractmethod
    def init(self) -> None: ...

    @abstractmethod
    def consume(self, item) -> None: ...

    @abstractmethod
    def finish_pass(self) -> bool:
        """Close the current pass; True when the algorithm is done."""

    @abstractmethod
    def extract_store(self) -> list[float]: ...

    @abstractmethod
    def restore(self, store: Sequence[float]) -> None: ...

    @abstractmethod
    def result(self): ...


@dataclass(frozen=True)
class StreamAdapterConfig:
    store_words: int
    passes: int
    players: int

    def __post_init__(self):
        if self.store_words < 1 or self.passes < 1 or self.players < 1:
            raise ValueError("store_words, passes and players must be positive")


class PassBudgetExhausted(RuntimeError):
    """The algorithm had not finished when its pass budget ran out."""


@dataclass
class StreamRun:
    result: object
    passes: int
    ledger: CommLedger


def stream_to_distributed(make_alg: Callable[[], StreamingAlgorithm],
                          streams: Sequence[Sequence], cfg: StreamAdapterConfig) -> StreamRun:
    """Run a streaming algorithm over ``cfg.players`` item sequences.

    Every player works on a fresh instance rebuilt from the store it was
    handed, so nothing but the store crosses between players.  Each
    hand-off is charged the declared ``store_words``; a store that grows
    beyond it raises ValueError.  A single player makes no hand-offs, but
    its store is still checked against the budget after every pass.
    """
    k, s = cfg.players, cfg.store_words
    if len(streams) != k:
        raise ValueError(f"{len(streams)} streams for {k} players")
    net = Network()
    alg = make_alg()
    alg.init()
    for p in range(1, cfg.passes + 1):
        net.ledger.begin_round()
        done = False
        for i, items in enumerate(streams):
            if i > 0:
                alg = make_alg()
                alg.restore(net.receive(i, i + 1))
            for item in items:
                alg.consume(item)
            if i == k - 1:
                done = alg.finish_pass()
            store = alg.extract_store()
            if k == 1:
                if len(store) > s:
                    raise ValueError(f"store of {len(store)} words exceeds its declared {s}")
                continue
            # player i (id i + 1) hands over to the next player, wrapping around
            nxt = (i + 1) % k
            net.send(Message.store(i + 1, nxt + 1, store, s))
            if nxt == 0:
                alg = make_alg()
                alg.restore(net.receive(k, 1))
        if done:
            return StreamRun(alg.result(), p, net.ledger)
    raise PassBudgetExhausted(f"not finished after {cfg.passes} passes")


def run_monolithic(make_alg: Callable[[], StreamingAlgorithm], stream: Sequence,
                   max_passes: int) -> tuple[object, int]:
    """The same algorithm on the whole stream in one process."""
    alg = make_alg()
    alg.init()
    for p in range(1, max_passes + 1):
        for item in stream:
            alg.consume(item)
        if alg.finish_pass():
            return alg.result(), p
    raise PassBudgetExhausted(f"not finished after {max_passes} passes")


# ---------------------------------------------------------- streaming LP


def _bottom_k(sample: list, key: float, row: np.ndarray, cap: int) -> None:
    """Keep the ``cap`` rows with the smallest keys (a uniform sample without replacement)."""
    if len(sample) < cap:
        sample.append((key, row))
        sample.sort(key=lambda e: e[0])
    elif key < sample[-1][0]:
        sample[-1] = (key, row)
        sample.sort(key=lambda e: e[0])


class SampleAndPruneLP(StreamingAlgorithm):
    """Multipass sample-and-prune search for a point violating few halfspaces.

    Items are rows ``(a, beta)`` meaning ``a.x >= beta``.  Pass 1 samples
    ``s0`` rows and solves ``min g.x`` over them inside the box.  Every
    later pass counts the rows the current point violates and samples up
    to ``s0`` of them.  If at most ``epsilon n`` rows were violated the
    algorithm stops; otherwise the sample joins the working set and the
    point is recomputed.  The working set is capped at ``4 s0`` rows by
    dropping rows that are not tight at the new point, oldest first.

    With ``stop_early=False`` it always runs exactly ``max_passes`` passes.
    """

    def __init__(self, d: int, epsilon: float, s0: int | None = None, seed: int = 0,
                 g=None, lo=-1.0, hi=1.0, max_passes: int = 20, stop_early: bool = True):
        if not 0 < epsilon <= 1:
            raise ValueError("epsilon must lie in (0, 1]")
        self.d = d
        self.epsilon = epsilon
        self.s0 = s0 if s0 is not None else 25 * d * d
        self.cap = 4 * self.s0
        self.seed = seed
        self.g = np.eye(d)[-1] if g is None else np.asarray(g, dtype=float)
        self.lo = np.broadcast_to(np.asarray(lo, dtype=float), (d,))
        self.hi = np.broadcast_to(np.asarray(hi, dtype=float), (d,))
        self.max_passes = max_passes
        self.stop_early = stop_early
        # header (6) + x (d) + working rows + sampled rows with their keys
        self.store_words = 6 + d + self.cap * (d + 1) + self.s0 * (d + 2)

    # state: pass_no, seen, n, violators, done, x, working, sample
    def init(self) -> None:
        self.pass_no = 0
        self.seen = 0
        self.n = 0
        self.violators = 0
        self.done = False
        self.x = self._solve(np.zeros((0, self.d + 1)))
        self.working = np.zeros((0, self.d + 1))
        self.sample: list[tuple[float, np.ndarray]] = []

    def _solve(self, rows: np.ndarray) -> np.ndarray:
        lp = LinearProgram(rows[:, :self.d], rows[:, self.d], self.g, self.lo, self.hi)
        return simplex_solve(lp).x

    def consume(self, item) -> None:
        row = np.asarray(item, dtype=float).reshape(self.d + 1)
        i = self.seen
        self.seen += 1
        if self.pass_no > 0 and row[:self.d] @ self.x >= row[self.d] - VIOLATION_TOL:
            return
        if self.pass_no > 0:
            self.violators += 1
        _bottom_k(self.sample, hash_uniform(self.seed, self.pass_no, i), row, self.s0)

    def finish_pass(self) -> bool:
        if self.pass_no == 0:
            self.n = self.seen
        sampled = np.array([r for _, r in self.sample]).reshape(-1, self.d + 1)
        if self.pass_no > 0 and self.stop_early and self.violators <= self.epsilon * self.n:
            self.done = True
        elif self.pass_no + 1 >= self.max_passes:
            self.done = not self.stop_early
        else:
            self.working = np.vstack([self.working, sampled])
            self.x = self._solve(self.working)
            if len(self.working) > self.cap:
                self._prune()
        self.pass_no += 1
        self.seen = 0
        self.violators = 0 if not self.done else self.violators
        self.sample = []
        return self.done

    def _prune(self) -> None:
        slack = self.working[:, :self.d] @ self.x - self.working[:, self.d]
        tight = np.flatnonzero(slack <= ACTIVE_TOL)
        loose = np.flatnonzero(slack > ACTIVE_TOL)
        room = max(0, self.cap - tight.size)
        newest = loose[loose.size - room:] if room else loose[:0]
        self.working = self.working[np.sort(np.concatenate([tight[: self.cap], newest]))]

    def extract_store(self) -> list[float]:
        store = [float(self.pass_no), float(self.seen), float(self.n), float(self.violators),
                 float(self.done), float(len(self.working)), *self.x.tolist()]
        store += self.working.reshape(-1).tolist()
        for key, row in self.sample:
            store += [key, *row.tolist()]
        return store

    def restore(self, store: Sequence[float]) -> None:
        d = self.d
        head = store[:6]
        self.pass_no, self.seen, self.n, self.violators = (int(v) for v in head[:4])
        self.done = bool(head[4])
        nw = int(head[5])
        self.x = np.array(store[6:6 + d], dtype=float)
        pos = 6 + d
        self.working = np.array(store[pos:pos + nw * (d + 1)], dtype=float).reshape(nw, d + 1)
        pos += nw * (d + 1)
        rest = np.array(store[pos:], dtype=float).reshape(-1, d + 2)
        self.sample = [(float(r[0]), r[1:].copy()) for r in rest]

    def result(self) -> np.ndarray:
        return self.x.copy()


def count_violations(x, A, b, tol: float = VIOLATION_TOL) -> int:
    return int(np.sum(np.asarray(A) @ np.asarray(x) < np.asarray(b) - tol))


def split_stream(items: Sequence, k: int, rng_seed=None) -> list[list]:
    """Cut a stream into ``k`` contiguous pieces at random positions."""
    n = len(items)
    rng = np.random.default_rng(rng_seed)
    cuts = np.sort(rng.integers(0, n + 1, size=k - 1))
    bounds = [0, *cuts.tolist(), n]
    return [list(items[bounds[i]:bounds[i + 1]]) for i in range(k)]


@dataclass
class MultipassLPResult:
    x: np.ndarray
    passes: int
    violations: int
    store_words: int
    ledger: CommLedger


def multipass_lp_violate(A, b, epsilon: float, *, s0: int | None = None, seed: int = 0,
                         players: int = 1, max_passes: int = 20, g=None, lo=-1.0, hi=1.0,
                         split_seed=None) -> MultipassLPResult:
    """Point in the box violating at most ``epsilon n`` of the rows ``A x >= b``.

    Runs ``SampleAndPruneLP`` through the player adapter so the store
    budget is checked at every hand-off.  The final pass counts violators
    of the returned point over the whole stream, so a returned point always
    meets the target; PassBudgetExhausted means a rerun with a new seed.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).reshape(-1)
    d = A.shape[1]
    items = [np.append(a, beta) for a, beta in zip(A, b)]

    def make():
        return SampleAndPruneLP(d, epsilon, s0, seed, g, lo, hi, max_passes)

    s = make().store_words
    streams = split_stream(items, players, split_seed) if players > 1 else [items]
    run = stream_to_distributed(make, streams, StreamAdapterConfig(s, max_passes, players))
    x = run.result
    return MultipassLPResult(x, run.passes, count_violations(x, A, b), s, run.ledger)

