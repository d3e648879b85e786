import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from distlearn.opt.streaming import (
    PassBudgetExhausted,
    SampleAndPruneLP,
    StreamAdapterConfig,
    StreamingAlgorithm,
    count_violations,
    hash_uniform,
    multipass_lp_violate,
    run_monolithic,
    split_stream,
    stream_to_distributed,
)
from helpers import random_halfspaces


class RunningSum(StreamingAlgorithm):
    """Sums its items for a fixed number of passes; the store is (passes done, sum)."""

    store_words = 10

    def __init__(self, passes=3):
        self.passes = passes

    def init(self):
        self.done_passes, self.total = 0, 0.0

    def consume(self, item):
        self.total += item

    def finish_pass(self):
        self.done_passes += 1
        return self.done_passes == self.passes

    def extract_store(self):
        return [float(self.done_passes), self.total]

    def restore(self, store):
        self.done_passes, self.total = int(store[0]), store[1]

    def result(self):
        return self.total


class Greedy(RunningSum):
    def extract_store(self):
        return [0.0] * 11


def test_ledger_k_r_s():
    streams = [[1.0, 2.0], [3.0], [], [4.0]]
    run = stream_to_distributed(lambda: RunningSum(3), streams, StreamAdapterConfig(10, 3, 4))
    assert run.ledger.total_words == 120
    assert run.result == 3 * 10.0
    assert run.ledger.per_round == [40, 40, 40]


def test_single_player_is_free():
    run = stream_to_distributed(lambda: RunningSum(2), [[1.0, 2.0]], StreamAdapterConfig(10, 2, 1))
    assert run.ledger.total_words == 0 and run.result == 6.0


def test_oversized_store_rejected():
    with pytest.raises(ValueError):
        stream_to_distributed(lambda: Greedy(1), [[1.0], [2.0]], StreamAdapterConfig(10, 1, 2))
    with pytest.raises(ValueError):
        stream_to_distributed(lambda: Greedy(1), [[1.0]], StreamAdapterConfig(10, 1, 1))


def test_pass_budget():
    with pytest.raises(PassBudgetExhausted):
        stream_to_distributed(lambda: RunningSum(5), [[1.0], [2.0]], StreamAdapterConfig(10, 2, 2))
    with pytest.raises(PassBudgetExhausted):
        run_monolithic(lambda: RunningSum(5), [1.0], 2)


def test_config_validation():
    with pytest.raises(ValueError):
        StreamAdapterConfig(0, 1, 2)
    with pytest.raises(ValueError):
        stream_to_distributed(lambda: RunningSum(1), [[1.0]], StreamAdapterConfig(5, 1, 2))


def test_hash_is_uniform_and_stateless():
    draws = np.array([hash_uniform(7, 0, i) for i in range(20_000)])
    assert hash_uniform(7, 0, 3) == hash_uniform(7, 0, 3)
    assert 0 <= draws.min() and draws.max() < 1
    assert abs(draws.mean() - 0.5) < 0.01


def test_split_is_a_cover():
    items = list(range(37))
    parts = split_stream(items, 5, 3)
    assert len(parts) == 5 and sum(parts, []) == items


@given(st.integers(0, 10_000), st.integers(1, 5), st.integers(1, 4))
def test_any_partition_matches_monolithic(seed, k, passes):
    A, b = random_halfspaces(60, 2, seed)
    items = [np.append(a, beta) for a, beta in zip(A, b)]

    def make():
        return SampleAndPruneLP(2, 0.05, s0=8, seed=seed, max_passes=passes, stop_early=False)

    ref, used = run_monolithic(make, items, passes)
    s = make().store_words
    run = stream_to_distributed(make, split_stream(items, k, seed), StreamAdapterConfig(s, passes, k))
    assert used == run.passes == passes
    assert np.array_equal(run.result, ref)
    assert run.ledger.total_words == (k * passes * s if k > 1 else 0)


class TestMultipassLP:
    def test_identical_rows_take_two_passes(self):
        A = np.tile([[1.0, 1.0]], (40, 1))
        b = np.full(40, 0.5)
        r = multipass_lp_violate(A, b, 0.05, s0=5)
        assert r.passes == 2 and r.violations == 0

    def test_epsilon_one_accepts_the_first_point(self):
        A, b = random_halfspaces(100, 2, 1)
        r = multipass_lp_violate(A, b, 1.0, s0=5)
        assert r.passes == 2

    def test_violation_target_met(self):
        A, b = random_halfspaces(500, 2, 4)
        r = multipass_lp_violate(A, b, 0.05, s0=50, seed=4, players=3, split_seed=1)
        assert r.violations == count_violations(r.x, A, b) <= 25
        assert r.ledger.total_words == 3 * r.passes * r.store_words

    def test_default_sample_size(self):
        alg = SampleAndPruneLP(3, 0.1)
        assert alg.s0 == 225 and alg.cap == 900

    def test_store_round_trip(self):
        A, b = random_halfspaces(50, 3, 2)
        alg = SampleAndPruneLP(3, 0.1, s0=6, seed=1)
        alg.init()
        for row in np.column_stack([A, b]):
            alg.consume(row)
        alg.finish_pass()
        for row in np.column_stack([A, b])[:20]:
            alg.consume(row)
        store = alg.extract_store()
        twin = SampleAndPruneLP(3, 0.1, s0=6, seed=1)
        twin.restore(store)
        assert twin.extract_store() == store
        assert len(store) <= alg.store_words

    def test_working_set_capped(self):
        A, b = random_halfspaces(400, 2, 6)
        alg = SampleAndPruneLP(2, 0.001, s0=4, seed=6, max_passes=12, stop_early=False)
        alg.init()
        rows = np.column_stack([A, b])
        for _ in range(12):
            for row in rows:
                alg.consume(row)
            alg.finish_pass()
            assert len(alg.working) <= alg.cap
