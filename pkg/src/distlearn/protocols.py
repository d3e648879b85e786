"""Distributed linear classification protocols with exact word accounting.

The MWU protocol: each round the coordinator trains on its own data plus
every sample received so far and sends the classifier out; the other
side multiplies the weight of every point the classifier gets wrong by
``1 + rho`` and answers with a weighted random sample.  After ``T`` rounds
the answer is the majority vote of the ``T`` classifiers.

Baselines (party 1 is the coordinator in every case):

naive     every worker ships all of its points
voting    every party trains locally; majority over all k classifiers
rand      every worker ships a uniform sample of the VC sample size
randemp   every worker ships a uniform sample of 9d points
maxmarg   support points go back and forth until accuracy or cost caps hit
mwu       MWU with ``s`` points per worker per round
mwuemp    ``mwu`` stopped as soon as the ensemble is accurate enough

"Accurate enough" is judged on the union of all data by the simulator;
that check is not charged to the ledger.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .comm import CommLedger, Message, Network, Party, check_single_coordinator
from .learner import LearnerConfig, support_set, train_reporting
from .sampling import SampleSizeParams, proportional_allocation, sample_size, weighted_indices
from .types import MajorityEnsemble, WeightedDataset, accuracy, renormalize

# 5 log2(1/0.05) log2 log2(1/0.05) (about 46), rounded up to the customary 50.
EMPIRICAL_ROUNDS = 50
RANDEMP_POINTS_PER_DIM = 9
POTENTIAL_RTOL = 1e-12


def mwu_rounds(epsilon: float) -> int:
    return math.ceil(5 * math.log2(1 / epsilon))


def empirical_rounds(epsilon: float) -> int:
    lg = math.log2(1 / epsilon)
    return math.ceil(5 * lg * max(1.0, math.log2(lg)))


@dataclass(frozen=True)
class MwuConfig:
    epsilon: float = 0.05
    rho: float = 0.75
    c: float = 0.2
    sample_size_per_round: int = 100
    rounds_override: int | None = None
    early_stop: bool = False
    seed: int = 0
    # The sample answering the last classifier is never used for training;
    # sending it anyway keeps the ledger equal to the closed-form cost.
    send_final_sample: bool = True
    reference_accuracy: float = 1.0
    learner: LearnerConfig = field(default_factory=LearnerConfig)

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")
        if not 0 < self.rho < 1:
            raise ValueError("rho must lie in (0, 1)")
        if not 0 < self.c < 1:
            raise ValueError("c must lie in (0, 1)")
        if self.sample_size_per_round < 1:
            raise ValueError("sample_size_per_round must be positive")
        if self.rounds_override is not None and self.rounds_override < 1:
            raise ValueError("rounds_override must be positive")

    @property
    def rounds(self) -> int:
        return self.rounds_override or mwu_rounds(self.epsilon)

    @property
    def target_accuracy(self) -> float:
        return (1 - self.epsilon) * self.reference_accuracy


@dataclass
class ProtocolResult:
    protocol: str
    ensemble: MajorityEnsemble
    train_accuracy: float
    ledger: CommLedger
    rounds_used: int
    per_round_weighted_error: list[float] = field(default_factory=list)
    # potential_trace[t] = total weight on the sampling side after t rounds
    potential_trace: list[float] = field(default_factory=list)
    # per point on the sampling side: how many ensemble members got it wrong
    mistake_counts: np.ndarray | None = None
    inseparable_rounds: int = 0

    @property
    def words(self) -> int:
        return self.ledger.total_words

    def same_as(self, other: "ProtocolResult") -> bool:
        return (
            self.ensemble.same_as(other.ensemble)
            and self.ledger.same_as(other.ledger)
            and self.rounds_used == other.rounds_used
            and self.per_round_weighted_error == other.per_round_weighted_error
            and self.potential_trace == other.potential_trace
        )


def make_parties(datasets: Sequence[WeightedDataset]) -> list[Party]:
    return [
        Party(i + 1, ds, "coordinator" if i == 0 else "worker") for i, ds in enumerate(datasets)
    ]


def _split(parties: Sequence[Party], allow_empty_workers: bool = False) -> tuple[Party, list[Party]]:
    if len(parties) < 2:
        raise ValueError("need at least two parties")
    check_single_coordinator(parties)
    dims = {p.data.dimension for p in parties}
    if len(dims) != 1:
        raise ValueError("all parties must share one dimension")
    coord = next(p for p in parties if p.role == "coordinator")
    workers = [p for p in parties if p is not coord]
    if len(coord.data) == 0:
        raise ValueError("the coordinator needs a nonempty dataset")
    if allow_empty_workers:
        if all(len(p.data) == 0 for p in workers):
            raise ValueError("at least one worker needs data")
    elif any(len(p.data) == 0 for p in workers):
        raise ValueError("every party needs a nonempty dataset")
    return coord, workers


def union(parties: Sequence[Party]) -> WeightedDataset:
    first, *rest = [p.data for p in parties]
    full = first.concat(*rest)
    return full.with_weights(np.ones(len(full)))


def _uniform(ds: WeightedDataset) -> WeightedDataset:
    return ds.with_weights(np.ones(len(ds)))


def _learn(ds, cfg: MwuConfig, salt):
    # Learner seed derived from the run seed and a per-call tag.
    tag = [zlib.crc32(x.encode()) if isinstance(x, str) else int(x) for x in salt]
    return train_reporting(_uniform(ds), cfg.learner, seed=[cfg.seed, *tag])


# --------------------------------------------------------------------- MWU


def run_two_party(A: Party, B: Party, cfg: MwuConfig) -> ProtocolResult:
    """Two-party weighted sampling; ``A`` learns, ``B`` reweights and samples."""
    d = A.data.dimension
    if B.data.dimension != d:
        raise ValueError("parties disagree on dimension")
    if len(A.data) == 0 or len(B.data) == 0:
        raise ValueError("both parties need nonempty datasets")
    rng = np.random.default_rng(cfg.seed)
    net = Network(d)
    DA, DB = _uniform(A.data), B.data
    n = len(DB)
    w = np.ones(n)
    log_scale = 0.0
    mistakes = np.zeros(n, dtype=int)
    received: list[WeightedDataset] = []
    members, errors, phi = [], [], [float(n)]
    inseparable = 0
    D = union([A, B])
    T = cfg.rounds
    for t in range(1, T + 1):
        net.ledger.begin_round()
        # A's move
        h, separable = _learn(DA.concat(*received), cfg, ("learn", t))
        inseparable += not separable
        net.send(Message.classifier(A.id, B.id, h))
        h = net.receive(A.id, B.id)
        members.append(h)
        # B's move
        wrong = h.predict(DB.X) != DB.y
        mistakes += wrong
        errors.append(float(w[wrong].sum() / w.sum()))
        w = np.where(wrong, w * (1 + cfg.rho), w)
        w, shift = renormalize(w)
        log_scale += shift
        phi.append(float(w.sum() * math.exp(log_scale)))
        if t < T or cfg.send_final_sample:
            idx = weighted_indices(w, cfg.sample_size_per_round, rng)
            net.send(Message.points(B.id, A.id, _uniform(DB.subset(idx))))
            received.append(net.receive(B.id, A.id))
        if cfg.early_stop and accuracy(MajorityEnsemble(members), D) >= cfg.target_accuracy:
            break
    ens = MajorityEnsemble(members)
    return ProtocolResult(
        "mwu2", ens, accuracy(ens, D), net.ledger, len(members),
        errors, phi, mistakes, inseparable,
    )


def run_k_party(parties: Sequence[Party], cfg: MwuConfig, total_sample: int | None = None,
                name: str = "kparty_mwu") -> ProtocolResult:
    """k-party MWU with the coordinator in A's seat and all workers jointly as B.

    Each round the workers' total weights go to the coordinator (one word
    each, tallied as control traffic), which splits ``total_sample`` draws
    among them in proportion to weight.  With a single worker there is
    nothing to split and no report is sent, so k = 2 is exactly the
    two-party protocol.  Workers without data are allowed; they hold no
    weight and are never asked for points.
    """
    coord, workers = _split(parties, allow_empty_workers=True)
    d = coord.data.dimension
    s = total_sample if total_sample is not None else cfg.sample_size_per_round
    rng = np.random.default_rng(cfg.seed)
    net = Network(d)
    D = union(parties)
    own = _uniform(coord.data)
    sizes = [len(p.data) for p in workers]
    bounds = np.cumsum([0, *sizes])
    Xw = np.vstack([p.data.X for p in workers]).reshape(-1, d)
    yw = np.concatenate([p.data.y for p in workers])
    w = np.ones(len(yw))
    log_scale = 0.0
    mistakes = np.zeros(len(yw), dtype=int)
    received: list[WeightedDataset] = []
    members, errors, phi = [], [], [float(len(yw))]
    inseparable = 0
    worker_ids = [p.id for p in workers]
    T = cfg.rounds
    for t in range(1, T + 1):
        net.ledger.begin_round()
        h, separable = _learn(own.concat(*received), cfg, ("learn", t))
        inseparable += not separable
        net.broadcast(coord.id, worker_ids, lambda r: Message.classifier(coord.id, r, h))
        hs = [net.receive(coord.id, r) for r in worker_ids]
        members.append(h)
        wrong = hs[0].predict(Xw) != yw
        mistakes += wrong
        errors.append(float(w[wrong].sum() / w.sum()))
        w = np.where(wrong, w * (1 + cfg.rho), w)
        w, shift = renormalize(w)
        log_scale += shift
        phi.append(float(w.sum() * math.exp(log_scale)))
        if t < T or cfg.send_final_sample:
            parts = [w[bounds[i]:bounds[i + 1]] for i in range(len(workers))]
            if len(workers) == 1:
                counts = [s]
            else:
                for p, wi in zip(workers, parts):
                    net.send(Message.scalars(p.id, coord.id, [wi.sum()]))
                totals = [net.receive(p.id, coord.id)[0] for p in workers]
                counts = proportional_allocation(totals, s, rng)
            for p, wi, cnt in zip(workers, parts, counts):
                if cnt == 0:
                    continue
                idx = weighted_indices(wi, int(cnt), rng)
                net.send(Message.points(p.id, coord.id, _uniform(p.data.subset(idx))))
                received.append(net.receive(p.id, coord.id))
        if cfg.early_stop and accuracy(MajorityEnsemble(members), D) >= cfg.target_accuracy:
            break
    ens = MajorityEnsemble(members)
    return ProtocolResult(
        name, ens, accuracy(ens, D), net.ledger, len(members),
        errors, phi, mistakes, inseparable,
    )


def run_mwu(parties, cfg: MwuConfig) -> ProtocolResult:
    """MWU where every worker accounts for ``s`` points per round (``s(k-1)`` in total)."""
    cfg = replace(cfg, early_stop=False)
    return run_k_party(parties, cfg, cfg.sample_size_per_round * (len(parties) - 1), "mwu")


def run_mwuemp(parties, cfg: MwuConfig) -> ProtocolResult:
    cfg = replace(cfg, early_stop=True)
    return run_k_party(parties, cfg, cfg.sample_size_per_round * (len(parties) - 1), "mwuemp")


# ------------------------------------------------------------- invariants


def potential_violations(result: ProtocolResult, c: float, rho: float) -> list[int]:
    """Rounds whose error was at most ``c`` yet the potential grew by more than ``1 + c rho``."""
    phi = result.potential_trace
    bad = []
    for t, err in enumerate(result.per_round_weighted_error):
        if err <= c and phi[t + 1] > phi[t] * (1 + c * rho) * (1 + POTENTIAL_RTOL):
            bad.append(t + 1)
    return bad


def majority_bound(result: ProtocolResult, rho: float) -> tuple[int, float, float]:
    """``(|S|, |S| (1+rho)^(T/2), phi_T)`` for S = points wrong in at least half the rounds."""
    T = result.rounds_used
    S = int(np.sum(2 * result.mistake_counts >= T))
    return S, S * (1 + rho) ** (T / 2), result.potential_trace[-1]


# -------------------------------------------------------------- baselines


def _single(name, c, D, net, rounds=1, inseparable=0) -> ProtocolResult:
    ens = MajorityEnsemble((c,))
    return ProtocolResult(name, ens, accuracy(ens, D), net.ledger, rounds, inseparable_rounds=inseparable)


def run_naive(parties, cfg: MwuConfig) -> ProtocolResult:
    coord, workers = _split(parties)
    net = Network(coord.data.dimension)
    net.ledger.begin_round()
    got = []
    for p in workers:
        net.send(Message.points(p.id, coord.id, p.data))
        got.append(net.receive(p.id, coord.id))
    h, sep = _learn(coord.data.concat(*got), cfg, ("naive",))
    return _single("naive", h, union(parties), net, inseparable=int(not sep))


def run_voting(parties, cfg: MwuConfig) -> ProtocolResult:
    coord, workers = _split(parties)
    net = Network(coord.data.dimension)
    net.ledger.begin_round()
    h0, sep = _learn(coord.data, cfg, ("vote", coord.id))
    members, insep = [h0], int(not sep)
    for p in workers:
        h, sep = _learn(p.data, cfg, ("vote", p.id))
        insep += not sep
        net.send(Message.classifier(p.id, coord.id, h))
        members.append(net.receive(p.id, coord.id))
    ens = MajorityEnsemble(members)
    D = union(parties)
    return ProtocolResult("voting", ens, accuracy(ens, D), net.ledger, 1, inseparable_rounds=insep)


def _sample_and_ship(name, parties, cfg, per_worker: int) -> ProtocolResult:
    coord, workers = _split(parties)
    rng = np.random.default_rng(cfg.seed)
    net = Network(coord.data.dimension)
    net.ledger.begin_round()
    got = []
    for p in workers:
        idx = rng.integers(0, len(p.data), size=per_worker)
        net.send(Message.points(p.id, coord.id, _uniform(p.data.subset(idx))))
        got.append(net.receive(p.id, coord.id))
    h, sep = _learn(coord.data.concat(*got), cfg, (name,))
    return _single(name, h, union(parties), net, inseparable=int(not sep))


def rand_sample_size(d: int, epsilon: float) -> int:
    return sample_size(SampleSizeParams(epsilon, d))


def run_rand(parties, cfg: MwuConfig) -> ProtocolResult:
    d = parties[0].data.dimension
    return _sample_and_ship("rand", parties, cfg, rand_sample_size(d, cfg.epsilon))


def run_randemp(parties, cfg: MwuConfig) -> ProtocolResult:
    d = parties[0].data.dimension
    return _sample_and_ship("randemp", parties, cfg, RANDEMP_POINTS_PER_DIM * d)


def run_maxmarg(parties, cfg: MwuConfig, max_rounds: int = 100) -> ProtocolResult:
    """Iterative support-point exchange.

    Per round the coordinator broadcasts the support points of its current
    classifier, every worker retrains on its data plus everything it has
    received and answers with its own support points, and the coordinator
    retrains.  At least one round runs.  After each round it stops when
    the coordinator's classifier is accurate enough, when the words spent
    reach the Naive cost, or when the round brought no point that its
    receiver did not already hold.
    """
    coord, workers = _split(parties)
    d = coord.data.dimension
    net = Network(d)
    D = union(parties)
    naive_cost = sum((d + 1) * len(p.data) for p in workers)
    tol = cfg.learner.margin_tolerance
    # training sets as sets of (party id, row index)
    coord_has = {(coord.id, i) for i in range(len(coord.data))}
    worker_has = {p.id: {(p.id, i) for i in range(len(p.data))} for p in workers}
    by_id = {p.id: p.data for p in parties}

    def materialise(keys):
        keys = sorted(keys)
        X = np.array([by_id[pid].X[i] for pid, i in keys])
        y = np.array([by_id[pid].y[i] for pid, i in keys])
        return WeightedDataset.from_arrays(X, y)

    def supports(keys, h):
        keys = sorted(keys)
        return [keys[j] for j in sorted(support_set(materialise(keys), h, tol))]

    insep = 0
    h, sep = _learn(materialise(coord_has), cfg, ("maxmarg", 0, coord.id))
    insep += not sep
    rounds = 0
    while rounds < max_rounds:
        rounds += 1
        net.ledger.begin_round()
        sp1 = supports(coord_has, h)
        pts1 = materialise(sp1)
        net.broadcast(coord.id, [p.id for p in workers], lambda r: Message.points(coord.id, r, pts1))
        new = 0
        replies = []
        for p in workers:
            net.receive(coord.id, p.id)
            new += len(set(sp1) - worker_has[p.id])
            worker_has[p.id] |= set(sp1)
            hi, sep = _learn(materialise(worker_has[p.id]), cfg, ("maxmarg", rounds, p.id))
            insep += not sep
            own = {k for k in worker_has[p.id] if k[0] == p.id}
            spi = supports(own, hi)
            net.send(Message.points(p.id, coord.id, materialise(spi)))
            net.receive(p.id, coord.id)
            replies.extend(spi)
        new += len(set(replies) - coord_has)
        coord_has |= set(replies)
        h, sep = _learn(materialise(coord_has), cfg, ("maxmarg", rounds, coord.id))
        insep += not sep
        if (new == 0 or accuracy(h, D) >= cfg.target_accuracy
                or net.ledger.total_words >= naive_cost):
            break
    return _single("maxmarg", h, D, net, rounds, insep)


PROTOCOLS: dict[str, Callable[[Sequence[Party], MwuConfig], ProtocolResult]] = {
    "naive": run_naive,
    "voting": run_voting,
    "rand": run_rand,
    "randemp": run_randemp,
    "maxmarg": run_maxmarg,
    "mwu": run_mwu,
    "mwuemp": run_mwuemp,
    "kparty_mwu": run_k_party,
}


# ------------------------------------------------------ closed-form costs


def naive_words(worker_sizes: Sequence[int], d: int) -> int:
    return sum((d + 1) * n for n in worker_sizes)


def voting_words(k: int, d: int) -> int:
    return (d + 1) * (k - 1)


def rand_words(k: int, d: int, epsilon: float) -> int:
    return (k - 1) * (d + 1) * rand_sample_size(d, epsilon)


def randemp_words(k: int, d: int) -> int:
    return RANDEMP_POINTS_PER_DIM * d * (d + 1) * (k - 1)


def mwu_words(k: int, d: int, s: int, rounds: int) -> int:
    return ((d + 1) * s + (d + 1)) * (k - 1) * rounds
