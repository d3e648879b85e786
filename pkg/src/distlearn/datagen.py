"""Synthetic Gaussian-mixture datasets, partitioning across parties, libSVM files."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Literal, Sequence

import numpy as np

from .types import LinearClassifier, WeightedDataset

PartitionMode = Literal["random", "by_cluster", "by_halfspace"]
MAX_REJECTION_FACTOR = 100


@dataclass(frozen=True)
class Component:
    """An isotropic Gaussian ``N(mean, scale^2 I)`` contributing ``count`` points.

    ``label`` is the class of every point in non-separable mode.  In
    separable mode the ground-truth hyperplane decides labels, and a
    nonzero ``label`` keeps only draws that land on that side.  ``party``
    pins the component to a party under ``by_cluster`` partitioning.
    """

    mean: tuple[float, ...]
    scale: float
    count: int
    label: int = 0
    party: int | None = None


@dataclass(frozen=True)
class SyntheticSpec:
    k: int = 2
    d: int = 5
    n_per_party: int = 2000
    gamma: float = 0.05
    mixture: tuple[Component, ...] = ()
    partition_mode: PartitionMode = "random"
    separable: bool = True
    truth_normal: tuple[float, ...] | None = None
    truth_offset: float = 0.0
    partition_normal: tuple[float, ...] | None = None
    seed: int = 0

    def __post_init__(self):
        if self.k < 1 or self.d < 1 or self.n_per_party < 1:
            raise ValueError("k, d and n_per_party must be positive")
        if self.gamma < 0:
            raise ValueError("gamma must be nonnegative")
        if self.partition_mode not in ("random", "by_cluster", "by_halfspace"):
            raise ValueError(f"unknown partition mode {self.partition_mode!r}")
        for c in self.mixture:
            if len(c.mean) != self.d:
                raise ValueError("component mean has the wrong dimension")
        object.__setattr__(self, "mixture", tuple(
            c if isinstance(c, Component) else Component(**c) for c in self.mixture))

    @property
    def total(self) -> int:
        return self.k * self.n_per_party

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "SyntheticSpec":
        d = dict(d)
        d["mixture"] = tuple(Component(**{**c, "mean": tuple(c["mean"])}) for c in d.get("mixture", ()))
        for key in ("truth_normal", "partition_normal"):
            if d.get(key) is not None:
                d[key] = tuple(d[key])
        return cls(**d)


@dataclass
class SyntheticData:
    spec: SyntheticSpec
    parties: list[WeightedDataset]
    truth: LinearClassifier | None
    # mixture component of every point, per party
    components: list[np.ndarray] = field(default_factory=list)

    @property
    def full(self) -> WeightedDataset:
        return self.parties[0].concat(*self.parties[1:])


def _unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def default_mixture(spec: SyntheticSpec, truth: np.ndarray, rng) -> tuple[Component, ...]:
    """Two unit Gaussians straddling the ground-truth hyperplane, one per class."""
    shift = rng.normal(size=spec.d)
    shift -= (shift @ truth) * truth
    half = spec.total // 2
    pos = tuple(3.0 * truth + shift)
    neg = tuple(-3.0 * truth + shift)
    return (
        Component(pos, 1.0, spec.total - half, 1),
        Component(neg, 1.0, half, -1),
    )


def generate(spec: SyntheticSpec) -> SyntheticData:
    rng = np.random.default_rng(spec.seed)
    truth_w = _unit(spec.truth_normal) if spec.truth_normal is not None else _unit(rng.normal(size=spec.d))
    truth_b = spec.truth_offset
    mixture = spec.mixture or default_mixture(spec, truth_w, rng)
    if sum(c.count for c in mixture) != spec.total:
        raise ValueError(f"mixture counts sum to {sum(c.count for c in mixture)}, expected {spec.total}")

    Xs, ys, comps = [], [], []
    for j, c in enumerate(mixture):
        mean = np.asarray(c.mean, dtype=float)
        kept_X, kept_y = [], []
        have, drawn = 0, 0
        while have < c.count:
            if drawn > MAX_REJECTION_FACTOR * c.count:
                raise RuntimeError(
                    f"component {j}: rejection sampling exceeded {MAX_REJECTION_FACTOR}x its size; "
                    "gamma is too large for this mixture"
                )
            m = max(2 * (c.count - have), 16)
            X = mean + c.scale * rng.normal(size=(m, spec.d))
            drawn += m
            if spec.separable:
                margin = X @ truth_w + truth_b
                keep = np.abs(margin) >= spec.gamma if spec.gamma > 0 else np.ones(m, bool)
                if c.label:
                    keep &= np.sign(margin) == c.label
                y = np.where(margin >= 0, 1, -1)
            else:
                keep = np.ones(m, bool)
                y = np.full(m, c.label if c.label else 1)
            X, y = X[keep][: c.count - have], y[keep][: c.count - have]
            kept_X.append(X)
            kept_y.append(y)
            have += len(y)
        Xs.append(np.vstack(kept_X))
        ys.append(np.concatenate(kept_y))
        comps.append(np.full(c.count, j))
    X, y, comp = np.vstack(Xs), np.concatenate(ys), np.concatenate(comps)

    assignment = partition(X, comp, mixture, spec, rng)
    parties = [WeightedDataset.from_arrays(X[idx], y[idx]) for idx in assignment]
    truth = LinearClassifier(truth_w, truth_b) if spec.separable else None
    return SyntheticData(spec, parties, truth, [comp[idx] for idx in assignment])


def partition(X, comp, mixture: Sequence[Component], spec: SyntheticSpec, rng) -> list[np.ndarray]:
    """Index arrays, one per party, forming a disjoint cover of the rows of ``X``."""
    n, k = len(X), spec.k
    if spec.partition_mode == "random":
        order = rng.permutation(n)
        return [np.sort(order[i * spec.n_per_party:(i + 1) * spec.n_per_party]) for i in range(k)]
    if spec.partition_mode == "by_halfspace":
        u = _unit(spec.partition_normal) if spec.partition_normal is not None else _unit(rng.normal(size=spec.d))
        order = np.argsort(X @ u, kind="stable")
        return [np.sort(order[i * spec.n_per_party:(i + 1) * spec.n_per_party]) for i in range(k)]
    owner = np.array([c.party if c.party is not None else j % k for j, c in enumerate(mixture)])
    if np.any((owner < 0) | (owner >= k)):
        raise ValueError("component party index out of range")
    return [np.flatnonzero(owner[comp] == i) for i in range(k)]


def min_normalized_margin(c: LinearClassifier, ds: WeightedDataset) -> float:
    return float(np.min(ds.y * c.decision(ds.X)) / np.linalg.norm(c.normal))


# ------------------------------------------------------------------ presets


def _adversarial(k: int, d: int, n_per_party: int, seed: int = 0) -> SyntheticSpec:
    """Parties sit in slabs along x_1; the truth is sign(x_2).

    Inside each slab the positive and negative clusters are also offset
    along x_1, so a party's own max-margin separator tilts towards x_1 and
    extrapolates badly to the other slabs.
    """
    comps = []
    half = n_per_party // 2
    for i in range(k):
        centre = 12.0 * (i - (k - 1) / 2)
        tilt = -2.0 if i % 2 == 0 else 2.0
        pos = np.zeros(d)
        pos[0], pos[1] = centre + tilt, 1.0
        neg = np.zeros(d)
        neg[0], neg[1] = centre - tilt, -1.0
        comps.append(Component(tuple(pos), 0.3, n_per_party - half, 1, i))
        comps.append(Component(tuple(neg), 0.3, half, -1, i))
    e1 = tuple(np.eye(d)[0])
    e2 = tuple(np.eye(d)[1])
    return SyntheticSpec(
        k=k, d=d, n_per_party=n_per_party, gamma=0.05, mixture=tuple(comps),
        partition_mode="by_halfspace", separable=True, truth_normal=e2,
        partition_normal=e1, seed=seed,
    )


def _noisy(k: int, d: int, n_per_party: int, spread: float, seed: int) -> SyntheticSpec:
    """Overlapping class clusters (not separable), at benchmark sizes."""
    rng = np.random.default_rng(1000 + seed)
    comps = []
    per = n_per_party // 2
    for i in range(k):
        centre = rng.normal(scale=4.0, size=d)
        direction = _unit(rng.normal(size=d))
        comps.append(Component(tuple(centre + spread * direction), 1.0, n_per_party - per, 1, i))
        comps.append(Component(tuple(centre - spread * direction), 1.0, per, -1, i))
    return SyntheticSpec(k=k, d=d, n_per_party=n_per_party, gamma=0.0, mixture=tuple(comps),
                         partition_mode="by_cluster", separable=False, seed=seed)


PRESETS: dict[str, SyntheticSpec] = {
    "guarantee": SyntheticSpec(k=2, d=5, n_per_party=2000, gamma=0.05, partition_mode="by_halfspace"),
    "small": SyntheticSpec(k=2, d=3, n_per_party=300, gamma=0.05, partition_mode="by_halfspace"),
    "adversarial2": _adversarial(2, 5, 1000),
    "adversarial4": _adversarial(4, 5, 500),
    # sizes and dimensions of the standard synthetic benchmarks
    "synthetic1": _noisy(2, 50, 5000, 2.5, 1),
    "synthetic2": _adversarial(2, 50, 5000, 2),
    "synthetic3": _noisy(2, 50, 8500, 2.0, 3),
    "synthetic4": _noisy(4, 50, 5000, 2.5, 4),
    "synthetic5": _adversarial(4, 50, 5000, 5),
    "synthetic6": _noisy(4, 50, 8500, 2.0, 6),
}


# --------------------------------------------------------------- file I/O


class LibSVMFormatError(ValueError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


def _parse_label(tok: str, lineno: int) -> int:
    try:
        v = float(tok)
    except ValueError:
        raise LibSVMFormatError(lineno, f"non-numeric label {tok!r}") from None
    return 1 if v > 0 else -1


def read_libsvm(path, dimension: int | None = None) -> WeightedDataset:
    """Parse ``label index:value ...`` lines (1-based, strictly increasing indices).

    Positive labels map to +1; zero and negative labels map to -1.  Absent
    features are 0.  ``dimension`` defaults to the largest index seen.
    """
    rows, labels = [], []
    max_index = 0
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tokens = line.split()
            labels.append(_parse_label(tokens[0], lineno))
            feats, last = {}, 0
            for tok in tokens[1:]:
                idx_s, sep, val_s = tok.partition(":")
                if not sep:
                    raise LibSVMFormatError(lineno, f"feature {tok!r} is not index:value")
                try:
                    idx, val = int(idx_s), float(val_s)
                except ValueError:
                    raise LibSVMFormatError(lineno, f"non-numeric feature {tok!r}") from None
                if idx < 1:
                    raise LibSVMFormatError(lineno, f"feature index {idx} is not 1-based")
                if idx <= last:
                    raise LibSVMFormatError(lineno, f"feature index {idx} does not increase")
                feats[idx] = val
                last = idx
            max_index = max(max_index, last)
            rows.append(feats)
    d = dimension if dimension is not None else max(max_index, 1)
    if max_index > d:
        raise ValueError(f"file uses feature index {max_index} beyond dimension {d}")
    X = np.zeros((len(rows), d))
    for r, feats in enumerate(rows):
        for idx, val in feats.items():
            X[r, idx - 1] = val
    return WeightedDataset(X, np.array(labels, dtype=int), np.ones(len(rows)), d)


def format_libsvm_line(x, label: int) -> str:
    feats = " ".join(f"{j + 1}:{format(float(v), '.17g')}" for j, v in enumerate(x) if v != 0)
    head = "+1" if label == 1 else "-1"
    return f"{head} {feats}" if feats else head


def write_libsvm(ds: WeightedDataset, path) -> None:
    with open(path, "w") as fh:
        for x, label in zip(ds.X, ds.y):
            fh.write(format_libsvm_line(x, int(label)) + "\n")


def write_manifest(path, spec: SyntheticSpec, files: Sequence[str]) -> None:
    Path(path).write_text(json.dumps({"spec": spec.to_dict(), "files": list(files)}, indent=2) + "\n")


def read_manifest(path) -> tuple[SyntheticSpec, list[str]]:
    data = json.loads(Path(path).read_text())
    return SyntheticSpec.from_dict(data["spec"]), data["files"]
