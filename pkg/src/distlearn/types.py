"""Points, weighted datasets and linear classifiers shared by every protocol.

Conventions used throughout the package:

* a point exactly on a hyperplane (``<w, x> + b == 0``) is classified ``+1``;
* a majority vote that ends in a tie is resolved to ``-1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

# Weights are rescaled to mean 1 once their sum passes this bound.
WEIGHT_OVERFLOW_BOUND = 1e300


class DimensionMismatch(ValueError):
    pass


def _frozen(a, dtype=float) -> np.ndarray:
    arr = np.array(a, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class LabeledPoint:
    coords: np.ndarray
    label: int

    def __post_init__(self):
        object.__setattr__(self, "coords", _frozen(self.coords).reshape(-1))
        if self.label not in (-1, 1):
            raise ValueError(f"label must be +1 or -1, got {self.label!r}")
        object.__setattr__(self, "label", int(self.label))

    @property
    def dimension(self) -> int:
        return self.coords.shape[0]


@dataclass(frozen=True, eq=False)
class WeightedDataset:
    """Points stored row-wise in ``X`` with labels ``y`` and weights ``weights``."""

    X: np.ndarray
    y: np.ndarray
    weights: np.ndarray
    dimension: int

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        if X.ndim == 1 and X.size == 0:
            X = X.reshape(0, self.dimension)
        if X.ndim != 2 or X.shape[1] != self.dimension:
            raise DimensionMismatch(
                f"expected points of dimension {self.dimension}, got array of shape {X.shape}"
            )
        y = np.asarray(self.y).astype(int).reshape(-1)
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        if not (len(y) == len(w) == X.shape[0]):
            raise ValueError("points, labels and weights must have the same length")
        if not np.all((y == 1) | (y == -1)):
            raise ValueError("labels must be +1 or -1")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite and nonnegative")
        if len(w) and w.sum() <= 0:
            raise ValueError("a nonempty dataset needs positive total weight")
        object.__setattr__(self, "X", _frozen(X))
        object.__setattr__(self, "y", _frozen(y, dtype=int))
        object.__setattr__(self, "weights", _frozen(w))

    @classmethod
    def from_arrays(cls, X, y, weights=None) -> "WeightedDataset":
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if weights is None:
            weights = np.ones(X.shape[0])
        return cls(X, y, weights, X.shape[1])

    @classmethod
    def from_points(cls, points: Sequence[LabeledPoint], weights=None, dimension=None):
        if dimension is None:
            if not points:
                raise ValueError("dimension is required for an empty point list")
            dimension = points[0].dimension
        for p in points:
            if p.dimension != dimension:
                raise DimensionMismatch(f"point of dimension {p.dimension}, expected {dimension}")
        X = np.array([p.coords for p in points], dtype=float).reshape(len(points), dimension)
        y = np.array([p.label for p in points], dtype=int)
        if weights is None:
            weights = np.ones(len(points))
        return cls(X, y, weights, dimension)

    @classmethod
    def empty(cls, dimension: int) -> "WeightedDataset":
        return cls(np.zeros((0, dimension)), np.zeros(0, dtype=int), np.zeros(0), dimension)

    def __len__(self) -> int:
        return self.X.shape[0]

    def __getitem__(self, i: int) -> LabeledPoint:
        return LabeledPoint(self.X[i], int(self.y[i]))

    @property
    def total_weight(self) -> float:
        return float(self.weights.sum())

    def points(self) -> list[LabeledPoint]:
        return [self[i] for i in range(len(self))]

    def with_weights(self, weights) -> "WeightedDataset":
        return WeightedDataset(self.X, self.y, weights, self.dimension)

    def subset(self, idx) -> "WeightedDataset":
        idx = np.asarray(idx, dtype=int)
        return WeightedDataset(self.X[idx], self.y[idx], self.weights[idx], self.dimension)

    def concat(self, *others: "WeightedDataset") -> "WeightedDataset":
        parts = [self, *others]
        for o in others:
            if o.dimension != self.dimension:
                raise DimensionMismatch("cannot concatenate datasets of different dimension")
        return WeightedDataset(
            np.vstack([p.X for p in parts]),
            np.concatenate([p.y for p in parts]),
            np.concatenate([p.weights for p in parts]),
            self.dimension,
        )


@dataclass(frozen=True, eq=False)
class LinearClassifier:
    normal: np.ndarray
    offset: float = 0.0

    def __post_init__(self):
        normal = _frozen(self.normal).reshape(-1)
        if not np.any(normal != 0):
            raise ValueError("classifier normal must not be the zero vector")
        object.__setattr__(self, "normal", normal)
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def dimension(self) -> int:
        return self.normal.shape[0]

    def decision(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.dimension:
            raise DimensionMismatch(f"classifier has dimension {self.dimension}, points {X.shape[1]}")
        return X @ self.normal + self.offset

    def predict(self, X) -> np.ndarray:
        return np.where(self.decision(X) >= 0, 1, -1)

    def scaled(self, alpha: float) -> "LinearClassifier":
        return LinearClassifier(self.normal * alpha, self.offset * alpha)

    def words(self) -> list[float]:
        return [*map(float, self.normal), self.offset]

    def same_as(self, other: "LinearClassifier") -> bool:
        return np.array_equal(self.normal, other.normal) and self.offset == other.offset


@dataclass(frozen=True, eq=False)
class MajorityEnsemble:
    members: tuple[LinearClassifier, ...]

    def __post_init__(self):
        members = tuple(self.members)
        if not members:
            raise ValueError("an ensemble needs at least one member")
        d = members[0].dimension
        if any(m.dimension != d for m in members):
            raise DimensionMismatch("ensemble members disagree on dimension")
        object.__setattr__(self, "members", members)

    def __len__(self) -> int:
        return len(self.members)

    @property
    def dimension(self) -> int:
        return self.members[0].dimension

    def votes(self, X) -> np.ndarray:
        """Number of members voting +1, per row of ``X``."""
        return sum((m.predict(X) == 1).astype(int) for m in self.members)

    def predict(self, X) -> np.ndarray:
        plus = self.votes(X)
        return np.where(2 * plus > len(self.members), 1, -1)

    def same_as(self, other: "MajorityEnsemble") -> bool:
        return len(self) == len(other) and all(
            a.same_as(b) for a, b in zip(self.members, other.members)
        )


def _point_coords(c, p: LabeledPoint) -> np.ndarray:
    if p.dimension != c.dimension:
        raise DimensionMismatch(f"classifier has dimension {c.dimension}, point {p.dimension}")
    return p.coords[None, :]


def classify(c: LinearClassifier, p: LabeledPoint) -> int:
    return int(c.predict(_point_coords(c, p))[0])


def ensemble_classify(e: MajorityEnsemble, p: LabeledPoint) -> int:
    return int(e.predict(_point_coords(e, p))[0])


def weighted_error(c, ds: WeightedDataset) -> float:
    """Misclassified weight over total weight; ``c`` may be a classifier or an ensemble."""
    if len(ds) == 0:
        raise ValueError("weighted error of an empty dataset is undefined")
    total = ds.weights.sum()
    if total <= 0:
        raise ValueError("dataset has zero total weight")
    wrong = c.predict(ds.X) != ds.y
    return float(ds.weights[wrong].sum() / total)


def accuracy(c, ds: WeightedDataset) -> float:
    """Unweighted fraction of correctly classified points."""
    if len(ds) == 0:
        raise ValueError("accuracy of an empty dataset is undefined")
    return float(np.mean(c.predict(ds.X) == ds.y))


def renormalize(weights: np.ndarray) -> tuple[np.ndarray, float]:
    """Rescale weights to mean 1 if their sum passed the overflow bound.

    Returns the (possibly) rescaled weights and the natural log of the factor
    that was divided out, so callers can keep track of the true totals.
    """
    total = weights.sum()
    if total <= WEIGHT_OVERFLOW_BOUND:
        return weights, 0.0
    mean = total / len(weights)
    return weights / mean, float(np.log(mean))
