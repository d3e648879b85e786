"""Linear separator training on weighted point sets.

``train`` in hard-separating mode maximises the functional margin

    max delta  s.t.  y_i (<w, x_i> + b) >= delta,  |w_j| <= 1

with the package's own simplex, so a separable input always comes back
with zero training error.  Best-effort mode falls back to a pocket
perceptron whose epochs draw points in proportion to their weights.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .opt.simplex import LinearProgram, simplex_solve
from .types import LinearClassifier, WeightedDataset, weighted_error


class InseparableError(ValueError):
    """The margin LP has no solution with positive margin."""


@dataclass(frozen=True)
class LearnerConfig:
    max_iterations: int = 200
    margin_tolerance: float = 1e-6
    mode: Literal["hard_separating", "best_effort"] = "hard_separating"

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")
        if not self.margin_tolerance > 0:
            raise ValueError("margin_tolerance must be positive")
        if self.mode not in ("hard_separating", "best_effort"):
            raise ValueError(f"unknown learner mode {self.mode!r}")


def _single_label(ds: WeightedDataset) -> LinearClassifier:
    # Every point on the positive side of x_1 + offset (or the negative side).
    x1 = ds.X[:, 0]
    normal = np.zeros(ds.dimension)
    normal[0] = 1.0
    if ds.y[0] == 1:
        return LinearClassifier(normal, 1.0 - x1.min())
    return LinearClassifier(normal, -1.0 - x1.max())


def max_margin(ds: WeightedDataset) -> tuple[np.ndarray, float, float]:
    """Solve the margin LP; returns ``(w, b, delta)``."""
    d = ds.dimension
    X, y = ds.X, ds.y.astype(float)
    B = 1.0 + float(np.abs(X).sum(axis=1).max())
    A = np.column_stack([y[:, None] * X, y, -np.ones(len(y))])
    g = np.zeros(d + 2)
    g[-1] = -1.0
    lo = np.concatenate([-np.ones(d), [-B, -2.0 * B]])
    hi = np.concatenate([np.ones(d), [B, 1.0]])
    sol = simplex_solve(LinearProgram(A, np.zeros(len(y)), g, lo, hi))
    return sol.x[:d], float(sol.x[d]), float(sol.x[d + 1])


def _pocket_perceptron(ds, cfg, rng):
    X, y, w = ds.X, ds.y.astype(float), ds.weights
    p = w / w.sum()
    pos, neg = y > 0, y < 0
    # start from the difference of the weighted class means
    normal = np.average(X[pos], axis=0, weights=w[pos]) - np.average(X[neg], axis=0, weights=w[neg])
    offset = -float(normal @ np.average(X, axis=0, weights=w))
    if not np.any(normal):
        normal = np.eye(ds.dimension)[0]
    best = LinearClassifier(normal, offset)
    best_err = weighted_error(best, ds)
    scale = float(np.abs(X).max()) or 1.0
    for epoch in range(cfg.max_iterations):
        if best_err == 0.0:
            break
        idx = rng.choice(len(ds), size=len(ds), p=p)
        Xe, ye = X[idx], y[idx]
        wrong = ye * (Xe @ normal + offset) <= 0
        if not wrong.any():
            continue
        step = 1.0 / (np.sqrt(epoch + 1.0) * wrong.sum())
        normal = normal + step * (ye[wrong, None] * Xe[wrong]).sum(axis=0)
        offset = offset + step * scale * ye[wrong].sum()
        if not np.any(normal):
            continue
        cand = LinearClassifier(normal, offset)
        err = weighted_error(cand, ds)
        if err < best_err:
            best, best_err = cand, err
    return best


def _fit(ds, cfg, seed, fallback: bool) -> tuple[LinearClassifier, bool]:
    if len(ds) == 0:
        raise ValueError("cannot train on an empty dataset")
    if np.all(ds.y == ds.y[0]):
        return _single_label(ds), True
    w, b, delta = max_margin(ds)
    if delta > 0 and np.any(w):
        c = LinearClassifier(w, b)
        if weighted_error(c, ds) == 0.0:
            return c, True
    if not fallback:
        raise InseparableError(f"points are not linearly separable (best margin {delta:.3g})")
    return _pocket_perceptron(ds, cfg, np.random.default_rng(seed)), False


def train(ds: WeightedDataset, cfg: LearnerConfig = LearnerConfig(), seed=None) -> LinearClassifier:
    return _fit(ds, cfg, seed, fallback=cfg.mode == "best_effort")[0]


def train_reporting(ds, cfg: LearnerConfig = LearnerConfig(), seed=None) -> tuple[LinearClassifier, bool]:
    """Train, degrading to best effort on inseparable input.

    Returns the classifier and whether the input was separable.
    """
    return _fit(ds, cfg, seed, fallback=True)


def signed_margins(ds: WeightedDataset, c: LinearClassifier) -> np.ndarray:
    return ds.y * c.decision(ds.X) / np.linalg.norm(c.normal)


def support_set(ds: WeightedDataset, c: LinearClassifier, tol: float = 1e-6) -> set[int]:
    """Points within ``tol`` of the smallest margin among correct points, plus every mistake."""
    if len(ds) == 0:
        raise ValueError("support set of an empty dataset")
    correct = c.predict(ds.X) == ds.y
    dist = np.abs(c.decision(ds.X)) / np.linalg.norm(c.normal)
    chosen = ~correct
    if correct.any():
        closest = dist[correct].min()
        chosen |= correct & (dist <= closest + tol)
    return set(np.flatnonzero(chosen).tolist())
