"""Instance generators shared by several test modules."""

import numpy as np

from distlearn.opt.simplex import LinearProgram
from distlearn.types import WeightedDataset


def separable_dataset(n, d, seed, margin=0.05):
    """Points from two Gaussians at +-(3,...,3), labelled by a random hyperplane."""
    rng = np.random.default_rng(seed)
    w = rng.normal(size=d)
    w /= np.linalg.norm(w)
    X = np.vstack([rng.normal(3.0, 1.0, (n // 2, d)), rng.normal(-3.0, 1.0, (n - n // 2, d))])
    s = X @ w
    X = X[np.abs(s) >= margin]
    y = np.where(X @ w >= 0, 1, -1)
    return WeightedDataset.from_arrays(X, y), w


def random_feasible_lp(n, d, seed, box=(0.0, 1.0)):
    """Rows through a random interior point of the box, so the LP is feasible."""
    rng = np.random.default_rng(seed)
    lo, hi = box
    x0 = rng.uniform(lo + 0.2 * (hi - lo), hi - 0.2 * (hi - lo), d)
    A = rng.uniform(-1, 1, (n, d))
    b = A @ x0 - rng.uniform(0, 0.5, n)
    return LinearProgram(A, b, rng.normal(size=d), lo, hi)


def random_lp(n, d, seed, box=(-2.0, 2.0)):
    """Random rows and right-hand sides: some instances are infeasible."""
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(n, d))
    b = rng.normal(size=n) + rng.uniform(0, 1.5)
    return LinearProgram(A, b, rng.normal(size=d), box[0], box[1])


def random_halfspaces(n, d, seed):
    """``n`` rows ``a.x >= beta`` all satisfied by a point inside [-0.5, 0.5]^d."""
    rng = np.random.default_rng(seed)
    x0 = rng.uniform(-0.5, 0.5, d)
    A = rng.normal(size=(n, d))
    b = A @ x0 - rng.uniform(0, 1, n)
    return A, b
