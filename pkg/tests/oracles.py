"""Independent reference computations used by the test suite."""

from itertools import combinations

import numpy as np


def vertex_enumeration(A, b, g, lo, hi, tol=1e-9):
    """Brute-force ``min g.x`` over ``A x >= b`` within a finite box.

    Solves every d-subset of rows (hard rows plus box faces) as equalities,
    keeps the feasible intersections and returns ``(x, z)``; ``None`` when
    no vertex is feasible.  Exponential in d; fine for n <= 30, d <= 4.
    """
    A = np.atleast_2d(np.asarray(A, float))
    b = np.asarray(b, float)
    g = np.asarray(g, float)
    d = g.size
    G = np.vstack([A, np.eye(d), -np.eye(d)])
    h = np.concatenate([b, lo, -np.asarray(hi, float)])
    subsets = np.array(list(combinations(range(G.shape[0]), d)))
    M = G[subsets]
    rhs = h[subsets]
    ok = np.abs(np.linalg.det(M)) > 1e-12
    M, rhs = M[ok], rhs[ok]
    X = np.linalg.solve(M, rhs[..., None])[..., 0]
    feasible = np.all(X @ G.T - h >= -tol * np.maximum(1, np.abs(h)), axis=1)
    if not feasible.any():
        return None
    X = X[feasible]
    zs = X @ g
    i = int(np.argmin(zs))
    return X[i], float(zs[i])


def chi_square_uniformity_pvalue(counts, probs):
    from scipy import stats

    counts = np.asarray(counts, float)
    expected = counts.sum() * np.asarray(probs, float)
    return float(stats.chisquare(counts, expected).pvalue)
