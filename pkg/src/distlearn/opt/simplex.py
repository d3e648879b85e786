"""Dense simplex for small linear programs in inequality form.

Solves ``min g.x  s.t.  A x >= b,  lo <= x <= hi``.

The method walks vertices of the feasible polytope: a basis is a set of
``d`` active rows whose matrix is invertible.  Viewed through slack
variables this is the textbook primal simplex, so Bland's smallest-index
rule (for both the row that leaves the active set and the row that enters
it) rules out cycling.  The vertex and multipliers are recomputed from the
basis matrix at every pivot instead of being updated in a tableau, which
keeps rounding error from accumulating over long runs.

Infinite box bounds are replaced by a large artificial box; an optimum
that leans on an artificial bound is reported as unbounded.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

FEAS_TOL = 1e-9
OPT_TOL = 1e-10
ARTIFICIAL_BOUND = 1e7


class LPError(Exception):
    pass


class InfeasibleError(LPError):
    """Raised when the constraints have no common point."""


class UnboundedError(LPError):
    """Raised when the objective decreases without bound."""


@dataclass(frozen=True, eq=False)
class LinearProgram:
    """``min g.x`` subject to ``A x >= b`` and the box ``lo <= x <= hi``."""

    A: np.ndarray
    b: np.ndarray
    g: np.ndarray
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        b = np.asarray(self.b, dtype=float).reshape(-1)
        g = np.asarray(self.g, dtype=float).reshape(-1)
        d = g.shape[0]
        if A.size == 0:
            A = A.reshape(0, d)
        lo = np.broadcast_to(np.asarray(self.lo, dtype=float), (d,)).copy()
        hi = np.broadcast_to(np.asarray(self.hi, dtype=float), (d,)).copy()
        if A.shape != (b.shape[0], d):
            raise ValueError(f"A has shape {A.shape}, expected ({b.shape[0]}, {d})")
        if np.any(lo > hi):
            raise ValueError("box has lo > hi")
        for name, arr in (("A", A), ("b", b), ("g", g), ("lo", lo), ("hi", hi)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def d(self) -> int:
        return self.g.shape[0]

    @property
    def box_is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.lo)) and np.all(np.isfinite(self.hi)))

    def slacks(self, x) -> np.ndarray:
        return self.A @ np.asarray(x, dtype=float) - self.b

    def objective(self, x) -> float:
        return float(self.g @ np.asarray(x, dtype=float))

    def with_rows(self, A_extra, b_extra) -> "LinearProgram":
        A_extra = np.atleast_2d(np.asarray(A_extra, dtype=float)).reshape(-1, self.d)
        return LinearProgram(
            np.vstack([self.A, A_extra]),
            np.concatenate([self.b, np.asarray(b_extra, dtype=float).reshape(-1)]),
            self.g, self.lo, self.hi,
        )


@dataclass
class LPSolution:
    x: np.ndarray
    objective: float
    pivots: int
    basis: list[int] = field(default_factory=list)


def _pivot_loop(G, h, c, basis, max_pivots):
    """Simplex over ``{z : G z >= h}`` from the vertex defined by ``basis``.

    Returns ``(z, basis, multipliers, pivots)`` at an optimal vertex.
    Raises UnboundedError if an improving edge is unbounded.
    """
    pivots = 0
    basis = list(basis)
    while True:
        B = G[basis]
        Binv = np.linalg.inv(B)
        z = Binv @ h[basis]
        lam = Binv.T @ c
        neg = [r for r in range(len(basis)) if lam[r] < -OPT_TOL]
        if not neg:
            return z, basis, lam, pivots
        if pivots >= max_pivots:
            raise RuntimeError(f"simplex did not converge within {max_pivots} pivots")
        r = min(neg, key=lambda r: basis[r])
        u = Binv[:, r]
        rate = G @ u
        slack = np.maximum(G @ z - h, 0.0)
        rate[basis] = 0.0
        blocking = np.flatnonzero(rate < -OPT_TOL)
        if blocking.size == 0:
            raise UnboundedError("objective is unbounded below")
        steps = slack[blocking] / -rate[blocking]
        best = steps.min()
        tied = blocking[steps <= best + FEAS_TOL * max(1.0, abs(best))]
        basis[r] = int(tied.min())
        pivots += 1


def simplex_solve(lp: LinearProgram, max_pivots: int | None = None) -> LPSolution:
    """Exact optimum of ``lp``; raises InfeasibleError or UnboundedError."""
    n, d = lp.n, lp.d
    lo = np.where(np.isfinite(lp.lo), lp.lo, -ARTIFICIAL_BOUND)
    hi = np.where(np.isfinite(lp.hi), lp.hi, ARTIFICIAL_BOUND)
    artificial = np.concatenate([~np.isfinite(lp.lo), ~np.isfinite(lp.hi)])
    eye = np.eye(d)
    # rows: A (n), x >= lo (d), -x >= -hi (d)
    G = np.vstack([lp.A, eye, -eye])
    h = np.concatenate([lp.b, lo, -hi])
    m = G.shape[0]
    if max_pivots is None:
        max_pivots = 50 * (m + d + 1)

    # Phase 1: min t  s.t.  A x + t >= b, box, t >= 0; start at the lo corner.
    t_col = np.concatenate([np.ones(n), np.zeros(2 * d)])
    G1 = np.vstack([np.column_stack([G, t_col]), np.eye(d + 1)[-1]])
    h1 = np.concatenate([h, [0.0]])
    c1 = np.zeros(d + 1)
    c1[-1] = 1.0
    viol = lp.b - lp.A @ lo if n else np.zeros(0)
    basis = list(range(n, n + d))
    if n and viol.max() > 0:
        basis.append(int(np.argmax(viol)))
    else:
        basis.append(m)
    z1, basis, _, p1 = _pivot_loop(G1, h1, c1, basis, max_pivots)
    if z1[-1] > FEAS_TOL * max(1.0, float(np.abs(h).max(initial=0.0))):
        raise InfeasibleError(f"constraints are infeasible (phase-1 residual {z1[-1]:.3g})")

    # Drop the t >= 0 row from the basis, swapping it in first if t = 0 degenerately.
    if m not in basis:
        Binv = np.linalg.inv(G1[basis])
        r = int(np.argmax(np.abs(Binv[-1, :])))
        basis[r] = m
    basis = [i for i in basis if i != m]

    z, basis, lam, p2 = _pivot_loop(G, h, lp.g, basis, max_pivots)
    for r, i in enumerate(basis):
        if i >= n and artificial[i - n] and lam[r] > OPT_TOL:
            raise UnboundedError("objective is unbounded below")
    return LPSolution(z, float(lp.g @ z), p1 + p2, basis)
